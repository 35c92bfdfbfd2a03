use proptest::prelude::*;

use archspread::io::{bundle_to_json, parse_bundle, parse_bundle_unchecked, AnalysisBundle};
use archspread::model::{validate_solution_set, ArchitectureSolution, SolutionSet, TransformationStep};

fn step() -> impl Strategy<Value = TransformationStep> {
    ("[a-zA-Z]{1,6}", prop::collection::vec("[a-z0-9]{1,4}", 0..3))
        .prop_map(|(name, args)| TransformationStep::new(name, args))
}

fn solution_set(label: String) -> impl Strategy<Value = SolutionSet> {
    (1usize..4).prop_flat_map(move |o| {
        let label = label.clone();
        prop::collection::vec(
            (prop::collection::vec(-1e6f64..1e6, o), prop::collection::vec(step(), 0..5)),
            1..6,
        )
        .prop_map(move |rows| {
            let solutions = rows
                .into_iter()
                .enumerate()
                .map(|(i, (objs, seq))| ArchitectureSolution::new(format!("s{i}"), objs, seq))
                .collect();
            SolutionSet::new(label.clone(), (0..o).map(|k| format!("f{k}")).collect(), solutions)
        })
    })
}

fn bundle() -> impl Strategy<Value = AnalysisBundle> {
    (1usize..4).prop_flat_map(|k| {
        (0..k)
            .map(|i| solution_set(format!("set-{i}")))
            .collect::<Vec<_>>()
            .prop_map(|sets| AnalysisBundle { name: "prop".into(), sets, tree: None, provenance: None })
    })
}

proptest! {
    #[test]
    fn write_parse_is_identity(b in bundle()) {
        let parsed = parse_bundle(&bundle_to_json(&b)).unwrap();
        prop_assert!(parsed.warnings.is_empty());
        prop_assert_eq!(parsed.bundle, b);
    }

    /// Checked parsing fails exactly when the unchecked bundle has violations.
    #[test]
    fn checked_parse_agrees_with_validation(b in bundle(), dup in any::<bool>(), blank in any::<bool>()) {
        let mut b = b;
        if dup && b.sets[0].solutions.len() > 1 {
            let id = b.sets[0].solutions[0].id.clone();
            b.sets[0].solutions[1].id = id;
        }
        if blank {
            if let Some(step) = b.sets.last_mut().unwrap().solutions[0].sequence.first_mut() {
                step.name.clear();
            }
        }
        let json = bundle_to_json(&b);
        let unchecked = parse_bundle_unchecked(&json).unwrap();
        let violations: usize = unchecked.bundle.sets.iter().map(|s| validate_solution_set(s).len()).sum();
        prop_assert_eq!(parse_bundle(&json).is_ok(), violations == 0);
    }
}
