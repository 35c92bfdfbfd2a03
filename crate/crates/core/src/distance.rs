//! Architectural distance between transformation sequences.
//!
//! Sequences are compared position by position. At each position the name
//! channel contributes 0 or 1 (edit distance between single symbols) and the
//! argument channel contributes the Levenshtein distance between the argument
//! lists divided by the longer list's length. The two channels are combined
//! with weights summing to one, so every position contributes a value in
//! `[0, 1]` and a pair of sequences padded to length `L` is at most `L` apart.
//! The shorter sequence is tail-padded with a PAD step that sits at distance 1
//! from every real step.

use rayon::prelude::*;

use crate::encoding::{encode_sequence, EncodedStep, EncodingTable};
use crate::error::{Error, Result};
use crate::model::{DistanceMatrix, SolutionSet};

const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceWeights {
    w_pred: f64,
    w_args: f64,
}

impl DistanceWeights {
    pub fn new(w_pred: f64, w_args: f64) -> Result<Self> {
        let in_unit = |w: f64| w.is_finite() && (0.0..=1.0).contains(&w);
        if !in_unit(w_pred) || !in_unit(w_args) {
            return Err(Error::InvalidArgument(format!(
                "weights must lie in [0, 1], got w_pred={w_pred}, w_args={w_args}"
            )));
        }
        if (w_pred + w_args - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "weights must sum to 1, got w_pred + w_args = {}",
                w_pred + w_args
            )));
        }
        Ok(DistanceWeights { w_pred, w_args })
    }

    /// Name weight `w_pred`; the argument weight is `1 - w_pred`.
    pub fn from_pred(w_pred: f64) -> Result<Self> {
        Self::new(w_pred, 1.0 - w_pred)
    }

    pub fn w_pred(&self) -> f64 {
        self.w_pred
    }

    pub fn w_args(&self) -> f64 {
        self.w_args
    }
}

impl Default for DistanceWeights {
    fn default() -> Self {
        DistanceWeights { w_pred: 0.5, w_args: 0.5 }
    }
}

/// Unit-cost edit distance (insert, delete, substitute) between two slices.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let subst = prev[j] + usize::from(x != y);
            cur[j + 1] = subst.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein distance divided by the longer length; 0 for two empty slices.
pub fn normalized_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        0.0
    } else {
        levenshtein(a, b) as f64 / longest as f64
    }
}

/// Distance between two aligned positions. `None` stands for the PAD step.
pub fn step_distance(a: Option<&EncodedStep>, b: Option<&EncodedStep>, w: DistanceWeights) -> Result<f64> {
    match (a, b) {
        (None, None) => Ok(0.0),
        (None, Some(_)) | (Some(_), None) => Ok(1.0),
        (Some(a), Some(b)) => {
            if a.table != b.table {
                return Err(Error::MixedTable);
            }
            Ok(encoded_step_distance(a, b, w))
        }
    }
}

fn encoded_step_distance(a: &EncodedStep, b: &EncodedStep, w: DistanceWeights) -> f64 {
    let pred = if a.name == b.name { 0.0 } else { 1.0 };
    let args = normalized_levenshtein(&a.args, &b.args);
    if pred == args {
        // weights sum to one
        pred
    } else {
        (pred * w.w_pred + args * w.w_args).min(1.0)
    }
}

/// Sum of aligned step distances after tail-padding the shorter sequence.
pub fn sequence_distance(a: &[EncodedStep], b: &[EncodedStep], w: DistanceWeights) -> Result<f64> {
    if let Some(first) = a.iter().chain(b.iter()).next() {
        if a.iter().chain(b.iter()).any(|s| s.table != first.table) {
            return Err(Error::MixedTable);
        }
    }
    Ok(sequence_distance_unchecked(a, b, w))
}

fn sequence_distance_unchecked(a: &[EncodedStep], b: &[EncodedStep], w: DistanceWeights) -> f64 {
    let common = a.len().min(b.len());
    let padded = (a.len().max(b.len()) - common) as f64;
    let mut total = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        total += encoded_step_distance(x, y, w);
    }
    total + padded
}

/// Pairwise distances between every solution of `set`. `max_d` is the padded
/// length, the largest distance two sequences of the set can attain.
pub fn distance_matrix(set: &SolutionSet, table: &EncodingTable, w: DistanceWeights) -> Result<DistanceMatrix> {
    let encoded = set
        .solutions
        .iter()
        .map(|s| encode_sequence(&s.sequence, table).map_err(|e| e.in_solution(&s.id)))
        .collect::<Result<Vec<_>>>()?;
    let ids = set.solutions.iter().map(|s| s.id.clone()).collect();
    Ok(distance_matrix_encoded(ids, &encoded, w))
}

/// Distance matrix over already-encoded sequences, all from one table.
pub fn distance_matrix_encoded(ids: Vec<String>, seqs: &[Vec<EncodedStep>], w: DistanceWeights) -> DistanceMatrix {
    let n = seqs.len();
    assert_eq!(ids.len(), n, "one id per sequence");
    let l_pad = seqs.iter().map(Vec::len).max().unwrap_or(0);

    // Each entry is computed on its own, so row parallelism cannot change bits.
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| sequence_distance_unchecked(&seqs[i], &seqs[j], w))
                .collect()
        })
        .collect();

    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DistanceMatrix {
        ids,
        values,
        l_pad,
        max_d: l_pad as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_encoding_from_steps, encode_step};
    use crate::model::{ArchitectureSolution, TransformationStep};
    use proptest::prelude::*;

    fn step(name: &str, args: &[&str]) -> TransformationStep {
        TransformationStep::new(name, args.iter().copied())
    }

    fn table_for(steps: &[TransformationStep]) -> EncodingTable {
        build_encoding_from_steps(steps.iter())
    }

    fn enc(steps: &[TransformationStep], t: &EncodingTable) -> Vec<EncodedStep> {
        steps.iter().map(|s| encode_step(s, t).unwrap()).collect()
    }

    // Exponential recursion over edit scripts; fine for short inputs.
    fn naive_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
        match (a.split_first(), b.split_first()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((x, ra)), Some((y, rb))) => {
                let sub = naive_levenshtein(ra, rb) + usize::from(x != y);
                let del = naive_levenshtein(ra, b) + 1;
                let ins = naive_levenshtein(a, rb) + 1;
                sub.min(del).min(ins)
            }
        }
    }

    #[test]
    fn weights_validation() {
        assert!(DistanceWeights::new(0.3, 0.7).is_ok());
        assert!(DistanceWeights::new(0.3, 0.6).is_err());
        assert!(DistanceWeights::new(-0.1, 1.1).is_err());
        assert!(DistanceWeights::from_pred(f64::NAN).is_err());
        assert_eq!(DistanceWeights::default().w_args(), 0.5);
    }

    #[test]
    fn step_endpoints() {
        let steps = [step("a", &["x", "y"]), step("b", &["z"])];
        let t = table_for(&steps);
        let e = enc(&steps, &t);
        let w = DistanceWeights::default();
        assert_eq!(step_distance(Some(&e[0]), Some(&e[0]), w).unwrap(), 0.0);
        assert_eq!(step_distance(Some(&e[0]), Some(&e[1]), w).unwrap(), 1.0);
        assert_eq!(step_distance(None, Some(&e[1]), w).unwrap(), 1.0);
        assert_eq!(step_distance(None, None, w).unwrap(), 0.0);
    }

    #[test]
    fn same_name_one_arg_differs() {
        let steps = [step("m", &["x", "y"]), step("m", &["x", "z"])];
        let t = table_for(&steps);
        let e = enc(&steps, &t);
        assert_eq!(naive_levenshtein(&e[0].args, &e[1].args), 1);
        let d = step_distance(Some(&e[0]), Some(&e[1]), DistanceWeights::default()).unwrap();
        assert_eq!(d, 0.25);
    }

    #[test]
    fn one_empty_arg_list_is_fully_different() {
        let steps = [step("m", &[]), step("m", &["x", "y"])];
        let t = table_for(&steps);
        let e = enc(&steps, &t);
        let w = DistanceWeights::from_pred(0.0).unwrap();
        assert_eq!(step_distance(Some(&e[0]), Some(&e[1]), w).unwrap(), 1.0);
    }

    #[test]
    fn mixed_tables_are_rejected() {
        let t1 = table_for(&[step("a", &[])]);
        let t2 = table_for(&[step("b", &[])]);
        let a = encode_step(&step("a", &[]), &t1).unwrap();
        let b = encode_step(&step("b", &[]), &t2).unwrap();
        let w = DistanceWeights::default();
        assert_eq!(step_distance(Some(&a), Some(&b), w), Err(Error::MixedTable));
        assert_eq!(sequence_distance(&[a], &[b], w), Err(Error::MixedTable));
    }

    #[test]
    fn sequence_examples() {
        let steps = [
            step("a", &["x"]),
            step("b", &["y"]),
            step("c", &["z"]),
            step("d", &["u"]),
            step("e", &["v"]),
            step("f", &["q"]),
        ];
        let t = table_for(&steps);
        let e = enc(&steps, &t);
        let w = DistanceWeights::from_pred(0.3).unwrap();
        assert_eq!(sequence_distance(&e[..3], &e[..3], w).unwrap(), 0.0);
        // brute force per position
        let per_pos: f64 = (0..3).map(|k| step_distance(Some(&e[k]), Some(&e[k + 3]), w).unwrap()).sum();
        assert_eq!(per_pos, 3.0);
        assert_eq!(sequence_distance(&e[..3], &e[3..], w).unwrap(), 3.0);
        assert_eq!(sequence_distance(&e[..1], &[], w).unwrap(), 1.0);
        assert_eq!(sequence_distance(&[], &[], w).unwrap(), 0.0);
    }

    #[test]
    fn matrix_examples() {
        let w = DistanceWeights::default();
        let single = SolutionSet::new(
            "s",
            vec![],
            vec![ArchitectureSolution::new("a", vec![], vec![step("a", &["x"]), step("b", &[])])],
        );
        let t = crate::encoding::build_encoding(std::slice::from_ref(&single));
        let dm = distance_matrix(&single, &t, w).unwrap();
        assert_eq!(dm.values, vec![0.0]);
        assert_eq!(dm.max_d, 2.0);

        let seq = vec![step("a", &["x"])];
        let twins = SolutionSet::new(
            "t",
            vec![],
            vec![
                ArchitectureSolution::new("a", vec![], seq.clone()),
                ArchitectureSolution::new("b", vec![], seq),
            ],
        );
        let t = crate::encoding::build_encoding(std::slice::from_ref(&twins));
        assert_eq!(distance_matrix(&twins, &t, w).unwrap().values, vec![0.0; 4]);
    }

    #[test]
    fn lengths_one_two_three() {
        let s1 = vec![step("add", &["A"])];
        let s2 = vec![step("add", &["A", "B"]), step("move", &["B"])];
        let s3 = vec![step("rm", &["A"]), step("move", &["C"]), step("add", &[])];
        let set = SolutionSet::new(
            "s",
            vec![],
            vec![
                ArchitectureSolution::new("p", vec![], s1),
                ArchitectureSolution::new("q", vec![], s2),
                ArchitectureSolution::new("r", vec![], s3),
            ],
        );
        let t = crate::encoding::build_encoding(std::slice::from_ref(&set));
        let dm = distance_matrix(&set, &t, DistanceWeights::default()).unwrap();
        assert_eq!(dm.l_pad, 3);
        assert!(dm.check_invariants().is_empty());
        // p vs q: pos1 same name, args [A] vs [A,B] -> 0.5*0.5 = 0.25; pos2 PAD -> 1
        assert_eq!(dm.get(0, 1), 1.25);
        // p vs r: pos1 names differ, args equal -> 0.5; pos2, pos3 PAD -> 2
        assert_eq!(dm.get(0, 2), 2.5);
        // q vs r: pos1 names differ, [A,B] vs [A] -> 0.5+0.25; pos2 same name,
        // [B] vs [C] -> 0.5; pos3 PAD -> 1
        assert_eq!(dm.get(1, 2), 2.25);
    }

    fn arb_steps(max_len: usize) -> impl Strategy<Value = Vec<(u8, Vec<u8>)>> {
        prop::collection::vec((0u8..3, prop::collection::vec(0u8..3, 0..4)), 0..max_len)
    }

    fn to_steps(raw: &[(u8, Vec<u8>)]) -> Vec<TransformationStep> {
        raw.iter()
            .map(|(n, a)| TransformationStep::new(format!("n{n}"), a.iter().map(|x| format!("a{x}"))))
            .collect()
    }

    proptest! {
        #[test]
        fn levenshtein_matches_naive(a in prop::collection::vec(0u8..3, 0..6), b in prop::collection::vec(0u8..3, 0..6)) {
            prop_assert_eq!(levenshtein(&a, &b), naive_levenshtein(&a, &b));
        }

        #[test]
        fn symmetric_bounded_and_identity(a in arb_steps(5), b in arb_steps(5), wp in 0.0f64..=1.0) {
            let (sa, sb) = (to_steps(&a), to_steps(&b));
            let t = table_for(&[sa.clone(), sb.clone()].concat());
            let (ea, eb) = (enc(&sa, &t), enc(&sb, &t));
            let w = DistanceWeights::from_pred(wp).unwrap();
            let d = sequence_distance(&ea, &eb, w).unwrap();
            prop_assert_eq!(d, sequence_distance(&eb, &ea, w).unwrap());
            prop_assert!(d >= 0.0 && d <= ea.len().max(eb.len()) as f64);
            prop_assert_eq!(sequence_distance(&ea, &ea, w).unwrap(), 0.0);
            if wp > 0.0 && wp < 1.0 {
                prop_assert_eq!(d == 0.0, sa == sb);
            }
        }

        #[test]
        fn degenerate_weights(a in arb_steps(5), b in arb_steps(5)) {
            let (sa, sb) = (to_steps(&a), to_steps(&b));
            let t = table_for(&[sa.clone(), sb.clone()].concat());
            let (ea, eb) = (enc(&sa, &t), enc(&sb, &t));
            let len = sa.len().max(sb.len());

            // names only: Hamming distance over padded name strings
            let names = |s: &[TransformationStep]| -> Vec<Option<String>> {
                (0..len).map(|k| s.get(k).map(|x| x.name.clone())).collect()
            };
            let hamming = names(&sa).iter().zip(names(&sb)).filter(|(x, y)| *x != y).count();
            let d = sequence_distance(&ea, &eb, DistanceWeights::from_pred(1.0).unwrap()).unwrap();
            prop_assert_eq!(d, hamming as f64);

            // args only: sum of normalized argument Levenshtein, PAD counting 1
            let expected: f64 = (0..len)
                .map(|k| match (sa.get(k), sb.get(k)) {
                    (Some(x), Some(y)) => {
                        let m = x.args.len().max(y.args.len());
                        if m == 0 { 0.0 } else { naive_levenshtein(&x.args, &y.args) as f64 / m as f64 }
                    }
                    _ => 1.0,
                })
                .sum();
            let d = sequence_distance(&ea, &eb, DistanceWeights::from_pred(0.0).unwrap()).unwrap();
            prop_assert!((d - expected).abs() < 1e-12);
        }
    }
}
