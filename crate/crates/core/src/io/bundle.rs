//! JSON analysis bundles.
//!
//! ```json
//! { "name": "st-plus",
//!   "tree": { "root": "A0", "nodes": ["A0", "A1"],
//!             "edges": [ { "from": "A0", "to": "A1",
//!                          "step": { "name": "cloneNode", "args": ["Rebook"] } } ] },
//!   "sets": [ { "label": "negotiation",
//!               "objective_names": ["m1", "p1"],
//!               "solutions": [ { "id": "a1", "objectives": [0.4, 1.2], "node": "A1" } ] } ] }
//! ```
//!
//! A solution carries either an explicit `sequence` or a `node` of the tree.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::encoding::extract_sequences;
use crate::error::{Error, Result};
use crate::model::{validate_solution_set, ArchitectureSolution, SearchTree, SolutionSet, TransformationStep, TreeEdge};

/// Everything needed for one analysis: the sets to compare and, optionally,
/// the search tree their solutions came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisBundle {
    pub name: String,
    pub sets: Vec<SolutionSet>,
    pub tree: Option<SearchTree>,
    pub provenance: Option<String>,
}

/// A parsed bundle and the unknown fields that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedBundle {
    pub bundle: AnalysisBundle,
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RawBundle {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tree: Option<RawTree>,
    sets: Vec<RawSet>,
}

#[derive(Serialize, Deserialize)]
struct RawTree {
    root: String,
    nodes: Vec<String>,
    edges: Vec<RawEdge>,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    from: String,
    to: String,
    step: TransformationStep,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    label: String,
    objective_names: Vec<String>,
    solutions: Vec<RawSolution>,
}

#[derive(Serialize, Deserialize)]
struct RawSolution {
    id: String,
    objectives: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sequence: Option<Vec<TransformationStep>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    node: Option<String>,
}

const BUNDLE_FIELDS: &[&str] = &["name", "provenance", "tree", "sets"];
const TREE_FIELDS: &[&str] = &["root", "nodes", "edges"];
const EDGE_FIELDS: &[&str] = &["from", "to", "step"];
const STEP_FIELDS: &[&str] = &["name", "args"];
const SET_FIELDS: &[&str] = &["label", "objective_names", "solutions"];
const SOLUTION_FIELDS: &[&str] = &["id", "objectives", "sequence", "node"];

/// Parses and fully validates a bundle. Any set that breaks a
/// [`SolutionSet`] invariant is rejected with the path of the offending
/// solution.
pub fn parse_bundle(text: &str) -> Result<ParsedBundle> {
    let parsed = parse_bundle_unchecked(text)?;
    for (si, set) in parsed.bundle.sets.iter().enumerate() {
        if let Some(v) = validate_solution_set(set).into_iter().next() {
            let path = match v.solution_index {
                Some(k) => format!("sets[{si}].solutions[{k}]"),
                None => format!("sets[{si}]"),
            };
            return Err(Error::schema(path, v.to_string()));
        }
    }
    Ok(parsed)
}

/// Parses the structure (types, tree, node references, label uniqueness)
/// without checking set invariants; see
/// [`validate_solution_set`](crate::model::validate_solution_set).
pub fn parse_bundle_unchecked(text: &str) -> Result<ParsedBundle> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::schema("$", e.to_string()))?;
    let mut warnings = Vec::new();
    collect_unknown_fields(&value, &mut warnings);
    let raw: RawBundle = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(path, e.into_inner().to_string())
    })?;

    let tree = raw.tree.map(|t| SearchTree {
        root: t.root,
        nodes: t.nodes,
        edges: t
            .edges
            .into_iter()
            .map(|e| TreeEdge { from: e.from, to: e.to, step: e.step })
            .collect(),
    });
    if let Some(t) = &tree {
        let problems = t.validate();
        if !problems.is_empty() {
            return Err(Error::schema("tree", problems.join("; ")));
        }
    }
    if raw.sets.is_empty() {
        return Err(Error::schema("sets", "a bundle needs at least one set"));
    }

    let mut labels = HashSet::new();
    let mut sets = Vec::with_capacity(raw.sets.len());
    for (si, set) in raw.sets.into_iter().enumerate() {
        if !labels.insert(set.label.clone()) {
            return Err(Error::schema(format!("sets[{si}].label"), format!("duplicate set label {:?}", set.label)));
        }
        let node_refs: Vec<(usize, &str)> = set
            .solutions
            .iter()
            .enumerate()
            .filter_map(|(k, s)| s.node.as_deref().map(|n| (k, n)))
            .collect();
        for (k, s) in set.solutions.iter().enumerate() {
            let path = format!("sets[{si}].solutions[{k}]");
            match (&s.sequence, &s.node, &tree) {
                (Some(_), Some(_), _) => {
                    return Err(Error::schema(path, "solution has both \"sequence\" and \"node\""));
                }
                (None, None, _) => {
                    return Err(Error::schema(path, "solution needs a \"sequence\" or a \"node\""));
                }
                (None, Some(_), None) => {
                    return Err(Error::schema(format!("{path}.node"), "node reference but the bundle has no tree"));
                }
                (None, Some(n), Some(t)) if !t.contains(n) => {
                    return Err(Error::schema(format!("{path}.node"), format!("unknown node {n:?}")));
                }
                _ => {}
            }
        }
        let mut resolved = match &tree {
            Some(t) if !node_refs.is_empty() => {
                let ids: Vec<&str> = node_refs.iter().map(|(_, n)| *n).collect();
                extract_sequences(t, &ids)?.into_iter()
            }
            _ => Vec::new().into_iter(),
        };
        let solutions = set
            .solutions
            .into_iter()
            .map(|s| {
                let sequence = match s.sequence {
                    Some(seq) => seq,
                    None => resolved.next().expect("one resolved path per node reference"),
                };
                ArchitectureSolution::new(s.id, s.objectives, sequence)
            })
            .collect();
        sets.push(SolutionSet::new(set.label, set.objective_names, solutions));
    }

    Ok(ParsedBundle {
        bundle: AnalysisBundle {
            name: raw.name,
            sets,
            tree,
            provenance: raw.provenance,
        },
        warnings,
    })
}

/// Serializes a bundle with explicit sequences for every solution.
pub fn bundle_to_json(bundle: &AnalysisBundle) -> String {
    let raw = RawBundle {
        name: bundle.name.clone(),
        provenance: bundle.provenance.clone(),
        tree: bundle.tree.as_ref().map(|t| RawTree {
            root: t.root.clone(),
            nodes: t.nodes.clone(),
            edges: t
                .edges
                .iter()
                .map(|e| RawEdge { from: e.from.clone(), to: e.to.clone(), step: e.step.clone() })
                .collect(),
        }),
        sets: bundle
            .sets
            .iter()
            .map(|s| RawSet {
                label: s.label.clone(),
                objective_names: s.objective_names.clone(),
                solutions: s
                    .solutions
                    .iter()
                    .map(|x| RawSolution {
                        id: x.id.clone(),
                        objectives: x.objectives.clone(),
                        sequence: Some(x.sequence.clone()),
                        node: None,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("bundle serializes");
    out.push('\n');
    out
}

fn collect_unknown_fields(root: &Value, warnings: &mut Vec<String>) {
    fn check(v: &Value, path: &str, known: &[&str], warnings: &mut Vec<String>) {
        if let Value::Object(map) = v {
            for key in map.keys() {
                if !known.contains(&key.as_str()) {
                    let at = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                    warnings.push(format!("ignoring unknown field {at}"));
                }
            }
        }
    }
    fn items<'a>(v: &'a Value, key: &str) -> impl Iterator<Item = (usize, &'a Value)> {
        v.get(key).and_then(Value::as_array).into_iter().flatten().enumerate()
    }
    fn check_steps(v: &Value, path: &str, warnings: &mut Vec<String>) {
        for (i, step) in items(v, "sequence") {
            check(step, &format!("{path}.sequence[{i}]"), STEP_FIELDS, warnings);
        }
    }

    check(root, "", BUNDLE_FIELDS, warnings);
    if let Some(tree) = root.get("tree") {
        check(tree, "tree", TREE_FIELDS, warnings);
        for (i, e) in items(tree, "edges") {
            let p = format!("tree.edges[{i}]");
            check(e, &p, EDGE_FIELDS, warnings);
            if let Some(step) = e.get("step") {
                check(step, &format!("{p}.step"), STEP_FIELDS, warnings);
            }
        }
    }
    for (si, set) in items(root, "sets") {
        let p = format!("sets[{si}]");
        check(set, &p, SET_FIELDS, warnings);
        for (k, sol) in items(set, "solutions") {
            let sp = format!("{p}.solutions[{k}]");
            check(sol, &sp, SOLUTION_FIELDS, warnings);
            check_steps(sol, &sp, warnings);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{ "name": "m", "sets": [ { "label": "s", "objective_names": ["rt"],
        "solutions": [ { "id": "a0", "objectives": [0.0], "sequence": [] } ] } ] }"#;

    #[test]
    fn minimal_document() {
        let p = parse_bundle(MINIMAL).unwrap();
        assert!(p.warnings.is_empty());
        assert_eq!(p.bundle.sets[0].solutions[0].id, "a0");
        assert!(p.bundle.tree.is_none());
    }

    const TREE_DOC: &str = r#"{
      "name": "t",
      "tree": { "root": "A0", "nodes": ["A0", "A1", "A2", "A3", "A4"],
        "edges": [
          { "from": "A0", "to": "A1", "step": { "name": "clone", "args": ["Rebook"] } },
          { "from": "A0", "to": "A2", "step": { "name": "move", "args": ["Exporter", "N2"] } },
          { "from": "A1", "to": "A3", "step": { "name": "replace", "args": ["Exporter", "AltExporter"] } },
          { "from": "A3", "to": "A4", "step": { "name": "clone" } } ] },
      "sets": [ { "label": "s", "objective_names": ["rt", "cpu"], "solutions": [
          { "id": "x", "objectives": [1, 2], "node": "A4" },
          { "id": "y", "objectives": [2, 1], "node": "A2" },
          { "id": "z", "objectives": [0, 0], "node": "A0" },
          { "id": "w", "objectives": [3, 3], "sequence": [ { "name": "clone", "args": ["Rebook"] } ] } ] } ] }"#;

    #[test]
    fn node_references_resolve_to_paths() {
        let p = parse_bundle(TREE_DOC).unwrap();
        let sols = &p.bundle.sets[0].solutions;
        let expected_x = vec![
            TransformationStep::new("clone", ["Rebook"]),
            TransformationStep::new("replace", ["Exporter", "AltExporter"]),
            TransformationStep::new("clone", Vec::<String>::new()),
        ];
        assert_eq!(sols[0].sequence, expected_x);
        assert_eq!(sols[1].sequence, vec![TransformationStep::new("move", ["Exporter", "N2"])]);
        assert!(sols[2].sequence.is_empty());
        assert_eq!(sols[3].sequence.len(), 1);
    }

    #[test]
    fn missing_node_names_node_and_path() {
        let doc = TREE_DOC.replace(r#""node": "A2""#, r#""node": "x9""#);
        let err = parse_bundle(&doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("x9") && msg.contains("sets[0].solutions[1].node"), "{msg}");
    }

    #[test]
    fn sequence_and_node_conflict() {
        let doc = TREE_DOC.replace(r#""node": "A2""#, r#""node": "A2", "sequence": []"#);
        assert!(parse_bundle(&doc).unwrap_err().to_string().contains("both"));
    }

    #[test]
    fn type_errors_carry_json_path() {
        let doc = MINIMAL.replace("[0.0]", r#"["fast"]"#);
        match parse_bundle(&doc).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "sets[0].solutions[0].objectives[0]"),
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(parse_bundle("{ nope"), Err(Error::Schema { .. })));
    }

    #[test]
    fn unknown_fields_warn() {
        let doc = MINIMAL.replace(r#""id": "a0""#, r#""id": "a0", "colour": "red""#).replace(r#""name": "m""#, r#""name": "m", "v": 2"#);
        let p = parse_bundle(&doc).unwrap();
        assert_eq!(
            p.warnings,
            vec!["ignoring unknown field v", "ignoring unknown field sets[0].solutions[0].colour"]
        );
    }

    #[test]
    fn invariants_are_enforced() {
        let doc = MINIMAL.replace(r#""objectives": [0.0]"#, r#""objectives": [0.0, 1.0]"#);
        assert!(parse_bundle_unchecked(&doc).is_ok());
        match parse_bundle(&doc).unwrap_err() {
            Error::Schema { path, message } => {
                assert_eq!(path, "sets[0].solutions[0]");
                assert!(message.contains("objective-arity"));
            }
            e => panic!("unexpected {e}"),
        }
        let dup = MINIMAL.replace(r#"[ { "label""#, r#"[ { "label": "s", "objective_names": [], "solutions": [] }, { "label""#);
        assert!(parse_bundle(&dup).unwrap_err().to_string().contains("duplicate set label"));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let p = parse_bundle(TREE_DOC).unwrap();
        let again = parse_bundle(&bundle_to_json(&p.bundle)).unwrap();
        assert_eq!(again.bundle, p.bundle);
        assert!(again.warnings.is_empty());
    }
}
