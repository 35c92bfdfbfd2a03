//! Seeded synthetic search trees and solution sets, plus straightforward
//! reference computations used to cross-check the indicators.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distance::DistanceWeights;
use crate::encoding::{extract_sequences, EncodingTable};
use crate::error::{Error, Result};
use crate::io::AnalysisBundle;
use crate::model::{ArchitectureSolution, SearchTree, SolutionSet, TransformationStep, TreeEdge};

pub const OBJECTIVE_NAMES: [&str; 2] = ["response_time", "cpu_utilization"];

/// Complete tree with `branching` children per internal node down to
/// `depth`. Node ids are `A0` (root), `A1`, ... in breadth-first order; each
/// edge carries a step with a name drawn from `op0..op{name_vocab}` and one or
/// two arguments drawn from `el0..el{arg_vocab}`.
pub fn generate_tree(seed: u64, depth: usize, branching: usize, name_vocab: usize, arg_vocab: usize) -> SearchTree {
    assert!(branching >= 1 && name_vocab >= 1 && arg_vocab >= 1, "shape parameters must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec!["A0".to_string()];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * branching);
        for &parent in &frontier {
            for _ in 0..branching {
                let child = nodes.len();
                nodes.push(format!("A{child}"));
                let n_args = rng.random_range(1..=2);
                let step = TransformationStep::new(
                    format!("op{}", rng.random_range(0..name_vocab)),
                    (0..n_args).map(|_| format!("el{}", rng.random_range(0..arg_vocab))),
                );
                edges.push(TreeEdge {
                    from: nodes[parent].clone(),
                    to: nodes[child].clone(),
                    step,
                });
                next.push(child);
            }
        }
        frontier = next;
    }
    SearchTree {
        root: "A0".into(),
        nodes,
        edges,
    }
}

/// Samples `k_sets` sets of `n_per_set` distinct tree nodes each.
///
/// With `dispersion` 0 every sample comes from one subtree (a deepest node
/// whose subtree still holds `n_per_set` nodes); with 1 samples are uniform
/// over the whole tree; in between each draw picks the whole tree with
/// probability `dispersion`. Objective values are a fixed function of the
/// node's sequence plus small seeded noise.
pub fn generate_sets(
    tree: &SearchTree,
    seed: u64,
    k_sets: usize,
    n_per_set: usize,
    dispersion: f64,
) -> Result<Vec<SolutionSet>> {
    generate_sets_with(tree, seed, &vec![dispersion; k_sets], n_per_set)
}

/// Like [`generate_sets`], one set per entry of `dispersions`.
pub fn generate_sets_with(
    tree: &SearchTree,
    seed: u64,
    dispersions: &[f64],
    n_per_set: usize,
) -> Result<Vec<SolutionSet>> {
    if tree.nodes.len() < n_per_set {
        return Err(Error::InsufficientNodes {
            available: tree.nodes.len(),
            requested: n_per_set,
        });
    }
    if let Some(d) = dispersions.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(Error::InvalidArgument(format!("dispersion must lie in [0, 1], got {d}")));
    }
    let problems = tree.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidArgument(format!("invalid tree: {}", problems.join("; "))));
    }

    let subtrees = subtree_members(tree);
    let depths = tree.depths();
    let max_depth = tree
        .nodes
        .iter()
        .filter(|n| subtrees[n.as_str()].len() >= n_per_set)
        .map(|n| depths[n.as_str()])
        .max()
        .unwrap_or(0);
    let anchors: Vec<&str> = tree
        .nodes
        .iter()
        .map(String::as_str)
        .filter(|n| depths[n] == max_depth && subtrees[n].len() >= n_per_set)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = Vec::with_capacity(dispersions.len());
    for (k, &dispersion) in dispersions.iter().enumerate() {
        let anchor = anchors[rng.random_range(0..anchors.len())];
        let region = &subtrees[anchor];
        let mut taken: HashSet<&str> = HashSet::new();
        let mut picked: Vec<&str> = Vec::with_capacity(n_per_set);
        while picked.len() < n_per_set {
            let wide = rng.random::<f64>() < dispersion;
            let pool: Vec<&str> = if wide {
                tree.nodes.iter().map(String::as_str).filter(|n| !taken.contains(n)).collect()
            } else {
                let local: Vec<&str> = region.iter().copied().filter(|n| !taken.contains(n)).collect();
                if local.is_empty() {
                    tree.nodes.iter().map(String::as_str).filter(|n| !taken.contains(n)).collect()
                } else {
                    local
                }
            };
            let node = pool[rng.random_range(0..pool.len())];
            taken.insert(node);
            picked.push(node);
        }

        let sequences = extract_sequences(tree, &picked)?;
        let solutions = picked
            .iter()
            .zip(sequences)
            .map(|(id, seq)| {
                let objectives = (0..OBJECTIVE_NAMES.len())
                    .map(|j| objective_value(&seq, j) + rng.random_range(-0.05..0.05))
                    .collect();
                ArchitectureSolution::new(*id, objectives, seq)
            })
            .collect();
        sets.push(SolutionSet::new(
            format!("set-{k}"),
            OBJECTIVE_NAMES.iter().map(|s| s.to_string()).collect(),
            solutions,
        ));
    }
    Ok(sets)
}

fn subtree_members(tree: &SearchTree) -> HashMap<&str, Vec<&str>> {
    let children = tree.children();
    let mut out = HashMap::new();
    for n in &tree.nodes {
        let mut members = vec![n.as_str()];
        let mut i = 0;
        while i < members.len() {
            for e in children.get(members[i]).into_iter().flatten() {
                members.push(e.to.as_str());
            }
            i += 1;
        }
        members.sort_unstable();
        members.dedup();
        out.insert(n.as_str(), members);
    }
    out
}

fn token_value(token: &str, objective: usize) -> f64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ objective as u64;
    for b in token.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    (h % 1000) as f64 / 1000.0
}

fn objective_value(seq: &[TransformationStep], objective: usize) -> f64 {
    1.0 + seq
        .iter()
        .map(|s| token_value(&s.name, objective) + 0.5 * s.args.iter().map(|a| token_value(a, objective)).sum::<f64>())
        .sum::<f64>()
}

/// A complete bundle for the `synth` command: one tree sized to hold twice
/// `n_per_set` nodes, and `k_sets` sets whose dispersion rises from 0 to 1.
pub fn synth_bundle(seed: u64, k_sets: usize, n_per_set: usize) -> Result<AnalysisBundle> {
    if k_sets == 0 || n_per_set == 0 {
        return Err(Error::InvalidArgument("--sets and --n must be at least 1".into()));
    }
    const BRANCHING: usize = 3;
    let mut depth = 3;
    while tree_size(depth, BRANCHING) < 2 * n_per_set {
        depth += 1;
    }
    let tree = generate_tree(seed, depth, BRANCHING, 6, 9);
    let dispersions: Vec<f64> = if k_sets == 1 {
        vec![1.0]
    } else {
        (0..k_sets).map(|k| k as f64 / (k_sets - 1) as f64).collect()
    };
    let sets = generate_sets_with(&tree, seed.wrapping_add(1), &dispersions, n_per_set)?;
    Ok(AnalysisBundle {
        name: format!("synthetic-{seed}"),
        sets,
        tree: Some(tree),
        provenance: Some(format!(
            "synthetic: seed={seed} sets={k_sets} n={n_per_set} depth={depth} branching={BRANCHING}"
        )),
    })
}

fn tree_size(depth: usize, branching: usize) -> usize {
    (0..=depth).map(|d| branching.pow(d as u32)).sum()
}

/// MAS recomputed from raw tokens: explicit pair loop for the distances, an
/// explicit loop for eccentricities, normalized by the set's longest sequence.
pub fn oracle_mas(set: &SolutionSet, table: &EncodingTable, w: DistanceWeights) -> f64 {
    let seqs: Vec<Vec<(usize, Vec<usize>)>> = set
        .solutions
        .iter()
        .map(|s| {
            s.sequence
                .iter()
                .map(|st| {
                    let name = table.name_tokens().iter().position(|t| *t == st.name).expect("name in table");
                    let args = st
                        .args
                        .iter()
                        .map(|a| table.arg_tokens().iter().position(|t| t == a).expect("arg in table"))
                        .collect();
                    (name, args)
                })
                .collect()
        })
        .collect();
    let n = seqs.len();
    let l = seqs.iter().map(Vec::len).max().unwrap_or(0);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut d = 0.0;
            for k in 0..l {
                d += match (seqs[i].get(k), seqs[j].get(k)) {
                    (Some((na, aa)), Some((nb, ab))) => {
                        let pred = if na == nb { 0.0 } else { 1.0 };
                        let longest = aa.len().max(ab.len());
                        let args = if longest == 0 { 0.0 } else { edit_distance_table(aa, ab) as f64 / longest as f64 };
                        pred * w.w_pred() + args * w.w_args()
                    }
                    (None, None) => 0.0,
                    _ => 1.0,
                };
            }
            rows[i][j] = d;
        }
    }
    oracle_mas_matrix(&rows, l as f64)
}

/// MAS from explicit rows; 0 for a single solution or a zero scale.
pub fn oracle_mas_matrix(rows: &[Vec<f64>], max_d: f64) -> f64 {
    let n = rows.len();
    if n < 2 || max_d == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        let mut ecc = 0.0;
        for j in 0..n {
            if rows[i][j] > ecc {
                ecc = rows[i][j];
            }
        }
        sum += ecc * ecc;
    }
    (sum / (n as f64 * max_d * max_d)).sqrt()
}

/// MS by brute force: largest squared difference over all ordered pairs, per
/// objective.
pub fn oracle_max_spread(objectives: &[Vec<f64>]) -> f64 {
    let o = objectives.first().map_or(0, Vec::len);
    let mut sum = 0.0;
    for i in 0..o {
        let mut best = 0.0;
        for s in objectives {
            for t in objectives {
                let sq = (s[i] - t[i]) * (s[i] - t[i]);
                if sq > best {
                    best = sq;
                }
            }
        }
        sum += best;
    }
    sum.sqrt()
}

// Full (|a|+1)×(|b|+1) dynamic-programming table.
fn edit_distance_table(a: &[usize], b: &[usize]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in t.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        t[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            t[i][j] = (t[i - 1][j] + 1).min(t[i][j - 1] + 1).min(t[i - 1][j - 1] + cost);
        }
    }
    t[a.len()][b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::build_encoding;
    use crate::indicators::{indicators_for, max_architectural_spread, IndicatorOptions};

    #[test]
    fn tree_shapes() {
        let t = generate_tree(1, 0, 3, 2, 2);
        assert_eq!((t.nodes.len(), t.edges.len()), (1, 0));
        let t = generate_tree(1, 2, 2, 2, 2);
        assert_eq!((t.nodes.len(), t.edges.len()), (7, 6));
        assert!(t.validate().is_empty());
        assert_eq!(generate_tree(9, 3, 3, 4, 5), generate_tree(9, 3, 3, 4, 5));
        assert_ne!(generate_tree(9, 3, 3, 4, 5), generate_tree(10, 3, 3, 4, 5));
    }

    #[test]
    fn sets_are_deterministic_and_sized() {
        let t = generate_tree(4, 4, 3, 4, 6);
        let a = generate_sets(&t, 5, 2, 10, 0.5).unwrap();
        assert_eq!(a, generate_sets(&t, 5, 2, 10, 0.5).unwrap());
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|s| s.len() == 10 && crate::model::validate_solution_set(s).is_empty()));
        assert!(matches!(
            generate_sets(&t, 5, 1, 1000, 0.5),
            Err(Error::InsufficientNodes { available: 121, requested: 1000 })
        ));
    }

    #[test]
    fn singleton_sets_have_zero_mas() {
        let t = generate_tree(4, 3, 2, 3, 3);
        let sets = generate_sets(&t, 1, 3, 1, 1.0).unwrap();
        let table = build_encoding(&sets);
        for r in indicators_for(&sets, &table, DistanceWeights::default(), &IndicatorOptions::default()).unwrap() {
            assert_eq!(r.mas, 0.0);
        }
    }

    #[test]
    fn clustered_sampling_stays_in_one_subtree() {
        let t = generate_tree(2, 4, 3, 4, 6);
        let sets = generate_sets(&t, 3, 1, 12, 0.0).unwrap();
        // every clustered sample shares the anchor's path as a prefix
        let seqs: Vec<_> = sets[0].solutions.iter().map(|s| &s.sequence).collect();
        let shortest = seqs.iter().map(|s| s.len()).min().unwrap();
        assert!(shortest >= 2);
        assert!(seqs.iter().all(|s| s[..2] == seqs[0][..2]));
    }

    #[test]
    fn clustered_mas_below_uniform_on_same_tree() {
        let t = generate_tree(8, 5, 3, 5, 8);
        let clustered = generate_sets(&t, 21, 1, 20, 0.0).unwrap();
        let uniform = generate_sets(&t, 21, 1, 20, 1.0).unwrap();
        let sets = [clustered, uniform].concat();
        let table = build_encoding(&sets);
        let r = indicators_for(&sets, &table, DistanceWeights::default(), &IndicatorOptions::default()).unwrap();
        assert!(r[0].mas < r[1].mas, "{} !< {}", r[0].mas, r[1].mas);
    }

    #[test]
    fn oracle_agrees_on_hand_matrix() {
        let rows = vec![vec![0.0, 2.0, 1.0], vec![2.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert!((oracle_mas_matrix(&rows, 2.0) - 0.8660).abs() < 1e-4);
        assert_eq!(oracle_mas_matrix(&[vec![0.0]], 3.0), 0.0);
    }

    #[test]
    fn oracle_matches_indicator_on_generated_sets() {
        let t = generate_tree(13, 4, 3, 3, 4);
        let sets = generate_sets(&t, 2, 5, 15, 0.6).unwrap();
        let table = build_encoding(&sets);
        let w = DistanceWeights::from_pred(0.3).unwrap();
        for s in &sets {
            let dm = crate::distance::distance_matrix(s, &table, w).unwrap();
            let fast = max_architectural_spread(&dm, None).unwrap();
            assert!((fast - oracle_mas(s, &table, w)).abs() < 1e-12);
        }
    }

    #[test]
    fn synth_bundle_shape() {
        let b = synth_bundle(7, 3, 20).unwrap();
        assert_eq!(b.sets.len(), 3);
        assert!(b.tree.as_ref().unwrap().nodes.len() >= 40);
        assert_eq!(b, synth_bundle(7, 3, 20).unwrap());
    }
}
