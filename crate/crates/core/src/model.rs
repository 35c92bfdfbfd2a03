//! Core domain types: refactoring steps, solutions, solution sets, the search
//! tree rooted at the initial architecture, and the pairwise distance matrix.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

/// One refactoring: a transformation name and the ordered architectural
/// elements it targets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransformationStep {
    pub name: String,
    #[serde(default)]
    pub args: Vec<String>,
}

impl TransformationStep {
    pub fn new<N, I, A>(name: N, args: I) -> Self
    where
        N: Into<String>,
        I: IntoIterator<Item = A>,
        A: Into<String>,
    {
        TransformationStep {
            name: name.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for TransformationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.args.join(", "))
    }
}

/// A design alternative: its objective values and the refactoring path that
/// produced it from the initial architecture. An empty sequence denotes the
/// initial architecture itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureSolution {
    pub id: String,
    pub objectives: Vec<f64>,
    pub sequence: Vec<TransformationStep>,
}

impl ArchitectureSolution {
    pub fn new(id: impl Into<String>, objectives: Vec<f64>, sequence: Vec<TransformationStep>) -> Self {
        ArchitectureSolution {
            id: id.into(),
            objectives,
            sequence,
        }
    }
}

/// The solutions returned by one optimization configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub label: String,
    pub objective_names: Vec<String>,
    pub solutions: Vec<ArchitectureSolution>,
}

impl SolutionSet {
    pub fn new(
        label: impl Into<String>,
        objective_names: Vec<String>,
        solutions: Vec<ArchitectureSolution>,
    ) -> Self {
        SolutionSet {
            label: label.into(),
            objective_names,
            solutions,
        }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Length of the longest transformation sequence in the set.
    pub fn max_sequence_len(&self) -> usize {
        self.solutions.iter().map(|s| s.sequence.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    EmptySet,
    DuplicateId,
    ObjectiveArity,
    NonFiniteObjective,
    EmptyStepName,
    EmptyArgument,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::EmptySet => "empty-set",
            Rule::DuplicateId => "duplicate-id",
            Rule::ObjectiveArity => "objective-arity",
            Rule::NonFiniteObjective => "non-finite-objective",
            Rule::EmptyStepName => "empty-step-name",
            Rule::EmptyArgument => "empty-argument",
        };
        f.write_str(s)
    }
}

/// A broken invariant of a [`SolutionSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub rule: Rule,
    /// Index of the offending solution, when the rule concerns one.
    pub solution_index: Option<usize>,
    pub solution_id: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.solution_id {
            Some(id) => write!(f, "[{}] solution {:?}: {}", self.rule, id, self.message),
            None => write!(f, "[{}] {}", self.rule, self.message),
        }
    }
}

/// Checks every invariant of the set and returns one entry per violation.
/// An empty result means the set is valid.
pub fn validate_solution_set(set: &SolutionSet) -> Vec<Violation> {
    let mut out = Vec::new();
    if set.solutions.is_empty() {
        out.push(Violation {
            rule: Rule::EmptySet,
            solution_index: None,
            solution_id: None,
            message: format!("set {:?} has no solutions", set.label),
        });
    }

    let arity = set.objective_names.len();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (idx, sol) in set.solutions.iter().enumerate() {
        let mut push = |rule: Rule, message: String| {
            out.push(Violation {
                rule,
                solution_index: Some(idx),
                solution_id: Some(sol.id.clone()),
                message,
            })
        };

        if let Some(first) = seen.insert(sol.id.as_str(), idx) {
            push(
                Rule::DuplicateId,
                format!("duplicate id {:?} (first used by solution #{first})", sol.id),
            );
            // keep the first occurrence as the reference
            seen.insert(sol.id.as_str(), first);
        }
        if sol.objectives.len() != arity {
            push(
                Rule::ObjectiveArity,
                format!("has {} objectives, set declares {}", sol.objectives.len(), arity),
            );
        }
        for (k, v) in sol.objectives.iter().enumerate() {
            if !v.is_finite() {
                push(Rule::NonFiniteObjective, format!("objective #{k} is {v}"));
            }
        }
        for (k, step) in sol.sequence.iter().enumerate() {
            if step.name.trim().is_empty() {
                push(Rule::EmptyStepName, format!("step #{k} has an empty name"));
            }
            for (a, arg) in step.args.iter().enumerate() {
                if arg.is_empty() {
                    push(Rule::EmptyArgument, format!("step #{k} argument #{a} is empty"));
                }
            }
        }
    }
    out
}

/// The architectural search space: nodes are alternatives, edges are the
/// refactorings that lead from a parent alternative to a child.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTree {
    pub root: String,
    pub nodes: Vec<String>,
    pub edges: Vec<TreeEdge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeEdge {
    pub from: String,
    pub to: String,
    pub step: TransformationStep,
}

impl SearchTree {
    /// Outgoing edges per node, each list sorted by child id.
    pub fn children(&self) -> BTreeMap<&str, Vec<&TreeEdge>> {
        let mut map: BTreeMap<&str, Vec<&TreeEdge>> = BTreeMap::new();
        for e in &self.edges {
            map.entry(e.from.as_str()).or_default().push(e);
        }
        for list in map.values_mut() {
            list.sort_by(|a, b| a.to.cmp(&b.to));
        }
        map
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.iter().any(|n| n == id)
    }

    /// Structural problems: missing root, dangling edges, duplicate nodes,
    /// cycles and unreachable nodes.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.as_str()) {
                out.push(format!("duplicate node {n:?}"));
            }
        }
        if !ids.contains(self.root.as_str()) {
            out.push(format!("root {:?} is not a node", self.root));
        }
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if !ids.contains(end.as_str()) {
                    out.push(format!("edge {:?} -> {:?} references unknown node {end:?}", e.from, e.to));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }

        // Kahn's algorithm: every node must be consumed if the graph is acyclic.
        let mut indegree: HashMap<&str, usize> = self.nodes.iter().map(|n| (n.as_str(), 0)).collect();
        for e in &self.edges {
            *indegree.get_mut(e.to.as_str()).unwrap() += 1;
        }
        if indegree[self.root.as_str()] > 0 {
            out.push(format!("root {:?} has incoming edges", self.root));
        }
        let children = self.children();
        let mut queue: VecDeque<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut consumed = 0;
        while let Some(n) = queue.pop_front() {
            consumed += 1;
            for e in children.get(n).into_iter().flatten() {
                let d = indegree.get_mut(e.to.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push_back(e.to.as_str());
                }
            }
        }
        if consumed != self.nodes.len() {
            out.push("edge relation contains a cycle".to_string());
        }

        let depths = self.depths();
        for n in &self.nodes {
            if !depths.contains_key(n.as_str()) {
                out.push(format!("node {n:?} is not reachable from the root"));
            }
        }
        out
    }

    /// BFS depth of every node reachable from the root.
    pub fn depths(&self) -> HashMap<&str, usize> {
        let children = self.children();
        let mut depth = HashMap::new();
        let mut queue = VecDeque::new();
        if self.contains(&self.root) {
            depth.insert(self.root.as_str(), 0);
            queue.push_back(self.root.as_str());
        }
        while let Some(n) = queue.pop_front() {
            let d = depth[n];
            for e in children.get(n).into_iter().flatten() {
                if !depth.contains_key(e.to.as_str()) {
                    depth.insert(e.to.as_str(), d + 1);
                    queue.push_back(e.to.as_str());
                }
            }
        }
        depth
    }
}

/// Symmetric matrix of architectural distances between the solutions of a set.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub ids: Vec<String>,
    /// Row-major N×N values.
    pub values: Vec<f64>,
    /// Padded sequence length the distances were computed with.
    pub l_pad: usize,
    /// Maximum attainable distance for this data.
    pub max_d: f64,
}

impl DistanceMatrix {
    /// Builds a matrix from explicit rows. `max_d` defaults to the largest
    /// admissible value implied by `l_pad`.
    pub fn from_rows(ids: Vec<String>, rows: &[Vec<f64>], l_pad: usize, max_d: f64) -> Self {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "distance matrix must be square");
            values.extend_from_slice(r);
        }
        assert_eq!(ids.len(), n, "one id per row");
        DistanceMatrix { ids, values, l_pad, max_d }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.values[i * n..(i + 1) * n]
    }

    /// Consistently permutes rows and columns: new index `k` takes old index `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        let n = self.n();
        assert_eq!(perm.len(), n);
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        DistanceMatrix {
            ids: perm.iter().map(|&k| self.ids[k].clone()).collect(),
            values,
            l_pad: self.l_pad,
            max_d: self.max_d,
        }
    }

    /// Zero diagonal, symmetry, and `0 <= d <= l_pad`.
    pub fn check_invariants(&self) -> Vec<String> {
        let n = self.n();
        let mut out = Vec::new();
        if self.values.len() != n * n {
            out.push(format!("expected {} values, found {}", n * n, self.values.len()));
            return out;
        }
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                out.push(format!("diagonal entry {i} is {}", self.get(i, i)));
            }
            for j in 0..n {
                let v = self.get(i, j);
                if !v.is_finite() || v < 0.0 || v > self.l_pad as f64 {
                    out.push(format!("entry ({i},{j}) = {v} outside [0, {}]", self.l_pad));
                }
                if v != self.get(j, i) {
                    out.push(format!("entries ({i},{j}) and ({j},{i}) differ"));
                }
            }
        }
        out
    }
}
