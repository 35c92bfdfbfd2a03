//! Label encoding of transformation names and arguments, and extraction of
//! transformation sequences from the search tree.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{SearchTree, SolutionSet, TransformationStep};

/// Dense symbol id within one vocabulary space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

/// Identifies the table a step was encoded with. Derived from the table's
/// content, so equal tables share an id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TableId(u64);

/// Injective token → symbol maps, one for transformation names and a
/// separate one for arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingTable {
    id: TableId,
    names: Vocabulary,
    args: Vocabulary,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Vocabulary {
    fn intern(&mut self, token: &str) {
        if !self.index.contains_key(token) {
            let sym = Symbol(self.tokens.len() as u32);
            self.tokens.push(token.to_string());
            self.index.insert(token.to_string(), sym);
        }
    }
}

/// A step after label encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedStep {
    pub table: TableId,
    pub name: Symbol,
    pub args: Vec<Symbol>,
}

impl EncodingTable {
    pub fn id(&self) -> TableId {
        self.id
    }

    pub fn name_count(&self) -> usize {
        self.names.tokens.len()
    }

    pub fn arg_count(&self) -> usize {
        self.args.tokens.len()
    }

    pub fn name_symbol(&self, token: &str) -> Option<Symbol> {
        self.names.index.get(token).copied()
    }

    pub fn arg_symbol(&self, token: &str) -> Option<Symbol> {
        self.args.index.get(token).copied()
    }

    /// Name tokens in symbol order.
    pub fn name_tokens(&self) -> &[String] {
        &self.names.tokens
    }

    /// Argument tokens in symbol order.
    pub fn arg_tokens(&self) -> &[String] {
        &self.args.tokens
    }

    /// Inverse of [`encode_step`].
    pub fn decode(&self, step: &EncodedStep) -> Result<TransformationStep> {
        if step.table != self.id {
            return Err(Error::MixedTable);
        }
        let lookup = |v: &Vocabulary, s: Symbol, space| {
            v.tokens
                .get(s.0 as usize)
                .cloned()
                .ok_or_else(|| Error::UnknownToken { token: format!("#{}", s.0), space })
        };
        Ok(TransformationStep {
            name: lookup(&self.names, step.name, "name")?,
            args: step
                .args
                .iter()
                .map(|&a| lookup(&self.args, a, "argument"))
                .collect::<Result<_>>()?,
        })
    }

    fn from_vocabularies(names: Vocabulary, args: Vocabulary) -> Self {
        // FNV-1a over both vocabularies with a separator between spaces.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for b in bytes {
                h ^= u64::from(*b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        for t in &names.tokens {
            feed(t.as_bytes());
            feed(&[0]);
        }
        feed(&[0xff]);
        for t in &args.tokens {
            feed(t.as_bytes());
            feed(&[0]);
        }
        EncodingTable {
            id: TableId(h),
            names,
            args,
        }
    }
}

/// Builds the vocabulary of every sequence in `sets`. Symbols are assigned in
/// first-occurrence order: sets as given, then solutions, then steps.
pub fn build_encoding(sets: &[SolutionSet]) -> EncodingTable {
    build_encoding_from_steps(
        sets.iter()
            .flat_map(|s| s.solutions.iter())
            .flat_map(|s| s.sequence.iter()),
    )
}

pub fn build_encoding_from_steps<'a, I>(steps: I) -> EncodingTable
where
    I: IntoIterator<Item = &'a TransformationStep>,
{
    let mut names = Vocabulary::default();
    let mut args = Vocabulary::default();
    for step in steps {
        names.intern(&step.name);
        for a in &step.args {
            args.intern(a);
        }
    }
    EncodingTable::from_vocabularies(names, args)
}

pub fn encode_step(step: &TransformationStep, table: &EncodingTable) -> Result<EncodedStep> {
    let name = table.name_symbol(&step.name).ok_or_else(|| Error::UnknownToken {
        token: step.name.clone(),
        space: "name",
    })?;
    let args = step
        .args
        .iter()
        .map(|a| {
            table.arg_symbol(a).ok_or_else(|| Error::UnknownToken {
                token: a.clone(),
                space: "argument",
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EncodedStep {
        table: table.id,
        name,
        args,
    })
}

pub fn encode_sequence(seq: &[TransformationStep], table: &EncodingTable) -> Result<Vec<EncodedStep>> {
    seq.iter().map(|s| encode_step(s, table)).collect()
}

/// Steps along a shortest root-to-node path. Among tied shortest paths the one
/// whose sequence of child ids is lexicographically smallest wins.
pub fn extract_sequence(tree: &SearchTree, node_id: &str) -> Result<Vec<TransformationStep>> {
    Ok(extract_sequences(tree, &[node_id])?.remove(0))
}

/// Sequences for many nodes with a single traversal.
pub fn extract_sequences(tree: &SearchTree, node_ids: &[&str]) -> Result<Vec<Vec<TransformationStep>>> {
    let parents = bfs_parents(tree);
    node_ids
        .iter()
        .map(|&id| {
            if !tree.contains(id) {
                return Err(Error::UnknownNode(id.to_string()));
            }
            if !parents.contains_key(id) {
                return Err(Error::UnreachableNode(id.to_string()));
            }
            let mut path = Vec::new();
            let mut cur = id;
            while let Some(Some((parent, step))) = parents.get(cur) {
                path.push((*step).clone());
                cur = parent;
            }
            path.reverse();
            Ok(path)
        })
        .collect()
}

type ParentMap<'a> = HashMap<&'a str, Option<(&'a str, &'a TransformationStep)>>;

// BFS with children visited in child-id order; first discovery fixes the parent.
fn bfs_parents(tree: &SearchTree) -> ParentMap<'_> {
    let children = tree.children();
    let mut parents: ParentMap<'_> = HashMap::new();
    if !tree.contains(&tree.root) {
        return parents;
    }
    parents.insert(tree.root.as_str(), None);
    let mut queue = VecDeque::from([tree.root.as_str()]);
    while let Some(n) = queue.pop_front() {
        for e in children.get(n).into_iter().flatten() {
            if !parents.contains_key(e.to.as_str()) {
                parents.insert(e.to.as_str(), Some((n, &e.step)));
                queue.push_back(e.to.as_str());
            }
        }
    }
    parents
}
