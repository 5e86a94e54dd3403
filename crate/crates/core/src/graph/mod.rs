//! In-memory commit DAG. Commits carry whole trees (path to blob bytes)
//! and an explicit logical timestamp.

mod expo;
mod ops;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Deserialize;
use thiserror::Error;

use crate::merge3::MergeError;

pub use expo::{build_exponential_graph, exponential_commit_count, HEAD_A, HEAD_B};
pub use ops::{
    cherry_pick, merge_base_recursive, merge_commits, merge_trees, rebase, revert, ConflictReport,
    MergeCommitOutcome, MergeStats, PathConflict, PickOutcome, RebaseOutcome, TreeMerge,
};

pub type Tree = BTreeMap<String, Vec<u8>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub id: String,
    pub parents: Vec<String>,
    pub tree: Tree,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown commit `{0}`")]
    UnknownCommit(String),
    #[error("commit `{0}` already exists")]
    DuplicateCommit(String),
    #[error("commit `{commit}` names unknown parent `{parent}`")]
    UnknownParent { commit: String, parent: String },
    #[error("commit `{commit}` is not newer than its parent `{parent}`")]
    TimestampOrder { commit: String, parent: String },
    #[error("commit `{id}` has {count} parents, expected exactly one")]
    NotSingleParent { id: String, count: usize },
    #[error("graph script line {line}: {message}")]
    Script { line: usize, message: String },
    #[error(transparent)]
    Merge(#[from] MergeError),
}

pub(crate) trait Lookup {
    fn commit(&self, id: &str) -> Option<&Commit>;

    fn get(&self, id: &str) -> Result<&Commit, GraphError> {
        self.commit(id).ok_or_else(|| GraphError::UnknownCommit(id.to_string()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct CommitGraph {
    commits: HashMap<String, Commit>,
    order: Vec<String>,
}

impl Lookup for CommitGraph {
    fn commit(&self, id: &str) -> Option<&Commit> {
        self.commits.get(id)
    }
}

#[derive(Deserialize)]
struct ScriptRecord {
    id: String,
    #[serde(default)]
    parents: Vec<String>,
    #[serde(default)]
    files: BTreeMap<String, String>,
    ts: u64,
}

impl CommitGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parents must already be present and strictly older, which keeps the
    /// graph acyclic.
    pub fn add_commit(
        &mut self,
        id: impl Into<String>,
        parents: Vec<String>,
        tree: Tree,
        timestamp: u64,
    ) -> Result<&Commit, GraphError> {
        let id = id.into();
        if self.commits.contains_key(&id) {
            return Err(GraphError::DuplicateCommit(id));
        }
        for p in &parents {
            let parent = self
                .commits
                .get(p)
                .ok_or_else(|| GraphError::UnknownParent { commit: id.clone(), parent: p.clone() })?;
            if parent.timestamp >= timestamp {
                return Err(GraphError::TimestampOrder { commit: id.clone(), parent: p.clone() });
            }
        }
        self.order.push(id.clone());
        Ok(self.commits.entry(id.clone()).or_insert(Commit { id, parents, tree, timestamp }))
    }

    pub fn get(&self, id: &str) -> Result<&Commit, GraphError> {
        Lookup::get(self, id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.commits.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.commits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commits.is_empty()
    }

    /// Commits in insertion order.
    pub fn commits(&self) -> impl Iterator<Item = &Commit> {
        self.order.iter().map(|id| &self.commits[id])
    }

    /// One JSON object per line: `{"id", "parents", "files": {path: text}, "ts"}`.
    /// Blank lines are skipped.
    pub fn from_json_lines(script: &str) -> Result<Self, GraphError> {
        let mut g = CommitGraph::new();
        for (k, raw) in script.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line = k + 1;
            let rec: ScriptRecord = serde_json::from_str(raw)
                .map_err(|e| GraphError::Script { line, message: e.to_string() })?;
            let tree = rec.files.into_iter().map(|(p, c)| (p, c.into_bytes())).collect();
            g.add_commit(rec.id, rec.parents, tree, rec.ts)
                .map_err(|e| GraphError::Script { line, message: e.to_string() })?;
        }
        Ok(g)
    }

    pub fn is_ancestor(&self, ancestor: &str, descendant: &str) -> Result<bool, GraphError> {
        self.get(ancestor)?;
        Ok(ancestors(self, descendant)?.contains(ancestor))
    }

    /// Common ancestors not reachable from another common ancestor, newest first.
    pub fn lowest_common_ancestors(&self, a: &str, b: &str) -> Result<Vec<String>, GraphError> {
        lowest_common_ancestors(self, a, b)
    }
}

/// `id` and everything reachable from it.
pub(crate) fn ancestors<L: Lookup + ?Sized>(g: &L, id: &str) -> Result<HashSet<String>, GraphError> {
    let mut seen = HashSet::new();
    let mut stack = vec![g.get(id)?];
    seen.insert(id.to_string());
    while let Some(c) = stack.pop() {
        for p in &c.parents {
            if seen.insert(p.clone()) {
                stack.push(g.get(p)?);
            }
        }
    }
    Ok(seen)
}

pub(crate) fn lowest_common_ancestors<L: Lookup + ?Sized>(
    g: &L,
    a: &str,
    b: &str,
) -> Result<Vec<String>, GraphError> {
    let from_a = ancestors(g, a)?;
    let common: HashSet<String> = ancestors(g, b)?.into_iter().filter(|c| from_a.contains(c)).collect();

    let mut dominated = HashSet::new();
    let mut stack: Vec<&str> = Vec::new();
    for c in &common {
        stack.extend(g.get(c)?.parents.iter().map(String::as_str));
    }
    while let Some(id) = stack.pop() {
        if dominated.insert(id.to_string()) {
            stack.extend(g.get(id)?.parents.iter().map(String::as_str));
        }
    }

    let mut out: Vec<&Commit> =
        common.iter().filter(|c| !dominated.contains(*c)).map(|c| g.get(c)).collect::<Result<_, _>>()?;
    out.sort_by(|x, y| y.timestamp.cmp(&x.timestamp).then_with(|| x.id.cmp(&y.id)));
    Ok(out.into_iter().map(|c| c.id.clone()).collect())
}
