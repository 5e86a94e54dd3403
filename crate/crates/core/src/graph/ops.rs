use std::collections::{BTreeSet, HashMap};

use super::{ancestors, lowest_common_ancestors, Commit, CommitGraph, GraphError, Lookup, Tree};
use crate::merge3::{merge_bytes, MergeOptions};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeStats {
    /// Calls of the recursive merge, the outermost one included.
    pub merge_calls: usize,
    pub virtual_bases: usize,
    pub conflict_paths: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathConflict {
    pub path: String,
    /// Merged content with conflict markers.
    pub blob: Vec<u8>,
    pub conflicts: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeMerge {
    pub tree: Tree,
    pub conflicts: Vec<PathConflict>,
}

impl TreeMerge {
    pub fn is_clean(&self) -> bool {
        self.conflicts.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictReport {
    /// The whole tree, conflicted paths holding their marked-up blobs.
    pub tree: Tree,
    pub paths: Vec<PathConflict>,
}

impl From<TreeMerge> for ConflictReport {
    fn from(m: TreeMerge) -> Self {
        ConflictReport { tree: m.tree, paths: m.conflicts }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeCommitOutcome {
    /// One head already contains the other; the branch moves to this id.
    FastForward(String),
    Merged { parents: Vec<String>, tree: Tree },
    Conflicted { parents: Vec<String>, report: ConflictReport },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PickOutcome {
    Clean { parent: String, tree: Tree },
    Conflicted(ConflictReport),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RebaseOutcome {
    /// Trees of the replayed commits in order; the last one is the new head.
    Completed { picked: Vec<String>, trees: Vec<Tree> },
    /// `index` counts picks from 1.
    Stopped { index: usize, commit: String, trees: Vec<Tree>, report: ConflictReport },
}

/// Per path: keep what only one side changed, merge what both changed.
/// Paths are matched by name; a missing file merges as empty content.
pub fn merge_trees(base: &Tree, left: &Tree, right: &Tree, options: &MergeOptions) -> Result<TreeMerge, GraphError> {
    let paths: BTreeSet<&String> = base.keys().chain(left.keys()).chain(right.keys()).collect();
    let mut out = TreeMerge::default();
    for path in paths {
        let (o, l, r) = (base.get(path), left.get(path), right.get(path));
        let pick = if l == r || r == o {
            l
        } else if l == o {
            r
        } else {
            let empty = Vec::new();
            let m = merge_bytes(o.unwrap_or(&empty), l.unwrap_or(&empty), r.unwrap_or(&empty), options)?;
            if m.is_clean() {
                if !m.rendered.is_empty() || (l.is_some() && r.is_some()) {
                    out.tree.insert(path.clone(), m.rendered);
                }
            } else {
                out.conflicts.push(PathConflict { path: path.clone(), blob: m.rendered.clone(), conflicts: m.conflict_count });
                out.tree.insert(path.clone(), m.rendered);
            }
            continue;
        };
        if let Some(blob) = pick {
            out.tree.insert(path.clone(), blob.clone());
        }
    }
    Ok(out)
}

/// Graph plus the virtual commits made while folding merge bases.
struct Session<'g> {
    graph: &'g CommitGraph,
    virtuals: HashMap<String, Commit>,
    options: &'g MergeOptions,
    stats: MergeStats,
}

impl Lookup for Session<'_> {
    fn commit(&self, id: &str) -> Option<&Commit> {
        self.graph.commit(id).or_else(|| self.virtuals.get(id))
    }
}

impl<'g> Session<'g> {
    fn new(graph: &'g CommitGraph, options: &'g MergeOptions) -> Self {
        Session { graph, virtuals: HashMap::new(), options, stats: MergeStats::default() }
    }

    fn virtual_id(&self) -> String {
        let mut k = self.virtuals.len() + 1;
        loop {
            let id = format!("virtual-{k}");
            if !self.graph.contains(&id) {
                return id;
            }
            k += 1;
        }
    }

    fn base(&mut self, h1: &str, h2: &str) -> Result<Tree, GraphError> {
        let bases = lowest_common_ancestors(self, h1, h2)?;
        let Some((first, rest)) = bases.split_first() else {
            return Ok(Tree::new());
        };
        let mut merged = first.clone();
        for next in rest {
            let m = self.merge(&merged, next)?;
            let timestamp = self.get(&merged)?.timestamp.max(self.get(next)?.timestamp);
            let id = self.virtual_id();
            let commit = Commit { id: id.clone(), parents: vec![merged, next.clone()], tree: m.tree, timestamp };
            self.virtuals.insert(id.clone(), commit);
            self.stats.virtual_bases += 1;
            merged = id;
        }
        Ok(self.get(&merged)?.tree.clone())
    }

    fn merge(&mut self, h1: &str, h2: &str) -> Result<TreeMerge, GraphError> {
        self.stats.merge_calls += 1;
        let base = self.base(h1, h2)?;
        let (l, r) = (&self.get(h1)?.tree, &self.get(h2)?.tree);
        merge_trees(&base, l, r, self.options)
    }
}

/// Tree of the (possibly virtual) merge base of `a` and `b`. Several lowest
/// common ancestors are merged pairwise, newest first; conflicts inside
/// those merges stay in the virtual blobs as marker text.
pub fn merge_base_recursive(
    graph: &CommitGraph,
    a: &str,
    b: &str,
    options: &MergeOptions,
    stats: &mut MergeStats,
) -> Result<Tree, GraphError> {
    let mut s = Session::new(graph, options);
    let tree = s.base(a, b)?;
    stats.merge_calls += s.stats.merge_calls;
    stats.virtual_bases += s.stats.virtual_bases;
    Ok(tree)
}

pub fn merge_commits(
    graph: &CommitGraph,
    a: &str,
    b: &str,
    options: &MergeOptions,
) -> Result<(MergeCommitOutcome, MergeStats), GraphError> {
    options.validate()?;
    if graph.is_ancestor(a, b)? {
        return Ok((MergeCommitOutcome::FastForward(b.to_string()), MergeStats::default()));
    }
    if graph.is_ancestor(b, a)? {
        return Ok((MergeCommitOutcome::FastForward(a.to_string()), MergeStats::default()));
    }
    let mut s = Session::new(graph, options);
    let m = s.merge(a, b)?;
    let mut stats = s.stats;
    let parents = vec![a.to_string(), b.to_string()];
    if m.is_clean() {
        return Ok((MergeCommitOutcome::Merged { parents, tree: m.tree }, stats));
    }
    stats.conflict_paths = m.conflicts.iter().map(|c| c.path.clone()).collect();
    Ok((MergeCommitOutcome::Conflicted { parents, report: m.into() }, stats))
}

fn single_parent<'a>(graph: &'a CommitGraph, id: &str) -> Result<&'a Commit, GraphError> {
    let c = graph.get(id)?;
    match c.parents.as_slice() {
        [p] => graph.get(p),
        ps => Err(GraphError::NotSingleParent { id: id.to_string(), count: ps.len() }),
    }
}

fn outcome(m: TreeMerge, parent: &str) -> PickOutcome {
    if m.is_clean() {
        PickOutcome::Clean { parent: parent.to_string(), tree: m.tree }
    } else {
        PickOutcome::Conflicted(m.into())
    }
}

/// Replays `commit` on `onto`: base is the parent, left the commit, right `onto`.
pub fn cherry_pick(graph: &CommitGraph, commit: &str, onto: &str, options: &MergeOptions) -> Result<PickOutcome, GraphError> {
    options.validate()?;
    let parent = single_parent(graph, commit)?;
    let m = merge_trees(&parent.tree, &graph.get(commit)?.tree, &graph.get(onto)?.tree, options)?;
    Ok(outcome(m, onto))
}

/// Undoes `commit` on top of `current`, a cherry-pick with parent and commit swapped.
pub fn revert(graph: &CommitGraph, commit: &str, current: &str, options: &MergeOptions) -> Result<PickOutcome, GraphError> {
    options.validate()?;
    let parent = single_parent(graph, commit)?;
    let m = merge_trees(&graph.get(commit)?.tree, &parent.tree, &graph.get(current)?.tree, options)?;
    Ok(outcome(m, current))
}

/// Cherry-picks every commit reachable from `head` but not from `onto`,
/// oldest first, onto an advancing tip. Merge commits are skipped.
pub fn rebase(graph: &CommitGraph, head: &str, onto: &str, options: &MergeOptions) -> Result<RebaseOutcome, GraphError> {
    options.validate()?;
    let upstream = ancestors(graph, onto)?;
    let mut todo: Vec<&Commit> = ancestors(graph, head)?
        .iter()
        .filter(|id| !upstream.contains(*id))
        .map(|id| graph.get(id))
        .collect::<Result<_, _>>()?;
    todo.retain(|c| c.parents.len() == 1);
    todo.sort_by(|x, y| x.timestamp.cmp(&y.timestamp).then_with(|| x.id.cmp(&y.id)));

    let mut tip = graph.get(onto)?.tree.clone();
    let mut trees = Vec::with_capacity(todo.len());
    let mut picked = Vec::with_capacity(todo.len());
    for (k, c) in todo.iter().enumerate() {
        let parent = graph.get(&c.parents[0])?;
        let m = merge_trees(&parent.tree, &c.tree, &tip, options)?;
        if !m.is_clean() {
            return Ok(RebaseOutcome::Stopped { index: k + 1, commit: c.id.clone(), trees, report: m.into() });
        }
        tip = m.tree;
        trees.push(tip.clone());
        picked.push(c.id.clone());
    }
    Ok(RebaseOutcome::Completed { picked, trees })
}
