use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Subcommand};
use serde_json::{json, Map, Value};
use textmerge::graph::{
    self, build_exponential_graph, CommitGraph, ConflictReport, MergeCommitOutcome, MergeStats, PickOutcome,
    RebaseOutcome, Tree, HEAD_A, HEAD_B,
};
use textmerge::merge3::ConflictStyle;

use crate::{read, MergeFlags, EXIT_CLEAN, EXIT_DIFFERENT};

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[command(subcommand)]
    action: Action,
    #[command(flatten)]
    merge: MergeFlags,
}

#[derive(Subcommand, Debug)]
enum Action {
    /// Merge two commits.
    Merge { script: PathBuf, a: String, b: String },
    /// Replay COMMIT on top of ONTO.
    CherryPick { script: PathBuf, commit: String, onto: String },
    /// Undo COMMIT on top of CURRENT.
    Revert { script: PathBuf, commit: String, current: String },
    /// Replay the commits of HEAD missing from ONTO.
    Rebase { script: PathBuf, head: String, onto: String },
    /// Build the doubling graph family and time the merge of its heads.
    ExpoDemo {
        #[arg(long, default_value_t = 1)]
        from: usize,
        #[arg(long, default_value_t = 8)]
        to: usize,
    },
}

fn tree_json(tree: &Tree) -> Value {
    let map: Map<String, Value> =
        tree.iter().map(|(p, b)| (p.clone(), Value::String(String::from_utf8_lossy(b).into_owned()))).collect();
    Value::Object(map)
}

fn stats_json(s: &MergeStats) -> Value {
    json!({
        "merge_calls": s.merge_calls,
        "virtual_bases": s.virtual_bases,
        "conflict_paths": s.conflict_paths,
    })
}

fn report_json(r: &ConflictReport) -> Value {
    let paths: Vec<Value> = r
        .paths
        .iter()
        .map(|c| json!({ "path": c.path, "conflicts": c.conflicts, "blob": String::from_utf8_lossy(&c.blob) }))
        .collect();
    json!({ "tree": tree_json(&r.tree), "conflicts": paths })
}

fn load(script: &Path) -> Result<CommitGraph, String> {
    let bytes = read(script)?;
    let text = String::from_utf8(bytes).map_err(|_| format!("{}: not UTF-8", script.display()))?;
    CommitGraph::from_json_lines(&text).map_err(|e| format!("{}: {e}", script.display()))
}

fn emit(v: &Value) {
    println!("{v}");
}

pub fn run(args: &GraphArgs) -> Result<u8, String> {
    let opts = args.merge.options(ConflictStyle::Merge)?;
    let err = |e: graph::GraphError| e.to_string();
    match &args.action {
        Action::Merge { script, a, b } => {
            let g = load(script)?;
            let (outcome, stats) = graph::merge_commits(&g, a, b, &opts).map_err(err)?;
            let (v, code) = match outcome {
                MergeCommitOutcome::FastForward(to) => {
                    (json!({ "result": "fast-forward", "target": to, "stats": stats_json(&stats) }), EXIT_CLEAN)
                }
                MergeCommitOutcome::Merged { parents, tree } => (
                    json!({ "result": "merged", "parents": parents, "tree": tree_json(&tree), "stats": stats_json(&stats) }),
                    EXIT_CLEAN,
                ),
                MergeCommitOutcome::Conflicted { parents, report } => (
                    json!({ "result": "conflict", "parents": parents, "report": report_json(&report), "stats": stats_json(&stats) }),
                    EXIT_DIFFERENT,
                ),
            };
            emit(&v);
            Ok(code)
        }
        Action::CherryPick { script, commit, onto } => {
            let g = load(script)?;
            pick(graph::cherry_pick(&g, commit, onto, &opts).map_err(err)?)
        }
        Action::Revert { script, commit, current } => {
            let g = load(script)?;
            pick(graph::revert(&g, commit, current, &opts).map_err(err)?)
        }
        Action::Rebase { script, head, onto } => {
            let g = load(script)?;
            match graph::rebase(&g, head, onto, &opts).map_err(err)? {
                RebaseOutcome::Completed { picked, trees } => {
                    let trees: Vec<Value> = trees.iter().map(tree_json).collect();
                    emit(&json!({ "result": "completed", "picked": picked, "trees": trees }));
                    Ok(EXIT_CLEAN)
                }
                RebaseOutcome::Stopped { index, commit, trees, report } => {
                    let trees: Vec<Value> = trees.iter().map(tree_json).collect();
                    emit(&json!({
                        "result": "conflict",
                        "pick": index,
                        "commit": commit,
                        "trees": trees,
                        "report": report_json(&report),
                    }));
                    Ok(EXIT_DIFFERENT)
                }
            }
        }
        Action::ExpoDemo { from, to } => {
            for n in *from..=*to {
                let g = build_exponential_graph(n);
                let start = Instant::now();
                let (_, stats) = graph::merge_commits(&g, HEAD_A, HEAD_B, &opts).map_err(err)?;
                let seconds = start.elapsed().as_secs_f64();
                emit(&json!({
                    "n": n,
                    "commits": g.len(),
                    "merge_calls": stats.merge_calls,
                    "virtual_bases": stats.virtual_bases,
                    "seconds": seconds,
                }));
            }
            Ok(EXIT_CLEAN)
        }
    }
}

fn pick(outcome: PickOutcome) -> Result<u8, String> {
    match outcome {
        PickOutcome::Clean { parent, tree } => {
            emit(&json!({ "result": "clean", "parent": parent, "tree": tree_json(&tree) }));
            Ok(EXIT_CLEAN)
        }
        PickOutcome::Conflicted(report) => {
            emit(&json!({ "result": "conflict", "report": report_json(&report) }));
            Ok(EXIT_DIFFERENT)
        }
    }
}
