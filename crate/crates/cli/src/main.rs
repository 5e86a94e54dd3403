//! `textmerge` command-line front end.
//!
//! Exit codes: 0 identical or clean, 1 differences or conflicts, 2 a failed
//! `--verify` check, 3 usage or I/O errors.

mod graph_cmd;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use textmerge::merge3::{ConflictStyle, Labels, MergeOptions};
use textmerge::slider::{self, IndentWeights};
use textmerge::unified::{render_unified, Patch};
use textmerge::{diff, intern_pair, intern_triple, merge3, Algorithm, EditScript};

pub const EXIT_CLEAN: u8 = 0;
pub const EXIT_DIFFERENT: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "textmerge", version, about = "Line diffs, three-way merges and commit-graph experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Unified diff of two files.
    Diff(DiffArgs),
    /// Three-way merge of LEFT and RIGHT against BASE.
    MergeFile(MergeFileArgs),
    /// Operations on a JSON-lines commit graph.
    Graph(graph_cmd::GraphArgs),
}

#[derive(Args, Debug)]
struct DiffArgs {
    old: PathBuf,
    new: PathBuf,
    #[arg(long, default_value = "myers")]
    algorithm: Algorithm,
    #[arg(short = 'U', long, default_value_t = 3)]
    context: usize,
    #[arg(long)]
    no_indent_heuristic: bool,
    /// Re-apply the patch and, for minimal mode, compare against the oracle.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug, Clone)]
pub(crate) struct MergeFlags {
    #[arg(long, default_value = "histogram")]
    algorithm: Algorithm,
    /// Split conflicts along a diff of their two sides (default unless --style diff3).
    #[arg(long, overrides_with = "no_zealous")]
    zealous: bool,
    #[arg(long)]
    no_zealous: bool,
    /// Leave conflicts whose sides became equal after joining.
    #[arg(long)]
    no_recheck: bool,
}

impl MergeFlags {
    pub(crate) fn options(&self, style: ConflictStyle) -> Result<MergeOptions, String> {
        let zealous = if self.no_zealous {
            false
        } else if self.zealous {
            true
        } else {
            style != ConflictStyle::Diff3
        };
        let opts = MergeOptions {
            algorithm: self.algorithm,
            style,
            zealous,
            recheck_false_conflicts: !self.no_recheck,
            ..Default::default()
        };
        opts.validate().map_err(|e| e.to_string())?;
        Ok(opts)
    }
}

#[derive(Args, Debug)]
struct MergeFileArgs {
    left: PathBuf,
    base: PathBuf,
    right: PathBuf,
    #[arg(long, default_value = "merge")]
    style: ConflictStyle,
    /// Marker labels as LEFT,BASE,RIGHT.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    labels: Vec<String>,
    #[command(flatten)]
    merge: MergeFlags,
}

pub(crate) fn read(path: &Path) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_stdout(bytes: &[u8]) -> Result<(), String> {
    let mut out = io::stdout().lock();
    out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| format!("stdout: {e}"))
}

fn cmd_diff(args: &DiffArgs) -> Result<u8, String> {
    let (a, b) = (read(&args.old)?, read(&args.new)?);
    let (old, new) = intern_pair(&a, &b);
    let mut flags = diff(args.algorithm, old.tokens(), new.tokens());
    if !args.no_indent_heuristic {
        slider::slide(&mut flags, &old, &new, &IndentWeights::default());
    }
    let script = EditScript::from_flags(&flags, old.tokens(), new.tokens()).map_err(|e| e.to_string())?;
    if script.is_empty() {
        return Ok(EXIT_CLEAN);
    }
    let hunks = render_unified(&old, &new, &script, args.context);
    if args.verify {
        let applied = Patch::parse(&hunks).and_then(|p| p.apply(&a));
        if !matches!(&applied, Ok(bytes) if *bytes == b) {
            eprintln!("verify: patch does not reproduce {}", args.new.display());
            return Ok(EXIT_VERIFY);
        }
        if args.algorithm == Algorithm::Minimal {
            let min = textmerge_oracle::min_edit_distance(old.tokens(), new.tokens()).map_err(|e| e.to_string())?;
            if min != flags.flagged() {
                eprintln!("verify: {} lines flagged, oracle minimum is {min}", flags.flagged());
                return Ok(EXIT_VERIFY);
            }
        }
    }
    let mut out = format!("--- {}\n+++ {}\n", args.old.display(), args.new.display()).into_bytes();
    out.extend_from_slice(&hunks);
    write_stdout(&out)?;
    Ok(EXIT_DIFFERENT)
}

fn cmd_merge_file(args: &MergeFileArgs) -> Result<u8, String> {
    let mut opts = args.merge.options(args.style)?;
    match args.labels.as_slice() {
        [] => {}
        [l, b, r] => opts.labels = Labels { left: l.clone(), base: b.clone(), right: r.clone() },
        other => return Err(format!("--labels takes three comma-separated names, got {}", other.len())),
    }
    let (l, o, r) = (read(&args.left)?, read(&args.base)?, read(&args.right)?);
    let (o, l, r) = intern_triple(&o, &l, &r);
    let out = merge3(&o, &l, &r, &opts).map_err(|e| e.to_string())?;
    write_stdout(&out.rendered)?;
    if out.is_clean() {
        return Ok(EXIT_CLEAN);
    }
    let shown = out.conflict_count.min(127);
    let more = if out.conflict_count > shown { "+" } else { "" };
    eprintln!("{shown}{more} conflict(s), {} conflicting lines", out.conflict_line_count);
    Ok(EXIT_DIFFERENT)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_CLEAN);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let result = match &cli.command {
        Command::Diff(args) => cmd_diff(args),
        Command::MergeFile(args) => cmd_merge_file(args),
        Command::Graph(args) => graph_cmd::run(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("textmerge: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
