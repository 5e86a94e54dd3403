//! Unified diff output and a parser that can apply it back.

use std::fmt::Write as _;

use thiserror::Error;

use crate::script::EditScript;
use crate::text::{split_lines, InternedSequence};

const NO_NEWLINE: &[u8] = b"\\ No newline at end of file\n";

fn range_header(start: usize, len: usize) -> String {
    match len {
        0 => format!("{start},0"),
        1 => format!("{}", start + 1),
        _ => format!("{},{}", start + 1, len),
    }
}

fn push_line(out: &mut Vec<u8>, prefix: u8, line: &[u8]) {
    out.push(prefix);
    out.extend_from_slice(line);
    if !line.ends_with(b"\n") {
        out.push(b'\n');
        out.extend_from_slice(NO_NEWLINE);
    }
}

/// Renders the hunks of `script` with `context` lines around each change.
/// Changes closer than `2 * context` lines share a hunk. No file headers.
pub fn render_unified(
    old: &InternedSequence,
    new: &InternedSequence,
    script: &EditScript,
    context: usize,
) -> Vec<u8> {
    let mut out = Vec::new();
    let changes = &script.changes;
    let mut k = 0;
    while k < changes.len() {
        let mut last = k;
        while last + 1 < changes.len()
            && changes[last + 1].old.start - changes[last].old.end <= 2 * context
        {
            last += 1;
        }
        let first = &changes[k];
        let end = &changes[last];
        let lead = context.min(first.old.start);
        let trail = context.min(old.len() - end.old.end);
        let old_start = first.old.start - lead;
        let new_start = first.new.start - lead;
        let old_len = end.old.end + trail - old_start;
        let new_len = end.new.end + trail - new_start;
        let mut header = String::new();
        let _ = writeln!(
            header,
            "@@ -{} +{} @@",
            range_header(old_start, old_len),
            range_header(new_start, new_len)
        );
        out.extend_from_slice(header.as_bytes());

        let mut pos = old_start;
        for c in &changes[k..=last] {
            for i in pos..c.old.start {
                push_line(&mut out, b' ', old.line(i));
            }
            for i in c.old.clone() {
                push_line(&mut out, b'-', old.line(i));
            }
            for j in c.new.clone() {
                push_line(&mut out, b'+', new.line(j));
            }
            pos = c.old.end;
        }
        for i in pos..end.old.end + trail {
            push_line(&mut out, b' ', old.line(i));
        }
        k = last + 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatchError {
    #[error("malformed hunk header on patch line {0}")]
    Header(usize),
    #[error("unexpected content on patch line {0}")]
    Body(usize),
    #[error("hunk {hunk} does not match the file at line {line}")]
    Mismatch { hunk: usize, line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatchLine {
    Context(Vec<u8>),
    Removed(Vec<u8>),
    Added(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchHunk {
    /// 0-based first old line covered by the hunk.
    pub old_start: usize,
    pub old_len: usize,
    pub new_start: usize,
    pub new_len: usize,
    pub lines: Vec<PatchLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Patch {
    pub hunks: Vec<PatchHunk>,
}

fn parse_range(s: &str) -> Option<(usize, usize)> {
    let (start, len): (usize, usize) = match s.split_once(',') {
        Some((a, b)) => (a.parse().ok()?, b.parse().ok()?),
        None => (s.parse().ok()?, 1),
    };
    let start0 = if len == 0 { start } else { start.checked_sub(1)? };
    Some((start0, len))
}

fn parse_header(line: &[u8]) -> Option<(usize, usize, usize, usize)> {
    let s = std::str::from_utf8(line).ok()?.trim_end_matches('\n');
    let rest = s.strip_prefix("@@ -")?;
    let (ranges, _) = rest.split_once(" @@")?;
    let (o, n) = ranges.split_once(" +")?;
    let (os, ol) = parse_range(o)?;
    let (ns, nl) = parse_range(n)?;
    Some((os, ol, ns, nl))
}

impl Patch {
    /// Parses hunks; `---`/`+++` header lines before the first hunk are skipped.
    pub fn parse(text: &[u8]) -> Result<Self, PatchError> {
        let lines = split_lines(text);
        let mut hunks: Vec<PatchHunk> = Vec::new();
        let mut i = 0;
        while i < lines.len() && !lines[i].starts_with(b"@@") {
            if !(lines[i].starts_with(b"--- ") || lines[i].starts_with(b"+++ ")) {
                return Err(PatchError::Body(i + 1));
            }
            i += 1;
        }
        while i < lines.len() {
            let (old_start, old_len, new_start, new_len) =
                parse_header(lines[i]).ok_or(PatchError::Header(i + 1))?;
            i += 1;
            let mut body = Vec::new();
            let (mut seen_old, mut seen_new) = (0, 0);
            while i < lines.len() && (seen_old < old_len || seen_new < new_len) {
                let line = lines[i];
                let rest = line[1..].to_vec();
                let entry = match line[0] {
                    b' ' => {
                        seen_old += 1;
                        seen_new += 1;
                        PatchLine::Context(rest)
                    }
                    b'-' => {
                        seen_old += 1;
                        PatchLine::Removed(rest)
                    }
                    b'+' => {
                        seen_new += 1;
                        PatchLine::Added(rest)
                    }
                    _ => return Err(PatchError::Body(i + 1)),
                };
                body.push(entry);
                i += 1;
                if i < lines.len() && lines[i].starts_with(b"\\") {
                    match body.last_mut() {
                        Some(
                            PatchLine::Context(l) | PatchLine::Removed(l) | PatchLine::Added(l),
                        ) => {
                            l.pop();
                        }
                        None => return Err(PatchError::Body(i + 1)),
                    }
                    i += 1;
                }
            }
            if seen_old != old_len || seen_new != new_len {
                return Err(PatchError::Body(i));
            }
            hunks.push(PatchHunk { old_start, old_len, new_start, new_len, lines: body });
        }
        Ok(Patch { hunks })
    }

    /// Applies the hunks at their recorded positions, checking every
    /// context and removed line.
    pub fn apply(&self, old: &[u8]) -> Result<Vec<u8>, PatchError> {
        let lines = split_lines(old);
        let mut out = Vec::with_capacity(old.len());
        let mut pos = 0;
        for (h, hunk) in self.hunks.iter().enumerate() {
            if hunk.old_start < pos || hunk.old_start > lines.len() {
                return Err(PatchError::Mismatch { hunk: h, line: hunk.old_start });
            }
            for l in &lines[pos..hunk.old_start] {
                out.extend_from_slice(l);
            }
            pos = hunk.old_start;
            for pl in &hunk.lines {
                match pl {
                    PatchLine::Context(l) | PatchLine::Removed(l) => {
                        if lines.get(pos).copied() != Some(l.as_slice()) {
                            return Err(PatchError::Mismatch { hunk: h, line: pos });
                        }
                        if matches!(pl, PatchLine::Context(_)) {
                            out.extend_from_slice(l);
                        }
                        pos += 1;
                    }
                    PatchLine::Added(l) => out.extend_from_slice(l),
                }
            }
        }
        for l in &lines[pos..] {
            out.extend_from_slice(l);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::Change;
    use crate::text::intern_pair;

    fn render(a: &[u8], b: &[u8], changes: Vec<Change>, ctx: usize) -> String {
        let (x, y) = intern_pair(a, b);
        String::from_utf8(render_unified(&x, &y, &EditScript { changes }, ctx)).unwrap()
    }

    #[test]
    fn identical_files_render_nothing() {
        assert_eq!(render(b"a\n", b"a\n", vec![], 3), "");
    }

    #[test]
    fn single_line_substitution() {
        assert_eq!(render(b"a\n", b"b\n", vec![Change::new(0..1, 0..1)], 3), "@@ -1 +1 @@\n-a\n+b\n");
    }

    #[test]
    fn missing_newline_marker() {
        let s = render(b"a\nb", b"a\n", vec![Change::new(1..2, 1..1)], 3);
        assert_eq!(s, "@@ -1,2 +1 @@\n a\n-b\n\\ No newline at end of file\n");
    }

    #[test]
    fn insertion_at_start_uses_zero_line() {
        let s = render(b"a\n", b"x\na\n", vec![Change::new(0..0, 0..1)], 0);
        assert_eq!(s, "@@ -0,0 +1 @@\n+x\n");
    }

    #[test]
    fn nearby_changes_share_a_hunk() {
        let old = b"1\n2\n3\n4\n5\n6\n7\n8\n9\n";
        let new = b"1\nX\n3\n4\n5\n6\nY\n8\n9\n";
        let changes = vec![Change::new(1..2, 1..2), Change::new(6..7, 6..7)];
        let merged = render(old, new, changes.clone(), 2);
        assert_eq!(merged.matches("@@ -").count(), 1);
        let split = render(old, new, changes, 1);
        assert_eq!(split.matches("@@ -").count(), 2);
    }

    #[test]
    fn parse_and_apply_round_trip() {
        let old = b"a\nb\nc\nd\ne\nf\ng";
        let new = b"a\nB\nc\nd\ne\nf\nG\nh\n";
        let changes = vec![Change::new(1..2, 1..2), Change::new(6..7, 6..8)];
        let text = render(old, new, changes, 1);
        let patch = Patch::parse(text.as_bytes()).unwrap();
        assert_eq!(patch.hunks.len(), 2);
        assert_eq!(patch.apply(old).unwrap(), new);
    }

    #[test]
    fn file_headers_are_skipped() {
        let patch = Patch::parse(b"--- a\n+++ b\n@@ -1 +1 @@\n-a\n+b\n").unwrap();
        assert_eq!(patch.apply(b"a\n").unwrap(), b"b\n");
    }

    #[test]
    fn mismatched_context_is_an_error() {
        let patch = Patch::parse(b"@@ -1 +1 @@\n-a\n+b\n").unwrap();
        assert!(matches!(patch.apply(b"z\n"), Err(PatchError::Mismatch { .. })));
        assert!(Patch::parse(b"garbage\n").is_err());
    }
}
