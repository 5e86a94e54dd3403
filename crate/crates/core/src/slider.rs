//! Sliding pure insertions and deletions to the most readable position.
//!
//! A group of added (or removed) lines can move up by one when the line above
//! it equals its last line, and down when the line below equals its first
//! line. Each candidate position is scored from the indentation and blank
//! lines around its two boundaries, and the lowest score wins.

use std::cmp::Ordering;
use std::ops::Range;

use crate::script::{ChangedLines, EditScript};
use crate::text::{InternedSequence, Token};

pub const MAX_INDENT: usize = 200;
pub const MAX_BLANKS: usize = 20;
const MAX_PASSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndentWeights {
    pub start_of_file: i64,
    pub end_of_file: i64,
    pub total_blank: i64,
    pub post_blank: i64,
    pub relative_indent: i64,
    pub relative_indent_with_blank: i64,
    pub relative_outdent: i64,
    pub relative_outdent_with_blank: i64,
    pub relative_dedent: i64,
    pub relative_dedent_with_blank: i64,
    pub indent_bias: i64,
}

impl Default for IndentWeights {
    fn default() -> Self {
        IndentWeights {
            start_of_file: 1,
            end_of_file: 21,
            total_blank: -30,
            post_blank: 6,
            relative_indent: -4,
            relative_indent_with_blank: 10,
            relative_outdent: 24,
            relative_outdent_with_blank: 17,
            relative_dedent: 23,
            relative_dedent_with_blank: 17,
            indent_bias: 60,
        }
    }
}

impl IndentWeights {
    pub fn zero() -> Self {
        IndentWeights {
            start_of_file: 0,
            end_of_file: 0,
            total_blank: 0,
            post_blank: 0,
            relative_indent: 0,
            relative_indent_with_blank: 0,
            relative_outdent: 0,
            relative_outdent_with_blank: 0,
            relative_dedent: 0,
            relative_dedent_with_blank: 0,
            indent_bias: 0,
        }
    }
}

/// Indentation in columns, or `None` for a whitespace-only line.
pub fn line_indent(line: &[u8]) -> Option<usize> {
    let mut col = 0;
    for &c in line {
        match c {
            b' ' => col += 1,
            b'\t' => col += 8 - col % 8,
            b'\n' | b'\r' | 0x0b | 0x0c => {}
            _ => return Some(col),
        }
        if col >= MAX_INDENT {
            return Some(MAX_INDENT);
        }
    }
    None
}

/// What surrounds the boundary just above line `split`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SplitMeasurement {
    /// No line, blank or not, above the split.
    pub at_start: bool,
    /// The split is past the last line.
    pub at_end: bool,
    /// Blank lines directly above the split.
    pub blanks_before: usize,
    /// Blank lines from the split downwards; past the end counts as one.
    pub blanks_after: usize,
    /// Indent of the first non-blank line at or below the split.
    pub indent: Option<usize>,
    /// Indent of the nearest non-blank line above.
    pub pre_indent: Option<usize>,
    /// Indent of the nearest non-blank line below the line at the split.
    pub post_indent: Option<usize>,
}

pub fn measure_split(lines: &[&[u8]], split: usize) -> SplitMeasurement {
    let n = lines.len();
    let (at_end, own) = if split >= n { (true, None) } else { (false, line_indent(lines[split])) };

    let mut pre_blank = 0;
    let mut pre_indent = None;
    for i in (0..split.min(n)).rev() {
        pre_indent = line_indent(lines[i]);
        if pre_indent.is_some() {
            break;
        }
        pre_blank += 1;
        if pre_blank == MAX_BLANKS {
            pre_indent = Some(0);
            break;
        }
    }

    let mut post_blank = 0;
    let mut post_indent = None;
    for line in lines.iter().skip(split + 1) {
        post_indent = line_indent(line);
        if post_indent.is_some() {
            break;
        }
        post_blank += 1;
        if post_blank == MAX_BLANKS {
            post_indent = Some(0);
            break;
        }
    }

    SplitMeasurement {
        at_start: pre_indent.is_none() && pre_blank == 0,
        at_end,
        blanks_before: pre_blank,
        blanks_after: if own.is_none() { 1 + post_blank } else { 0 },
        indent: own.or(post_indent),
        pre_indent,
        post_indent,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SplitScore {
    pub effective_indent: i64,
    pub penalty: i64,
}

impl std::ops::Add for SplitScore {
    type Output = SplitScore;

    fn add(self, o: SplitScore) -> SplitScore {
        SplitScore {
            effective_indent: self.effective_indent + o.effective_indent,
            penalty: self.penalty + o.penalty,
        }
    }
}

pub fn score_split(m: &SplitMeasurement, w: &IndentWeights) -> SplitScore {
    let mut penalty = 0;
    if m.at_start {
        penalty += w.start_of_file;
    }
    if m.at_end {
        penalty += w.end_of_file;
    }
    let total = (m.blanks_before + m.blanks_after) as i64;
    penalty += w.total_blank * total + w.post_blank * m.blanks_after as i64;
    let any_blanks = total != 0;
    let pick = |plain: i64, blank: i64| if any_blanks { blank } else { plain };
    if let (Some(indent), Some(pre)) = (m.indent, m.pre_indent) {
        penalty += match indent.cmp(&pre) {
            Ordering::Greater => pick(w.relative_indent, w.relative_indent_with_blank),
            Ordering::Equal => 0,
            Ordering::Less if m.post_indent.is_some_and(|p| p > indent) => {
                pick(w.relative_outdent, w.relative_outdent_with_blank)
            }
            Ordering::Less => pick(w.relative_dedent, w.relative_dedent_with_blank),
        };
    }
    SplitScore { effective_indent: m.indent.map_or(0, |i| i as i64), penalty }
}

/// Penalty part of [`score_split`].
pub fn split_penalty(m: &SplitMeasurement, w: &IndentWeights) -> i64 {
    score_split(m, w).penalty
}

/// Negative when `a` is the better position. The side with more total
/// indentation pays the bias.
pub fn compare_scores(a: &SplitScore, b: &SplitScore, w: &IndentWeights) -> i64 {
    let side = (a.effective_indent > b.effective_indent) as i64
        - (a.effective_indent < b.effective_indent) as i64;
    w.indent_bias * side + (a.penalty - b.penalty)
}

/// How far the group `[s, e)` can move up (negative) and down without
/// touching another flagged line.
pub fn slidable_range(flags: &[bool], tokens: &[Token], group: Range<usize>) -> (isize, isize) {
    let (s, e) = (group.start, group.end);
    if s == e {
        return (0, 0);
    }
    let mut up = 0;
    while s > up
        && tokens[s - up - 1] == tokens[e - up - 1]
        && !flags[s - up - 1]
        && (s - up - 1 == 0 || !flags[s - up - 2])
    {
        up += 1;
    }
    let n = tokens.len();
    let mut down = 0;
    while e + down < n
        && tokens[e + down] == tokens[s + down]
        && !flags[e + down]
        && (e + down + 1 == n || !flags[e + down + 1])
    {
        down += 1;
    }
    (-(up as isize), down as isize)
}

/// Best start position for the group among its slidable positions.
pub fn best_position(
    flags: &[bool],
    tokens: &[Token],
    lines: &[&[u8]],
    group: Range<usize>,
    w: &IndentWeights,
) -> usize {
    let (lo, hi) = slidable_range(flags, tokens, group.clone());
    let len = group.len();
    let mut best: Option<(usize, SplitScore)> = None;
    for shift in lo..=hi {
        let start = (group.start as isize + shift) as usize;
        let score = score_split(&measure_split(lines, start + len), w)
            + score_split(&measure_split(lines, start), w);
        if best.is_none_or(|(_, b)| compare_scores(&score, &b, w) < 0) {
            best = Some((start, score));
        }
    }
    best.map_or(group.start, |(s, _)| s)
}

/// Moves one group to its best position and returns where it ended up.
pub fn slide_group(
    flags: &mut [bool],
    tokens: &[Token],
    lines: &[&[u8]],
    group: Range<usize>,
    w: &IndentWeights,
) -> Range<usize> {
    let start = best_position(flags, tokens, lines, group.clone(), w);
    let len = group.len();
    flags[group].iter_mut().for_each(|f| *f = false);
    flags[start..start + len].iter_mut().for_each(|f| *f = true);
    start..start + len
}

/// Slides every pure insertion and deletion of a diff, repeating until no
/// group moves.
pub fn slide(changed: &mut ChangedLines, old: &InternedSequence, new: &InternedSequence, w: &IndentWeights) {
    let old_lines: Vec<&[u8]> = old.lines().collect();
    let new_lines: Vec<&[u8]> = new.lines().collect();
    for _ in 0..MAX_PASSES {
        let script = EditScript::from_flags_unchecked(changed);
        let mut moved = false;
        for c in &script.changes {
            let r = if c.old.is_empty() {
                slide_group(&mut changed.new, new.tokens(), &new_lines, c.new.clone(), w)
            } else if c.new.is_empty() {
                slide_group(&mut changed.old, old.tokens(), &old_lines, c.old.clone(), w)
            } else {
                continue;
            };
            moved |= r != if c.old.is_empty() { c.new.clone() } else { c.old.clone() };
        }
        if !moved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::intern_pair;

    fn lines(s: &str) -> Vec<&[u8]> {
        s.split_inclusive('\n').map(str::as_bytes).collect()
    }

    #[test]
    fn indent_columns() {
        assert_eq!(line_indent(b"x"), Some(0));
        assert_eq!(line_indent(b"    x"), Some(4));
        assert_eq!(line_indent(b"\tx"), Some(8));
        assert_eq!(line_indent(b"  \tx"), Some(8));
        assert_eq!(line_indent(b"   \n"), None);
    }

    #[test]
    fn penalty_examples() {
        let w = IndentWeights::default();
        let start = SplitMeasurement { at_start: true, indent: Some(0), ..Default::default() };
        assert_eq!(split_penalty(&start, &w), 1);
        let end = SplitMeasurement { at_end: true, ..Default::default() };
        assert_eq!(split_penalty(&end, &w), 21);
        let blanks = SplitMeasurement { blanks_before: 1, blanks_after: 1, ..Default::default() };
        assert_eq!(split_penalty(&blanks, &w), -54);
    }

    #[test]
    fn relation_weights() {
        let w = IndentWeights::default();
        let m = |indent, pre, post, blanks_before| SplitMeasurement {
            indent: Some(indent),
            pre_indent: Some(pre),
            post_indent: post,
            blanks_before,
            ..Default::default()
        };
        assert_eq!(split_penalty(&m(4, 0, None, 0), &w), -4);
        assert_eq!(split_penalty(&m(4, 0, None, 1), &w), -30 + 10);
        assert_eq!(split_penalty(&m(0, 4, Some(4), 0), &w), 24);
        assert_eq!(split_penalty(&m(0, 4, Some(0), 0), &w), 23);
        assert_eq!(split_penalty(&m(0, 4, None, 1), &w), -30 + 17);
    }

    #[test]
    fn measure_at_file_edges() {
        let l = lines("a\n  b\n");
        let top = measure_split(&l, 0);
        assert!(top.at_start && !top.at_end);
        assert_eq!(top.indent, Some(0));
        assert_eq!(top.post_indent, Some(2));
        let bottom = measure_split(&l, 2);
        assert!(bottom.at_end);
        assert_eq!(bottom.blanks_after, 1);
        assert_eq!(bottom.pre_indent, Some(2));
    }

    #[test]
    fn unslidable_group() {
        let t = [1, 2, 3].map(Token);
        assert_eq!(slidable_range(&[false, true, false], &t, 1..2), (0, 0));
    }

    #[test]
    fn slidable_insertion() {
        // a b b c with the second b inserted
        let t = [1, 2, 2, 3].map(Token);
        let (lo, hi) = slidable_range(&[false, false, true, false], &t, 2..3);
        assert_eq!((lo, hi), (-1, 0));
        assert!(hi - lo >= 1);
    }

    #[test]
    fn zero_weights_take_the_top_position() {
        let l = lines("x\nb\nb\nb\ny\n");
        let t = [1, 2, 2, 2, 3].map(Token);
        let mut f = vec![false, false, false, true, false];
        let r = slide_group(&mut f, &t, &l, 3..4, &IndentWeights::zero());
        assert_eq!(r, 1..2);
    }

    #[test]
    fn prefers_blank_separated_position() {
        // An inserted block followed by a blank line can sit on either side
        // of an existing blank line.
        let old = "a\n\nb\n";
        let new = "a\n\nx\n\nb\n";
        let (o, n) = intern_pair(old.as_bytes(), new.as_bytes());
        let mut f = ChangedLines::new(3, 5);
        f.new[1] = true;
        f.new[2] = true;
        slide(&mut f, &o, &n, &IndentWeights::default());
        assert_eq!(f.new, vec![false, false, true, true, false]);
        assert!(f.validate(o.tokens(), n.tokens()).is_ok());
    }

    #[test]
    fn sliding_is_idempotent_here() {
        let old = "a\n\nb\n";
        let new = "a\n\nx\n\nb\n";
        let (o, n) = intern_pair(old.as_bytes(), new.as_bytes());
        let mut f = ChangedLines::new(3, 5);
        f.new[1] = true;
        f.new[2] = true;
        slide(&mut f, &o, &n, &IndentWeights::default());
        let once = f.clone();
        slide(&mut f, &o, &n, &IndentWeights::default());
        assert_eq!(f, once);
    }
}
