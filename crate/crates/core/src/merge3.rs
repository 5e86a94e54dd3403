//! Three-way merge of two edit scripts against a common ancestor.
//!
//! Both sides are diffed against the ancestor. Walking the two hunk lists
//! together yields one-sided regions, identical changes and conflicts.
//! Conflicts can then be narrowed by diffing their two sides against each
//! other ("zealous" refinement) and are finally rendered with markers.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use thiserror::Error;

use crate::diff::{self, Algorithm};
use crate::script::{EditScript, ScriptError};
use crate::text::{Interner, InternedSequence, Token};

pub const MARKER_SIZE: usize = 7;
/// Conflicts at most this many lines apart (exclusive) are joined after refinement.
pub const JOIN_GAP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    LeftChange,
    RightChange,
    SameChange,
    Conflict,
}

impl RegionKind {
    fn mirrored(self) -> Self {
        match self {
            RegionKind::LeftChange => RegionKind::RightChange,
            RegionKind::RightChange => RegionKind::LeftChange,
            k => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MergeRegion {
    pub kind: RegionKind,
    pub ancestor: Range<usize>,
    pub left: Range<usize>,
    pub right: Range<usize>,
}

impl MergeRegion {
    fn new(kind: RegionKind, ancestor: Range<usize>, left: Range<usize>, right: Range<usize>) -> Self {
        MergeRegion { kind, ancestor, left, right }
    }

    pub fn is_conflict(&self) -> bool {
        self.kind == RegionKind::Conflict
    }

    /// The same region seen from a merge with the two sides exchanged.
    pub fn mirrored(&self) -> Self {
        MergeRegion {
            kind: self.kind.mirrored(),
            ancestor: self.ancestor.clone(),
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConflictStyle {
    #[default]
    Merge,
    Diff3,
    Zdiff3,
}

impl FromStr for ConflictStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "merge" => Ok(ConflictStyle::Merge),
            "diff3" => Ok(ConflictStyle::Diff3),
            "zdiff3" => Ok(ConflictStyle::Zdiff3),
            _ => Err(format!("unknown conflict style `{s}` (expected merge, diff3 or zdiff3)")),
        }
    }
}

impl fmt::Display for ConflictStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConflictStyle::Merge => "merge",
            ConflictStyle::Diff3 => "diff3",
            ConflictStyle::Zdiff3 => "zdiff3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub left: String,
    pub base: String,
    pub right: String,
}

impl Default for Labels {
    fn default() -> Self {
        Labels { left: "ours".into(), base: "base".into(), right: "theirs".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOptions {
    pub algorithm: Algorithm,
    pub style: ConflictStyle,
    pub zealous: bool,
    pub labels: Labels,
    /// Demote conflicts whose sides became equal after joining. Turning this
    /// off reproduces older behaviour.
    pub recheck_false_conflicts: bool,
    pub marker_size: usize,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions {
            algorithm: Algorithm::Histogram,
            style: ConflictStyle::Merge,
            zealous: true,
            labels: Labels::default(),
            recheck_false_conflicts: true,
            marker_size: MARKER_SIZE,
        }
    }
}

impl MergeOptions {
    pub fn validate(&self) -> Result<(), MergeError> {
        if self.zealous && self.style == ConflictStyle::Diff3 {
            return Err(MergeError::IncompatibleOptions(
                "zealous refinement cannot be combined with the diff3 style".into(),
            ));
        }
        if self.marker_size == 0 {
            return Err(MergeError::IncompatibleOptions("marker size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("incompatible merge options: {0}")]
    IncompatibleOptions(String),
    #[error("merge regions out of order at region {0}")]
    InvariantViolation(usize),
    #[error(transparent)]
    Script(#[from] ScriptError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOutcome {
    pub regions: Vec<MergeRegion>,
    pub rendered: Vec<u8>,
    pub conflict_count: usize,
    /// Lines inside conflict blocks, both sides together.
    pub conflict_line_count: usize,
}

impl MergeOutcome {
    pub fn is_clean(&self) -> bool {
        self.conflict_count == 0
    }
}

/// `r` moved by `by`, keeping `len` lines. A hunk left over after a conflict
/// can start before the file start; it is joined with that conflict anyway.
fn shift(r: &Range<usize>, by: i64, len: usize) -> Range<usize> {
    let start = r.start as i64 + by;
    start.max(0) as usize..(start + len as i64) as usize
}

/// Appends, joining with the previous region when the two touch on either side.
fn append(list: &mut Vec<MergeRegion>, m: MergeRegion) {
    if let Some(last) = list.last_mut() {
        if m.left.start <= last.left.end || m.right.start <= last.right.end {
            if last.kind != m.kind {
                last.kind = RegionKind::Conflict;
            }
            last.ancestor.end = m.ancestor.end;
            last.left.end = m.left.end;
            last.right.end = m.right.end;
            return;
        }
    }
    list.push(m);
}

fn same_change(cl: &crate::script::Change, cr: &crate::script::Change, l: &[Token], r: &[Token]) -> bool {
    cl.old == cr.old && l[cl.new.clone()] == r[cr.new.clone()]
}

/// Walks both hunk lists. Identical changes come back in the second list.
fn walk(
    cl: &EditScript,
    cr: &EditScript,
    o_len: usize,
    l: &[Token],
    r: &[Token],
) -> (Vec<MergeRegion>, Vec<MergeRegion>) {
    let (xl, xr) = (&cl.changes, &cr.changes);
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    let mut same = Vec::new();
    while i < xl.len() && j < xr.len() {
        let (a, b) = (&xl[i], &xr[j]);
        if a.old.end < b.old.start {
            let right = shift(&b.new, a.old.start as i64 - b.old.start as i64, a.old.len());
            append(&mut out, MergeRegion::new(RegionKind::LeftChange, a.old.clone(), a.new.clone(), right));
            i += 1;
            continue;
        }
        if b.old.end < a.old.start {
            let left = shift(&a.new, b.old.start as i64 - a.old.start as i64, b.old.len());
            append(&mut out, MergeRegion::new(RegionKind::RightChange, b.old.clone(), left, b.new.clone()));
            j += 1;
            continue;
        }
        if same_change(a, b, l, r) {
            same.push(MergeRegion::new(RegionKind::SameChange, a.old.clone(), a.new.clone(), b.new.clone()));
        } else {
            let off = a.old.start as i64 - b.old.start as i64;
            let ffo = a.old.end as i64 - b.old.end as i64;
            let (mut i0, mut i1, mut i2) = (a.old.start as i64, a.new.start as i64, b.new.start as i64);
            if off > 0 {
                i0 -= off;
                i1 -= off;
            } else {
                i2 += off;
            }
            let (mut e0, mut e1, mut e2) = (a.old.end as i64, a.new.end as i64, b.new.end as i64);
            if ffo < 0 {
                e0 -= ffo;
                e1 -= ffo;
            } else {
                e2 += ffo;
            }
            append(
                &mut out,
                MergeRegion::new(
                    RegionKind::Conflict,
                    i0 as usize..e0 as usize,
                    i1 as usize..e1 as usize,
                    i2 as usize..e2 as usize,
                ),
            );
        }
        let (ea, eb) = (a.old.end, b.old.end);
        if ea >= eb {
            j += 1;
        }
        if eb >= ea {
            i += 1;
        }
    }
    let dl = l.len() as i64 - o_len as i64;
    let dr = r.len() as i64 - o_len as i64;
    for a in &xl[i..] {
        let right = shift(&a.old, dr, a.old.len());
        append(&mut out, MergeRegion::new(RegionKind::LeftChange, a.old.clone(), a.new.clone(), right));
    }
    for b in &xr[j..] {
        let left = shift(&b.old, dl, b.old.len());
        append(&mut out, MergeRegion::new(RegionKind::RightChange, b.old.clone(), left, b.new.clone()));
    }
    (out, same)
}

/// Drops identical changes swallowed by a joined region and sorts the rest in.
fn combine(mut regions: Vec<MergeRegion>, same: Vec<MergeRegion>) -> Vec<MergeRegion> {
    for s in same {
        let covered = regions.iter().any(|m| {
            m.ancestor.start <= s.ancestor.start
                && s.ancestor.end <= m.ancestor.end
                && m.left.start <= s.left.start
                && s.left.end <= m.left.end
        });
        if !covered {
            regions.push(s);
        }
    }
    regions.sort_by_key(|m| (m.left.start, m.left.end, m.ancestor.start));
    regions
}

/// Checks that regions are ordered and disjoint in all three files.
pub fn validate_regions(regions: &[MergeRegion]) -> Result<(), MergeError> {
    for (k, w) in regions.windows(2).enumerate() {
        let (p, q) = (&w[0], &w[1]);
        if q.ancestor.start < p.ancestor.end || q.left.start < p.left.end || q.right.start < p.right.end {
            return Err(MergeError::InvariantViolation(k + 1));
        }
    }
    for (k, m) in regions.iter().enumerate() {
        if m.ancestor.start > m.ancestor.end || m.left.start > m.left.end || m.right.start > m.right.end {
            return Err(MergeError::InvariantViolation(k));
        }
    }
    Ok(())
}

/// Classifies every hunk of the two scripts into merge regions.
pub fn compute_merge_regions(
    changes_l: &EditScript,
    changes_r: &EditScript,
    o: &[Token],
    l: &[Token],
    r: &[Token],
) -> Result<Vec<MergeRegion>, MergeError> {
    changes_l.check_ranges(o.len(), l.len())?;
    changes_r.check_ranges(o.len(), r.len())?;
    let (regions, same) = walk(changes_l, changes_r, o.len(), l, r);
    let all = combine(regions, same);
    validate_regions(&all)?;
    Ok(all)
}

/// Splits each conflict along a diff of its two sides, then joins conflicts
/// that ended up fewer than [`JOIN_GAP`] lines apart. Same-change regions in
/// the input do not keep conflicts apart; those produced here do.
pub fn refine_zealous(
    regions: Vec<MergeRegion>,
    l: &[Token],
    r: &[Token],
    algorithm: Algorithm,
) -> Vec<MergeRegion> {
    let (same, rest): (Vec<_>, Vec<_>) = regions.into_iter().partition(|m| m.kind == RegionKind::SameChange);
    let mut refined = Vec::with_capacity(rest.len());
    for m in rest {
        if m.kind != RegionKind::Conflict || m.left.is_empty() || m.right.is_empty() {
            refined.push(m);
            continue;
        }
        let flags = diff::diff(algorithm, &l[m.left.clone()], &r[m.right.clone()]);
        let script = EditScript::from_flags_unchecked(&flags);
        if script.is_empty() {
            refined.push(MergeRegion { kind: RegionKind::SameChange, ..m });
            continue;
        }
        for (k, c) in script.changes.iter().enumerate() {
            let ancestor = if k == 0 { m.ancestor.clone() } else { m.ancestor.end..m.ancestor.end };
            refined.push(MergeRegion::new(
                RegionKind::Conflict,
                ancestor,
                m.left.start + c.old.start..m.left.start + c.old.end,
                m.right.start + c.new.start..m.right.start + c.new.end,
            ));
        }
    }

    let mut joined: Vec<MergeRegion> = Vec::with_capacity(refined.len());
    for m in refined {
        if let Some(last) = joined.last_mut() {
            if last.is_conflict() && m.is_conflict() && m.left.start - last.left.end < JOIN_GAP {
                last.ancestor.end = m.ancestor.end;
                last.left.end = m.left.end;
                last.right.end = m.right.end;
                continue;
            }
        }
        joined.push(m);
    }
    combine(joined, same)
}

/// Trims lines common to the start and end of both sides of each conflict.
pub fn trim_conflicts(regions: &mut [MergeRegion], l: &[Token], r: &[Token]) {
    for m in regions.iter_mut().filter(|m| m.is_conflict()) {
        while !m.left.is_empty() && !m.right.is_empty() && l[m.left.start] == r[m.right.start] {
            m.left.start += 1;
            m.right.start += 1;
        }
        while !m.left.is_empty() && !m.right.is_empty() && l[m.left.end - 1] == r[m.right.end - 1] {
            m.left.end -= 1;
            m.right.end -= 1;
        }
    }
}

/// Turns conflicts with token-identical sides into same-change regions.
pub fn recheck_false_conflicts(regions: &mut [MergeRegion], l: &[Token], r: &[Token]) {
    for m in regions.iter_mut().filter(|m| m.is_conflict()) {
        if l[m.left.clone()] == r[m.right.clone()] {
            m.kind = RegionKind::SameChange;
        }
    }
}

fn copy_lines(out: &mut Vec<u8>, seq: &InternedSequence, range: Range<usize>, ensure_newline: bool) {
    if range.is_empty() {
        return;
    }
    out.extend_from_slice(seq.slice_bytes(range.start, range.end));
    if ensure_newline && seq.missing_newline(range.end - 1) {
        out.push(b'\n');
    }
}

fn marker(out: &mut Vec<u8>, ch: u8, size: usize, label: &str) {
    out.extend(std::iter::repeat_n(ch, size));
    if !label.is_empty() {
        out.push(b' ');
        out.extend_from_slice(label.as_bytes());
    }
    out.push(b'\n');
}

/// Produces the merged file. Text between regions comes from the left file.
pub fn render(
    regions: &[MergeRegion],
    o: &InternedSequence,
    l: &InternedSequence,
    r: &InternedSequence,
    options: &MergeOptions,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(l.as_bytes().len().max(r.as_bytes().len()));
    let mut pos = 0;
    let size = options.marker_size;
    for m in regions {
        if m.kind == RegionKind::SameChange {
            continue;
        }
        copy_lines(&mut out, l, pos..m.left.start, false);
        match m.kind {
            RegionKind::LeftChange => copy_lines(&mut out, l, m.left.clone(), false),
            RegionKind::RightChange => copy_lines(&mut out, r, m.right.clone(), false),
            _ => {
                marker(&mut out, b'<', size, &options.labels.left);
                copy_lines(&mut out, l, m.left.clone(), true);
                if options.style != ConflictStyle::Merge {
                    marker(&mut out, b'|', size, &options.labels.base);
                    copy_lines(&mut out, o, m.ancestor.clone(), true);
                }
                marker(&mut out, b'=', size, "");
                copy_lines(&mut out, r, m.right.clone(), true);
                marker(&mut out, b'>', size, &options.labels.right);
            }
        }
        pos = m.left.end;
    }
    copy_lines(&mut out, l, pos..l.len(), false);
    out
}

/// Region computation and refinement without rendering.
pub fn merge_regions(
    o: &[Token],
    l: &[Token],
    r: &[Token],
    options: &MergeOptions,
) -> Result<Vec<MergeRegion>, MergeError> {
    options.validate()?;
    let dl = diff::diff(options.algorithm, o, l);
    let dr = diff::diff(options.algorithm, o, r);
    let sl = EditScript::from_flags(&dl, o, l)?;
    let sr = EditScript::from_flags(&dr, o, r)?;
    let mut regions = compute_merge_regions(&sl, &sr, o, l, r)?;
    match options.style {
        ConflictStyle::Zdiff3 => trim_conflicts(&mut regions, l, r),
        _ if options.zealous => regions = refine_zealous(regions, l, r, options.algorithm),
        _ => {}
    }
    if options.recheck_false_conflicts {
        recheck_false_conflicts(&mut regions, l, r);
    }
    validate_regions(&regions)?;
    Ok(regions)
}

/// Diffs both sides against the ancestor, builds and refines the regions,
/// and renders the result. All three inputs must come from one [`Interner`].
pub fn merge3(
    o: &InternedSequence,
    l: &InternedSequence,
    r: &InternedSequence,
    options: &MergeOptions,
) -> Result<MergeOutcome, MergeError> {
    let regions = merge_regions(o.tokens(), l.tokens(), r.tokens(), options)?;
    let rendered = render(&regions, o, l, r, options);
    let conflicts = regions.iter().filter(|m| m.is_conflict());
    let conflict_count = conflicts.clone().count();
    let conflict_line_count = conflicts.map(|m| m.left.len() + m.right.len()).sum();
    Ok(MergeOutcome { regions, rendered, conflict_count, conflict_line_count })
}

/// [`merge3`] on raw file contents.
pub fn merge_bytes(base: &[u8], left: &[u8], right: &[u8], options: &MergeOptions) -> Result<MergeOutcome, MergeError> {
    let mut t = Interner::new();
    let (o, l, r) = (t.intern(base), t.intern(left), t.intern(right));
    merge3(&o, &l, &r, options)
}
