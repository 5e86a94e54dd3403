//! Histogram diff: split on the common region whose rarest old-file line is
//! least frequent, then recurse on both sides of it.

use std::collections::HashMap;

use super::myers::{self, Mode};
use crate::script::ChangedLines;
use crate::text::Token;

/// Occurrence counts above this make the sub-problem go to myers instead.
pub const MAX_CHAIN_LENGTH: usize = 64;

/// Positions of every token in the old range, ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OccurrenceIndex {
    pub occurrences: HashMap<Token, Vec<usize>>,
    pub has_common: bool,
    /// `None` stands for "no region seen yet".
    pub lowest_record_count: Option<usize>,
}

impl OccurrenceIndex {
    pub fn count(&self, t: Token) -> usize {
        self.occurrences.get(&t).map_or(0, Vec::len)
    }
}

pub fn scan_a(old: &[Token]) -> OccurrenceIndex {
    let mut occurrences: HashMap<Token, Vec<usize>> = HashMap::new();
    for (i, &t) in old.iter().enumerate() {
        occurrences.entry(t).or_default().push(i);
    }
    OccurrenceIndex { occurrences, has_common: false, lowest_record_count: None }
}

/// Matching stretch `old[begin1..=end1] == new[begin2..=end2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub begin1: usize,
    pub end1: usize,
    pub begin2: usize,
    pub end2: usize,
    pub record_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Region(Region),
    /// No line of `new` occurs in `old`.
    None,
    /// Every common line is too frequent.
    Fallback,
}

fn try_lcs(
    index: &mut OccurrenceIndex,
    best: &mut Option<Region>,
    old: &[Token],
    new: &[Token],
    b_ptr: usize,
) -> usize {
    let mut b_next = b_ptr + 1;
    let Some(positions) = index.occurrences.get(&new[b_ptr]) else {
        return b_next;
    };
    index.has_common = true;
    let count = positions.len();
    if index.lowest_record_count.is_some_and(|low| count > low) {
        return b_next;
    }
    let mut k = 0;
    while k < positions.len() {
        let (mut as_, mut bs) = (positions[k], b_ptr);
        let (mut ae, mut be) = (as_, bs);
        let mut rc = count;
        while as_ > 0 && bs > 0 && old[as_ - 1] == new[bs - 1] {
            as_ -= 1;
            bs -= 1;
            if rc > 1 {
                rc = rc.min(index.count(old[as_]));
            }
        }
        while ae + 1 < old.len() && be + 1 < new.len() && old[ae + 1] == new[be + 1] {
            ae += 1;
            be += 1;
            if rc > 1 {
                rc = rc.min(index.count(old[ae]));
            }
        }
        if b_next <= be {
            b_next = be + 1;
        }
        let longer = best.map_or(ae - as_ > 0, |r| r.end1 - r.begin1 < ae - as_);
        let rarer = index.lowest_record_count.is_none_or(|low| rc < low);
        if longer || rarer {
            *best = Some(Region { begin1: as_, end1: ae, begin2: bs, end2: be, record_count: rc });
            index.lowest_record_count = Some(rc);
        }
        k += 1;
        while k < positions.len() && positions[k] <= ae {
            k += 1;
        }
    }
    b_next
}

/// Scans `new` left to right, expanding every occurrence into a maximal
/// common stretch and keeping the best one.
pub fn find_split(old: &[Token], new: &[Token]) -> Split {
    let mut index = scan_a(old);
    let mut best = None;
    let mut b = 0;
    while b < new.len() {
        b = try_lcs(&mut index, &mut best, old, new, b);
    }
    if index.has_common && index.lowest_record_count.is_none_or(|c| c > MAX_CHAIN_LENGTH) {
        return Split::Fallback;
    }
    match best {
        Some(r) => Split::Region(r),
        None => Split::None,
    }
}

pub fn diff_histogram(old: &[Token], new: &[Token]) -> ChangedLines {
    let mut out = ChangedLines::new(old.len(), new.len());
    let mut work = vec![(0, old.len(), 0, new.len())];
    while let Some((lo1, hi1, lo2, hi2)) = work.pop() {
        if lo1 == hi1 || lo2 == hi2 {
            out.old[lo1..hi1].iter_mut().for_each(|f| *f = true);
            out.new[lo2..hi2].iter_mut().for_each(|f| *f = true);
            continue;
        }
        let (a, b) = (&old[lo1..hi1], &new[lo2..hi2]);
        match find_split(a, b) {
            Split::Region(r) => {
                debug_assert!(a[r.begin1..=r.end1] == b[r.begin2..=r.end2]);
                work.push((lo1 + r.end1 + 1, hi1, lo2 + r.end2 + 1, hi2));
                work.push((lo1, lo1 + r.begin1, lo2, lo2 + r.begin2));
            }
            Split::None => {
                out.old[lo1..hi1].iter_mut().for_each(|f| *f = true);
                out.new[lo2..hi2].iter_mut().for_each(|f| *f = true);
            }
            Split::Fallback => {
                let sub = myers::diff(a, b, Mode::Myers);
                out.old[lo1..hi1].copy_from_slice(&sub.old);
                out.new[lo2..hi2].copy_from_slice(&sub.new);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Token> {
        s.bytes().map(|b| Token(b as u32)).collect()
    }

    #[test]
    fn scan_examples() {
        let idx = scan_a(&toks("aba"));
        assert_eq!(idx.occurrences[&Token(b'a' as u32)], vec![0, 2]);
        assert_eq!(idx.occurrences[&Token(b'b' as u32)], vec![1]);
        assert!(scan_a(&[]).occurrences.is_empty());
        let many = vec![Token(1); 70];
        assert_eq!(scan_a(&many).count(Token(1)), 70);
    }

    #[test]
    fn shared_prefix_region() {
        match find_split(&toks("xAy"), &toks("xAz")) {
            Split::Region(r) => assert_eq!((r.begin1, r.end1, r.begin2, r.end2), (0, 1, 0, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nothing_in_common() {
        assert_eq!(find_split(&toks("ab"), &toks("cd")), Split::None);
        assert_eq!(diff_histogram(&toks("ab"), &toks("cd")).flagged(), 4);
    }

    #[test]
    fn too_frequent_lines_fall_back() {
        let old: Vec<Token> = (0..130).map(|i| Token(i % 2)).collect();
        let new: Vec<Token> = (0..3).map(|_| Token(0)).collect();
        assert_eq!(find_split(&old, &new), Split::Fallback);
        let f = diff_histogram(&old, &new);
        assert!(f.validate(&old, &new).is_ok());
    }

    #[test]
    fn extends_through_the_last_line() {
        match find_split(&toks("zab"), &toks("ab")) {
            Split::Region(r) => assert_eq!((r.begin1, r.end1), (1, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identical_input() {
        let a = toks("abcabcabc");
        assert!(diff_histogram(&a, &a).is_unchanged());
    }

    #[test]
    fn moved_unique_line_pivot() {
        // A moves from the top to the bottom past repeated pairs.
        let old = toks("Abcbcbc");
        let new = toks("bcbcbcA");
        let f = diff_histogram(&old, &new);
        assert!(f.validate(&old, &new).is_ok());
        assert_eq!(f.flagged(), 12);
        assert!(!f.old[0] && !f.new[6]);
    }
}
