//! Patience diff: anchor on lines that are unique in both ranges, take a
//! longest increasing subsequence of those anchors, recurse in between.

use std::collections::HashMap;

use super::myers::{self, Mode};
use crate::script::ChangedLines;
use crate::text::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniqueMatch {
    pub pos_a: usize,
    pub pos_b: usize,
    /// Index into the input list of the predecessor chosen during sorting.
    pub previous: Option<usize>,
}

impl UniqueMatch {
    pub fn new(pos_a: usize, pos_b: usize) -> Self {
        UniqueMatch { pos_a, pos_b, previous: None }
    }
}

enum Seen {
    Once(usize),
    Many,
}

/// Lines occurring exactly once in `a` and once in `b`, ordered by position in `a`.
pub fn find_matching_unique_lines(a: &[Token], b: &[Token]) -> Vec<UniqueMatch> {
    let (matches, _) = unique_matches(a, b);
    matches
}

/// Also reports whether any line of `b` occurs in `a` at all.
fn unique_matches(a: &[Token], b: &[Token]) -> (Vec<UniqueMatch>, bool) {
    let mut in_a: HashMap<Token, (usize, bool)> = HashMap::with_capacity(a.len());
    for (i, &t) in a.iter().enumerate() {
        in_a.entry(t).and_modify(|e| e.1 = false).or_insert((i, true));
    }
    let mut in_b: HashMap<Token, Seen> = HashMap::new();
    let mut any_common = false;
    for (j, &t) in b.iter().enumerate() {
        if in_a.contains_key(&t) {
            any_common = true;
            in_b.entry(t).and_modify(|s| *s = Seen::Many).or_insert(Seen::Once(j));
        }
    }
    let mut out: Vec<UniqueMatch> = in_b
        .iter()
        .filter_map(|(t, s)| match (s, in_a[t]) {
            (Seen::Once(j), (i, true)) => Some(UniqueMatch::new(i, *j)),
            _ => None,
        })
        .collect();
    out.sort_by_key(|m| m.pos_a);
    (out, any_common)
}

/// Longest subsequence with strictly increasing `pos_b`, by patience sorting.
/// The chain is read back from the top card of the last pile.
pub fn patience_lis(matches: &[UniqueMatch]) -> Vec<UniqueMatch> {
    let mut linked: Vec<UniqueMatch> = matches.to_vec();
    let mut piles: Vec<usize> = Vec::new();
    for k in 0..linked.len() {
        let key = linked[k].pos_b;
        let p = piles.partition_point(|&top| linked[top].pos_b < key);
        linked[k].previous = if p == 0 { None } else { Some(piles[p - 1]) };
        if p == piles.len() {
            piles.push(k);
        } else {
            piles[p] = k;
        }
    }
    let mut chain = Vec::with_capacity(piles.len());
    let mut cur = piles.last().copied();
    while let Some(k) = cur {
        chain.push(linked[k]);
        cur = linked[k].previous;
    }
    chain.reverse();
    chain
}

pub fn diff_patience(a: &[Token], b: &[Token]) -> ChangedLines {
    let mut out = ChangedLines::new(a.len(), b.len());
    let mut work = vec![(0, a.len(), 0, b.len())];
    while let Some((lo1, hi1, lo2, hi2)) = work.pop() {
        if lo1 == hi1 || lo2 == hi2 {
            out.old[lo1..hi1].iter_mut().for_each(|f| *f = true);
            out.new[lo2..hi2].iter_mut().for_each(|f| *f = true);
            continue;
        }
        let (sa, sb) = (&a[lo1..hi1], &b[lo2..hi2]);
        let (matches, any_common) = unique_matches(sa, sb);
        if !any_common {
            out.old[lo1..hi1].iter_mut().for_each(|f| *f = true);
            out.new[lo2..hi2].iter_mut().for_each(|f| *f = true);
            continue;
        }
        let lis = patience_lis(&matches);
        if lis.is_empty() {
            let sub = myers::diff(sa, sb, Mode::Myers);
            out.old[lo1..hi1].copy_from_slice(&sub.old);
            out.new[lo2..hi2].copy_from_slice(&sub.new);
            continue;
        }

        // Walk the anchors, growing each run of matches outward and queueing
        // the unmatched stretches between them.
        let (mut l1, mut l2) = (lo1, lo2);
        let mut k = 0;
        loop {
            let (mut n1, mut n2) = match lis.get(k) {
                Some(m) => (lo1 + m.pos_a, lo2 + m.pos_b),
                None => (hi1, hi2),
            };
            if k < lis.len() {
                while n1 > l1 && n2 > l2 && a[n1 - 1] == b[n2 - 1] {
                    n1 -= 1;
                    n2 -= 1;
                }
            }
            while l1 < n1 && l2 < n2 && a[l1] == b[l2] {
                l1 += 1;
                l2 += 1;
            }
            if n1 > l1 || n2 > l2 {
                work.push((l1, n1, l2, n2));
            }
            if k == lis.len() {
                break;
            }
            while k + 1 < lis.len()
                && lis[k + 1].pos_a == lis[k].pos_a + 1
                && lis[k + 1].pos_b == lis[k].pos_b + 1
            {
                k += 1;
            }
            l1 = lo1 + lis[k].pos_a + 1;
            l2 = lo2 + lis[k].pos_b + 1;
            k += 1;
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

    fn pairs(m: &[UniqueMatch]) -> Vec<(usize, usize)> {
        m.iter().map(|x| (x.pos_a, x.pos_b)).collect()
    }

    fn from_b(seq: &[usize]) -> Vec<UniqueMatch> {
        seq.iter().enumerate().map(|(i, &b)| UniqueMatch::new(i, b)).collect()
    }

    #[test]
    fn unique_matches_examples() {
        let abc = toks("abc");
        assert_eq!(pairs(&find_matching_unique_lines(&abc, &abc)), vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(pairs(&find_matching_unique_lines(&toks("aab"), &toks("ba"))), vec![(2, 0)]);
        assert!(find_matching_unique_lines(&toks("ab"), &toks("cd")).is_empty());
    }

    #[test]
    fn lis_of_card_example() {
        let lis = patience_lis(&from_b(&[5, 4, 7, 8, 1, 3, 9, 6]));
        assert_eq!(lis.iter().map(|m| m.pos_b).collect::<Vec<_>>(), vec![4, 7, 8, 9]);
    }

    #[test]
    fn lis_edge_cases() {
        let inc = patience_lis(&from_b(&[1, 2, 3]));
        assert_eq!(inc.len(), 3);
        let dec = patience_lis(&from_b(&[3, 2, 1]));
        assert_eq!(pairs(&dec), vec![(2, 1)]);
        assert!(patience_lis(&[]).is_empty());
    }

    #[test]
    fn identical_and_empty() {
        let a = toks("abcab");
        assert!(diff_patience(&a, &a).is_unchanged());
        assert_eq!(diff_patience(&a, &[]).flagged(), 5);
    }

    #[test]
    fn no_unique_lines_falls_back() {
        let (a, b) = (toks("bcb"), toks("cbc"));
        assert_eq!(diff_patience(&a, &b), myers::diff(&a, &b, Mode::Myers));
    }

    #[test]
    fn no_common_lines_flags_everything() {
        let f = diff_patience(&toks("ab"), &toks("cd"));
        assert_eq!(f.flagged(), 4);
    }

    #[test]
    fn permutation_cost_matches_lis() {
        let a = toks("abcdefgh");
        let b = toks("bdacfehg");
        let f = diff_patience(&a, &b);
        assert!(f.validate(&a, &b).is_ok());
        let lis = patience_lis(&find_matching_unique_lines(&a, &b)).len();
        assert_eq!(f.flagged(), 2 * (8 - lis));
    }
}
