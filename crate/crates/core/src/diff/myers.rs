//! Myers' O(ND) divide and conquer search, with the snake and cost-budget
//! cutoffs, and the line classification run before it.
//!
//! The search keeps a forward and a backward frontier (furthest x per
//! diagonal `d = x - y`) and grows both until they meet. Without the
//! cutoffs the meeting point lies on an optimal path, so the result is a
//! shortest edit script.

use std::collections::HashMap;

use crate::script::ChangedLines;
use crate::text::Token;

/// Smallest power of two whose square is at least `n`; `approx_sqrt(0) == 1`.
pub fn approx_sqrt(n: usize) -> usize {
    let mut p = 1usize;
    while p.saturating_mul(p) < n {
        p <<= 1;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Preprocessing with the frequent-line rule and both cutoffs.
    Myers,
    /// Exact shortest edit script.
    Minimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub enable_heuristics: bool,
    /// Diagonal run length that counts as a snake.
    pub snake_length: usize,
    /// Edit cost after which the snake cutoff may fire.
    pub min_steps: usize,
    /// Floor for the cost budget.
    pub min_budget: usize,
}

impl HeuristicConfig {
    pub const fn myers() -> Self {
        HeuristicConfig { enable_heuristics: true, snake_length: 20, min_steps: 256, min_budget: 256 }
    }

    pub const fn minimal() -> Self {
        HeuristicConfig { enable_heuristics: false, ..Self::myers() }
    }

    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Myers => Self::myers(),
            Mode::Minimal => Self::minimal(),
        }
    }

    /// Cost after which the search gives up and takes the furthest point.
    /// `n` is the combined length of both residual files.
    pub fn step_budget(&self, n: usize) -> usize {
        approx_sqrt(n).max(self.min_budget)
    }
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self::myers()
    }
}

const SIMSCAN_WINDOW: usize = 100;
const FREQUENT_RUN_FACTOR: usize = 4;
const MAX_EQ_LIMIT: usize = 1024;
const SCORE_FACTOR: i64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Unmatched,
    Normal,
    Frequent,
}

/// Outcome of the pre-search pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessClassification {
    pub prefix_len: usize,
    pub suffix_len: usize,
    /// Lines flagged before the search runs.
    pub pre_changed: ChangedLines,
    /// Indices of old lines handed to the search, ascending.
    pub kept_old: Vec<usize>,
    pub kept_new: Vec<usize>,
}

fn counts(seq: &[Token]) -> HashMap<Token, usize> {
    let mut m = HashMap::new();
    for &t in seq {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

/// Decides whether a frequent line at `i` sits inside a run dominated by
/// unmatched lines; only then is it discarded.
fn discard_frequent(class: &[Class], i: usize, start: usize, end: usize) -> bool {
    let s = start.max(i.saturating_sub(SIMSCAN_WINDOW));
    let e = end.min(i + SIMSCAN_WINDOW);
    let (mut unmatched_before, mut frequent_before) = (0, 1);
    let mut r = 1;
    while r <= i && i - r >= s {
        match class[i - r] {
            Class::Unmatched => unmatched_before += 1,
            Class::Frequent => frequent_before += 1,
            Class::Normal => break,
        }
        r += 1;
    }
    if unmatched_before == 0 {
        return false;
    }
    let (mut unmatched_after, mut frequent_after) = (0, 1);
    let mut r = 1;
    while i + r <= e {
        match class[i + r] {
            Class::Unmatched => unmatched_after += 1,
            Class::Frequent => frequent_after += 1,
            Class::Normal => break,
        }
        r += 1;
    }
    if unmatched_after == 0 {
        return false;
    }
    let unmatched = unmatched_before + unmatched_after;
    let frequent = frequent_before + frequent_after;
    frequent * FREQUENT_RUN_FACTOR < frequent + unmatched
}

fn classify(own: &[Token], other: &HashMap<Token, usize>, lo: usize, hi: usize, mode: Mode) -> Vec<Class> {
    let limit = approx_sqrt(own.len()).min(MAX_EQ_LIMIT);
    let mut class = vec![Class::Normal; own.len()];
    for i in lo..hi {
        let nm = other.get(&own[i]).copied().unwrap_or(0);
        class[i] = if nm == 0 {
            Class::Unmatched
        } else if nm > limit && mode == Mode::Myers {
            Class::Frequent
        } else {
            Class::Normal
        };
    }
    class
}

/// Strips the common prefix and suffix, then flags lines that cannot be
/// matched. In [`Mode::Myers`] a line matching many lines of the other file
/// is also flagged when it is surrounded mostly by unmatched lines.
pub fn preprocess(old: &[Token], new: &[Token], mode: Mode) -> PreprocessClassification {
    let lim = old.len().min(new.len());
    let prefix_len = old.iter().zip(new).take_while(|(a, b)| a == b).count();
    let suffix_len = old[prefix_len..]
        .iter()
        .rev()
        .zip(new[prefix_len..].iter().rev())
        .take(lim - prefix_len)
        .take_while(|(a, b)| a == b)
        .count();
    let (old_hi, new_hi) = (old.len() - suffix_len, new.len() - suffix_len);

    let old_counts = counts(old);
    let new_counts = counts(new);
    let old_class = classify(old, &new_counts, prefix_len, old_hi, mode);
    let new_class = classify(new, &old_counts, prefix_len, new_hi, mode);

    let mut pre_changed = ChangedLines::new(old.len(), new.len());
    let pick = |class: &[Class], hi: usize, flags: &mut [bool]| -> Vec<usize> {
        let mut kept = Vec::new();
        if hi == prefix_len {
            return kept;
        }
        for i in prefix_len..hi {
            let keep = match class[i] {
                Class::Normal => true,
                Class::Frequent => !discard_frequent(class, i, prefix_len, hi - 1),
                Class::Unmatched => false,
            };
            if keep {
                kept.push(i);
            } else {
                flags[i] = true;
            }
        }
        kept
    };
    let kept_old = pick(&old_class, old_hi, &mut pre_changed.old);
    let kept_new = pick(&new_class, new_hi, &mut pre_changed.new);
    PreprocessClassification { prefix_len, suffix_len, pre_changed, kept_old, kept_new }
}

/// Full pipeline: classification, then the search on the surviving lines.
pub fn diff(old: &[Token], new: &[Token], mode: Mode) -> ChangedLines {
    let pre = preprocess(old, new, mode);
    let a: Vec<Token> = pre.kept_old.iter().map(|&i| old[i]).collect();
    let b: Vec<Token> = pre.kept_new.iter().map(|&i| new[i]).collect();
    let inner = diff_myers(&a, &b, &HeuristicConfig::for_mode(mode));
    let mut out = pre.pre_changed;
    for (k, &i) in pre.kept_old.iter().enumerate() {
        out.old[i] = inner.old[k];
    }
    for (k, &j) in pre.kept_new.iter().enumerate() {
        out.new[j] = inner.new[k];
    }
    out
}

/// Forward and backward frontiers, indexed by diagonal.
#[derive(Debug, Clone)]
pub struct EditGraphSearchState {
    forward: Vec<i64>,
    backward: Vec<i64>,
    base: i64,
}

impl EditGraphSearchState {
    fn new(n: usize, m: usize) -> Self {
        let size = n + m + 3;
        EditGraphSearchState { forward: vec![0; size], backward: vec![0; size], base: m as i64 + 1 }
    }

    /// Furthest x reached by the forward search on diagonal `d`.
    pub fn forward(&self, d: i64) -> i64 {
        self.forward[(d + self.base) as usize]
    }

    pub fn backward(&self, d: i64) -> i64 {
        self.backward[(d + self.base) as usize]
    }

    fn set_f(&mut self, d: i64, v: i64) {
        self.forward[(d + self.base) as usize] = v;
    }

    fn set_b(&mut self, d: i64, v: i64) {
        self.backward[(d + self.base) as usize] = v;
    }
}

struct Split {
    i1: usize,
    i2: usize,
    min_lo: bool,
    min_hi: bool,
}

struct Search<'a> {
    a: &'a [Token],
    b: &'a [Token],
    cfg: HeuristicConfig,
    budget: i64,
    st: EditGraphSearchState,
}

impl Search<'_> {
    fn eq(&self, i: i64, j: i64) -> bool {
        self.a[i as usize] == self.b[j as usize]
    }

    fn split(&mut self, off1: usize, lim1: usize, off2: usize, lim2: usize, need_min: bool) -> Split {
        let (off1, lim1, off2, lim2) = (off1 as i64, lim1 as i64, off2 as i64, lim2 as i64);
        let snake = self.cfg.snake_length as i64;
        let dmin = off1 - lim2;
        let dmax = lim1 - off2;
        let fmid = off1 - off2;
        let bmid = lim1 - lim2;
        let odd = (fmid - bmid) & 1 != 0;
        let (mut fmin, mut fmax) = (fmid, fmid);
        let (mut bmin, mut bmax) = (bmid, bmid);
        let done = |i1: i64, i2: i64, lo: bool, hi: bool| Split {
            i1: i1 as usize,
            i2: i2 as usize,
            min_lo: lo,
            min_hi: hi,
        };

        self.st.set_f(fmid, off1);
        self.st.set_b(bmid, lim1);

        let mut ec: i64 = 0;
        loop {
            ec += 1;
            let mut got_snake = false;

            if fmin > dmin {
                fmin -= 1;
                self.st.set_f(fmin - 1, -1);
            } else {
                fmin += 1;
            }
            if fmax < dmax {
                fmax += 1;
                self.st.set_f(fmax + 1, -1);
            } else {
                fmax -= 1;
            }
            let mut d = fmax;
            while d >= fmin {
                let mut i1 = if self.st.forward(d - 1) >= self.st.forward(d + 1) {
                    self.st.forward(d - 1) + 1
                } else {
                    self.st.forward(d + 1)
                };
                let prev = i1;
                let mut i2 = i1 - d;
                while i1 < lim1 && i2 < lim2 && self.eq(i1, i2) {
                    i1 += 1;
                    i2 += 1;
                }
                if i1 - prev > snake {
                    got_snake = true;
                }
                self.st.set_f(d, i1);
                if odd && bmin <= d && d <= bmax && self.st.backward(d) <= i1 {
                    return done(i1, i2, true, true);
                }
                d -= 2;
            }

            if bmin > dmin {
                bmin -= 1;
                self.st.set_b(bmin - 1, i64::MAX);
            } else {
                bmin += 1;
            }
            if bmax < dmax {
                bmax += 1;
                self.st.set_b(bmax + 1, i64::MAX);
            } else {
                bmax -= 1;
            }
            let mut d = bmax;
            while d >= bmin {
                let mut i1 = if self.st.backward(d - 1) < self.st.backward(d + 1) {
                    self.st.backward(d - 1)
                } else {
                    self.st.backward(d + 1) - 1
                };
                let prev = i1;
                let mut i2 = i1 - d;
                while i1 > off1 && i2 > off2 && self.eq(i1 - 1, i2 - 1) {
                    i1 -= 1;
                    i2 -= 1;
                }
                if prev - i1 > snake {
                    got_snake = true;
                }
                self.st.set_b(d, i1);
                if !odd && fmin <= d && d <= fmax && i1 <= self.st.forward(d) {
                    return done(i1, i2, true, true);
                }
                d -= 2;
            }

            if need_min {
                continue;
            }

            if got_snake && ec > self.cfg.min_steps as i64 {
                let mut best = 0;
                let mut at = (0, 0);
                let mut d = fmin;
                while d <= fmax {
                    let dd = (d - fmid).abs();
                    let i1 = self.st.forward(d);
                    let i2 = i1 - d;
                    let v = (i1 - off1) + (i2 - off2) - dd;
                    if v > SCORE_FACTOR * ec
                        && v > best
                        && off1 + snake <= i1
                        && i1 < lim1
                        && off2 + snake <= i2
                        && i2 < lim2
                        && (1..=snake).all(|k| self.eq(i1 - k, i2 - k))
                    {
                        best = v;
                        at = (i1, i2);
                    }
                    d += 2;
                }
                if best > 0 {
                    return done(at.0, at.1, true, false);
                }

                let mut d = bmin;
                while d <= bmax {
                    let dd = (d - bmid).abs();
                    let i1 = self.st.backward(d);
                    let i2 = i1 - d;
                    let v = (lim1 - i1) + (lim2 - i2) - dd;
                    if v > SCORE_FACTOR * ec
                        && v > best
                        && off1 < i1
                        && i1 <= lim1 - snake
                        && off2 < i2
                        && i2 <= lim2 - snake
                        && (0..snake).all(|k| self.eq(i1 + k, i2 + k))
                    {
                        best = v;
                        at = (i1, i2);
                    }
                    d += 2;
                }
                if best > 0 {
                    return done(at.0, at.1, false, true);
                }
            }

            if ec >= self.budget {
                let (mut fbest, mut fbest1) = (-1, -1);
                let mut d = fmax;
                while d >= fmin {
                    let mut i1 = self.st.forward(d).min(lim1);
                    let mut i2 = i1 - d;
                    if lim2 < i2 {
                        i1 = lim2 + d;
                        i2 = lim2;
                    }
                    if fbest < i1 + i2 {
                        fbest = i1 + i2;
                        fbest1 = i1;
                    }
                    d -= 2;
                }
                let (mut bbest, mut bbest1) = (i64::MAX, i64::MAX);
                let mut d = bmax;
                while d >= bmin {
                    let mut i1 = off1.max(self.st.backward(d));
                    let mut i2 = i1 - d;
                    if i2 < off2 {
                        i1 = off2 + d;
                        i2 = off2;
                    }
                    if i1 + i2 < bbest {
                        bbest = i1 + i2;
                        bbest1 = i1;
                    }
                    d -= 2;
                }
                return if (lim1 + lim2) - bbest < fbest - (off1 + off2) {
                    done(fbest1, fbest - fbest1, true, false)
                } else {
                    done(bbest1, bbest - bbest1, false, true)
                };
            }
        }
    }
}

/// The search alone, on already classified input.
pub fn diff_myers(a: &[Token], b: &[Token], cfg: &HeuristicConfig) -> ChangedLines {
    let mut out = ChangedLines::new(a.len(), b.len());
    let mut search = Search {
        a,
        b,
        cfg: *cfg,
        budget: cfg.step_budget(a.len() + b.len()) as i64,
        st: EditGraphSearchState::new(a.len(), b.len()),
    };
    let mut stack = vec![(0, a.len(), 0, b.len(), !cfg.enable_heuristics)];
    while let Some((mut off1, mut lim1, mut off2, mut lim2, need_min)) = stack.pop() {
        while off1 < lim1 && off2 < lim2 && a[off1] == b[off2] {
            off1 += 1;
            off2 += 1;
        }
        while off1 < lim1 && off2 < lim2 && a[lim1 - 1] == b[lim2 - 1] {
            lim1 -= 1;
            lim2 -= 1;
        }
        if off1 == lim1 {
            out.new[off2..lim2].iter_mut().for_each(|f| *f = true);
        } else if off2 == lim2 {
            out.old[off1..lim1].iter_mut().for_each(|f| *f = true);
        } else {
            let s = search.split(off1, lim1, off2, lim2, need_min);
            stack.push((s.i1, lim1, s.i2, lim2, s.min_hi));
            stack.push((off1, s.i1, off2, s.i2, s.min_lo));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Interner;

    fn toks(s: &str) -> Vec<Token> {
        s.bytes().map(|b| Token(b as u32)).collect()
    }

    #[test]
    fn approx_sqrt_values() {
        assert_eq!(approx_sqrt(0), 1);
        assert_eq!(approx_sqrt(1), 1);
        assert_eq!(approx_sqrt(2), 2);
        assert_eq!(approx_sqrt(100), 16);
        assert_eq!(approx_sqrt(256), 16);
        assert_eq!(approx_sqrt(257), 32);
    }

    #[test]
    fn budget_never_below_floor() {
        let c = HeuristicConfig::myers();
        assert_eq!(c.step_budget(10), 256);
        assert_eq!(c.step_budget(1 << 20), 1024);
    }

    #[test]
    fn identical_input_is_stripped() {
        let a = toks("abcabc");
        let p = preprocess(&a, &a, Mode::Myers);
        assert_eq!(p.prefix_len, 6);
        assert!(p.kept_old.is_empty() && p.kept_new.is_empty());
        assert!(diff(&a, &a, Mode::Myers).is_unchanged());
    }

    #[test]
    fn prefix_suffix_and_unmatched() {
        let p = preprocess(&toks("xaz"), &toks("xbz"), Mode::Minimal);
        assert_eq!((p.prefix_len, p.suffix_len), (1, 1));
        assert_eq!(p.pre_changed.old, vec![false, true, false]);
        assert_eq!(p.pre_changed.new, vec![false, true, false]);
    }

    #[test]
    fn classic_grid_minimal() {
        let (a, b) = (toks("ABCABBBA"), toks("CCBABAC"));
        let f = diff(&a, &b, Mode::Minimal);
        assert_eq!(f.flagged(), 7);
        assert!(f.validate(&a, &b).is_ok());
    }

    #[test]
    fn empty_sides() {
        let a = toks("abc");
        assert_eq!(diff(&a, &[], Mode::Myers).flagged(), 3);
        assert_eq!(diff(&[], &a, Mode::Minimal).flagged(), 3);
        assert!(diff(&[], &[], Mode::Myers).is_unchanged());
    }

    /// A line that matches many lines of the other file, sandwiched between
    /// unmatched lines, is flagged only in myers mode.
    #[test]
    fn frequent_line_flagged_only_in_myers_mode() {
        let mut t = Interner::new();
        let old = t.intern(b"p1\np2\np3\np4\n */\nq1\nq2\nq3\n");
        let new = t.intern(b" */\ns\n */\ns\n */\ns\n */\ns\n */\ns\n");
        let fast = diff(old.tokens(), new.tokens(), Mode::Myers);
        let exact = diff(old.tokens(), new.tokens(), Mode::Minimal);
        assert!(fast.old[4]);
        assert!(!exact.old[4]);
        assert_eq!(exact.flagged(), 8 - 1 + 10 - 1);
        assert!(fast.flagged() > exact.flagged());
    }

    #[test]
    fn frequent_line_next_to_normal_line_is_kept() {
        let class = [Class::Normal, Class::Frequent, Class::Unmatched, Class::Unmatched];
        assert!(!discard_frequent(&class, 1, 0, 3));
        let class = [Class::Unmatched; 9];
        let mut c = class.to_vec();
        c[4] = Class::Frequent;
        assert!(discard_frequent(&c, 4, 0, 8));
    }

    #[test]
    fn budget_cutoff_still_valid() {
        // Two long unrelated halves force a large edit cost.
        let a: Vec<Token> = (0..1200).map(|i| Token(i % 7)).collect();
        let b: Vec<Token> = (0..1200).map(|i| Token((i * 3 + 1) % 11)).collect();
        let f = diff_myers(&a, &b, &HeuristicConfig::myers());
        assert!(f.validate(&a, &b).is_ok());
    }
}
