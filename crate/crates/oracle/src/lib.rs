//! Deliberately naive reference computations.
//!
//! Nothing here shares code with the diff engines. Every function refuses
//! inputs above its size guard instead of approximating.

use std::collections::BTreeSet;

use thiserror::Error;

/// Largest sequence length accepted by the LCS routines.
pub const MAX_LCS_LEN: usize = 2000;
/// Largest permutation accepted by [`all_lis`].
pub const MAX_LIS_LEN: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("input of length {len} exceeds the oracle guard of {limit}")]
    SizeGuard { len: usize, limit: usize },
}

fn guard(len: usize, limit: usize) -> Result<(), OracleError> {
    if len > limit {
        Err(OracleError::SizeGuard { len, limit })
    } else {
        Ok(())
    }
}

/// Full (N+1)×(M+1) table of LCS lengths of prefixes.
#[derive(Debug, Clone)]
pub struct DpTable {
    cols: usize,
    cells: Vec<u32>,
}

impl DpTable {
    pub fn build<T: Eq>(a: &[T], b: &[T]) -> Result<Self, OracleError> {
        guard(a.len(), MAX_LCS_LEN)?;
        guard(b.len(), MAX_LCS_LEN)?;
        let cols = b.len() + 1;
        let mut cells = vec![0u32; (a.len() + 1) * cols];
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                cells[i * cols + j] = if a[i - 1] == b[j - 1] {
                    cells[(i - 1) * cols + j - 1] + 1
                } else {
                    cells[(i - 1) * cols + j].max(cells[i * cols + j - 1])
                };
            }
        }
        Ok(DpTable { cols, cells })
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.cells[i * self.cols + j] as usize
    }

    pub fn rows(&self) -> usize {
        self.cells.len() / self.cols
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The bottom-right cell.
    pub fn lcs(&self) -> usize {
        self.cells[self.cells.len() - 1] as usize
    }
}

/// Length of a longest common subsequence, bottom-up.
pub fn lcs_length<T: Eq>(a: &[T], b: &[T]) -> Result<usize, OracleError> {
    Ok(DpTable::build(a, b)?.lcs())
}

/// Same quantity computed top-down with memoisation over suffixes.
pub fn lcs_length_memo<T: Eq>(a: &[T], b: &[T]) -> Result<usize, OracleError> {
    guard(a.len(), MAX_LCS_LEN)?;
    guard(b.len(), MAX_LCS_LEN)?;
    let mut memo = vec![None; (a.len() + 1) * (b.len() + 1)];
    Ok(suffix_lcs(a, b, 0, 0, &mut memo))
}

fn suffix_lcs<T: Eq>(a: &[T], b: &[T], i: usize, j: usize, memo: &mut [Option<u32>]) -> usize {
    if i == a.len() || j == b.len() {
        return 0;
    }
    let key = i * (b.len() + 1) + j;
    if let Some(v) = memo[key] {
        return v as usize;
    }
    let v = if a[i] == b[j] {
        1 + suffix_lcs(a, b, i + 1, j + 1, memo)
    } else {
        suffix_lcs(a, b, i + 1, j, memo).max(suffix_lcs(a, b, i, j + 1, memo))
    };
    memo[key] = Some(v as u32);
    v
}

/// Number of flagged lines in a shortest line diff: (N − lcs) + (M − lcs).
pub fn min_edit_distance<T: Eq>(a: &[T], b: &[T]) -> Result<usize, OracleError> {
    let l = lcs_length(a, b)?;
    Ok(a.len() + b.len() - 2 * l)
}

/// Every longest strictly increasing subsequence, by subset enumeration.
pub fn all_lis(perm: &[i64]) -> Result<BTreeSet<Vec<i64>>, OracleError> {
    guard(perm.len(), MAX_LIS_LEN)?;
    let n = perm.len();
    let mut best = 0;
    let mut found = BTreeSet::new();
    for mask in 0u32..(1u32 << n) {
        let len = mask.count_ones() as usize;
        if len < best {
            continue;
        }
        let picked: Vec<i64> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| perm[i]).collect();
        if picked.windows(2).all(|w| w[0] < w[1]) {
            if len > best {
                best = len;
                found.clear();
            }
            found.insert(picked);
        }
    }
    Ok(found)
}

/// True when the unflagged entries of `a` and `b`, in order, are equal.
pub fn flags_are_consistent<T: Eq>(a: &[T], fa: &[bool], b: &[T], fb: &[bool]) -> bool {
    if a.len() != fa.len() || b.len() != fb.len() {
        return false;
    }
    let ka = a.iter().zip(fa).filter(|(_, f)| !**f).map(|(x, _)| x);
    let kb = b.iter().zip(fb).filter(|(_, f)| !**f).map(|(x, _)| x);
    ka.eq(kb)
}
