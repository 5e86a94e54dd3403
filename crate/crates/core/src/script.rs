//! The two diff representations and conversions between them.

use std::ops::Range;

use thiserror::Error;

use crate::text::{InternedSequence, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("unflagged lines differ: old line {old} vs new line {new}")]
    InvalidFlags { old: usize, new: usize },
    #[error("flag vectors have lengths {old}/{new}, files have {old_len}/{new_len} lines")]
    LengthMismatch { old: usize, new: usize, old_len: usize, new_len: usize },
    #[error("change {index} is out of range or out of order")]
    Range { index: usize },
}

/// One flag per line of each file; `true` marks a changed line.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChangedLines {
    pub old: Vec<bool>,
    pub new: Vec<bool>,
}

impl ChangedLines {
    pub fn new(old_len: usize, new_len: usize) -> Self {
        ChangedLines { old: vec![false; old_len], new: vec![false; new_len] }
    }

    pub fn flagged_old(&self) -> usize {
        self.old.iter().filter(|&&f| f).count()
    }

    pub fn flagged_new(&self) -> usize {
        self.new.iter().filter(|&&f| f).count()
    }

    /// Total flagged lines in both files, the usual size of a diff.
    pub fn flagged(&self) -> usize {
        self.flagged_old() + self.flagged_new()
    }

    pub fn is_unchanged(&self) -> bool {
        self.flagged() == 0
    }

    /// Checks the common-subsequence property against the two files.
    pub fn validate(&self, old: &[Token], new: &[Token]) -> Result<(), ScriptError> {
        EditScript::from_flags(self, old, new).map(|_| ())
    }
}

/// A hunk: `old[old.start..old.end]` is replaced by `new[new.start..new.end]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Change {
    pub old: Range<usize>,
    pub new: Range<usize>,
}

impl Change {
    pub fn new(old: Range<usize>, new: Range<usize>) -> Self {
        Change { old, new }
    }

    pub fn is_insertion(&self) -> bool {
        self.old.is_empty()
    }

    pub fn is_deletion(&self) -> bool {
        self.new.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EditScript {
    pub changes: Vec<Change>,
}

impl EditScript {
    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.changes.len()
    }

    /// Groups runs of flagged lines into hunks, checking that the unflagged
    /// lines of both files agree.
    pub fn from_flags(
        flags: &ChangedLines,
        old: &[Token],
        new: &[Token],
    ) -> Result<Self, ScriptError> {
        if flags.old.len() != old.len() || flags.new.len() != new.len() {
            return Err(ScriptError::LengthMismatch {
                old: flags.old.len(),
                new: flags.new.len(),
                old_len: old.len(),
                new_len: new.len(),
            });
        }
        let script = Self::from_flags_unchecked(flags);
        let mut i = 0;
        let mut j = 0;
        let check = |to_i: usize, to_j: usize, i: &mut usize, j: &mut usize| {
            while *i < to_i && *j < to_j {
                if old[*i] != new[*j] {
                    return Err(ScriptError::InvalidFlags { old: *i, new: *j });
                }
                *i += 1;
                *j += 1;
            }
            if *i != to_i || *j != to_j {
                return Err(ScriptError::InvalidFlags { old: *i, new: *j });
            }
            Ok(())
        };
        for c in &script.changes {
            check(c.old.start, c.new.start, &mut i, &mut j)?;
            i = c.old.end;
            j = c.new.end;
        }
        check(old.len(), new.len(), &mut i, &mut j)?;
        Ok(script)
    }

    /// Grouping without content checks; unequal unflagged counts still
    /// produce a script, just not a meaningful one.
    pub fn from_flags_unchecked(flags: &ChangedLines) -> Self {
        let (n, m) = (flags.old.len(), flags.new.len());
        let mut changes = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < n || j < m {
            let oi = i < n && flags.old[i];
            let nj = j < m && flags.new[j];
            if oi || nj {
                let (si, sj) = (i, j);
                while i < n && flags.old[i] {
                    i += 1;
                }
                while j < m && flags.new[j] {
                    j += 1;
                }
                changes.push(Change::new(si..i, sj..j));
            } else {
                i = (i + 1).min(n);
                j = (j + 1).min(m);
            }
        }
        EditScript { changes }
    }

    pub fn to_flags(&self, old_len: usize, new_len: usize) -> ChangedLines {
        let mut flags = ChangedLines::new(old_len, new_len);
        for c in &self.changes {
            flags.old[c.old.clone()].iter_mut().for_each(|f| *f = true);
            flags.new[c.new.clone()].iter_mut().for_each(|f| *f = true);
        }
        flags
    }

    /// Ordering and bounds check against files of the given lengths.
    pub fn check_ranges(&self, old_len: usize, new_len: usize) -> Result<(), ScriptError> {
        let (mut po, mut pn) = (0, 0);
        for (index, c) in self.changes.iter().enumerate() {
            let ok = c.old.start >= po
                && c.new.start >= pn
                && c.old.start <= c.old.end
                && c.new.start <= c.new.end
                && c.old.end <= old_len
                && c.new.end <= new_len
                && !(c.old.is_empty() && c.new.is_empty())
                && c.new.start - pn == c.old.start - po;
            if !ok {
                return Err(ScriptError::Range { index });
            }
            po = c.old.end;
            pn = c.new.end;
        }
        if new_len - pn != old_len - po {
            return Err(ScriptError::Range { index: self.changes.len() });
        }
        Ok(())
    }

    /// Rebuilds the new file: unchanged stretches come from `old`, replaced
    /// ranges from `new`.
    pub fn apply(
        &self,
        old: &InternedSequence,
        new: &InternedSequence,
    ) -> Result<Vec<u8>, ScriptError> {
        let mut out = Vec::with_capacity(new.as_bytes().len());
        let mut pos = 0;
        for (index, c) in self.changes.iter().enumerate() {
            if c.old.start < pos
                || c.old.start > c.old.end
                || c.old.end > old.len()
                || c.new.start > c.new.end
                || c.new.end > new.len()
            {
                return Err(ScriptError::Range { index });
            }
            out.extend_from_slice(old.slice_bytes(pos, c.old.start));
            out.extend_from_slice(new.slice_bytes(c.new.start, c.new.end));
            pos = c.old.end;
        }
        out.extend_from_slice(old.slice_bytes(pos, old.len()));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::intern_pair;

    fn flags(old: &[u8], new: &[u8]) -> ChangedLines {
        ChangedLines {
            old: old.iter().map(|&b| b == 1).collect(),
            new: new.iter().map(|&b| b == 1).collect(),
        }
    }

    #[test]
    fn no_flags_no_changes() {
        let (a, b) = intern_pair(b"a\nb\n", b"a\nb\n");
        let s = EditScript::from_flags(&ChangedLines::new(2, 2), a.tokens(), b.tokens()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn substitution() {
        let (a, b) = intern_pair(b"a\nb\nc\n", b"a\nX\nc\n");
        let s = EditScript::from_flags(&flags(&[0, 1, 0], &[0, 1, 0]), a.tokens(), b.tokens())
            .unwrap();
        assert_eq!(s.changes, vec![Change::new(1..2, 1..2)]);
    }

    #[test]
    fn pure_deletion() {
        let (a, b) = intern_pair(b"a\nb\n", b"b\n");
        let s = EditScript::from_flags(&flags(&[1, 0], &[0]), a.tokens(), b.tokens()).unwrap();
        assert_eq!(s.changes, vec![Change::new(0..1, 0..0)]);
        assert!(s.changes[0].is_deletion());
    }

    #[test]
    fn invalid_flags_are_rejected() {
        let (a, b) = intern_pair(b"a\nb\n", b"a\nc\n");
        let err = EditScript::from_flags(&flags(&[0, 0], &[0, 0]), a.tokens(), b.tokens());
        assert_eq!(err, Err(ScriptError::InvalidFlags { old: 1, new: 1 }));
        let err = EditScript::from_flags(&flags(&[0, 1], &[0, 0]), a.tokens(), b.tokens());
        assert!(err.is_err());
    }

    #[test]
    fn flags_round_trip() {
        let f = flags(&[1, 0, 1, 1, 0], &[0, 1, 0, 1]);
        let s = EditScript::from_flags_unchecked(&f);
        assert_eq!(s.to_flags(5, 4), f);
        assert!(s.check_ranges(5, 4).is_ok());
    }

    #[test]
    fn apply_identity_and_replacement() {
        let (a, b) = intern_pair(b"a\nb\na\nb\n", b"a\nb\na\nb\na\nb\n");
        assert_eq!(EditScript::default().apply(&a, &b).unwrap(), a.as_bytes());
        let s = EditScript { changes: vec![Change::new(4..4, 4..6)] };
        assert_eq!(s.apply(&a, &b).unwrap(), b.as_bytes());
    }

    #[test]
    fn apply_rejects_bad_ranges() {
        let (a, b) = intern_pair(b"a\n", b"b\n");
        let s = EditScript { changes: vec![Change::new(0..3, 0..1)] };
        assert_eq!(s.apply(&a, &b), Err(ScriptError::Range { index: 0 }));
        assert!(s.check_ranges(1, 1).is_err());
    }
}
