//! Splitting files into lines and interning them.
//!
//! A line keeps its terminating `\n`, so `"a"` at end of file and `"a\n"`
//! are different tokens. `\r` is ordinary content.

use std::collections::HashMap;
use std::fmt;

/// Opaque id of a distinct line within one [`Interner`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(pub u32);

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Shared line table for the two or three files of one diff or merge.
#[derive(Debug, Default, Clone)]
pub struct Interner {
    ids: HashMap<Vec<u8>, Token>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct lines seen so far.
    pub fn distinct(&self) -> usize {
        self.ids.len()
    }

    pub fn intern(&mut self, text: &[u8]) -> InternedSequence {
        let bounds = line_bounds(text);
        let tokens = bounds
            .windows(2)
            .map(|w| {
                let line = &text[w[0]..w[1]];
                let next = Token(self.ids.len() as u32);
                *self.ids.entry(line.to_vec()).or_insert(next)
            })
            .collect();
        InternedSequence { tokens, text: text.to_vec(), bounds }
    }
}

/// Offsets of line starts plus the final end offset.
fn line_bounds(text: &[u8]) -> Vec<usize> {
    let mut bounds = vec![0];
    let mut start = 0;
    while start < text.len() {
        let end = match text[start..].iter().position(|&b| b == b'\n') {
            Some(p) => start + p + 1,
            None => text.len(),
        };
        bounds.push(end);
        start = end;
    }
    bounds
}

/// Splits after every `\n`; a trailing fragment without one is its own line.
pub fn split_lines(text: &[u8]) -> Vec<&[u8]> {
    line_bounds(text).windows(2).map(|w| &text[w[0]..w[1]]).collect()
}

/// Interns two files with one table.
pub fn intern_pair(a: &[u8], b: &[u8]) -> (InternedSequence, InternedSequence) {
    let mut t = Interner::new();
    (t.intern(a), t.intern(b))
}

/// Interns three files with one table (base, left, right order is up to the caller).
pub fn intern_triple(
    a: &[u8],
    b: &[u8],
    c: &[u8],
) -> (InternedSequence, InternedSequence, InternedSequence) {
    let mut t = Interner::new();
    (t.intern(a), t.intern(b), t.intern(c))
}

/// A file as a list of line tokens plus the original bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternedSequence {
    tokens: Vec<Token>,
    text: Vec<u8>,
    bounds: Vec<usize>,
}

impl InternedSequence {
    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.text
    }

    /// Raw bytes of line `i`, including its `\n` when present.
    pub fn line(&self, i: usize) -> &[u8] {
        &self.text[self.bounds[i]..self.bounds[i + 1]]
    }

    /// Line `i` without the terminator.
    pub fn content(&self, i: usize) -> &[u8] {
        let l = self.line(i);
        l.strip_suffix(b"\n").unwrap_or(l)
    }

    pub fn missing_newline(&self, i: usize) -> bool {
        !self.line(i).ends_with(b"\n")
    }

    /// Concatenated bytes of lines `[start, end)`.
    pub fn slice_bytes(&self, start: usize, end: usize) -> &[u8] {
        &self.text[self.bounds[start]..self.bounds[end]]
    }

    pub fn lines(&self) -> impl Iterator<Item = &[u8]> + '_ {
        (0..self.len()).map(move |i| self.line(i))
    }
}
