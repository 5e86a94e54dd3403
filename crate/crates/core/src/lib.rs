//! Line-based diffing and three-way merging in the style of Git's xdiff,
//! plus a small in-memory commit graph that merges, cherry-picks, reverts
//! and rebases on top of it.

pub mod diff;
pub mod graph;
pub mod merge3;
pub mod script;
pub mod slider;
pub mod text;
pub mod unified;

pub use diff::{diff, Algorithm};
pub use merge3::{merge3, merge_bytes, ConflictStyle, MergeOptions, MergeOutcome, MergeRegion, RegionKind};
pub use script::{Change, ChangedLines, EditScript};
pub use text::{intern_pair, intern_triple, InternedSequence, Interner, Token};
