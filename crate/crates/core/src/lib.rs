//! Depth-limited game-tree search with transposition tables, together with
//! the executable correctness theory needed to test it.
//!
//! The crate is organised bottom-up:
//!
//! - [`tree`]: the immutable game-tree model, truncation and structural identity.
//! - [`format`]: the canonical text format for trees.
//! - [`reference`]: plain minimax/negamax, used as the oracle for everything else.
//! - [`alphabeta`]: window predicates plus fail-soft and fail-hard alpha-beta.
//! - [`tt`]: transposition tables and the table-based negamax searches.
//! - [`witness`]: all-or-none expansions and the brute-force witness checker.
//! - [`harness`]: random generation, differential fuzzing, counterexample
//!   search and shrinking.
//! - [`dot`]: Graphviz rendering.

pub mod alphabeta;
pub mod dot;
mod error;
pub mod format;
pub mod harness;
pub mod reference;
pub mod tree;
pub mod tt;
pub mod witness;

pub use alphabeta::Window;
pub use error::{Error, Result};
pub use tree::{Color, Node, Score, INFINITY, MAX_EVAL};
pub use tt::{Flag, HybridOptions, TableEntry, TranspositionTable};
pub use witness::{Verdict, WitnessReport};

/// Default enumeration budget for witness checks.
pub const DEFAULT_GUARD: u64 = 100_000;
