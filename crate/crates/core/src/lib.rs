//! Engines, analyzers, and exhaustive verifiers for Prover/Delayer pebble
//! games over the pigeonhole principle.
//!
//! * [`matching`]: records, partial matchings, minimal covers.
//! * [`tree`]: index-sequence trees and the tree order `≺`.
//! * [`g1`]: the plain pebble game on sequences of matchings.
//! * [`g2`]: the backtracking game on labeled subtrees, and its aux-free variant.
//! * [`simple`]: the two-record game `(s, F)`, its strategy graph, and the
//!   decision procedure for Delayer wins at every length.
//! * [`phptree`]: pigeon/hole labeled trees and the strategy reductions.
//! * [`figures`]: shipped cover-by-two certificates and sample strategies.
//! * [`verify`]: verification campaigns.
//! * [`report`]: text reports shared with the command-line tool.

pub mod error;
pub mod figures;
pub mod g1;
pub mod g2;
pub mod matching;
pub mod phptree;
pub mod report;
pub mod simple;
pub(crate) mod text;
pub mod tree;
pub(crate) mod util;
pub mod verify;

pub use error::{Error, Result};
