//! Shipped data: the cover-by-two figures, the four-pigeon example
//! strategy, and the small php-tree example.

use crate::phptree::PhpTree;
use crate::simple::{FigureSpec, SimpleStrategy};

/// All cover-by-two figures, instantiated at `n = 3`.
pub const FIGURES_SRC: &str = include_str!("../data/figures.cover");
/// Strategy file of the four-pigeon example (initial question `0`).
pub const FIG1_SRC: &str = include_str!("../data/fig1.strat");
/// php-tree text of the small example tree.
pub const PHP1_SRC: &str = include_str!("../data/php1.tree");

pub fn figures() -> Vec<FigureSpec> {
    FigureSpec::parse_all(FIGURES_SRC).expect("shipped figures parse")
}

pub fn figure(name: &str) -> Option<FigureSpec> {
    figures().into_iter().find(|f| f.name == name)
}

/// The example strategy with a chosen initial question and length.
pub fn fig1_strategy(init: u32, s: u32) -> SimpleStrategy {
    let base = SimpleStrategy::from_text(FIG1_SRC).expect("shipped strategy parses");
    SimpleStrategy::new(base.size(), s, init, base.table().to_vec()).expect("valid parameters")
}

pub fn php1_tree() -> PhpTree {
    PhpTree::from_text(PHP1_SRC).expect("shipped tree parses")
}
