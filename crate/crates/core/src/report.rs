//! Text reports shared with the command-line tool. Output depends only on
//! the inputs, so reports are byte-identical across runs.

use std::fmt::Write as _;

use crate::error::Result;
use crate::phptree::build_php_tree;
use crate::simple::{
    build_graph, delayer_wins_lengths, find_loops, play_records, play_simplified, Play, SimpleStrategy,
};

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if parts.is_empty() {
        "none".to_string()
    } else {
        parts.join(" ")
    }
}

/// Strategy graph, loops, loose pairs, php-tree summary and win certificate.
pub fn analyze(strat: &SimpleStrategy, s_max: u32) -> String {
    let mut out = String::new();
    let g = build_graph(strat);
    writeln!(out, "strategy n={} pigeons={} s={} init={}", strat.n(), strat.pigeons(), strat.s(), strat.init())
        .unwrap();
    writeln!(out, "graph").unwrap();
    for p in 0..strat.pigeons() {
        let edges = join(g.out_edges(p).map(|(e, q)| format!("{e}->{q}")));
        writeln!(out, "  {p}: {edges}").unwrap();
    }
    writeln!(out, "loops {}", join(find_loops(strat))).unwrap();
    let tree = build_php_tree(strat);
    let loose = tree.loose_pairs(&strat.size());
    writeln!(out, "loose-pairs {}", join(&loose)).unwrap();
    writeln!(
        out,
        "php-tree nodes={} depth={} valid={} complete={} symmetric={}",
        tree.len(),
        tree.depth(),
        tree.is_valid(),
        tree.is_complete(),
        tree.is_symmetric()
    )
    .unwrap();
    let cert = delayer_wins_lengths(strat, s_max);
    let losing: Vec<u32> = (1..=cert.s_max).filter(|s| !cert.explicit.contains(s)).collect();
    writeln!(out, "certificate s-max={} preperiod={} period={}", cert.s_max, cert.preperiod, cert.period).unwrap();
    writeln!(out, "  residues {}", join(&cert.residues)).unwrap();
    writeln!(out, "  prover-wins-at {}", join(&losing)).unwrap();
    match cert.first_loss() {
        Some(s) => writeln!(out, "  first-loss {s}").unwrap(),
        None => writeln!(out, "  first-loss none").unwrap(),
    }
    writeln!(out, "delayer-wins-at-s {}", cert.wins(strat.s())).unwrap();
    writeln!(out, "delayer-wins-all-s {}", cert.all_winning()).unwrap();
    out
}

/// Record trace and outcome of one play.
pub fn play_trace(strat: &SimpleStrategy, play: &Play) -> Result<String> {
    let outcome = play_simplified(strat, play)?;
    let mut out = String::new();
    for (i, r) in play_records(strat, &play.answers).iter().enumerate() {
        writeln!(out, "record {} {r}", i + 1).unwrap();
    }
    writeln!(out, "outcome {outcome}").unwrap();
    Ok(out)
}
