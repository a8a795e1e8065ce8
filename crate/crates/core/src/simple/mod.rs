//! The two-record game `(s, F)`.
//!
//! Prover's next question depends only on the last record `(p, h)`: it is
//! `F(p, h)`, and the first question is `init`. Delayer may not contradict
//! the previous record; after `s` answers the last record is compared with
//! every earlier one.

pub mod certify;
pub mod cover;

use std::fmt;

use crate::error::{invalid, parse_err, Result};
use crate::matching::{records_conflict, GameSize, Hole, Pigeon, Record};
use crate::text;

pub use certify::{
    brute_force_delayer_wins, brute_force_witness, canonical_revisit, delayer_wins_lengths, Certifier, WinCertificate,
    DEFAULT_BRUTE_BUDGET,
};
pub use cover::{check_cover_by_two, cover_report, unroll, CoverReport, FigureSpec, PathSpec};

/// Largest table the bitmask machinery supports.
pub const MAX_CELLS: u32 = 64;

/// Prover strategy `(s, init, F)`; `F` is stored row-major by pigeon.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleStrategy {
    size: GameSize,
    s: u32,
    init: Pigeon,
    table: Vec<Pigeon>,
}

impl SimpleStrategy {
    pub fn new(size: GameSize, s: u32, init: Pigeon, table: Vec<Pigeon>) -> Result<Self> {
        if s == 0 {
            return Err(invalid("s must be at least 1"));
        }
        let cells = size.pigeons() as u64 * size.holes() as u64;
        if cells > MAX_CELLS as u64 {
            return Err(invalid(format!("table has {cells} cells, the limit is {MAX_CELLS}")));
        }
        if table.len() as u64 != cells {
            return Err(invalid(format!("table has {} entries, expected {cells}", table.len())));
        }
        if init >= size.pigeons() {
            return Err(invalid(format!("initial pigeon {init} is off the board")));
        }
        if let Some(v) = table.iter().find(|&&v| v >= size.pigeons()) {
            return Err(invalid(format!("table value {v} is off the board")));
        }
        Ok(SimpleStrategy { size, s, init, table })
    }

    /// Standard board with `n+1` pigeons.
    pub fn standard(n: u32, s: u32, init: Pigeon, table: Vec<Pigeon>) -> Result<Self> {
        SimpleStrategy::new(GameSize::new(n)?, s, init, table)
    }

    /// Table given as a function of `(p, h)`.
    pub fn from_fn(size: GameSize, s: u32, init: Pigeon, f: impl Fn(Pigeon, Hole) -> Pigeon) -> Result<Self> {
        let mut table = Vec::new();
        for p in 0..size.pigeons() {
            for h in 0..size.holes() {
                table.push(f(p, h));
            }
        }
        SimpleStrategy::new(size, s, init, table)
    }

    pub fn size(&self) -> GameSize {
        self.size
    }

    pub fn n(&self) -> u32 {
        self.size.n()
    }

    pub fn pigeons(&self) -> u32 {
        self.size.pigeons()
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn init(&self) -> Pigeon {
        self.init
    }

    pub fn table(&self) -> &[Pigeon] {
        &self.table
    }

    pub fn cells(&self) -> usize {
        self.table.len()
    }

    /// `F(p, h)`.
    pub fn get(&self, p: Pigeon, h: Hole) -> Pigeon {
        self.table[(p * self.size.holes() + h) as usize]
    }

    pub fn with_s(&self, s: u32) -> Result<Self> {
        SimpleStrategy::new(self.size, s, self.init, self.table.clone())
    }

    pub fn is_standard(&self) -> bool {
        self.size.pigeons() == self.size.n() + 1
    }

    /// Strategy file text.
    pub fn to_text(&self) -> String {
        let mut s = format!("game simple\nn {}\n", self.n());
        if !self.is_standard() {
            s.push_str(&format!("pigeons {}\n", self.pigeons()));
        }
        s.push_str(&format!("s {}\ninit {}\n", self.s, self.init));
        for p in 0..self.pigeons() {
            for h in 0..self.n() {
                s.push_str(&format!("map {p} {h} -> {}\n", self.get(p, h)));
            }
        }
        s
    }

    /// Parses a strategy file. Keys: `game simple`, `n`, `s`, `init`,
    /// optional `pigeons`, and one `map p h -> p'` line per table cell.
    pub fn from_text(src: &str) -> Result<Self> {
        let mut game = false;
        let (mut n, mut s, mut init, mut pigeons) = (None, None, None, None);
        let mut maps: Vec<(text::Tok<'_>, u32, u32, u32)> = Vec::new();
        for (_, toks) in text::numbered(src) {
            let Some(key) = toks.first() else { continue };
            let single = |slot: &mut Option<(u32, usize, usize)>| -> Result<()> {
                if toks.len() != 2 {
                    return Err(key.err(format!("expected `{} <int>`", key.text)));
                }
                if slot.is_some() {
                    return Err(key.err(format!("duplicate `{}`", key.text)));
                }
                *slot = Some((toks[1].u32()?, toks[1].line, toks[1].col));
                Ok(())
            };
            match key.text {
                "game" => {
                    if toks.len() != 2 || toks[1].text != "simple" {
                        return Err(key.err("expected `game simple`"));
                    }
                    game = true;
                }
                "n" => single(&mut n)?,
                "s" => single(&mut s)?,
                "init" => single(&mut init)?,
                "pigeons" => single(&mut pigeons)?,
                "map" => {
                    if toks.len() != 5 || toks[3].text != "->" {
                        return Err(key.err("expected `map <p> <h> -> <p'>`"));
                    }
                    maps.push((*key, toks[1].u32()?, toks[2].u32()?, toks[4].u32()?));
                }
                other => return Err(key.err(format!("unknown key `{other}`"))),
            }
        }
        let (l, c) = text::eof(src);
        let need = |v: Option<(u32, usize, usize)>, k: &str| v.ok_or_else(|| parse_err(l, c, format!("missing `{k}`")));
        let at = |line: usize, col: usize, e: crate::Error| parse_err(line, col, e);
        if !game {
            return Err(parse_err(1, 1, "missing `game simple` header"));
        }
        let (n, nl, nc) = need(n, "n")?;
        let (s, sl, sc) = need(s, "s")?;
        let (init, il, ic) = need(init, "init")?;
        let size = match pigeons {
            Some((k, pl, pc)) => GameSize::with_pigeons(n, k).map_err(|e| at(pl, pc, e))?,
            None => GameSize::new(n).map_err(|e| at(nl, nc, e))?,
        };
        let cells = size.pigeons() as usize * n as usize;
        if cells > MAX_CELLS as usize {
            return Err(parse_err(nl, nc, format!("table has {cells} cells, the limit is {MAX_CELLS}")));
        }
        let mut table: Vec<Option<u32>> = vec![None; cells];
        for (tok, p, h, v) in &maps {
            if *p >= size.pigeons() || *h >= n || *v >= size.pigeons() {
                return Err(tok.err(format!("map {p} {h} -> {v} is off the board")));
            }
            let slot = &mut table[(p * n + h) as usize];
            if slot.is_some() {
                return Err(tok.err(format!("duplicate map for ({p},{h})")));
            }
            *slot = Some(*v);
        }
        if let Some(i) = table.iter().position(Option::is_none) {
            return Err(parse_err(l, c, format!("missing map for ({},{})", i as u32 / n, i as u32 % n)));
        }
        if s == 0 {
            return Err(parse_err(sl, sc, "s must be at least 1"));
        }
        if init >= size.pigeons() {
            return Err(parse_err(il, ic, format!("initial pigeon {init} is off the board")));
        }
        SimpleStrategy::new(size, s, init, table.into_iter().map(Option::unwrap).collect())
    }
}

/// Delayer's answers, one hole per round.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Play {
    pub answers: Vec<Hole>,
}

impl Play {
    pub fn new(answers: Vec<Hole>) -> Self {
        Play { answers }
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.answers.iter().map(|h| h.to_string()).collect();
        format!("answers {}\n", parts.join(" ")).replace(" \n", "\n")
    }

    /// Parses `answers <h1> <h2> ...`.
    pub fn from_text(src: &str) -> Result<Self> {
        let mut out: Option<Play> = None;
        for (_, toks) in text::numbered(src) {
            let Some(key) = toks.first() else { continue };
            if key.text != "answers" {
                return Err(key.err(format!("unknown key `{}`", key.text)));
            }
            if out.is_some() {
                return Err(key.err("duplicate `answers` line"));
            }
            out = Some(Play { answers: toks[1..].iter().map(|t| t.u32()).collect::<Result<_>>()? });
        }
        let (l, c) = text::eof(src);
        out.ok_or_else(|| parse_err(l, c, "missing `answers` line"))
    }
}

/// Result of simulating one play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlayOutcome {
    /// Delayer's answer at this 1-based step contradicted the previous record.
    ProverWinsMidgame(u32),
    /// The last record contradicts an earlier one.
    ProverWinsFinal,
    DelayerWins,
    /// Fewer than `s` answers and no contradiction yet.
    Incomplete,
}

impl PlayOutcome {
    pub fn prover_wins(&self) -> bool {
        matches!(self, PlayOutcome::ProverWinsMidgame(_) | PlayOutcome::ProverWinsFinal)
    }
}

impl fmt::Display for PlayOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayOutcome::ProverWinsMidgame(i) => write!(f, "prover-wins-midgame {i}"),
            PlayOutcome::ProverWinsFinal => write!(f, "prover-wins-final"),
            PlayOutcome::DelayerWins => write!(f, "delayer-wins"),
            PlayOutcome::Incomplete => write!(f, "incomplete"),
        }
    }
}

/// Records `(p_i, h_i)` produced by the answers (at most `s` of them).
pub fn play_records(strat: &SimpleStrategy, answers: &[Hole]) -> Vec<Record> {
    let mut recs = Vec::with_capacity(answers.len());
    let mut q = strat.init;
    for &h in answers.iter().take(strat.s as usize) {
        recs.push(Record::new(q, h));
        q = strat.get(q, h);
    }
    recs
}

/// Simulates the play and scores it.
pub fn play_simplified(strat: &SimpleStrategy, play: &Play) -> Result<PlayOutcome> {
    if play.answers.len() > strat.s as usize {
        return Err(invalid(format!("{} answers exceed s = {}", play.answers.len(), strat.s)));
    }
    if let Some(h) = play.answers.iter().find(|&&h| h >= strat.n()) {
        return Err(invalid(format!("answer {h} is not a hole")));
    }
    let recs = play_records(strat, &play.answers);
    for i in 1..recs.len() {
        if records_conflict(recs[i - 1], recs[i]) {
            return Ok(PlayOutcome::ProverWinsMidgame(i as u32 + 1));
        }
    }
    if recs.len() < strat.s as usize {
        return Ok(PlayOutcome::Incomplete);
    }
    let last = *recs.last().expect("s ≥ 1");
    if recs[..recs.len() - 1].iter().any(|r| records_conflict(*r, last)) {
        Ok(PlayOutcome::ProverWinsFinal)
    } else {
        Ok(PlayOutcome::DelayerWins)
    }
}

/// An edge of the strategy graph: tail pigeon and hole label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub tail: Pigeon,
    pub label: Hole,
}

impl EdgeRef {
    pub const fn new(tail: Pigeon, label: Hole) -> Self {
        EdgeRef { tail, label }
    }

    pub fn record(&self) -> Record {
        Record::new(self.tail, self.label)
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tail, self.label)
    }
}

/// Edges are compatible iff their records can coexist in a matching.
pub fn edges_compatible(e: EdgeRef, e2: EdgeRef) -> bool {
    !records_conflict(e.record(), e2.record())
}

/// Adjacency view of `G_F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyGraph {
    pub nodes: u32,
    pub init: Pigeon,
    /// `(edge, head)` for every table cell, ordered by tail then label.
    pub edges: Vec<(EdgeRef, Pigeon)>,
}

impl StrategyGraph {
    pub fn out_edges(&self, p: Pigeon) -> impl Iterator<Item = &(EdgeRef, Pigeon)> {
        self.edges.iter().filter(move |(e, _)| e.tail == p)
    }
}

pub fn build_graph(strat: &SimpleStrategy) -> StrategyGraph {
    let mut edges = Vec::with_capacity(strat.cells());
    for p in 0..strat.pigeons() {
        for h in 0..strat.n() {
            edges.push((EdgeRef::new(p, h), strat.get(p, h)));
        }
    }
    StrategyGraph { nodes: strat.pigeons(), init: strat.init, edges }
}

/// The three consistency notions for a walk, plus whether it is a walk from `init`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathFlags {
    pub is_path: bool,
    pub locally_consistent: bool,
    pub globally_consistent: bool,
    pub last_edge_globally_consistent: bool,
}

/// Consecutive edges pairwise compatible.
pub fn locally_consistent(path: &[EdgeRef]) -> bool {
    path.windows(2).all(|w| edges_compatible(w[0], w[1]))
}

/// All edges pairwise compatible.
pub fn globally_consistent(path: &[EdgeRef]) -> bool {
    path.iter().enumerate().all(|(i, a)| path[i + 1..].iter().all(|b| edges_compatible(*a, *b)))
}

/// The last edge is compatible with every edge.
pub fn last_edge_globally_consistent(path: &[EdgeRef]) -> bool {
    match path.split_last() {
        Some((last, rest)) => rest.iter().all(|e| edges_compatible(*e, *last)),
        None => true,
    }
}

pub fn path_consistency(strat: &SimpleStrategy, path: &[EdgeRef]) -> PathFlags {
    let in_range = path.iter().all(|e| e.tail < strat.pigeons() && e.label < strat.n());
    let is_path = in_range
        && path.first().is_none_or(|e| e.tail == strat.init)
        && path.windows(2).all(|w| strat.get(w[0].tail, w[0].label) == w[1].tail);
    PathFlags {
        is_path,
        locally_consistent: locally_consistent(path),
        globally_consistent: globally_consistent(path),
        last_edge_globally_consistent: last_edge_globally_consistent(path),
    }
}

/// Edge path induced by a sequence of answers.
pub fn play_path(strat: &SimpleStrategy, answers: &[Hole]) -> Vec<EdgeRef> {
    play_records(strat, answers).into_iter().map(|r| EdgeRef::new(r.pigeon, r.hole)).collect()
}

/// `{(p, h) : F(p, h) = p}`.
pub fn find_loops(strat: &SimpleStrategy) -> Vec<EdgeRef> {
    build_graph(strat).edges.into_iter().filter(|(e, head)| e.tail == *head).map(|(e, _)| e).collect()
}

/// How a canonical anti-strategy picks a hole for a fresh pigeon.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HolePolicy {
    SmallestUnused,
    /// The `i`-th fresh pigeon gets the `i`-th listed hole when it is unused,
    /// otherwise the smallest unused hole.
    Sequence(Vec<Hole>),
}

/// A play of a canonical anti-strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPlay {
    pub play: Play,
    pub outcome: PlayOutcome,
    /// A fresh pigeon arrived with every hole used; the answer `0` was given.
    pub gave_up: bool,
    /// First 1-based step whose question repeated an earlier one.
    pub revisit: Option<u32>,
}

impl CanonicalPlay {
    /// Delayer won while following the canonical rules throughout.
    pub fn canonical_win(&self) -> bool {
        !self.gave_up && self.outcome == PlayOutcome::DelayerWins
    }
}

/// Fresh questions get unused holes (chosen by `policy`); repeated
/// questions get their first answer; exhausted holes mean giving up with `0`.
pub fn canonical_antistrategy(strat: &SimpleStrategy, policy: &HolePolicy) -> CanonicalPlay {
    let mut first: Vec<Option<Hole>> = vec![None; strat.pigeons() as usize];
    let mut used = vec![false; strat.n() as usize];
    let mut answers = Vec::with_capacity(strat.s as usize);
    let (mut gave_up, mut revisit, mut fresh_count) = (false, None, 0usize);
    let mut q = strat.init;
    for step in 1..=strat.s {
        let h = match first[q as usize] {
            Some(h) => {
                revisit.get_or_insert(step);
                h
            }
            None => {
                let smallest = (0..strat.n()).find(|&h| !used[h as usize]);
                let pick = match policy {
                    HolePolicy::SmallestUnused => smallest,
                    HolePolicy::Sequence(seq) => {
                        seq.get(fresh_count).copied().filter(|&h| h < strat.n() && !used[h as usize]).or(smallest)
                    }
                };
                fresh_count += 1;
                match pick {
                    Some(h) => {
                        used[h as usize] = true;
                        first[q as usize] = Some(h);
                        h
                    }
                    None => {
                        gave_up = true;
                        0
                    }
                }
            }
        };
        answers.push(h);
        q = strat.get(q, h);
    }
    let play = Play::new(answers);
    let outcome = play_simplified(strat, &play).expect("answers are holes and at most s");
    CanonicalPlay { play, outcome, gave_up, revisit }
}

/// Plays of every canonical anti-strategy (every choice of fresh holes).
pub fn all_canonical_plays(strat: &SimpleStrategy) -> Vec<CanonicalPlay> {
    fn go(strat: &SimpleStrategy, prefix: &mut Vec<Hole>, out: &mut Vec<CanonicalPlay>) {
        let cp = canonical_antistrategy(strat, &HolePolicy::Sequence(prefix.clone()));
        // Fresh pigeons beyond the prefix took the smallest unused hole;
        // branch on the first of them that had more than one option.
        let fresh_seen = fresh_choices(strat, &cp.play.answers);
        if fresh_seen.len() > prefix.len() {
            let (options, _) = &fresh_seen[prefix.len()];
            for &h in options {
                prefix.push(h);
                go(strat, prefix, out);
                prefix.pop();
            }
        } else {
            out.push(cp);
        }
    }
    let mut out = Vec::new();
    go(strat, &mut Vec::new(), &mut out);
    out
}

/// For each fresh question of a canonical play: unused holes at that moment and the chosen one.
fn fresh_choices(strat: &SimpleStrategy, answers: &[Hole]) -> Vec<(Vec<Hole>, Hole)> {
    let mut seen = vec![false; strat.pigeons() as usize];
    let mut used = vec![false; strat.n() as usize];
    let mut out = Vec::new();
    let mut q = strat.init;
    for &h in answers {
        if !seen[q as usize] {
            seen[q as usize] = true;
            let options: Vec<Hole> = (0..strat.n()).filter(|&x| !used[x as usize]).collect();
            if options.is_empty() {
                break;
            }
            used[h as usize] = true;
            out.push((options, h));
        }
        q = strat.get(q, h);
    }
    out
}

/// Every answer sequence of length `s` in lexicographic order.
pub fn all_plays(strat: &SimpleStrategy) -> impl Iterator<Item = Play> + '_ {
    let n = strat.n() as u64;
    let s = strat.s;
    let total = n.pow(s);
    (0..total).map(move |mut i| {
        let mut a = vec![0; s as usize];
        for slot in a.iter_mut().rev() {
            *slot = (i % n) as Hole;
            i /= n;
        }
        Play::new(a)
    })
}

/// Prover's winning strategy for one or two holes: ask `0`, `1`, then `2` forever.
pub fn prover_small_n(n: u32, s: u32) -> Result<SimpleStrategy> {
    match n {
        1 if s >= 2 => SimpleStrategy::standard(1, s, 0, vec![1, 1]),
        2 if s >= 3 => SimpleStrategy::standard(2, s, 0, vec![1, 1, 2, 2, 2, 2]),
        1 | 2 => Err(invalid(format!("s must be at least n+1 = {}", n + 1))),
        _ => Err(invalid("the small-n strategy exists only for n ≤ 2")),
    }
}

/// Prover on `2^n` pigeons labeled by subsets of holes (bitmasks): ask `∅`
/// first; after `(S, h)` ask `S` again if `h ∈ S`, else `S ∪ {h}`; `s = n+1`.
pub fn subset_prover(n: u32) -> Result<SimpleStrategy> {
    if n == 0 || n > 6 {
        return Err(invalid("subset prover needs 1 ≤ n ≤ 6"));
    }
    let size = GameSize::with_pigeons(n, (1u32 << n).max(n + 1))?;
    SimpleStrategy::from_fn(size, n + 1, 0, |p, h| if p >> h & 1 == 1 { p } else { p | 1 << h })
}
