//! The backtracking game on labeled subtrees of a fixed `(n,C)`-tree.
//!
//! A position labels a downward-closed set of vertices with a matching and an
//! auxiliary word; the frontier is the lexicographically greatest labeled
//! vertex. Prover queries, Delayer answers a minimal cover, then Prover climbs
//! (`o=1`), jumps to the next sibling of an ancestor (`o=2`), or backtracks
//! (`o=3`). Every transition strictly increases the domain under `≺`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{invalid, parse_err, Error, Result};
use crate::matching::{
    format_items, matchings_consistent, minimal_covers, normalize_query, parse_inline_matching, parse_item, GameSize,
    Item, LogPower, Matching,
};
use crate::text;
use crate::tree::{parse_vertex, tree_compare, FiniteTree, Vertex};
use crate::util::mix;

/// Parameters of one G2 instance.
#[derive(Debug, Clone, Copy)]
pub struct G2Config {
    pub size: GameSize,
    pub lp: LogPower,
    /// Bound on child indices and on `B`; `2^{|n|^C}` unless lowered for tests.
    pub cap: u32,
}

impl G2Config {
    pub fn new(n: u32, c: u32) -> Result<Self> {
        let lp = LogPower::new(n, c)?;
        let cap = lp.cap().map_or(u32::MAX, |x| u32::try_from(x).unwrap_or(u32::MAX));
        Ok(G2Config { size: GameSize::new(n)?, lp, cap })
    }

    /// Same game with the index bound lowered to `cap`.
    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = cap.max(1);
        self
    }

    /// Base-2 logarithm of the termination bound, `cap^{C+1}`: a play has at
    /// most `2^{cap^{C+1}}` transitions.
    pub fn determinacy_bound_log2(&self) -> BigUint {
        BigUint::from(self.cap).pow(self.lp.c() + 1)
    }
}

/// Membership oracle for the fixed tree `T`.
pub trait TreeShape {
    fn contains(&self, v: &Vertex) -> bool;
    /// True iff `v` has no child in `T`.
    fn is_leaf(&self, v: &Vertex) -> bool;
}

impl TreeShape for FiniteTree {
    fn contains(&self, v: &Vertex) -> bool {
        FiniteTree::contains(self, v)
    }

    fn is_leaf(&self, v: &Vertex) -> bool {
        FiniteTree::is_leaf(self, v)
    }
}

/// `(M, A_1, …, A_{height(v)})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionLabel {
    pub matching: Matching,
    pub aux: Vec<u32>,
}

impl PositionLabel {
    pub fn root() -> Self {
        PositionLabel { matching: Matching::empty(), aux: Vec::new() }
    }
}

/// A partial labeling of `T`; keys are ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct G2Position {
    labels: BTreeMap<Vertex, PositionLabel>,
}

impl Default for G2Position {
    fn default() -> Self {
        Self::initial()
    }
}

impl G2Position {
    pub fn initial() -> Self {
        let mut labels = BTreeMap::new();
        labels.insert(Vertex::root(), PositionLabel::root());
        G2Position { labels }
    }

    /// Builds a position, checking downward closure, aux lengths, and monotone labels.
    pub fn from_labels(labels: BTreeMap<Vertex, PositionLabel>) -> Result<Self> {
        if !labels.contains_key(&Vertex::root()) {
            return Err(invalid("position must label the root"));
        }
        for (v, lab) in &labels {
            if lab.aux.len() != v.height() {
                return Err(invalid(format!("vertex {v} has {} aux entries", lab.aux.len())));
            }
            if let Some(p) = v.parent() {
                let pl = labels.get(&p).ok_or_else(|| invalid(format!("vertex {v} lacks its parent")))?;
                if !pl.matching.is_subset_of(&lab.matching) || !lab.aux.starts_with(&pl.aux) {
                    return Err(invalid(format!("label of {v} does not extend its parent's")));
                }
            }
        }
        Ok(G2Position { labels })
    }

    pub fn labels(&self) -> &BTreeMap<Vertex, PositionLabel> {
        &self.labels
    }

    pub fn label(&self, v: &Vertex) -> Option<&PositionLabel> {
        self.labels.get(v)
    }

    /// `c(L)` and its label.
    pub fn frontier(&self) -> (&Vertex, &PositionLabel) {
        self.labels.iter().next_back().expect("root is always labeled")
    }

    pub fn dom(&self) -> FiniteTree {
        FiniteTree::new(self.labels.keys().cloned()).expect("domain is downward closed")
    }

    /// Snapshot: one `<dot-path> | <records> | <aux ints>` line per vertex.
    pub fn to_snapshot(&self) -> String {
        let mut s = String::new();
        for (v, lab) in &self.labels {
            s.push_str(&snapshot_line(v, lab));
            s.push('\n');
        }
        s
    }

    pub fn from_snapshot(src: &str) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (line, raw) in src.lines().enumerate() {
            let line = line + 1;
            let body = raw.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let (v, lab) = parse_snapshot_line(body, line)?;
            if labels.insert(v.clone(), lab).is_some() {
                return Err(parse_err(line, 1, format!("vertex {v} labeled twice")));
            }
        }
        G2Position::from_labels(labels).map_err(|e| {
            let (l, c) = text::eof(src);
            parse_err(l, c, e)
        })
    }

    fn hash_words(&self) -> Vec<u64> {
        let mut w = Vec::new();
        for (v, lab) in &self.labels {
            w.push(u64::MAX);
            w.extend(v.path().iter().map(|&k| k as u64));
            w.push(u64::MAX - 1);
            w.extend(lab.matching.records().iter().map(|r| ((r.pigeon as u64) << 32) | r.hole as u64));
            w.push(u64::MAX - 2);
            w.extend(lab.aux.iter().map(|&a| a as u64));
        }
        w
    }
}

fn snapshot_line(v: &Vertex, lab: &PositionLabel) -> String {
    let aux: Vec<String> = lab.aux.iter().map(|a| a.to_string()).collect();
    format!("{v} | {} | {}", lab.matching.inline(), aux.join(" ")).trim_end().to_string()
}

fn parse_snapshot_line(body: &str, line: usize) -> Result<(Vertex, PositionLabel)> {
    let parts: Vec<&str> = body.split('|').collect();
    if parts.len() != 3 {
        return Err(parse_err(line, 1, "expected `<path> | <records> | <aux>`"));
    }
    let mut offset = 0;
    let mut fields = Vec::new();
    for p in &parts {
        fields.push(
            text::tokens(line, p)
                .into_iter()
                .map(|mut t| {
                    t.col += offset;
                    t
                })
                .collect::<Vec<_>>(),
        );
        offset += p.len() + 1;
    }
    let vt = match fields[0].as_slice() {
        [t] => *t,
        _ => return Err(parse_err(line, 1, "expected one vertex before `|`")),
    };
    let v = parse_vertex(vt.text, line, vt.col)?;
    let matching = parse_inline_matching(&fields[1])?;
    let aux = fields[2].iter().map(|t| t.u32()).collect::<Result<Vec<_>>>()?;
    Ok((v, PositionLabel { matching, aux }))
}

/// Prover's triple `⟨o, x, B⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProverMove {
    /// `o=1`: climb to `c(L) * x`.
    Climb { x: u32, b: u32 },
    /// `o=2`: jump to the next sibling above the proper prefix `x` of `c(L)`.
    Sibling { x: Vertex, b: u32 },
    /// `o=3`: backtrack from the proper prefix `x` of `c(L)`.
    Backtrack { x: Vertex, b: u32 },
}

impl ProverMove {
    pub fn option(&self) -> u8 {
        match self {
            ProverMove::Climb { .. } => 1,
            ProverMove::Sibling { .. } => 2,
            ProverMove::Backtrack { .. } => 3,
        }
    }

    pub fn b(&self) -> u32 {
        match self {
            ProverMove::Climb { b, .. } | ProverMove::Sibling { b, .. } | ProverMove::Backtrack { b, .. } => *b,
        }
    }
}

impl fmt::Display for ProverMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProverMove::Climb { x, b } => write!(f, "o=1 x={x} B={b}"),
            ProverMove::Sibling { x, b } => write!(f, "o=2 x={x} B={b}"),
            ProverMove::Backtrack { x, b } => write!(f, "o=3 x={x} B={b}"),
        }
    }
}

fn parse_move(toks: &[text::Tok<'_>]) -> Result<ProverMove> {
    let field = |i: usize, key: &str| -> Result<text::Tok<'_>> {
        let t = toks.get(i).ok_or_else(|| toks[0].err(format!("missing `{key}=`")))?;
        if !t.text.starts_with(key) || t.text.as_bytes().get(key.len()) != Some(&b'=') {
            return Err(t.err(format!("expected `{key}=`")));
        }
        Ok(t.tail(key.len() + 1))
    };
    if toks.len() != 3 {
        return Err(toks[0].err("expected `o=<1|2|3> x=<path> B=<int>`"));
    }
    let o = field(0, "o")?;
    let x = field(1, "x")?;
    let b = field(2, "B")?.u32()?;
    match o.text {
        "1" => Ok(ProverMove::Climb { x: x.u32()?, b }),
        "2" => Ok(ProverMove::Sibling { x: parse_vertex(x.text, x.line, x.col)?, b }),
        "3" => Ok(ProverMove::Backtrack { x: parse_vertex(x.text, x.line, x.col)?, b }),
        _ => Err(o.err("option must be 1, 2 or 3")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum G2Outcome {
    Ongoing(G2Position),
    ProverWins,
    /// Prover left `T`, named a missing sibling, or backtracked onto a leaf of `T`.
    ProverLoses,
    /// Delayer survived the configured step budget of [`g2_play`].
    DelayerWins,
}

/// Validates a query against the `|n|^C` limit and the board.
pub fn check_g2_query(q: &[Item], cfg: &G2Config) -> Result<Vec<Item>> {
    let q = normalize_query(q);
    if q.len() > cfg.lp.width() as usize {
        return Err(Error::Malformed(format!("query has {} items, limit is {}", q.len(), cfg.lp.width())));
    }
    if q.iter().any(|it| match *it {
        Item::Pigeon(p) => p >= cfg.size.pigeons(),
        Item::Hole(h) => h >= cfg.size.holes(),
    }) {
        return Err(Error::Malformed("query item off the board".into()));
    }
    Ok(q)
}

fn check_move(mv: &ProverMove, c: &Vertex, cfg: &G2Config) -> Result<()> {
    let b = mv.b();
    if b == 0 || b > cfg.cap {
        return Err(Error::Malformed(format!("B={b} outside [1,{}]", cfg.cap)));
    }
    match mv {
        ProverMove::Climb { x, .. } if *x == 0 || *x > cfg.cap => {
            Err(Error::Malformed(format!("child index {x} outside [1,{}]", cfg.cap)))
        }
        ProverMove::Sibling { x, .. } | ProverMove::Backtrack { x, .. }
            if !(x.is_prefix_of(c) && x.height() < c.height()) =>
        {
            Err(Error::Malformed(format!("{x} is not a proper prefix of the frontier {c}")))
        }
        _ => Ok(()),
    }
}

/// Applies one Prover triple after Delayer answered `answer` to `query`.
pub fn g2_apply(
    pos: &G2Position,
    query: &[Item],
    answer: &Matching,
    mv: &ProverMove,
    cfg: &G2Config,
    tree: &dyn TreeShape,
) -> Result<G2Outcome> {
    g2_apply_traced(pos, query, answer, mv, cfg, tree).map(|(o, _)| o)
}

/// [`g2_apply`] that also returns the labels erased by a backtrack.
pub fn g2_apply_traced(
    pos: &G2Position,
    query: &[Item],
    answer: &Matching,
    mv: &ProverMove,
    cfg: &G2Config,
    tree: &dyn TreeShape,
) -> Result<(G2Outcome, Vec<(Vertex, PositionLabel)>)> {
    let q = check_g2_query(query, cfg)?;
    if !answer.within(&cfg.size) || !answer.is_minimal_cover(&q) {
        return Err(Error::Malformed(format!("{answer} is not a minimal cover of the query")));
    }
    let (c, lab) = pos.frontier();
    check_move(mv, c, cfg)?;
    let grow = |base: &PositionLabel, b: u32| -> Option<PositionLabel> {
        let matching = base.matching.union(answer)?;
        let mut aux = base.aux.clone();
        aux.push(b);
        Some(PositionLabel { matching, aux })
    };
    let mut next = pos.clone();
    let mut erased = Vec::new();
    match mv {
        ProverMove::Climb { x, b } => {
            let target = c.child(*x);
            if !tree.contains(&target) {
                return Ok((G2Outcome::ProverLoses, erased));
            }
            let Some(l) = grow(lab, *b) else { return Ok((G2Outcome::ProverWins, erased)) };
            next.labels.insert(target, l);
        }
        ProverMove::Sibling { x, b } => {
            let k = c.path()[x.height()];
            let target = x.child(k + 1);
            if !tree.contains(&target) {
                return Ok((G2Outcome::ProverLoses, erased));
            }
            let base = pos.label(x).expect("prefixes of the frontier are labeled");
            let Some(l) = grow(base, *b) else { return Ok((G2Outcome::ProverWins, erased)) };
            next.labels.insert(target, l);
        }
        ProverMove::Backtrack { x, b } => {
            let k = c.path()[x.height()];
            if k < 2 || pos.label(&x.child(k - 1)).is_none() {
                return Ok((G2Outcome::ProverLoses, erased));
            }
            let anchor = x.child(k - 1);
            let l = pos.labels.keys().rfind(|v| anchor.is_prefix_of(v)).expect("anchor is labeled").clone();
            if tree.is_leaf(&l) {
                return Ok((G2Outcome::ProverLoses, erased));
            }
            let target = l.child(1);
            if !tree.contains(&target) {
                return Err(invalid(format!("tree has children above {l} but lacks {target}")));
            }
            let cut = x.child(k);
            let doomed: Vec<Vertex> = pos.labels.keys().filter(|v| cut.is_prefix_of(v)).cloned().collect();
            for v in doomed {
                let old = next.labels.remove(&v).expect("present");
                erased.push((v, old));
            }
            let base = pos.label(&l).expect("labeled");
            let Some(nl) = grow(base, *b) else { return Ok((G2Outcome::ProverWins, erased)) };
            next.labels.insert(target, nl);
        }
    }
    Ok((G2Outcome::Ongoing(next), erased))
}

/// Prover strategy that sees only the frontier vertex, its matching and aux word.
pub trait ObliviousStrategy {
    fn query(&self, v: &Vertex, m: &Matching, aux: &[u32]) -> Result<Vec<Item>>;
    fn respond(&self, v: &Vertex, m: &Matching, aux: &[u32], answer: &Matching) -> Result<ProverMove>;
}

/// Delayer strategy; sees the whole position.
pub trait DelayerStrategy {
    fn answer(&self, pos: &G2Position, query: &[Item]) -> Result<Matching>;
}

impl<F> DelayerStrategy for F
where
    F: Fn(&G2Position, &[Item]) -> Result<Matching>,
{
    fn answer(&self, pos: &G2Position, query: &[Item]) -> Result<Matching> {
        self(pos, query)
    }
}

/// One round of a G2 play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G2Round {
    pub query: Vec<Item>,
    /// `None` when no minimal cover of the query exists.
    pub answer: Option<Matching>,
    pub mv: Option<ProverMove>,
    /// Labels removed by a backtrack, kept for audit.
    pub erased: Vec<(Vertex, PositionLabel)>,
}

/// Full record of a play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G2Transcript {
    pub n: u32,
    pub c: u32,
    pub rounds: Vec<G2Round>,
    pub outcome: G2Outcome,
    /// Domains of the successive positions, starting with `{∅}`.
    pub domains: Vec<FiniteTree>,
}

impl G2Transcript {
    pub fn winner_tag(&self) -> &'static str {
        outcome_tag(&self.outcome)
    }
}

pub fn outcome_tag(o: &G2Outcome) -> &'static str {
    match o {
        G2Outcome::Ongoing(_) => "ongoing",
        G2Outcome::ProverWins => "prover-wins",
        G2Outcome::ProverLoses => "prover-loses",
        G2Outcome::DelayerWins => "delayer-wins",
    }
}

impl fmt::Display for G2Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "game g2")?;
        writeln!(f, "n {}", self.n)?;
        writeln!(f, "C {}", self.c)?;
        for r in &self.rounds {
            writeln!(f, "query: {}", format_items(&r.query))?;
            match &r.answer {
                Some(a) => writeln!(f, "answer: {}", a.inline())?,
                None => writeln!(f, "answer: none")?,
            }
            if let Some(mv) = &r.mv {
                writeln!(f, "move: {mv}")?;
            }
            for (v, lab) in &r.erased {
                writeln!(f, "erased: {}", snapshot_line(v, lab))?;
            }
        }
        writeln!(f, "outcome: {}", self.winner_tag())
    }
}

/// Reads Delayer answers from a transcript or a file of `answer:` lines;
/// every other transcript line is skipped.
pub fn parse_answer_lines(src: &str) -> Result<Vec<Matching>> {
    let mut out = Vec::new();
    for (_, toks) in text::numbered(src) {
        let Some(first) = toks.first() else { continue };
        match first.text {
            "answer:" => out.push(parse_inline_matching(&toks[1..])?),
            "game" | "n" | "C" | "query:" | "erased:" | "outcome:" => {}
            "move:" => {
                parse_move(&toks[1..]).map_err(|e| first.err(e))?;
            }
            other => return Err(first.err(format!("unexpected `{other}`"))),
        }
    }
    Ok(out)
}

/// Parses queries and moves too, for validating transcripts.
pub fn parse_g2_rounds(src: &str) -> Result<Vec<(Vec<Item>, Matching, ProverMove)>> {
    let mut out = Vec::new();
    let mut q: Option<Vec<Item>> = None;
    let mut a: Option<Matching> = None;
    for (_, toks) in text::numbered(src) {
        let Some(first) = toks.first() else { continue };
        match first.text {
            "query:" => q = Some(toks[1..].iter().map(parse_item).collect::<Result<_>>()?),
            "answer:" => a = Some(parse_inline_matching(&toks[1..])?),
            "move:" => {
                let mv = parse_move(&toks[1..])?;
                match (q.take(), a.take()) {
                    (Some(q), Some(a)) => out.push((q, a, mv)),
                    _ => return Err(first.err("move without query and answer")),
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Plays `prover` against `delayer` for at most `step_cap` transitions,
/// asserting that each transition strictly increases the domain under `≺`.
pub fn g2_play(
    cfg: &G2Config,
    tree: &dyn TreeShape,
    prover: &dyn ObliviousStrategy,
    delayer: &dyn DelayerStrategy,
    step_cap: usize,
) -> Result<G2Transcript> {
    if step_cap == 0 {
        return Err(invalid("step cap must be at least 1"));
    }
    let mut pos = G2Position::initial();
    let mut rounds = Vec::new();
    let mut domains = vec![pos.dom()];
    for _ in 0..step_cap {
        let (v, lab) = pos.frontier();
        let q = check_g2_query(&prover.query(v, &lab.matching, &lab.aux)?, cfg)?;
        if minimal_covers(&q, None, &cfg.size).is_empty() {
            rounds.push(G2Round { query: q, answer: None, mv: None, erased: Vec::new() });
            return Ok(finish(cfg, rounds, G2Outcome::ProverWins, domains));
        }
        let answer = delayer.answer(&pos, &q)?;
        let mv = prover.respond(v, &lab.matching, &lab.aux, &answer)?;
        let (out, erased) = g2_apply_traced(&pos, &q, &answer, &mv, cfg, tree)?;
        rounds.push(G2Round { query: q, answer: Some(answer), mv: Some(mv), erased });
        match out {
            G2Outcome::Ongoing(next) => {
                let d = next.dom();
                if tree_compare(domains.last().expect("nonempty"), &d) != std::cmp::Ordering::Less {
                    return Err(Error::Contract("domain did not increase under the tree order".into()));
                }
                domains.push(d);
                pos = next;
            }
            done => return Ok(finish(cfg, rounds, done, domains)),
        }
    }
    Ok(finish(cfg, rounds, G2Outcome::DelayerWins, domains))
}

fn finish(cfg: &G2Config, rounds: Vec<G2Round>, outcome: G2Outcome, domains: Vec<FiniteTree>) -> G2Transcript {
    G2Transcript { n: cfg.size.n(), c: cfg.lp.c(), rounds, outcome, domains }
}

/// Outcome counts over every Delayer answer sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExhaustiveSummary {
    pub branches: u64,
    pub prover_wins: u64,
    pub prover_loses: u64,
    /// Branches still running after `depth_cap` transitions.
    pub unfinished: u64,
}

/// Explores every minimal-cover answer Delayer could give, to depth `depth_cap`.
pub fn g2_exhaustive(
    cfg: &G2Config,
    tree: &dyn TreeShape,
    prover: &dyn ObliviousStrategy,
    depth_cap: usize,
) -> Result<ExhaustiveSummary> {
    fn go(
        pos: &G2Position,
        depth: usize,
        cfg: &G2Config,
        tree: &dyn TreeShape,
        prover: &dyn ObliviousStrategy,
        cap: usize,
        acc: &mut ExhaustiveSummary,
    ) -> Result<()> {
        if depth == cap {
            acc.branches += 1;
            acc.unfinished += 1;
            return Ok(());
        }
        let (v, lab) = pos.frontier();
        let q = check_g2_query(&prover.query(v, &lab.matching, &lab.aux)?, cfg)?;
        let covers = minimal_covers(&q, None, &cfg.size);
        if covers.is_empty() {
            acc.branches += 1;
            acc.prover_wins += 1;
        }
        for a in covers {
            let mv = prover.respond(v, &lab.matching, &lab.aux, &a)?;
            match g2_apply(pos, &q, &a, &mv, cfg, tree)? {
                G2Outcome::Ongoing(next) => {
                    if tree_compare(&pos.dom(), &next.dom()) != std::cmp::Ordering::Less {
                        return Err(Error::Contract("domain did not increase under the tree order".into()));
                    }
                    go(&next, depth + 1, cfg, tree, prover, cap, acc)?;
                }
                G2Outcome::ProverWins => {
                    acc.branches += 1;
                    acc.prover_wins += 1;
                }
                _ => {
                    acc.branches += 1;
                    acc.prover_loses += 1;
                }
            }
        }
        Ok(())
    }
    let mut acc = ExhaustiveSummary::default();
    go(&G2Position::initial(), 0, cfg, tree, prover, depth_cap, &mut acc)?;
    Ok(acc)
}

/// The ramify-at-the-root Prover on `T = [n+1]^{≤1} ∪ {i*1}`.
///
/// Pigeons `p_1..p_{n+1}` are ids `0..n`. The root query `{p_1}` climbs to
/// child 1. At child `a` the query is the window `p_{a+2−q}..p_{a+1}` with
/// `q = n−1`; a consistent answer moves to child `a+1` storing, as `B`, the
/// hole of the pigeon leaving the window (`h+2`, or `1` for none). An answer
/// contradicting the frontier matching climbs into it; an answer sending
/// `p_{a+1}` to the stored hole backtracks into child `a−1`. Surviving answers
/// keep every `n` consecutive pigeons in distinct holes, so at child `n`
/// every answer loses.
#[derive(Debug, Clone)]
pub struct RootRamify {
    n: u32,
    q: u32,
}

impl RootRamify {
    /// Window length used at the root's children.
    pub fn window(&self) -> u32 {
        self.q
    }

    fn window_at(&self, a: u32) -> std::ops::RangeInclusive<u32> {
        // 1-based pigeon indices, clipped to the board.
        let lo = (a + 2).saturating_sub(self.q).max(1);
        lo..=(a + 1).min(self.n + 1)
    }
}

impl ObliviousStrategy for RootRamify {
    fn query(&self, v: &Vertex, _m: &Matching, _aux: &[u32]) -> Result<Vec<Item>> {
        Ok(match v.height() {
            0 => vec![Item::Pigeon(0)],
            1 => self.window_at(v.path()[0]).map(|i| Item::Pigeon(i - 1)).collect(),
            _ => Vec::new(),
        })
    }

    fn respond(&self, v: &Vertex, m: &Matching, aux: &[u32], answer: &Matching) -> Result<ProverMove> {
        if v.height() != 1 {
            return Ok(ProverMove::Climb { x: 1, b: 1 });
        }
        let a = v.path()[0];
        if !matchings_consistent(answer, m) {
            return Ok(ProverMove::Climb { x: 1, b: 1 });
        }
        let newest = a; // id of p_{a+1}
        if aux[0] >= 2 && answer.hole_of(newest) == Some(aux[0] - 2) {
            return Ok(ProverMove::Backtrack { x: Vertex::root(), b: 1 });
        }
        let leaving = (a + 1).checked_sub(self.q).filter(|&i| i >= 1);
        let b = match leaving {
            Some(i) => m.hole_of(i - 1).map_or(1, |h| h + 2),
            None => 1,
        };
        Ok(ProverMove::Sibling { x: Vertex::root(), b })
    }
}

/// Tree and strategy of the unrestricted-Prover construction.
pub fn prover_root_ramify(n: u32, cfg: &G2Config) -> Result<(FiniteTree, RootRamify)> {
    if n < 2 || cfg.lp.c() < 2 {
        return Err(invalid("root ramification needs n ≥ 2 and C ≥ 2"));
    }
    if cfg.size.n() != n {
        return Err(invalid("configuration is for a different n"));
    }
    if (cfg.cap as u64) <= n as u64 {
        return Err(invalid(format!("2^{{|n|^C}} = {} must exceed n = {n}", cfg.cap)));
    }
    let q = n - 1;
    if q > cfg.lp.width() {
        return Err(invalid(format!("window {q} exceeds the query limit |n|^C = {}", cfg.lp.width())));
    }
    let mut vs = vec![Vertex::root()];
    for i in 1..=n + 1 {
        vs.push(Vertex::root().child(i));
        vs.push(Vertex::root().child(i).child(1));
    }
    Ok((FiniteTree::new(vs)?, RootRamify { n, q }))
}

/// Prover choosing uniformly (by hash) among moves that stay inside `T`
/// where possible; used for fuzzing.
#[derive(Debug, Clone)]
pub struct HashedRandomProver {
    pub tree: FiniteTree,
    pub cfg: G2Config,
    pub seed: u64,
    /// Use `B = A_{|x|+1}` for `o=2` and `B = 1` for `o=3`, the form the
    /// aux-free translation supports.
    pub normal_form: bool,
    /// Largest query size drawn.
    pub max_query: u32,
}

impl HashedRandomProver {
    fn rng(&self, v: &Vertex, m: &Matching, aux: &[u32], extra: Option<&Matching>) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        let mut w: Vec<u64> = v.path().iter().map(|&k| k as u64).collect();
        w.push(u64::MAX);
        w.extend(m.records().iter().map(|r| ((r.pigeon as u64) << 32) | r.hole as u64));
        w.push(u64::MAX - 1);
        w.extend(aux.iter().map(|&a| a as u64));
        if let Some(e) = extra {
            w.push(u64::MAX - 2);
            w.extend(e.records().iter().map(|r| ((r.pigeon as u64) << 32) | r.hole as u64));
        }
        rand_chacha::ChaCha8Rng::seed_from_u64(mix(self.seed, w))
    }
}

impl ObliviousStrategy for HashedRandomProver {
    fn query(&self, v: &Vertex, m: &Matching, aux: &[u32]) -> Result<Vec<Item>> {
        use rand::Rng;
        let mut rng = self.rng(v, m, aux, None);
        let k = rng.gen_range(1..=self.max_query.min(self.cfg.lp.width()).max(1));
        let mut q = Vec::new();
        for _ in 0..k {
            if rng.gen_bool(0.75) {
                q.push(Item::Pigeon(rng.gen_range(0..self.cfg.size.pigeons())));
            } else {
                q.push(Item::Hole(rng.gen_range(0..self.cfg.size.holes())));
            }
        }
        Ok(normalize_query(&q))
    }

    fn respond(&self, v: &Vertex, m: &Matching, aux: &[u32], answer: &Matching) -> Result<ProverMove> {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let mut rng = self.rng(v, m, aux, Some(answer));
        let mut b = rng.gen_range(1..=self.cfg.cap);
        let kids: Vec<u32> = self.tree.children(v).filter_map(Vertex::last).collect();
        let prefixes: Vec<Vertex> = (0..v.height()).map(|k| v.prefix(k)).collect();
        let siblings: Vec<&Vertex> =
            prefixes.iter().filter(|x| self.tree.contains(&x.child(v.path()[x.height()] + 1))).collect();
        let backs: Vec<&Vertex> = prefixes.iter().filter(|x| v.path()[x.height()] >= 2).collect();
        let roll = rng.gen_range(0..10);
        let mv = if roll < 4 && !kids.is_empty() {
            ProverMove::Climb { x: *kids.choose(&mut rng).expect("nonempty"), b }
        } else if roll < 7 && !siblings.is_empty() {
            let x = (*siblings.choose(&mut rng).expect("nonempty")).clone();
            if self.normal_form {
                b = aux[x.height()];
            }
            ProverMove::Sibling { x, b }
        } else if !backs.is_empty() {
            if self.normal_form {
                b = 1;
            }
            ProverMove::Backtrack { x: (*backs.choose(&mut rng).expect("nonempty")).clone(), b }
        } else if !kids.is_empty() {
            ProverMove::Climb { x: *kids.choose(&mut rng).expect("nonempty"), b }
        } else {
            ProverMove::Climb { x: rng.gen_range(1..=self.cfg.cap), b }
        };
        Ok(mv)
    }
}

/// Delayer choosing by hash of the position and query; prefers answers
/// consistent with the frontier matching with probability `bias/8`.
#[derive(Debug, Clone, Copy)]
pub struct HashedDelayer {
    pub size: GameSize,
    pub seed: u64,
    pub bias: u32,
}

impl DelayerStrategy for HashedDelayer {
    fn answer(&self, pos: &G2Position, query: &[Item]) -> Result<Matching> {
        let mut w = pos.hash_words();
        w.push(u64::MAX - 3);
        w.extend(query.iter().map(|it| match *it {
            Item::Pigeon(p) => p as u64,
            Item::Hole(h) => (1 << 40) | h as u64,
        }));
        let h = mix(self.seed, w);
        let all = minimal_covers(query, None, &self.size);
        let good = minimal_covers(query, Some(&pos.frontier().1.matching), &self.size);
        let pool = if !good.is_empty() && ((h >> 40) % 8) < self.bias as u64 { good } else { all };
        if pool.is_empty() {
            return Err(invalid("query has no minimal cover"));
        }
        Ok(pool[(h % pool.len() as u64) as usize].clone())
    }
}

/// Delayer replaying a fixed answer list; fails when the list runs out.
#[derive(Debug, Clone)]
pub struct ScriptedDelayer {
    answers: Vec<Matching>,
    next: std::cell::Cell<usize>,
}

impl ScriptedDelayer {
    pub fn new(answers: Vec<Matching>) -> Self {
        ScriptedDelayer { answers, next: std::cell::Cell::new(0) }
    }
}

impl DelayerStrategy for ScriptedDelayer {
    fn answer(&self, _pos: &G2Position, _query: &[Item]) -> Result<Matching> {
        let i = self.next.get();
        self.next.set(i + 1);
        self.answers.get(i).cloned().ok_or_else(|| invalid(format!("answer list exhausted after {i} answers")))
    }
}

/// Delayer answering the first minimal cover consistent with the frontier
/// matching, or the first cover when none is consistent.
#[derive(Debug, Clone, Copy)]
pub struct FirstCoverDelayer {
    pub size: GameSize,
}

impl DelayerStrategy for FirstCoverDelayer {
    fn answer(&self, pos: &G2Position, query: &[Item]) -> Result<Matching> {
        let good = minimal_covers(query, Some(&pos.frontier().1.matching), &self.size);
        let pool = if good.is_empty() { minimal_covers(query, None, &self.size) } else { good };
        pool.into_iter().next().ok_or_else(|| invalid("query has no minimal cover"))
    }
}

// ---------------------------------------------------------------------------
// Aux-free variant.

/// `⟦k, A⟧ = A(b+1) + k`.
pub fn encode_pair(k: u32, a: u32, b: u32) -> u64 {
    a as u64 * (b as u64 + 1) + k as u64
}

/// Inverse of [`encode_pair`] on `[b]×[b]`; indices `1..=b` read as `(k, 1)`,
/// the form produced by backtracking, which always creates child `1`.
pub fn decode_index(r: u64, b: u32) -> Option<(u32, u32)> {
    let b64 = b as u64;
    if (1..=b64).contains(&r) {
        return Some((r as u32, 1));
    }
    let (a, k) = (r / (b64 + 1), r % (b64 + 1));
    (k >= 1 && (1..=b64).contains(&a)).then_some((k as u32, a as u32))
}

/// Decodes a vertex of `T′` into a vertex of `T` and its aux word.
pub fn decode_vertex(v: &Vertex, b: u32) -> Option<(Vertex, Vec<u32>)> {
    let mut path = Vec::with_capacity(v.height());
    let mut aux = Vec::with_capacity(v.height());
    for &r in v.path() {
        let (k, a) = decode_index(r as u64, b)?;
        path.push(k);
        aux.push(a);
    }
    Some((Vertex::new(path).ok()?, aux))
}

/// `T′`: vertices whose components decode into a vertex of `T`.
#[derive(Debug, Clone)]
pub struct PrimeTree {
    pub base: FiniteTree,
    pub b: u32,
}

impl TreeShape for PrimeTree {
    fn contains(&self, v: &Vertex) -> bool {
        decode_vertex(v, self.b).is_some_and(|(w, _)| self.base.contains(&w))
    }

    fn is_leaf(&self, v: &Vertex) -> bool {
        decode_vertex(v, self.b).is_none_or(|(w, _)| self.base.is_leaf(&w))
    }
}

/// Aux-free strategy reading its aux word back from the vertex path.
#[derive(Debug, Clone)]
pub struct PrimeStrategy<S> {
    pub inner: S,
    pub b: u32,
}

impl<S: ObliviousStrategy> ObliviousStrategy for PrimeStrategy<S> {
    fn query(&self, v: &Vertex, m: &Matching, _aux: &[u32]) -> Result<Vec<Item>> {
        let (w, a) = decode_vertex(v, self.b).ok_or_else(|| invalid(format!("{v} is not in T′")))?;
        self.inner.query(&w, m, &a)
    }

    fn respond(&self, v: &Vertex, m: &Matching, _aux: &[u32], answer: &Matching) -> Result<ProverMove> {
        let (w, a) = decode_vertex(v, self.b).ok_or_else(|| invalid(format!("{v} is not in T′")))?;
        Ok(match self.inner.respond(&w, m, &a, answer)? {
            ProverMove::Climb { x, b } => {
                let r = encode_pair(x, b, self.b);
                let x = u32::try_from(r).map_err(|_| invalid("encoded index overflows"))?;
                ProverMove::Climb { x, b: 1 }
            }
            ProverMove::Sibling { x, b } => {
                if a.get(x.height()) != Some(&b) {
                    return Err(invalid(
                        "o=2 with B other than the departing sibling's aux entry has no aux-free image",
                    ));
                }
                ProverMove::Sibling { x: v.prefix(x.height()), b: 1 }
            }
            ProverMove::Backtrack { x, b } => {
                if b != 1 {
                    return Err(invalid("o=3 with B ≠ 1 has no aux-free image"));
                }
                ProverMove::Backtrack { x: v.prefix(x.height()), b: 1 }
            }
        })
    }
}

/// Output of [`to_g2prime`].
#[derive(Debug, Clone)]
pub struct G2Prime<S> {
    pub tree: PrimeTree,
    pub strategy: PrimeStrategy<S>,
    /// Configuration of the aux-free game (`C′` in place of `C`).
    pub cfg: G2Config,
    pub c_prime: u32,
}

/// Translates an oblivious strategy to the aux-free game on `T′`, choosing
/// the least `C′ ∈ [C, max_c]` with `b(b+1)+b ≤ 2^{|n|^{C′}}`.
pub fn to_g2prime<S: ObliviousStrategy>(
    strategy: S,
    tree: &FiniteTree,
    cfg: &G2Config,
    max_c: u32,
) -> Result<G2Prime<S>> {
    let b = cfg.cap as u64;
    let need = b * (b + 1) + b;
    let n = cfg.size.n();
    for c2 in cfg.lp.c()..=max_c {
        let lp = LogPower::new(n, c2)?;
        if lp.cap().is_none_or(|cap| cap >= need) {
            let cap = u32::try_from(need).map_err(|_| invalid("T′ indices overflow 32 bits"))?;
            let pcfg = G2Config { size: cfg.size, lp, cap };
            return Ok(G2Prime {
                tree: PrimeTree { base: tree.clone(), b: cfg.cap },
                strategy: PrimeStrategy { inner: strategy, b: cfg.cap },
                cfg: pcfg,
                c_prime: c2,
            });
        }
    }
    Err(invalid(format!("no C′ ≤ {max_c} admits the encoding for n = {n}")))
}

/// Delayer of the aux-free game induced by a Delayer of the original game:
/// decode the position and ask the original Delayer.
pub struct InducedDelayer<'a> {
    pub inner: &'a dyn DelayerStrategy,
    pub b: u32,
}

/// Decodes an aux-free position on `T′` into a position on `T`.
pub fn decode_position(pos: &G2Position, b: u32) -> Result<G2Position> {
    let mut labels = BTreeMap::new();
    for (v, lab) in pos.labels() {
        let (w, aux) = decode_vertex(v, b).ok_or_else(|| invalid(format!("{v} is not in T′")))?;
        labels.insert(w, PositionLabel { matching: lab.matching.clone(), aux });
    }
    G2Position::from_labels(labels)
}

impl DelayerStrategy for InducedDelayer<'_> {
    fn answer(&self, pos: &G2Position, query: &[Item]) -> Result<Matching> {
        self.inner.answer(&decode_position(pos, self.b)?, query)
    }
}
