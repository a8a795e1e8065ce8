//! The plain pebble game: positions are sequences of matchings, Prover
//! queries pigeons and holes, Delayer answers minimal covers.

use std::fmt;

use crate::error::{invalid, parse_err, Error, Result};
use crate::matching::{
    format_items, matchings_consistent, minimal_covers, normalize_query, parse_inline_matching, parse_item, GameSize,
    Item, LogPower, Matching, Record,
};
use crate::text;

/// Parameters of one G1 instance.
#[derive(Debug, Clone, Copy)]
pub struct G1Config {
    pub size: GameSize,
    pub lp: LogPower,
    /// Maximum history length; `2^{|n|^C}` unless lowered for tests.
    pub cap: u64,
}

impl G1Config {
    pub fn new(n: u32, c: u32) -> Result<Self> {
        let lp = LogPower::new(n, c)?;
        Ok(G1Config { size: GameSize::new(n)?, lp, cap: lp.cap().unwrap_or(u64::MAX) })
    }

    /// Same game with the length cap lowered to `cap`.
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap.max(1);
        self
    }
}

/// `(M_0, …, M_l)` with `M_0 = ∅`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct G1Position {
    history: Vec<Matching>,
}

impl Default for G1Position {
    fn default() -> Self {
        Self::initial()
    }
}

impl G1Position {
    pub fn initial() -> Self {
        G1Position { history: vec![Matching::empty()] }
    }

    pub fn history(&self) -> &[Matching] {
        &self.history
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> &Matching {
        self.history.last().expect("nonempty")
    }

    /// A position of the given length whose matchings are all empty.
    pub fn padded(len: usize) -> Self {
        G1Position { history: vec![Matching::empty(); len.max(1)] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum G1Outcome {
    Ongoing(G1Position),
    ProverWins,
    DelayerWinsAtCap,
}

fn check_query(q: &[Item], cfg: &G1Config) -> Result<Vec<Item>> {
    let q = normalize_query(q);
    if q.len() as u64 > cfg.lp.width() as u64 {
        return Err(Error::Malformed(format!("query has {} items, limit is {}", q.len(), cfg.lp.width())));
    }
    for it in &q {
        let ok = match *it {
            Item::Pigeon(p) => p < cfg.size.pigeons(),
            Item::Hole(h) => h < cfg.size.holes(),
        };
        if !ok {
            return Err(Error::Malformed(format!("query item {it} is off the board")));
        }
    }
    Ok(q)
}

/// One round: Prover queried `q`, Delayer answered `answer`.
pub fn g1_step(pos: &G1Position, q: &[Item], answer: &Matching, cfg: &G1Config) -> Result<G1Outcome> {
    let q = check_query(q, cfg)?;
    if !answer.within(&cfg.size) || !answer.is_minimal_cover(&q) {
        return Err(Error::Malformed(format!("{answer} is not a minimal cover of the query")));
    }
    if pos.len() as u64 >= cfg.cap {
        return Ok(G1Outcome::DelayerWinsAtCap);
    }
    let last = pos.last();
    if minimal_covers(&q, Some(last), &cfg.size).is_empty() || !matchings_consistent(answer, last) {
        return Ok(G1Outcome::ProverWins);
    }
    let mut history = pos.history.clone();
    history.push(answer.clone());
    Ok(G1Outcome::Ongoing(G1Position { history }))
}

/// Delayer's answer from the proof that she survives when `2|n|^C ≤ n`:
/// extend the last matching greedily (smallest free hole or pigeon) until it
/// covers `q`, then keep only the records touching `q`.
pub fn g1_delayer_canonical(pos: &G1Position, q: &[Item], cfg: &G1Config) -> Result<Matching> {
    let q = check_query(q, cfg)?;
    let mut ext: Vec<Record> = pos.last().records().to_vec();
    for it in &q {
        match *it {
            Item::Pigeon(p) if ext.iter().all(|r| r.pigeon != p) => {
                let h = (0..cfg.size.holes())
                    .find(|h| ext.iter().all(|r| r.hole != *h))
                    .ok_or_else(|| invalid(format!("no free hole for pigeon {p}")))?;
                ext.push(Record::new(p, h));
            }
            Item::Hole(h) if ext.iter().all(|r| r.hole != h) => {
                let p = (0..cfg.size.pigeons())
                    .find(|p| ext.iter().all(|r| r.pigeon != *p))
                    .ok_or_else(|| invalid(format!("no free pigeon for hole {h}")))?;
                ext.push(Record::new(p, h));
            }
            _ => {}
        }
    }
    Ok(Matching::new(ext)?.restrict_to(&q))
}

/// One query/answer pair of a transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G1Round {
    pub query: Vec<Item>,
    pub answer: Matching,
}

/// A G1 play: header values plus rounds, with the outcome when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G1Transcript {
    pub n: u32,
    pub c: u32,
    pub rounds: Vec<G1Round>,
}

impl G1Transcript {
    /// Replays every round from the initial position.
    pub fn replay(&self, cfg: &G1Config) -> Result<G1Outcome> {
        let mut pos = G1Position::initial();
        for r in &self.rounds {
            match g1_step(&pos, &r.query, &r.answer, cfg)? {
                G1Outcome::Ongoing(p) => pos = p,
                done => return Ok(done),
            }
        }
        Ok(G1Outcome::Ongoing(pos))
    }

    pub fn parse(src: &str) -> Result<Self> {
        let lines: Vec<_> = text::numbered(src).into_iter().filter(|(_, t)| !t.is_empty()).collect();
        let (l, c) = text::eof(src);
        let mut it = lines.iter();
        match it.next() {
            Some((_, toks)) if toks.len() == 2 && toks[0].text == "game" && toks[1].text == "g1" => {}
            Some((_, toks)) => return Err(toks[0].err("expected `game g1`")),
            None => return Err(parse_err(l, c, "empty transcript")),
        }
        let n = header_value(it.next(), "n", l, c)?;
        let cc = header_value(it.next(), "C", l, c)?;
        let mut rounds = Vec::new();
        let mut pending: Option<Vec<Item>> = None;
        for (_, toks) in it {
            match (toks[0].text, pending.take()) {
                ("query:", None) => pending = Some(toks[1..].iter().map(parse_item).collect::<Result<_>>()?),
                ("answer:", Some(query)) => rounds.push(G1Round { query, answer: parse_inline_matching(&toks[1..])? }),
                ("outcome:", None) => {}
                (_, _) => return Err(toks[0].err(format!("unexpected `{}`", toks[0].text))),
            }
        }
        if pending.is_some() {
            return Err(parse_err(l, c, "query without answer"));
        }
        Ok(G1Transcript { n, c: cc, rounds })
    }
}

pub(crate) fn header_value(line: Option<&(usize, Vec<text::Tok<'_>>)>, key: &str, l: usize, c: usize) -> Result<u32> {
    match line {
        Some((_, toks)) if toks[0].text == key && toks.len() == 2 => toks[1].u32(),
        Some((_, toks)) => Err(toks[0].err(format!("expected `{key} <int>`"))),
        None => Err(parse_err(l, c, format!("missing `{key}` line"))),
    }
}

impl fmt::Display for G1Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "game g1")?;
        writeln!(f, "n {}", self.n)?;
        writeln!(f, "C {}", self.c)?;
        for r in &self.rounds {
            writeln!(f, "query: {}", format_items(&r.query))?;
            writeln!(f, "answer: {}", r.answer.inline())?;
        }
        Ok(())
    }
}
