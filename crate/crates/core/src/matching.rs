//! Pigeons, holes, records, partial matchings, and the consistency predicates
//! shared by every game.

use std::fmt;

use crate::error::{invalid, Result};
use crate::text::{self, Tok};

/// Pigeon identifier.
pub type Pigeon = u32;
/// Hole identifier.
pub type Hole = u32;

/// Board size: holes `0..n`, pigeons `0..pigeon_count` (normally `n + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameSize {
    n: u32,
    pigeons: u32,
}

impl GameSize {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        Ok(GameSize { n, pigeons: n + 1 })
    }

    /// Size with an overridden pigeon count, as in the `2^n`-pigeon variant.
    pub fn with_pigeons(n: u32, pigeons: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if pigeons < n + 1 {
            return Err(invalid(format!("pigeon count {pigeons} is below n+1 = {}", n + 1)));
        }
        Ok(GameSize { n, pigeons })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn holes(&self) -> u32 {
        self.n
    }

    pub fn pigeons(&self) -> u32 {
        self.pigeons
    }

    pub fn contains(&self, r: Record) -> bool {
        r.pigeon < self.pigeons && r.hole < self.n
    }
}

/// A single `(pigeon, hole)` assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Record {
    pub pigeon: Pigeon,
    pub hole: Hole,
}

impl Record {
    pub const fn new(pigeon: Pigeon, hole: Hole) -> Self {
        Record { pigeon, hole }
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.pigeon, self.hole)
    }
}

/// True iff the two records cannot both hold in one matching.
pub fn records_conflict(a: Record, b: Record) -> bool {
    (a.pigeon == b.pigeon) != (a.hole == b.hole)
}

/// A partial matching, stored sorted by pigeon; injective in both coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    entries: Vec<Record>,
}

impl Matching {
    pub fn empty() -> Self {
        Matching { entries: Vec::new() }
    }

    /// Builds a matching; duplicates collapse, conflicting records are rejected.
    pub fn new(records: impl IntoIterator<Item = Record>) -> Result<Self> {
        let mut entries: Vec<Record> = records.into_iter().collect();
        entries.sort_unstable();
        entries.dedup();
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i + 1..] {
                if records_conflict(*a, *b) {
                    return Err(invalid(format!("records {a} and {b} conflict")));
                }
            }
        }
        Ok(Matching { entries })
    }

    pub fn records(&self) -> &[Record] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn hole_of(&self, p: Pigeon) -> Option<Hole> {
        self.entries.binary_search_by_key(&p, |r| r.pigeon).ok().map(|i| self.entries[i].hole)
    }

    pub fn pigeon_of(&self, h: Hole) -> Option<Pigeon> {
        self.entries.iter().find(|r| r.hole == h).map(|r| r.pigeon)
    }

    pub fn contains(&self, r: Record) -> bool {
        self.entries.binary_search(&r).is_ok()
    }

    pub fn is_subset_of(&self, other: &Matching) -> bool {
        self.entries.iter().all(|r| other.contains(*r))
    }

    /// `self ∪ other` when it is a matching.
    pub fn union(&self, other: &Matching) -> Option<Matching> {
        if !matchings_consistent(self, other) {
            return None;
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        entries.sort_unstable();
        entries.dedup();
        Some(Matching { entries })
    }

    /// Records whose pigeon or hole is queried by `q`.
    pub fn restrict_to(&self, q: &[Item]) -> Matching {
        let entries = self.entries.iter().copied().filter(|r| touches(q, *r)).collect();
        Matching { entries }
    }

    pub fn covers(&self, q: &[Item]) -> bool {
        q.iter().all(|it| match *it {
            Item::Pigeon(p) => self.hole_of(p).is_some(),
            Item::Hole(h) => self.pigeon_of(h).is_some(),
        })
    }

    /// True iff `self` covers `q` and no record can be dropped.
    pub fn is_minimal_cover(&self, q: &[Item]) -> bool {
        self.covers(q) && self.entries.iter().all(|r| touches(q, *r))
    }

    pub fn within(&self, size: &GameSize) -> bool {
        self.entries.iter().all(|r| size.contains(*r))
    }

    /// Inline form `(p,h) (p,h) ...`; the empty matching prints as nothing.
    pub fn inline(&self) -> String {
        let parts: Vec<String> = self.entries.iter().map(|r| r.to_string()).collect();
        parts.join(" ")
    }

    /// Text form: one `p h` line per record, then a terminating blank line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.entries {
            s.push_str(&format!("{} {}\n", r.pigeon, r.hole));
        }
        s.push('\n');
        s
    }

    /// Parses the text form; stops at the first blank line or end of input.
    pub fn from_text(src: &str) -> Result<Matching> {
        let mut recs = Vec::new();
        for (line, toks) in text::numbered(src) {
            if toks.is_empty() {
                if src.lines().nth(line - 1).is_some_and(|l| l.trim().is_empty()) {
                    break;
                }
                continue;
            }
            if toks.len() != 2 {
                return Err(toks[toks.len().min(2) - 1].err("expected `p h`"));
            }
            recs.push(Record::new(toks[0].u32()?, toks[1].u32()?));
        }
        Matching::new(recs)
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}")
    }
}

/// `¬(M ⊥ M2)`: the union is a matching.
pub fn matchings_consistent(m: &Matching, m2: &Matching) -> bool {
    m.entries.iter().all(|a| m2.entries.iter().all(|b| !records_conflict(*a, *b)))
}

/// A queried item: a pigeon or a hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Pigeon(Pigeon),
    Hole(Hole),
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Pigeon(p) => write!(f, "p{p}"),
            Item::Hole(h) => write!(f, "h{h}"),
        }
    }
}

fn touches(q: &[Item], r: Record) -> bool {
    q.iter().any(|it| match *it {
        Item::Pigeon(p) => p == r.pigeon,
        Item::Hole(h) => h == r.hole,
    })
}

/// Sorted, deduplicated query.
pub fn normalize_query(q: &[Item]) -> Vec<Item> {
    let mut v = q.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

pub(crate) fn format_items(q: &[Item]) -> String {
    let parts: Vec<String> = q.iter().map(|i| i.to_string()).collect();
    parts.join(" ")
}

pub(crate) fn parse_item(tok: &Tok<'_>) -> Result<Item> {
    match tok.text.as_bytes().first() {
        Some(b'p') => Ok(Item::Pigeon(tok.tail(1).u32()?)),
        Some(b'h') => Ok(Item::Hole(tok.tail(1).u32()?)),
        _ => Err(tok.err(format!("expected `p<id>` or `h<id>`, found `{}`", tok.text))),
    }
}

pub(crate) fn parse_record(tok: &Tok<'_>) -> Result<Record> {
    let t = tok.text;
    let bad = || tok.err(format!("expected `(p,h)`, found `{t}`"));
    if !(t.starts_with('(') && t.ends_with(')')) {
        return Err(bad());
    }
    let comma = t.find(',').ok_or_else(bad)?;
    let p = Tok { line: tok.line, col: tok.col + 1, text: &t[1..comma] }.u32()?;
    let h = Tok { line: tok.line, col: tok.col + comma + 1, text: &t[comma + 1..t.len() - 1] }.u32()?;
    Ok(Record::new(p, h))
}

pub(crate) fn parse_inline_matching(toks: &[Tok<'_>]) -> Result<Matching> {
    let recs = toks.iter().map(parse_record).collect::<Result<Vec<_>>>()?;
    Matching::new(recs).map_err(|e| match toks.first() {
        Some(t) => t.err(e),
        None => e,
    })
}

/// Every inclusion-minimal matching covering `q`, optionally restricted to
/// those consistent with `base`; sorted.
pub fn minimal_covers(q: &[Item], base: Option<&Matching>, size: &GameSize) -> Vec<Matching> {
    let q = normalize_query(q);
    let qp: Vec<Pigeon> = q.iter().filter_map(|i| if let Item::Pigeon(p) = i { Some(*p) } else { None }).collect();
    let qh: Vec<Hole> = q.iter().filter_map(|i| if let Item::Hole(h) = i { Some(*h) } else { None }).collect();
    if qp.iter().any(|&p| p >= size.pigeons()) || qh.iter().any(|&h| h >= size.holes()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    cover_pigeons(&qp, &qh, size, &mut cur, &mut out);
    let mut out: Vec<Matching> = out
        .into_iter()
        .map(|entries| {
            let mut entries: Vec<Record> = entries;
            entries.sort_unstable();
            Matching { entries }
        })
        .filter(|m| base.is_none_or(|b| matchings_consistent(m, b)))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn cover_pigeons(qp: &[Pigeon], qh: &[Hole], size: &GameSize, cur: &mut Vec<Record>, out: &mut Vec<Vec<Record>>) {
    match qp.split_first() {
        Some((&p, rest)) => {
            for h in 0..size.holes() {
                if cur.iter().all(|r| r.hole != h) {
                    cur.push(Record::new(p, h));
                    cover_pigeons(rest, qh, size, cur, out);
                    cur.pop();
                }
            }
        }
        None => cover_holes(qh, size, cur, out),
    }
}

fn cover_holes(qh: &[Hole], size: &GameSize, cur: &mut Vec<Record>, out: &mut Vec<Vec<Record>>) {
    match qh.split_first() {
        Some((&h, rest)) => {
            if cur.iter().any(|r| r.hole == h) {
                return cover_holes(rest, size, cur, out);
            }
            for p in 0..size.pigeons() {
                if cur.iter().all(|r| r.pigeon != p) {
                    cur.push(Record::new(p, h));
                    cover_holes(rest, size, cur, out);
                    cur.pop();
                }
            }
        }
        None => out.push(cur.clone()),
    }
}

/// `|i| = ceil(log2(i+1))`, the binary length of `i`.
pub fn bit_length(i: u64) -> u32 {
    64 - i.leading_zeros()
}

/// The parameters `n`, `C` with derived `|n|^C` and `2^{|n|^C}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogPower {
    n: u32,
    c: u32,
    width: u32,
}

impl LogPower {
    pub fn new(n: u32, c: u32) -> Result<Self> {
        if n == 0 || c == 0 {
            return Err(invalid("n and C must be positive"));
        }
        let width =
            bit_length(n as u64).checked_pow(c).ok_or_else(|| invalid(format!("|n|^C overflows for n={n}, C={c}")))?;
        Ok(LogPower { n, c, width })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    /// `|n|`.
    pub fn log_n(&self) -> u32 {
        bit_length(self.n as u64)
    }

    /// `|n|^C`.
    pub fn width(&self) -> u32 {
        self.width
    }

    /// `2^{|n|^C}` when it fits in 64 bits.
    pub fn cap(&self) -> Option<u64> {
        1u64.checked_shl(self.width).filter(|_| self.width < 64)
    }
}
