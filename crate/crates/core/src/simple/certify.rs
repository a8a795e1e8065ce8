//! Deciding "Delayer wins at length `s`" for every `s` at once.
//!
//! A winning play of length `s` ending in edge `c` is a locally consistent
//! walk from `init` of length `s`, ending with `c`, all of whose edges are
//! compatible with `c`. For fixed `c` the sets `R_t` of last edges of such
//! walks of length `t` evolve by a fixed map on subsets of edges, so the
//! sequence is eventually periodic.

use std::collections::{BTreeSet, HashMap};

use super::{edges_compatible, EdgeRef, SimpleStrategy};
use crate::error::{Error, Result};
use crate::matching::{records_conflict, Hole, Record};

/// Default limit on `n^s` for the exhaustive oracle.
pub const DEFAULT_BRUTE_BUDGET: u64 = 100_000_000;

/// Winning lengths of one strategy, for all `s ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinCertificate {
    /// Winning `s` in `[1, s_max]`.
    pub explicit: BTreeSet<u32>,
    pub s_max: u32,
    /// For `s > preperiod`, `s` wins iff `(s − preperiod − 1) mod period` is a residue.
    pub preperiod: u32,
    pub period: u32,
    pub residues: BTreeSet<u32>,
}

impl WinCertificate {
    /// Whether Delayer wins at length `s ≥ 1`.
    pub fn wins(&self, s: u32) -> bool {
        if s <= self.s_max {
            self.explicit.contains(&s)
        } else {
            self.periodic_wins(s)
        }
    }

    fn periodic_wins(&self, s: u32) -> bool {
        debug_assert!(s > self.preperiod);
        self.residues.contains(&((s - self.preperiod - 1) % self.period))
    }

    /// Every `s ≥ 1` is winning.
    pub fn all_winning(&self) -> bool {
        (1..=self.s_max).all(|s| self.explicit.contains(&s)) && self.residues.len() as u32 == self.period
    }

    /// The explicit part agrees with the periodic part where both apply.
    pub fn is_coherent(&self) -> bool {
        self.period >= 1
            && self.s_max >= self.preperiod
            && (self.preperiod + 1..=self.s_max).all(|s| self.explicit.contains(&s) == self.periodic_wins(s))
    }

    /// Smallest `s` where Prover wins, if any.
    pub fn first_loss(&self) -> Option<u32> {
        if let Some(s) = (1..=self.s_max).find(|s| !self.explicit.contains(s)) {
            return Some(s);
        }
        (self.s_max + 1..=self.s_max + self.period).find(|&s| !self.periodic_wins(s))
    }
}

/// Reusable buffers for certifying many tables of one shape.
#[derive(Debug, Clone)]
pub struct Certifier {
    holes: u32,
    cells: usize,
    /// `compat[c]`: edges compatible with `c`.
    compat: Vec<u64>,
    /// `out[p]`: edges leaving `p`.
    out: Vec<u64>,
    succ: Vec<u64>,
    hist: Vec<u64>,
    index: HashMap<u64, u32>,
}

/// Eventually periodic membership of one candidate: lengths `1..` map to
/// `bits[t−1]` up to `mu + lambda`, then repeat with period `lambda`.
struct Orbit {
    mu: u32,
    lambda: u32,
    bits: Vec<bool>,
}

impl Orbit {
    fn at(&self, t: u32) -> bool {
        let i = t - 1;
        if i < self.mu + self.lambda {
            self.bits[i as usize]
        } else {
            self.bits[(self.mu + (i - self.mu) % self.lambda) as usize]
        }
    }
}

impl Certifier {
    pub fn new(pigeons: u32, holes: u32) -> Result<Self> {
        let cells = pigeons as usize * holes as usize;
        if cells > super::MAX_CELLS as usize || holes == 0 {
            return Err(Error::Invalid(format!("unsupported table shape {pigeons}×{holes}")));
        }
        let edge = |i: usize| EdgeRef::new(i as u32 / holes, i as u32 % holes);
        let compat = (0..cells)
            .map(|c| (0..cells).filter(|&e| edges_compatible(edge(c), edge(e))).fold(0u64, |m, e| m | 1 << e))
            .collect();
        let out = (0..pigeons as usize)
            .map(|p| (0..holes as usize).fold(0u64, |m, h| m | 1 << (p * holes as usize + h)))
            .collect();
        Ok(Certifier { holes, cells, compat, out, succ: vec![0; cells], hist: Vec::new(), index: HashMap::new() })
    }

    pub fn for_strategy(strat: &SimpleStrategy) -> Result<Self> {
        Certifier::new(strat.pigeons(), strat.n())
    }

    fn load(&mut self, strat: &SimpleStrategy) {
        assert_eq!(strat.cells(), self.cells, "certifier shape mismatch");
        for (e, &head) in strat.table().iter().enumerate() {
            self.succ[e] = self.out[head as usize] & self.compat[e];
        }
    }

    fn step(&self, r: u64, allowed: u64) -> u64 {
        let mut next = 0u64;
        let mut m = r;
        while m != 0 {
            next |= self.succ[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        next & allowed
    }

    /// Iterates `R_t` for candidate `c` until a state repeats.
    fn orbit(&mut self, init_out: u64, c: usize) -> Orbit {
        let allowed = self.compat[c];
        self.hist.clear();
        self.index.clear();
        let mut r = init_out & allowed;
        loop {
            let seen = if self.hist.len() < 48 {
                self.hist.iter().position(|&x| x == r).map(|i| i as u32)
            } else {
                if self.index.is_empty() {
                    for (i, &x) in self.hist.iter().enumerate() {
                        self.index.insert(x, i as u32);
                    }
                }
                self.index.get(&r).copied()
            };
            if let Some(mu) = seen {
                let lambda = self.hist.len() as u32 - mu;
                let bits = self.hist.iter().map(|&x| x >> c & 1 == 1).collect();
                return Orbit { mu, lambda, bits };
            }
            if !self.index.is_empty() {
                self.index.insert(r, self.hist.len() as u32);
            }
            self.hist.push(r);
            r = self.step(r, allowed);
        }
    }

    /// Full certificate with explicit values up to `s_max`.
    pub fn certify(&mut self, strat: &SimpleStrategy, s_max: u32) -> WinCertificate {
        self.load(strat);
        let init_out = self.out[strat.init() as usize];
        let orbits: Vec<Orbit> = (0..self.cells).map(|c| self.orbit(init_out, c)).collect();
        let preperiod = orbits.iter().map(|o| o.mu).max().unwrap_or(0);
        let period = orbits.iter().fold(1u64, |l, o| lcm(l, o.lambda as u64));
        let period = u32::try_from(period).expect("period fits in u32");
        let wins = |t: u32| orbits.iter().any(|o| o.at(t));
        let s_max = s_max.max(preperiod);
        WinCertificate {
            explicit: (1..=s_max).filter(|&s| wins(s)).collect(),
            s_max,
            preperiod,
            period,
            residues: (0..period).filter(|&r| wins(preperiod + 1 + r)).collect(),
        }
    }

    /// Whether Delayer wins at every `s ≥ 1`; stops at the first loss.
    pub fn all_winning(&mut self, strat: &SimpleStrategy) -> bool {
        self.load(strat);
        let init_out = self.out[strat.init() as usize];
        let orbits: Vec<Orbit> = (0..self.cells).map(|c| self.orbit(init_out, c)).collect();
        let preperiod = orbits.iter().map(|o| o.mu).max().unwrap_or(0);
        let period = orbits.iter().fold(1u64, |l, o| lcm(l, o.lambda as u64));
        let end = preperiod as u64 + period;
        (1..=end).all(|t| orbits.iter().any(|o| o.at(t as u32)))
    }

    pub fn holes(&self) -> u32 {
        self.holes
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Certificate for one strategy; `strat.s()` is ignored.
pub fn delayer_wins_lengths(strat: &SimpleStrategy, s_max: u32) -> WinCertificate {
    Certifier::for_strategy(strat).expect("strategy shape is valid").certify(strat, s_max)
}

fn budget_check(strat: &SimpleStrategy, s: u32, budget: u64) -> Result<()> {
    match (strat.n() as u64).checked_pow(s) {
        Some(v) if v <= budget => Ok(()),
        _ => Err(Error::Budget(format!("{}^{s} answer sequences exceed the budget {budget}", strat.n()))),
    }
}

/// Answers of some Delayer-winning play of length `s`, by exhaustive search
/// over answer sequences; subtrees below a consecutive contradiction are lost
/// for Delayer whatever follows and are skipped.
pub fn brute_force_witness(strat: &SimpleStrategy, s: u32, budget: u64) -> Result<Option<Vec<Hole>>> {
    budget_check(strat, s, budget)?;
    fn go(strat: &SimpleStrategy, s: u32, q: u32, recs: &mut Vec<Record>, answers: &mut Vec<Hole>) -> bool {
        for h in 0..strat.n() {
            let r = Record::new(q, h);
            if recs.last().is_some_and(|&prev| records_conflict(prev, r)) {
                continue;
            }
            if recs.len() + 1 == s as usize {
                if recs.iter().all(|&prev| !records_conflict(prev, r)) {
                    answers.push(h);
                    return true;
                }
                continue;
            }
            recs.push(r);
            answers.push(h);
            if go(strat, s, strat.get(q, h), recs, answers) {
                return true;
            }
            recs.pop();
            answers.pop();
        }
        false
    }
    let mut answers = Vec::new();
    Ok(go(strat, s, strat.init(), &mut Vec::new(), &mut answers).then_some(answers))
}

/// Exhaustive oracle for "Delayer wins at length `s`".
pub fn brute_force_delayer_wins(strat: &SimpleStrategy, s: u32, budget: u64) -> Result<bool> {
    Ok(brute_force_witness(strat, s, budget)?.is_some())
}

/// Whether some canonical anti-strategy meets an already asked pigeon before
/// running out of holes; then Delayer wins at every `s`.
///
/// Explores all globally consistent walks from `init` with distinct pigeons
/// and distinct holes.
pub fn canonical_revisit(strat: &SimpleStrategy) -> bool {
    fn go(strat: &SimpleStrategy, p: u32, used: u64, visited: u64) -> bool {
        let n = strat.n();
        for h in 0..n {
            if used >> h & 1 == 1 {
                continue;
            }
            let q = strat.get(p, h);
            if visited >> q & 1 == 1 {
                return true;
            }
            let used2 = used | 1 << h;
            if used2.count_ones() < n && go(strat, q, used2, visited | 1 << q) {
                return true;
            }
        }
        false
    }
    go(strat, strat.init(), 0, 1 << strat.init())
}
