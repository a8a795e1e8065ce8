//! Verification campaigns: exhaustive and seeded randomized checks that
//! print one report line each.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::g2::{
    g2_exhaustive, g2_play, prover_root_ramify, to_g2prime, G2Config, G2Outcome, HashedDelayer, HashedRandomProver,
    InducedDelayer,
};
use crate::matching::GameSize;
use crate::phptree::{build_php_tree, loop_witness_bound, loop_witness_length};
use crate::simple::{
    all_canonical_plays, all_plays, brute_force_delayer_wins, canonical_revisit, find_loops, play_simplified,
    prover_small_n, subset_prover, Certifier, PlayOutcome, SimpleStrategy, DEFAULT_BRUTE_BUDGET,
};
use crate::tree::{all_trees, ordinal_embed, tree_compare, FiniteTree, Vertex};
use crate::util::splitmix;

/// Strategies per checkpoint line.
pub const CHECKPOINT_EVERY: u64 = 1 << 20;
/// Largest `n` enumerated in full.
pub const FULL_CEILING: u32 = 3;

/// Claim identifiers accepted by [`run_claim`].
pub const CLAIMS: &[&str] = &[
    "theorem-main-n1",
    "theorem-main-n2",
    "theorem-main-n3",
    "theorem-main-n4",
    "oracle-equivalence",
    "small-n",
    "subset-prop",
    "order-axioms",
    "g2-properties",
    "figures",
    "php-trees",
    "loop-bound-n3",
    "symmetry-n3",
];

/// Knobs shared by all campaigns.
#[derive(Debug, Clone)]
pub struct CampaignOptions {
    pub shards: u32,
    pub threads: usize,
    pub s_max: u32,
    pub seed: u64,
    /// Dispatch tables where a canonical play revisits a pigeon without the full certificate.
    pub fast_path: bool,
    /// Enumerate one table per relabeling class (theorem campaigns).
    pub symmetry: bool,
    /// Append-only progress file for resumable runs.
    pub checkpoint: Option<PathBuf>,
    /// Sample count for sampled campaigns.
    pub samples: u64,
    /// Report measured seconds; otherwise `0.000` for byte-identical output.
    pub wall_clock: bool,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            shards: 64,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            s_max: 64,
            seed: 0,
            fast_path: true,
            symmetry: false,
            checkpoint: None,
            samples: 100_000,
            wall_clock: true,
        }
    }
}

/// A failing instance, serialized in its own file format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub name: String,
    pub text: String,
}

/// Outcome of one campaign; success iff there are no counterexamples.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub claim: String,
    pub space: u64,
    pub counterexamples: Vec<Counterexample>,
    pub seconds: f64,
    pub shards: u32,
}

impl CampaignReport {
    pub fn success(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Writes one file per counterexample into `dir`.
    pub fn write_counterexamples(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for c in &self.counterexamples {
            std::fs::write(dir.join(&c.name), &c.text)?;
        }
        Ok(())
    }
}

impl fmt::Display for CampaignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "claim={} space={} counterexamples={} seconds={:.3}",
            self.claim,
            self.space,
            self.counterexamples.len(),
            self.seconds
        )
    }
}

struct Timer {
    start: Instant,
    on: bool,
}

impl Timer {
    fn new(opts: &CampaignOptions) -> Self {
        Timer { start: Instant::now(), on: opts.wall_clock }
    }

    fn report(&self, claim: &str, space: u64, counterexamples: Vec<Counterexample>, shards: u32) -> CampaignReport {
        let seconds = if self.on { self.start.elapsed().as_secs_f64() } else { 0.0 };
        CampaignReport { claim: claim.to_string(), space, counterexamples, seconds, shards }
    }
}

/// Runs a campaign by identifier.
pub fn run_claim(id: &str, opts: &CampaignOptions) -> Result<CampaignReport> {
    match id {
        "theorem-main-n1" => verify_theorem_main(1, opts),
        "theorem-main-n2" => verify_theorem_main(2, opts),
        "theorem-main-n3" => verify_theorem_main(3, opts),
        "theorem-main-n4" => verify_theorem_main_sampled(4, opts),
        "oracle-equivalence" => verify_oracle_equivalence(&[(3, 10_000), (4, 1_000)], 8, opts),
        "small-n" => verify_small_n(opts),
        "subset-prop" => verify_subset_prop(opts),
        "order-axioms" => verify_order_axioms(opts),
        "g2-properties" => verify_g2_properties(&[3, 4, 5], 2, 10_000, 1_000, opts),
        "figures" => verify_figures(opts),
        "php-trees" => verify_php_trees(opts),
        "loop-bound-n3" => verify_loop_bound(3, opts),
        "symmetry-n3" => verify_symmetry(3, opts),
        other => Err(invalid(format!("unknown claim `{other}`; known: {}", CLAIMS.join(", ")))),
    }
}

fn pool(opts: &CampaignOptions) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))
}

// ---------------------------------------------------------------------------
// Enumeration.

/// Number of `(init, table)` pairs on `n` holes, `(n+1)^{(n+1)n+1}`.
pub fn strategy_space(n: u32) -> Option<u64> {
    (n as u64 + 1).checked_pow((n + 1) * n + 1)
}

/// The strategy with index `idx`: base-`(n+1)` digits, most significant
/// first, are `init` and then the table in row-major order.
pub fn strategy_at(n: u32, idx: u64, s: u32) -> SimpleStrategy {
    let base = n as u64 + 1;
    let cells = ((n + 1) * n) as usize;
    let mut table = vec![0u32; cells];
    let mut x = idx;
    for slot in table.iter_mut().rev() {
        *slot = (x % base) as u32;
        x /= base;
    }
    SimpleStrategy::standard(n, s.max(1), (x % base) as u32, table).expect("index within the space")
}

/// Shard `k` of `m` over `0..total`: contiguous, disjoint, covering.
pub fn shard_range(total: u64, k: u32, m: u32) -> Range<u64> {
    let (k, m) = (k as u128, m.max(1) as u128);
    let lo = (total as u128 * k / m) as u64;
    let hi = (total as u128 * (k + 1) / m) as u64;
    lo..hi
}

/// Every strategy on `n ≤ FULL_CEILING` holes in index order, or one per
/// relabeling class when `symmetry` is set.
pub fn enumerate_strategies(n: u32, symmetry: bool) -> Result<Box<dyn Iterator<Item = SimpleStrategy>>> {
    if n == 0 || n > FULL_CEILING {
        return Err(invalid(format!("full enumeration supports 1 ≤ n ≤ {FULL_CEILING}")));
    }
    let total = strategy_space(n).expect("small n");
    if !symmetry {
        return Ok(Box::new((0..total).map(move |i| strategy_at(n, i, 1))));
    }
    let sym = Symmetry::new(n);
    let per_init = total / (n as u64 + 1);
    Ok(Box::new((0..per_init).map(move |i| strategy_at(n, i, 1)).filter(move |s| sym.is_canonical(s.table()))))
}

/// Relabelings fixing pigeon `0`: permutations of pigeons `1..=n` and of holes.
#[derive(Debug, Clone)]
pub struct Symmetry {
    n: u32,
    perms: Vec<(Vec<u32>, Vec<u32>)>,
}

fn permutations(k: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for i in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, i);
                    q
                })
            })
            .collect();
    }
    out.sort();
    out
}

impl Symmetry {
    pub fn new(n: u32) -> Self {
        let mut perms = Vec::new();
        for pp in permutations(n) {
            let pi: Vec<u32> = std::iter::once(0).chain(pp.iter().map(|&x| x + 1)).collect();
            for sigma in permutations(n) {
                perms.push((pi.clone(), sigma));
            }
        }
        Symmetry { n, perms }
    }

    /// Order of the full relabeling group `(n+1)!·n!`.
    pub fn group_order(&self) -> u64 {
        (1..=self.n as u64 + 1).product::<u64>() * (1..=self.n as u64).product::<u64>()
    }

    fn image(&self, table: &[u32], pi: &[u32], sigma: &[u32], out: &mut [u32]) {
        let n = self.n as usize;
        for p in 0..=n {
            for h in 0..n {
                out[pi[p] as usize * n + sigma[h] as usize] = pi[table[p * n + h] as usize];
            }
        }
    }

    /// Least image of a table with initial question `0`, and its stabilizer size.
    pub fn canonical(&self, table: &[u32]) -> (Vec<u32>, u64) {
        let mut best = table.to_vec();
        let mut buf = vec![0; table.len()];
        let mut stab = 0;
        for (pi, sigma) in &self.perms {
            self.image(table, pi, sigma, &mut buf);
            if buf.as_slice() < best.as_slice() {
                best.copy_from_slice(&buf);
            }
            if buf.as_slice() == table {
                stab += 1;
            }
        }
        (best, stab)
    }

    pub fn is_canonical(&self, table: &[u32]) -> bool {
        let mut buf = vec![0; table.len()];
        self.perms.iter().all(|(pi, sigma)| {
            self.image(table, pi, sigma, &mut buf);
            buf.as_slice() >= table
        })
    }

    /// Relabels `strat` so that its initial question is `0`, then canonicalizes.
    pub fn canonical_strategy(&self, strat: &SimpleStrategy) -> SimpleStrategy {
        let n = self.n as usize;
        let swap = |p: u32| match p {
            p if p == strat.init() => 0,
            0 => strat.init(),
            p => p,
        };
        let mut t = vec![0; strat.cells()];
        for p in 0..=n as u32 {
            for h in 0..n as u32 {
                t[swap(p) as usize * n + h as usize] = swap(strat.get(p, h));
            }
        }
        let (best, _) = self.canonical(&t);
        SimpleStrategy::standard(self.n, strat.s(), 0, best).expect("relabeling preserves validity")
    }
}

// ---------------------------------------------------------------------------
// Theorem campaigns.

/// Random standard strategy on `n` holes.
pub fn random_strategy(n: u32, rng: &mut impl Rng) -> SimpleStrategy {
    let size = GameSize::new(n).expect("n ≥ 1");
    let table = (0..size.pigeons() * n).map(|_| rng.gen_range(0..size.pigeons())).collect();
    SimpleStrategy::new(size, 1, rng.gen_range(0..size.pigeons()), table).expect("valid")
}

/// Certificate versus exhaustive oracle on seeded random tables, all `s ≤ s_cap`.
pub fn oracle_disagreements(n: u32, count: u64, s_cap: u32, seed: u64) -> Result<Vec<(SimpleStrategy, u32)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 48);
    let strats: Vec<SimpleStrategy> = (0..count).map(|_| random_strategy(n, &mut rng)).collect();
    let per: Vec<Result<Vec<(SimpleStrategy, u32)>>> = strats
        .par_iter()
        .map(|st| {
            let cert = Certifier::for_strategy(st)?.certify(st, s_cap);
            let mut bad = Vec::new();
            for s in 1..=s_cap {
                if cert.wins(s) != brute_force_delayer_wins(st, s, DEFAULT_BRUTE_BUDGET)? {
                    bad.push((st.with_s(s)?, s));
                }
            }
            Ok(bad)
        })
        .collect();
    Ok(per.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

/// In-process gate run before any theorem campaign.
pub fn oracle_gate(seed: u64) -> Result<()> {
    for (n, count) in [(3, 500), (4, 50)] {
        let bad = oracle_disagreements(n, count, 8, seed)?;
        if let Some((st, s)) = bad.first() {
            return Err(Error::Contract(format!(
                "certificate disagrees with the exhaustive oracle at s={s} for\n{}",
                st.to_text()
            )));
        }
    }
    Ok(())
}

fn sampled(idx: u64, seed: u64, per_mille: u64) -> bool {
    splitmix(idx ^ seed.rotate_left(17)) % 1000 < per_mille
}

/// Verdict of one table: `Ok(true)` when Delayer wins at every length.
fn theorem_verdict(st: &SimpleStrategy, idx: u64, cert: &mut Certifier, opts: &CampaignOptions) -> Result<bool> {
    if opts.fast_path && canonical_revisit(st) {
        if sampled(idx, opts.seed, 10) && !cert.all_winning(st) {
            return Err(Error::Contract(format!("canonical revisit but Prover wins for\n{}", st.to_text())));
        }
        return Ok(true);
    }
    Ok(cert.all_winning(st))
}

fn counterexample(n: u32, idx: u64, opts: &CampaignOptions) -> Counterexample {
    let st = strategy_at(n, idx, 1);
    let cert = Certifier::for_strategy(&st).expect("valid shape").certify(&st, opts.s_max);
    let s = cert.first_loss().expect("counterexample has a losing length");
    Counterexample { name: format!("n{n}-{idx}.strat"), text: st.with_s(s).expect("s ≥ 1").to_text() }
}

#[derive(Debug, Clone, Default)]
struct ShardState {
    next: u64,
    found: Vec<u64>,
}

fn read_checkpoint(path: &Path, m: u32) -> Result<BTreeMap<u32, ShardState>> {
    let mut out = BTreeMap::new();
    let Ok(src) = std::fs::read_to_string(path) else { return Ok(out) };
    for (i, line) in src.lines().enumerate() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = || crate::error::parse_err(i + 1, 1, format!("bad checkpoint line `{line}`"));
        match parts.as_slice() {
            ["shard", km, "next", next, "found", rest @ ..] => {
                let (k, mm) = km.split_once('/').ok_or_else(bad)?;
                let (k, mm): (u32, u32) = (k.parse().map_err(|_| bad())?, mm.parse().map_err(|_| bad())?);
                if mm != m {
                    continue;
                }
                let found = rest.iter().map(|x| x.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                out.insert(k, ShardState { next: next.parse().map_err(|_| bad())?, found });
            }
            [] => {}
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

fn append_checkpoint(path: &Path, k: u32, m: u32, st: &ShardState) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    let found: String = st.found.iter().map(|x| format!(" {x}")).collect();
    writeln!(f, "shard {k}/{m} next {} found{found}", st.next)?;
    Ok(())
}

/// Full enumeration of `(init, F)` on `n ≤ 3` holes: Delayer must win at every `s`.
pub fn verify_theorem_main(n: u32, opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    oracle_gate(opts.seed)?;
    let claim = format!("theorem-main-n{n}");
    if opts.symmetry {
        return verify_theorem_main_symmetric(n, &claim, timer, opts);
    }
    if n == 0 || n > FULL_CEILING {
        return Err(invalid(format!("full enumeration supports 1 ≤ n ≤ {FULL_CEILING}")));
    }
    let total = strategy_space(n).expect("small n");
    let m = opts.shards.max(1);
    let resume = match &opts.checkpoint {
        Some(p) => read_checkpoint(p, m)?,
        None => BTreeMap::new(),
    };
    let lock = std::sync::Mutex::new(());
    let run_shard = |k: u32| -> Result<Vec<u64>> {
        let range = shard_range(total, k, m);
        let mut st = resume.get(&k).cloned().unwrap_or(ShardState { next: range.start, found: Vec::new() });
        st.next = st.next.max(range.start);
        let mut cert = Certifier::new(n + 1, n)?;
        while st.next < range.end {
            let stop = (st.next + CHECKPOINT_EVERY).min(range.end);
            for idx in st.next..stop {
                if !theorem_verdict(&strategy_at(n, idx, 1), idx, &mut cert, opts)? {
                    st.found.push(idx);
                }
            }
            st.next = stop;
            if let Some(p) = &opts.checkpoint {
                let _g = lock.lock().expect("checkpoint lock");
                append_checkpoint(p, k, m, &st)?;
            }
        }
        Ok(st.found)
    };
    let found: Vec<Vec<u64>> =
        pool(opts)?.install(|| (0..m).into_par_iter().map(run_shard).collect::<Result<Vec<_>>>())?;
    let mut all: Vec<u64> = found.into_iter().flatten().collect();
    all.sort_unstable();
    let ces = all.into_iter().map(|i| counterexample(n, i, opts)).collect();
    Ok(timer.report(&claim, total, ces, m))
}

fn verify_theorem_main_symmetric(n: u32, claim: &str, timer: Timer, opts: &CampaignOptions) -> Result<CampaignReport> {
    if n == 0 || n > FULL_CEILING {
        return Err(invalid(format!("full enumeration supports 1 ≤ n ≤ {FULL_CEILING}")));
    }
    let total = strategy_space(n).expect("small n");
    let per_init = total / (n as u64 + 1);
    let sym = Symmetry::new(n);
    let order = sym.group_order();
    let m = opts.shards.max(1);
    let per: Vec<(u64, Vec<u64>)> = pool(opts)?.install(|| {
        (0..m)
            .into_par_iter()
            .map(|k| -> Result<(u64, Vec<u64>)> {
                let mut cert = Certifier::new(n + 1, n)?;
                let (mut covered, mut found) = (0u64, Vec::new());
                for idx in shard_range(per_init, k, m) {
                    let st = strategy_at(n, idx, 1);
                    let (best, stab) = sym.canonical(st.table());
                    if best.as_slice() != st.table() {
                        continue;
                    }
                    // Orbit size in the full group; the stabilizer fixes pigeon 0.
                    covered += order / stab;
                    if !theorem_verdict(&st, idx, &mut cert, opts)? {
                        found.push(idx);
                    }
                }
                Ok((covered, found))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let covered: u64 = per.iter().map(|x| x.0).sum();
    if covered != total {
        return Err(Error::Contract(format!("symmetry classes cover {covered} strategies, expected {total}")));
    }
    check_symmetry_sample(n, &sym, opts)?;
    let mut all: Vec<u64> = per.into_iter().flat_map(|x| x.1).collect();
    all.sort_unstable();
    let ces = all.into_iter().map(|i| counterexample(n, i, opts)).collect();
    Ok(timer.report(claim, covered, ces, m))
}

/// Verdicts agree with those of canonical representatives on a 0.1% sample.
fn check_symmetry_sample(n: u32, sym: &Symmetry, opts: &CampaignOptions) -> Result<()> {
    let total = strategy_space(n).expect("small n");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let count = (total / 1000).max(1);
    let mut cert = Certifier::new(n + 1, n)?;
    for _ in 0..count {
        let st = strategy_at(n, rng.gen_range(0..total), 1);
        let rep = sym.canonical_strategy(&st);
        if cert.all_winning(&st) != cert.all_winning(&rep) {
            return Err(Error::Contract(format!("relabeling changed the verdict of\n{}", st.to_text())));
        }
    }
    Ok(())
}

/// Symmetry-mode validation alone: class sizes sum to the full space.
pub fn verify_symmetry(n: u32, opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let total = strategy_space(n).ok_or_else(|| invalid("space too large"))?;
    let sym = Symmetry::new(n);
    let per_init = total / (n as u64 + 1);
    let m = opts.shards.max(1);
    let covered: u64 = pool(opts)?.install(|| {
        (0..m)
            .into_par_iter()
            .map(|k| {
                let mut c = 0;
                for idx in shard_range(per_init, k, m) {
                    let st = strategy_at(n, idx, 1);
                    let (best, stab) = sym.canonical(st.table());
                    if best.as_slice() == st.table() {
                        c += sym.group_order() / stab;
                    }
                }
                c
            })
            .sum()
    });
    let mut ces = Vec::new();
    if covered != total {
        ces.push(Counterexample { name: "symmetry.txt".into(), text: format!("covered {covered} of {total}\n") });
    }
    if let Err(e) = check_symmetry_sample(n, &sym, opts) {
        ces.push(Counterexample { name: "symmetry-sample.txt".into(), text: format!("{e}\n") });
    }
    Ok(timer.report(&format!("symmetry-n{n}"), total, ces, m))
}

/// Seeded random sample of strategies on `n` holes.
pub fn verify_theorem_main_sampled(n: u32, opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    oracle_gate(opts.seed)?;
    let m = opts.shards.max(1);
    let samples = opts.samples;
    let found: Vec<Vec<SimpleStrategy>> = pool(opts)?.install(|| {
        (0..m)
            .into_par_iter()
            .map(|k| -> Result<Vec<SimpleStrategy>> {
                let mut cert = Certifier::new(n + 1, n)?;
                let mut bad = Vec::new();
                for i in shard_range(samples, k, m) {
                    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(opts.seed ^ splitmix(i)));
                    let st = random_strategy(n, &mut rng);
                    if !theorem_verdict(&st, i, &mut cert, opts)? {
                        bad.push(st);
                    }
                }
                Ok(bad)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let ces = found
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(i, st)| {
            let cert = Certifier::for_strategy(&st).expect("valid").certify(&st, opts.s_max);
            let s = cert.first_loss().expect("losing length");
            Counterexample { name: format!("n{n}-sample-{i}.strat"), text: st.with_s(s).expect("s ≥ 1").to_text() }
        })
        .collect();
    Ok(timer.report(&format!("theorem-main-n{n}"), samples, ces, m))
}

/// Certificate equals the exhaustive oracle for every `s ≤ s_cap`.
pub fn verify_oracle_equivalence(plan: &[(u32, u64)], s_cap: u32, opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let mut ces = Vec::new();
    let mut space = 0;
    for &(n, count) in plan {
        space += count * s_cap as u64;
        let bad = pool(opts)?.install(|| oracle_disagreements(n, count, s_cap, opts.seed))?;
        ces.extend(
            bad.into_iter()
                .enumerate()
                .map(|(i, (st, s))| Counterexample { name: format!("oracle-n{n}-{i}-s{s}.strat"), text: st.to_text() }),
        );
    }
    Ok(timer.report("oracle-equivalence", space, ces, opts.shards))
}

fn prover_sweep(strat: &SimpleStrategy, tag: &str, ces: &mut Vec<Counterexample>) -> u64 {
    let mut count = 0;
    for play in all_plays(strat) {
        count += 1;
        let out = play_simplified(strat, &play).expect("plays are well formed");
        if !out.prover_wins() {
            ces.push(Counterexample { name: format!("{tag}-{count}.play"), text: play.to_text() });
        }
    }
    count
}

/// Small-board Prover wins every play at `(n, s) ∈ {(1,2), (2,3), (2,6)}`.
pub fn verify_small_n(opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let mut ces = Vec::new();
    let mut space = 0;
    for (n, s) in [(1, 2), (2, 3), (2, 6)] {
        space += prover_sweep(&prover_small_n(n, s)?, &format!("small-n{n}-s{s}"), &mut ces);
    }
    Ok(timer.report("small-n", space, ces, 1))
}

/// The subset Prover wins every play for `n = 1..=4`.
pub fn verify_subset_prop(opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let mut ces = Vec::new();
    let mut space = 0;
    for n in 1..=4 {
        space += prover_sweep(&subset_prover(n)?, &format!("subset-n{n}"), &mut ces);
    }
    Ok(timer.report("subset-prop", space, ces, 1))
}

/// Failures of the order axioms and of embedding reversal on a universe.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderCheck {
    pub pairs: u64,
    pub triples: u64,
    pub failures: Vec<String>,
}

/// Antisymmetry and trichotomy over all pairs, transitivity over all
/// triples (or `sample` random ones), and reversal by `ordinal_embed`.
pub fn check_order_axioms(trees: &[FiniteTree], embed_b: u32, h: usize, sample: Option<(u64, u64)>) -> OrderCheck {
    use std::cmp::Ordering::*;
    let mut out = OrderCheck::default();
    let emb: Vec<_> = trees.iter().map(|t| ordinal_embed(t, embed_b, h).expect("within bounds")).collect();
    let k = trees.len();
    for i in 0..k {
        for j in 0..k {
            out.pairs += 1;
            let (a, b) = (tree_compare(&trees[i], &trees[j]), tree_compare(&trees[j], &trees[i]));
            let ok = match a {
                Equal => i == j && b == Equal,
                Less => b == Greater && i != j,
                Greater => b == Less && i != j,
            };
            if !ok {
                out.failures.push(format!("pair {i},{j}: {a:?}/{b:?}"));
            }
            if a == Less && emb[i] <= emb[j] {
                out.failures.push(format!("embedding not reversed on pair {i},{j}"));
            }
        }
    }
    let triple = |i: usize, j: usize, l: usize, out: &mut OrderCheck| {
        out.triples += 1;
        if tree_compare(&trees[i], &trees[j]) == Less
            && tree_compare(&trees[j], &trees[l]) == Less
            && tree_compare(&trees[i], &trees[l]) != Less
        {
            out.failures.push(format!("transitivity fails on {i},{j},{l}"));
        }
    };
    match sample {
        None => {
            for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        triple(i, j, l, &mut out);
                    }
                }
            }
        }
        Some((count, seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let (i, j, l) = (rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k));
                triple(i, j, l, &mut out);
            }
        }
    }
    out
}

/// Order axioms on all trees inside `[2]^{≤2}` (full cube) and `[3]^{≤2}`
/// (all pairs, `10^6` sampled triples).
pub fn verify_order_axioms(opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let small = check_order_axioms(&all_trees(2, 2), 3, 2, None);
    let big = check_order_axioms(&all_trees(3, 2), 4, 2, Some((1_000_000, opts.seed)));
    let ces = small
        .failures
        .iter()
        .chain(&big.failures)
        .enumerate()
        .map(|(i, f)| Counterexample { name: format!("order-{i}.txt"), text: format!("{f}\n") })
        .collect();
    Ok(timer.report("order-axioms", small.pairs + small.triples + big.pairs + big.triples, ces, 1))
}

/// Random left-sibling-closed tree of height `≤ c` with at most `width` children per vertex.
pub fn random_nc_tree(c: usize, width: u32, rng: &mut impl Rng) -> FiniteTree {
    let mut vs = vec![Vertex::root()];
    let mut frontier = vec![Vertex::root()];
    while let Some(v) = frontier.pop() {
        if v.height() == c {
            continue;
        }
        // A branching root keeps most playouts past the first round.
        let k = rng.gen_range(if v.is_root() { 2.min(width) } else { 0 }..=width);
        for i in 1..=k {
            vs.push(v.child(i));
            frontier.push(v.child(i));
        }
    }
    FiniteTree::new(vs).expect("prefix closed")
}

/// Result of one fuzzed G2 playout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlayoutIssue {
    Monotonicity(String),
    NoHalt,
}

/// One seeded playout on a random tree; `None` when it halts with strictly
/// increasing domains within the bound.
pub fn g2_playout(n: u32, c: u32, seed: u64) -> Result<Option<PlayoutIssue>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = G2Config::new(n, c)?;
    let tree = random_nc_tree(c as usize, 3, &mut rng);
    let prover = HashedRandomProver { tree: tree.clone(), cfg, seed: rng.gen(), normal_form: false, max_query: 3 };
    let delayer = HashedDelayer { size: cfg.size, seed: rng.gen(), bias: rng.gen_range(0..=8) };
    // Domains are subtrees of `[cap]^{≤C}`, so the number of transitions is
    // below `2^{|[cap]^{≤C}|}`, which the step cap exceeds here.
    let universe: u32 = (0..=c).map(|d| cfg.cap.pow(d)).sum();
    let step_cap = 1usize << universe.min(20);
    match g2_play(&cfg, &tree, &prover, &delayer, step_cap) {
        Ok(t) if t.outcome == G2Outcome::DelayerWins => Ok(Some(PlayoutIssue::NoHalt)),
        Ok(t) => {
            let emb: Vec<_> =
                t.domains.iter().map(|d| ordinal_embed(d, cfg.cap + 1, c as usize).expect("in bounds")).collect();
            if emb.windows(2).any(|w| w[0] <= w[1]) {
                return Ok(Some(PlayoutIssue::Monotonicity("embedding did not decrease".into())));
            }
            Ok(None)
        }
        Err(Error::Contract(m)) => Ok(Some(PlayoutIssue::Monotonicity(m))),
        Err(e) => Err(e),
    }
}

/// Aux-free translation preserves the winner and the decoded positions.
pub fn g2prime_replay(n: u32, c: u32, seed: u64) -> Result<Option<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = G2Config::new(n, c)?.with_cap(3);
    let tree = random_nc_tree(c as usize, 3, &mut rng);
    let prover = HashedRandomProver { tree: tree.clone(), cfg, seed: rng.gen(), normal_form: true, max_query: 3 };
    let delayer = HashedDelayer { size: cfg.size, seed: rng.gen(), bias: rng.gen_range(0..=8) };
    let original = g2_play(&cfg, &tree, &prover, &delayer, 10_000)?;
    let prime = to_g2prime(prover.clone(), &tree, &cfg, c + 4)?;
    let induced = InducedDelayer { inner: &delayer, b: cfg.cap };
    let translated = g2_play(&prime.cfg, &prime.tree, &prime.strategy, &induced, 10_000)?;
    if original.winner_tag() != translated.winner_tag() {
        return Ok(Some(format!("winner {} vs {}", original.winner_tag(), translated.winner_tag())));
    }
    if original.rounds.len() != translated.rounds.len() {
        return Ok(Some("round counts differ".into()));
    }
    for (a, b) in original.rounds.iter().zip(&translated.rounds) {
        if a.query != b.query || a.answer != b.answer {
            return Ok(Some("queries or answers differ".into()));
        }
    }
    Ok(None)
}

/// Fuzzed playouts, the root-ramification Prover against every Delayer,
/// and the aux-free translation.
pub fn verify_g2_properties(
    ns: &[u32],
    c: u32,
    playouts: u64,
    translations: u64,
    opts: &CampaignOptions,
) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let mut ces = Vec::new();
    let jobs: Vec<(u32, u64)> = (0..playouts).map(|i| (ns[i as usize % ns.len()], i)).collect();
    let issues: Vec<(u32, u64, Option<PlayoutIssue>)> = pool(opts)?.install(|| {
        jobs.par_iter()
            .map(|&(n, i)| Ok((n, i, g2_playout(n, c, splitmix(opts.seed ^ splitmix(i)))?)))
            .collect::<Result<Vec<_>>>()
    })?;
    for (n, i, issue) in issues {
        if let Some(issue) = issue {
            ces.push(Counterexample { name: format!("g2-playout-n{n}-{i}.txt"), text: format!("{issue:?}\n") });
        }
    }
    let cfg = G2Config::new(3, c)?;
    let (tree, prover) = prover_root_ramify(3, &cfg)?;
    let summary = g2_exhaustive(&cfg, &tree, &prover, 64)?;
    if summary.prover_wins != summary.branches {
        ces.push(Counterexample { name: "root-ramify.txt".into(), text: format!("{summary:?}\n") });
    }
    let prime: Vec<(u64, Option<String>)> = pool(opts)?.install(|| {
        (0..translations)
            .into_par_iter()
            .map(|i| Ok((i, g2prime_replay(ns[i as usize % ns.len()], c, splitmix(opts.seed ^ !i))?)))
            .collect::<Result<Vec<_>>>()
    })?;
    for (i, bad) in prime {
        if let Some(msg) = bad {
            ces.push(Counterexample { name: format!("g2prime-{i}.txt"), text: format!("{msg}\n") });
        }
    }
    Ok(timer.report("g2-properties", playouts + summary.branches + translations, ces, 1))
}

/// Loops of the example strategy and every shipped figure.
pub fn verify_figures(opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let mut ces = Vec::new();
    let loops = find_loops(&crate::figures::fig1_strategy(0, 3));
    let want = [(2, 0), (2, 1), (3, 2)];
    if loops.iter().map(|e| (e.tail, e.label)).collect::<Vec<_>>() != want {
        ces.push(Counterexample { name: "fig1-loops.txt".into(), text: format!("{loops:?}\n") });
    }
    let figs = crate::figures::figures();
    for f in &figs {
        let failures = f.report()?.failures();
        if !failures.is_empty() {
            ces.push(Counterexample { name: format!("{}.txt", f.name), text: failures.join("\n") + "\n" });
        }
    }
    Ok(timer.report("figures", 1 + figs.len() as u64, ces, 1))
}

/// Biconditional between completeness of `𝒯_F` and the absence of a
/// winning canonical anti-strategy, over `s ∈ [n+1, 3n+3]`.
pub fn completeness_matches(st: &SimpleStrategy) -> bool {
    let n = st.n();
    let complete = build_php_tree(st).is_complete();
    let some_win = (n + 1..=3 * n + 3).any(|s| {
        let st = st.with_s(s).expect("s ≥ 1");
        all_canonical_plays(&st).iter().any(|p| p.canonical_win())
    });
    let all_win = (n + 1..=3 * n + 3).all(|s| {
        let st = st.with_s(s).expect("s ≥ 1");
        all_canonical_plays(&st).iter().any(|p| p.canonical_win())
    });
    if complete {
        !some_win
    } else {
        all_win
    }
}

/// php-tree structure on random tables and the completeness biconditional.
pub fn verify_php_trees(opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let mut ces = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x7ee);
    let structural: Vec<SimpleStrategy> = (0..10_000).map(|i| random_strategy(3 + (i % 2), &mut rng)).collect();
    for (i, st) in structural.iter().enumerate() {
        let t = build_php_tree(st);
        if !t.is_valid() || !t.is_symmetric() {
            ces.push(Counterexample { name: format!("php-structure-{i}.strat"), text: st.to_text() });
        }
    }
    let mut tested = 0u64;
    let mut complete_seen = 0u64;
    let mut i = 0u64;
    // 10^3 random tables, topped up until 100 complete trees were also exercised.
    while tested < 1_000 || complete_seen < 100 {
        let st = random_strategy(3, &mut rng);
        let complete = build_php_tree(&st).is_complete();
        i += 1;
        if tested >= 1_000 && !complete {
            continue;
        }
        tested += 1;
        complete_seen += complete as u64;
        if !completeness_matches(&st) {
            ces.push(Counterexample { name: format!("php-complete-{i}.strat"), text: st.to_text() });
        }
    }
    Ok(timer.report("php-trees", structural.len() as u64 + tested, ces, 1))
}

/// Shortest loop witness versus `2(n−2)+1` over every table and loop on `n` holes.
pub fn verify_loop_bound(n: u32, opts: &CampaignOptions) -> Result<CampaignReport> {
    let timer = Timer::new(opts);
    let total = strategy_space(n).ok_or_else(|| invalid("space too large"))?;
    if n > FULL_CEILING {
        return Err(invalid(format!("full enumeration supports n ≤ {FULL_CEILING}")));
    }
    let bound = loop_witness_bound(n);
    let m = opts.shards.max(1);
    let found: Vec<(u64, u32, u32, u32)> = pool(opts)?.install(|| {
        (0..m)
            .into_par_iter()
            .flat_map_iter(|k| {
                shard_range(total, k, m).filter_map(move |idx| {
                    let st = strategy_at(n, idx, 1);
                    find_loops(&st).into_iter().find_map(|e| {
                        loop_witness_length(&st, e.tail, e.label)
                            .filter(|&len| len > bound)
                            .map(|len| (idx, e.tail, e.label, len))
                    })
                })
            })
            .collect()
    });
    let ces = found
        .into_iter()
        .map(|(idx, p, h, len)| {
            let st = strategy_at(n, idx, len + 1);
            Counterexample {
                name: format!("loop-n{n}-{idx}.strat"),
                text: format!("# loop ({p},{h}) first reached after {len} edges\n{}", st.to_text()),
            }
        })
        .collect();
    Ok(timer.report(&format!("loop-bound-n{n}"), total, ces, m))
}

/// Seeded random tables on `n` holes with a loop: shortest witness length,
/// or `None` when no witness exists.
pub fn loop_witness_sample(n: u32, count: usize, seed: u64) -> Vec<(SimpleStrategy, Option<u32>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let st = random_strategy(n, &mut rng);
        if let Some(e) = find_loops(&st).first().copied() {
            let len = loop_witness_length(&st, e.tail, e.label);
            out.push((st, len));
        }
    }
    out
}

/// Convenience: outcome of the canonical anti-strategy with the default policy.
pub fn canonical_outcome(st: &SimpleStrategy) -> PlayOutcome {
    crate::simple::canonical_antistrategy(st, &crate::simple::HolePolicy::SmallestUnused).outcome
}
