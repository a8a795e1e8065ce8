//! `pebble`: analyze strategies, replay plays, compare trees, simulate the
//! backtracking game, and run verification campaigns.
//!
//! Exit codes: 0 success, 1 counterexamples found, 2 usage or input error.

use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pebble_core::g2::{g2_play, parse_answer_lines, prover_root_ramify, FirstCoverDelayer, G2Config, ScriptedDelayer};
use pebble_core::simple::{Play, SimpleStrategy};
use pebble_core::tree::{ordinal_embed, tree_compare, FiniteTree};
use pebble_core::verify::{run_claim, CampaignOptions, CLAIMS};
use pebble_core::{report, Error};

#[derive(Parser)]
#[command(name = "pebble", version, about = "Prover/Delayer pebble games over the pigeonhole principle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strategy graph, loops, loose pairs, php-tree summary and win certificate.
    Analyze {
        strategy: PathBuf,
        /// Largest length listed explicitly in the certificate.
        #[arg(long, default_value_t = 64)]
        s_max: u32,
    },
    /// Replays an answers file (`-` for standard input) against a strategy.
    Play { strategy: PathBuf, answers: PathBuf },
    /// Runs a verification campaign.
    Verify {
        claim: String,
        #[arg(long, default_value_t = 64)]
        shards: u32,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 64)]
        s_max: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples for sampled campaigns.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Certify every table in full instead of dispatching revisiting ones early.
        #[arg(long)]
        no_fast_path: bool,
        /// Enumerate one table per relabeling class.
        #[arg(long)]
        symmetry: bool,
        /// Append-only progress file; rerunning with the same file resumes.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Directory receiving one file per counterexample.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print `seconds=0.000` so reports are byte-identical.
        #[arg(long)]
        no_wall_clock: bool,
    },
    /// Compares two trees under the tree order and prints their embeddings.
    Order { a: PathBuf, b: PathBuf },
    /// Plays the backtracking game and prints the transcript.
    G2sim {
        #[arg(long)]
        n: u32,
        #[arg(long = "C")]
        c: u32,
        #[arg(long, default_value = "root-ramify", value_parser = ["root-ramify"])]
        strategy: String,
        /// Delayer answers as `answer:` lines; otherwise the first consistent cover.
        #[arg(long)]
        answers: Option<PathBuf>,
        /// Lower the child-index bound.
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long, default_value_t = 100_000)]
        step_cap: usize,
    },
}

/// A failure with the file it came from, if any.
struct Failure {
    path: Option<PathBuf>,
    err: Error,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure { path: None, err }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    let mut s = String::new();
    let res = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    res.map_err(|e| Failure { path: Some(path.to_path_buf()), err: e.into() })?;
    Ok(s)
}

fn parse<T>(path: &Path, f: impl FnOnce(&str) -> pebble_core::Result<T>) -> Result<T, Failure> {
    let src = read(path)?;
    f(&src).map_err(|err| Failure { path: Some(path.to_path_buf()), err })
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Analyze { strategy, s_max } => {
            let st = parse(&strategy, SimpleStrategy::from_text)?;
            emit(&report::analyze(&st, s_max));
            Ok(true)
        }
        Command::Play { strategy, answers } => {
            let st = parse(&strategy, SimpleStrategy::from_text)?;
            let play = parse(&answers, Play::from_text)?;
            emit(&report::play_trace(&st, &play)?);
            Ok(true)
        }
        Command::Verify {
            claim,
            shards,
            threads,
            s_max,
            seed,
            samples,
            no_fast_path,
            symmetry,
            checkpoint,
            out,
            no_wall_clock,
        } => {
            if !CLAIMS.contains(&claim.as_str()) {
                return Err(Error::Invalid(format!("unknown claim `{claim}`; known: {}", CLAIMS.join(", "))).into());
            }
            let mut opts = CampaignOptions {
                shards,
                s_max,
                seed,
                samples,
                fast_path: !no_fast_path,
                symmetry,
                checkpoint,
                wall_clock: !no_wall_clock,
                ..CampaignOptions::default()
            };
            if let Some(t) = threads {
                opts.threads = t;
            }
            let rep = run_claim(&claim, &opts)?;
            emit(&format!("{rep}\n"));
            if let Some(dir) = out {
                rep.write_counterexamples(&dir)?;
            }
            Ok(rep.success())
        }
        Command::Order { a, b } => {
            let ta = parse(&a, FiniteTree::from_text)?;
            let tb = parse(&b, FiniteTree::from_text)?;
            // One embedding universe for both trees keeps the values comparable.
            let base = ta.max_index().max(tb.max_index()) + 1;
            let h = ta.height().max(tb.height());
            let ord = tree_compare(&ta, &tb);
            let (ea, eb) = (ordinal_embed(&ta, base, h)?, ordinal_embed(&tb, base, h)?);
            emit(&format!("{ord:?}\nembed-a {ea}\nembed-b {eb}\n"));
            Ok(true)
        }
        Command::G2sim { n, c, strategy: _, answers, cap, step_cap } => {
            let mut cfg = G2Config::new(n, c)?;
            if let Some(cap) = cap {
                cfg = cfg.with_cap(cap);
            }
            let (tree, prover) = prover_root_ramify(n, &cfg)?;
            let transcript = match answers {
                Some(p) => {
                    let delayer = ScriptedDelayer::new(parse(&p, parse_answer_lines)?);
                    g2_play(&cfg, &tree, &prover, &delayer, step_cap)?
                }
                None => g2_play(&cfg, &tree, &prover, &FirstCoverDelayer { size: cfg.size }, step_cap)?,
            };
            emit(&transcript.to_string());
            Ok(true)
        }
    }
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|()| out.flush()).is_err() {
        std::process::exit(0);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure { path, err }) => {
            match path {
                Some(p) => eprintln!("error: {}: {err}", p.display()),
                None => eprintln!("error: {err}"),
            }
            ExitCode::from(2)
        }
    }
}
