//! Machine checks for path figures: a prefix plus a repeating cycle, with
//! some edges marked red (last edge not globally consistent).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{last_edge_globally_consistent, locally_consistent, EdgeRef};
use crate::error::{invalid, parse_err, Result};
use crate::matching::parse_record;
use crate::text;

/// One unrollable path of a figure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSpec {
    pub name: String,
    pub prefix: Vec<EdgeRef>,
    pub cycle: Vec<EdgeRef>,
    pub red: BTreeSet<EdgeRef>,
}

impl PathSpec {
    pub fn new(name: &str, prefix: Vec<EdgeRef>, cycle: Vec<EdgeRef>, red: impl IntoIterator<Item = EdgeRef>) -> Self {
        PathSpec { name: name.to_string(), prefix, cycle, red: red.into_iter().collect() }
    }

    fn edges(&self) -> impl Iterator<Item = &EdgeRef> {
        self.prefix.iter().chain(&self.cycle)
    }

    /// Successor tail implied by each edge along the walk.
    fn implied(&self) -> Vec<(EdgeRef, u32)> {
        let walk: Vec<EdgeRef> = self.edges().copied().collect();
        let mut out: Vec<(EdgeRef, u32)> = walk.windows(2).map(|w| (w[0], w[1].tail)).collect();
        if let (Some(&last), Some(first)) = (self.cycle.last(), self.cycle.first()) {
            out.push((last, first.tail));
        }
        out
    }
}

/// The first `s` edges of the walk, or `None` when it is shorter than `s`.
pub fn unroll(spec: &PathSpec, s: usize) -> Option<Vec<EdgeRef>> {
    if s > spec.prefix.len() && spec.cycle.is_empty() {
        return None;
    }
    Some(spec.prefix.iter().chain(spec.cycle.iter().cycle()).take(s).copied().collect())
}

/// Checks one length of one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnrollCheck {
    pub s: u32,
    pub last: EdgeRef,
    pub locally_consistent: bool,
    /// Recomputed: last edge compatible with every earlier edge.
    pub green: bool,
    pub marked_red: bool,
}

impl UnrollCheck {
    /// Usable by Delayer at this length.
    pub fn wins(&self) -> bool {
        self.locally_consistent && self.green
    }
}

/// Per-length results of a cover check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub names: Vec<String>,
    /// `rows[i][j]`: length `threshold + i`, path `j`.
    pub rows: Vec<Vec<UnrollCheck>>,
}

impl CoverReport {
    /// Violations of local consistency, coverage and color coding.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for row in &self.rows {
            let s = row[0].s;
            for (j, u) in row.iter().enumerate() {
                if !u.locally_consistent {
                    out.push(format!("s={s} {}: not locally consistent", self.names[j]));
                }
                if u.marked_red == u.green {
                    let how = if u.green { "red but globally consistent" } else { "not red but inconsistent" };
                    out.push(format!("s={s} {}: last edge {} is {how}", self.names[j], u.last));
                }
            }
            if !row.iter().any(UnrollCheck::wins) {
                out.push(format!("s={s}: no path ends in a usable edge"));
            }
        }
        out
    }

    pub fn ok(&self) -> bool {
        self.failures().is_empty()
    }

    /// Lengths at which path `j` is usable.
    pub fn winning_lengths(&self, j: usize) -> Vec<u32> {
        self.rows.iter().filter(|r| r[j].wins()).map(|r| r[j].s).collect()
    }
}

fn validate(paths: &[&PathSpec]) -> Result<()> {
    let mut implied: BTreeMap<EdgeRef, u32> = BTreeMap::new();
    let start = paths.first().and_then(|p| p.edges().next()).map(|e| e.tail);
    for p in paths {
        match p.edges().next() {
            None => return Err(invalid(format!("path {} is empty", p.name))),
            Some(e) if Some(e.tail) != start => {
                return Err(invalid(format!("path {} starts at {} instead of {}", p.name, e.tail, start.unwrap())))
            }
            _ => {}
        }
        for (e, next) in p.implied() {
            if let Some(prev) = implied.insert(e, next) {
                if prev != next {
                    return Err(invalid(format!("edge {e} leads to both {prev} and {next}")));
                }
            }
        }
        if let Some(r) = p.red.iter().find(|r| !p.edges().any(|e| e == *r)) {
            return Err(invalid(format!("red edge {r} is not on path {}", p.name)));
        }
    }
    Ok(())
}

/// Unrolls every path at every length in `[threshold, threshold + horizon]`.
pub fn cover_report(paths: &[&PathSpec], threshold: u32, horizon: u32) -> Result<CoverReport> {
    validate(paths)?;
    let mut rows = Vec::new();
    for s in threshold.max(1)..=threshold.max(1) + horizon {
        let mut row = Vec::new();
        for p in paths {
            let walk = unroll(p, s as usize)
                .ok_or_else(|| invalid(format!("path {} has no cycle and is shorter than {s}", p.name)))?;
            let last = *walk.last().expect("s ≥ 1");
            row.push(UnrollCheck {
                s,
                last,
                locally_consistent: locally_consistent(&walk),
                green: last_edge_globally_consistent(&walk),
                marked_red: p.red.contains(&last),
            });
        }
        rows.push(row);
    }
    Ok(CoverReport { names: paths.iter().map(|p| p.name.clone()).collect(), rows })
}

/// Whether one path, or a pair, covers every length in the window with
/// locally consistent unrollings and correct red marks.
pub fn check_cover_by_two(a: &PathSpec, b: Option<&PathSpec>, threshold: u32, horizon: u32) -> Result<bool> {
    let paths: Vec<&PathSpec> = std::iter::once(a).chain(b).collect();
    Ok(cover_report(&paths, threshold, horizon)?.ok())
}

/// A figure: one or two paths plus the window to check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureSpec {
    pub name: String,
    pub threshold: u32,
    pub horizon: u32,
    pub paths: Vec<PathSpec>,
}

impl FigureSpec {
    pub fn report(&self) -> Result<CoverReport> {
        cover_report(&self.paths.iter().collect::<Vec<_>>(), self.threshold, self.horizon)
    }

    pub fn check(&self) -> Result<bool> {
        Ok(self.report()?.ok())
    }

    pub fn path(&self, name: &str) -> Option<&PathSpec> {
        self.paths.iter().find(|p| p.name == name)
    }

    /// Parses a sequence of figure blocks:
    ///
    /// ```text
    /// figure NAME
    /// threshold 4
    /// horizon 60
    /// path upper
    /// prefix (3,2) (2,0)
    /// cycle (1,1) (0,0)
    /// red (0,0)
    /// end
    /// ```
    pub fn parse_all(src: &str) -> Result<Vec<FigureSpec>> {
        let mut figs: Vec<FigureSpec> = Vec::new();
        let mut open = false;
        for (_, toks) in text::numbered(src) {
            let Some(key) = toks.first() else { continue };
            let rest = &toks[1..];
            let edges = || -> Result<Vec<EdgeRef>> {
                rest.iter().map(|t| parse_record(t).map(|r| EdgeRef::new(r.pigeon, r.hole))).collect()
            };
            if key.text == "figure" {
                if open {
                    return Err(key.err("missing `end` before `figure`"));
                }
                let [name] = rest else { return Err(key.err("expected `figure <name>`")) };
                figs.push(FigureSpec { name: name.text.to_string(), threshold: 1, horizon: 0, paths: Vec::new() });
                open = true;
                continue;
            }
            let fig = match figs.last_mut() {
                Some(f) if open => f,
                _ => return Err(key.err(format!("`{}` outside a figure block", key.text))),
            };
            let need_path = |fig: &mut FigureSpec| -> Result<()> {
                if fig.paths.is_empty() {
                    Err(key.err(format!("`{}` before any `path`", key.text)))
                } else {
                    Ok(())
                }
            };
            match key.text {
                "threshold" | "horizon" => {
                    let [v] = rest else { return Err(key.err(format!("expected `{} <int>`", key.text))) };
                    let v = v.u32()?;
                    if key.text == "threshold" {
                        fig.threshold = v;
                    } else {
                        fig.horizon = v;
                    }
                }
                "path" => {
                    let [name] = rest else { return Err(key.err("expected `path <name>`")) };
                    if fig.paths.len() == 2 {
                        return Err(key.err("a figure has at most two paths"));
                    }
                    fig.paths.push(PathSpec::new(name.text, Vec::new(), Vec::new(), []));
                }
                "prefix" => {
                    need_path(fig)?;
                    fig.paths.last_mut().unwrap().prefix = edges()?;
                }
                "cycle" => {
                    need_path(fig)?;
                    fig.paths.last_mut().unwrap().cycle = edges()?;
                }
                "red" => {
                    need_path(fig)?;
                    fig.paths.last_mut().unwrap().red = edges()?.into_iter().collect();
                }
                "end" => {
                    if fig.paths.is_empty() {
                        return Err(key.err("figure without paths"));
                    }
                    validate(&fig.paths.iter().collect::<Vec<_>>()).map_err(|e| key.err(e))?;
                    open = false;
                }
                other => return Err(key.err(format!("unknown key `{other}`"))),
            }
        }
        if open {
            let (l, c) = text::eof(src);
            return Err(parse_err(l, c, "missing `end`"));
        }
        Ok(figs)
    }
}

impl fmt::Display for FigureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |es: &mut dyn Iterator<Item = &EdgeRef>| es.map(|e| format!(" {e}")).collect::<String>();
        writeln!(f, "figure {}", self.name)?;
        writeln!(f, "threshold {}", self.threshold)?;
        writeln!(f, "horizon {}", self.horizon)?;
        for p in &self.paths {
            writeln!(f, "path {}", p.name)?;
            writeln!(f, "prefix{}", list(&mut p.prefix.iter()))?;
            writeln!(f, "cycle{}", list(&mut p.cycle.iter()))?;
            writeln!(f, "red{}", list(&mut p.red.iter()))?;
        }
        writeln!(f, "end")
    }
}
