//! Index-sequence trees, the lexicographic vertex order, the tree order `≺`,
//! the `(n,C)`-tree shape check, and an order-reversing embedding into the
//! naturals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{invalid, parse_err, Error, Result};
use crate::matching::LogPower;
use crate::text;

/// A finite sequence of positive child indices; the empty sequence is the root.
///
/// The derived `Ord` is the lexicographic order with a proper prefix below
/// its extensions, which is what [`lex_compare`] computes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(Vec<u32>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn new(path: Vec<u32>) -> Result<Self> {
        if path.contains(&0) {
            return Err(invalid("vertex indices start at 1"));
        }
        Ok(Vertex(path))
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn height(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `self * i`.
    pub fn child(&self, i: u32) -> Vertex {
        debug_assert!(i >= 1);
        let mut p = self.0.clone();
        p.push(i);
        Vertex(p)
    }

    pub fn parent(&self) -> Option<Vertex> {
        if self.0.is_empty() {
            None
        } else {
            Some(Vertex(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// `self ⊆ other` (prefix, not necessarily proper).
    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `v_{≤k}`.
    pub fn prefix(&self, k: usize) -> Vertex {
        Vertex(self.0[..k.min(self.0.len())].to_vec())
    }

    /// Last index, if any.
    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_vertex(s, 1, 1)
    }
}

pub(crate) fn parse_vertex(s: &str, line: usize, col: usize) -> Result<Vertex> {
    if s == "-" {
        return Ok(Vertex::root());
    }
    let mut path = Vec::new();
    let mut offset = 0;
    for part in s.split('.') {
        match part.parse::<u32>() {
            Ok(k) if k >= 1 => path.push(k),
            _ => return Err(parse_err(line, col + offset, format!("bad vertex component `{part}` in `{s}`"))),
        }
        offset += part.len() + 1;
    }
    Ok(Vertex(path))
}

/// Lexicographic order on vertices, reading missing components as `-1`.
pub fn lex_compare(v: &Vertex, w: &Vertex) -> Ordering {
    let comp = |x: &Vertex, k: usize| x.0.get(k).map_or(-1i64, |&i| i as i64);
    for k in 0..v.height().max(w.height()) {
        match comp(v, k).cmp(&comp(w, k)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// A nonempty prefix-closed set of vertices, kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteTree {
    verts: Vec<Vertex>,
}

impl FiniteTree {
    /// The one-vertex tree `{∅}`.
    pub fn root_only() -> Self {
        FiniteTree { verts: vec![Vertex::root()] }
    }

    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut verts: Vec<Vertex> = vertices.into_iter().collect();
        verts.sort_unstable();
        verts.dedup();
        let t = FiniteTree { verts };
        if t.verts.first().is_none_or(|v| !v.is_root()) {
            return Err(invalid("a tree must contain the root"));
        }
        for v in &t.verts {
            if let Some(p) = v.parent() {
                if !t.contains(&p) {
                    return Err(invalid(format!("vertex {v} lacks its parent {p}")));
                }
            }
        }
        Ok(t)
    }

    /// Tree from index paths; convenience for tests and data.
    pub fn from_paths(paths: &[&[u32]]) -> Result<Self> {
        let vs = paths.iter().map(|p| Vertex::new(p.to_vec())).collect::<Result<Vec<_>>>()?;
        FiniteTree::new(vs)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.verts.binary_search(v).is_ok()
    }

    pub fn height(&self) -> usize {
        self.verts.iter().map(Vertex::height).max().unwrap_or(0)
    }

    /// Lexicographically greatest vertex.
    pub fn max(&self) -> &Vertex {
        self.verts.last().expect("nonempty")
    }

    pub fn children<'a>(&'a self, v: &'a Vertex) -> impl Iterator<Item = &'a Vertex> + 'a {
        let start = self.verts.partition_point(|w| w <= v);
        self.verts[start..].iter().take_while(move |w| v.is_prefix_of(w)).filter(move |w| w.height() == v.height() + 1)
    }

    pub fn is_leaf(&self, v: &Vertex) -> bool {
        self.children(v).next().is_none()
    }

    pub fn leaves(&self) -> Vec<&Vertex> {
        self.verts.iter().filter(|v| self.is_leaf(v)).collect()
    }

    /// Largest child index used anywhere.
    pub fn max_index(&self) -> u32 {
        self.verts.iter().filter_map(Vertex::last).max().unwrap_or(0)
    }

    /// Text form: one vertex per line, root as `-`.
    pub fn to_text(&self) -> String {
        self.verts.iter().map(|v| format!("{v}\n")).collect()
    }

    pub fn from_text(src: &str) -> Result<Self> {
        let mut vs = Vec::new();
        for (line, toks) in text::numbered(src) {
            match toks.as_slice() {
                [] => {}
                [t] => vs.push(parse_vertex(t.text, line, t.col)?),
                [_, extra, ..] => return Err(extra.err("one vertex per line")),
            }
        }
        FiniteTree::new(vs).map_err(|e| {
            let (l, c) = text::eof(src);
            parse_err(l, c, e)
        })
    }
}

/// `T ≺ U` iff the lexicographically least vertex of `T Δ U` lies in `U`.
///
/// Returns `Less` when `T ≺ U`.
pub fn tree_compare(t: &FiniteTree, u: &FiniteTree) -> Ordering {
    let (a, b) = (&t.verts, &u.verts);
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                // `x` is the first vertex missing from `U`.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            },
        }
    }
}

/// Shape parameters of an `(n,C)`-tree.
#[derive(Debug, Clone, Copy)]
pub struct NcShape {
    pub lp: LogPower,
}

/// Height at most `C`, indices at most `2^{|n|^C}`, left-sibling closed.
pub fn is_nc_tree(t: &FiniteTree, shape: &NcShape) -> bool {
    if t.height() > shape.lp.c() as usize {
        return false;
    }
    let cap = shape.lp.cap().unwrap_or(u64::MAX);
    t.verts.iter().all(|v| match v.last() {
        None => true,
        Some(k) => (k as u64) <= cap && (k == 1 || t.contains(&v.parent().expect("non-root").child(k - 1))),
    })
}

fn check_bounds(t: &FiniteTree, b: u32, h: usize) -> Result<()> {
    if b < 2 {
        return Err(invalid("branching bound must be at least 2"));
    }
    if t.height() > h {
        return Err(invalid(format!("tree height {} exceeds {h}", t.height())));
    }
    if t.max_index() >= b {
        return Err(invalid(format!("child index {} is not below {b}", t.max_index())));
    }
    Ok(())
}

/// `O₁(T) = Σ_{leaves v} b^{h − height(v)}`.
pub fn ordinal_o1(t: &FiniteTree, b: u32, h: usize) -> Result<BigUint> {
    check_bounds(t, b, h)?;
    let base = BigUint::from(b);
    Ok(t.leaves().iter().map(|v| base.pow((h - v.height()) as u32)).sum())
}

/// Number of vertices of the full tree `[b−1]^{≤d}`.
fn full_size(b: u32, d: usize) -> BigUint {
    let k = BigUint::from(b - 1);
    (0..=d).map(|e| k.pow(e as u32)).sum()
}

/// Order-reversing injection of trees of height `≤ h` and branching `< b`:
/// `T ≺ U ⟹ ordinal_embed(T) > ordinal_embed(U)`.
///
/// Vertices of the universe `[b−1]^{≤h}` are ranked in lexicographic order
/// and the value is the binary number whose bit for rank `r` (most
/// significant first) is set iff that vertex is absent from `T`. The result
/// is below `2^{b^{h+1}} ≤ b^{b^{h+1}}`.
pub fn ordinal_embed(t: &FiniteTree, b: u32, h: usize) -> Result<BigUint> {
    check_bounds(t, b, h)?;
    let total = full_size(b, h);
    let total_bits = u64::try_from(&total).map_err(|_| invalid("embedding universe too large"))?;
    let sub: Vec<BigUint> = (0..=h).map(|d| full_size(b, h - d)).collect();
    let mut present = BigUint::zero();
    for v in &t.verts {
        // Rank of `v` among all universe vertices in lexicographic order.
        let mut rank = BigUint::zero();
        for (depth, &k) in v.path().iter().enumerate() {
            rank += BigUint::one() + BigUint::from(k - 1) * &sub[depth + 1];
        }
        let r = u64::try_from(&rank).expect("rank below total");
        present |= BigUint::one() << (total_bits - 1 - r);
    }
    let all = (BigUint::one() << total_bits) - BigUint::one();
    Ok(all - present)
}

/// Every finite tree inside `[b]^{≤h}` (indices `1..=b`), sorted by vertex list.
pub fn all_trees(b: u32, h: usize) -> Vec<FiniteTree> {
    fn expand(mut pending: Vec<Vertex>, b: u32, h: usize, cur: &mut Vec<Vertex>, out: &mut Vec<FiniteTree>) {
        match pending.pop() {
            None => out.push(FiniteTree::new(cur.iter().cloned()).expect("prefix closed")),
            Some(v) => {
                for mask in 0u32..(1 << b) {
                    let kids: Vec<Vertex> = (1..=b).filter(|k| mask >> (k - 1) & 1 == 1).map(|k| v.child(k)).collect();
                    let mut next = pending.clone();
                    next.extend(kids.iter().filter(|w| w.height() < h).cloned());
                    let before = cur.len();
                    cur.extend(kids);
                    expand(next, b, h, cur, out);
                    cur.truncate(before);
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![Vertex::root()];
    let pending = if h > 0 { vec![Vertex::root()] } else { Vec::new() };
    expand(pending, b, h, &mut cur, &mut out);
    out.sort_by(|a, b| a.verts.cmp(&b.verts));
    out
}
