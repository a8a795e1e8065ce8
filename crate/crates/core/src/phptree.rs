//! Pigeon/hole labeled trees, the tree `𝒯_F` of canonical plays, loose
//! pairs, and the two strategy reductions with their lifting maps.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{invalid, parse_err, Error, Result};
use crate::matching::{records_conflict, GameSize, Hole, Pigeon, Record};
use crate::simple::{edges_compatible, EdgeRef, Play, SimpleStrategy};
use crate::text;
use crate::tree::{parse_vertex, Vertex};

/// A node: pigeon label plus the hole labeling the edge from its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhpNode {
    pub label: Pigeon,
    /// `None` exactly at the root.
    pub edge: Option<Hole>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub level: u32,
}

/// A rooted labeled tree; node `0` is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhpTree {
    n: u32,
    nodes: Vec<PhpNode>,
}

impl PhpTree {
    pub fn with_root(n: u32, label: Pigeon) -> Self {
        PhpTree { n, nodes: vec![PhpNode { label, edge: None, parent: None, children: Vec::new(), level: 0 }] }
    }

    /// Adds a child of `parent` along an edge labeled `hole`; returns its id.
    pub fn add_child(&mut self, parent: usize, hole: Hole, label: Pigeon) -> usize {
        let id = self.nodes.len();
        let level = self.nodes[parent].level + 1;
        self.nodes.push(PhpNode { label, edge: Some(hole), parent: Some(parent), children: Vec::new(), level });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nodes(&self) -> &[PhpNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Maximum level of a node.
    pub fn depth(&self) -> u32 {
        self.nodes.iter().map(|v| v.level).max().unwrap_or(0)
    }

    /// Node ids from the root down to `v`.
    pub fn root_path(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// The five defining conditions.
    pub fn is_valid(&self) -> bool {
        let size = match GameSize::new(self.n) {
            Ok(s) => s,
            Err(_) => return false,
        };
        self.nodes.iter().enumerate().all(|(i, v)| {
            let path = self.root_path(i);
            let labels: BTreeSet<Pigeon> = path.iter().map(|&u| self.nodes[u].label).collect();
            let edges: BTreeSet<Hole> = path.iter().filter_map(|&u| self.nodes[u].edge).collect();
            v.label < size.pigeons()
                && v.edge.is_none_or(|h| h < size.holes())
                && v.children.len() as u64 + v.level as u64 <= self.n as u64
                && labels.len() == path.len()
                && edges.len() == path.len() - 1
        })
    }

    /// Depth `n` and exactly `n − k` children at every level-`k` node.
    pub fn is_complete(&self) -> bool {
        self.depth() == self.n && self.nodes.iter().all(|v| v.children.len() as u32 + v.level == self.n)
    }

    /// Node label and edge label determine the child's label.
    pub fn is_symmetric(&self) -> bool {
        let mut seen: std::collections::HashMap<(Pigeon, Hole), Pigeon> = std::collections::HashMap::new();
        self.nodes.iter().all(|v| {
            v.children.iter().all(|&c| {
                let w = &self.nodes[c];
                *seen.entry((v.label, w.edge.expect("child"))).or_insert(w.label) == w.label
            })
        })
    }

    /// Pairs `(p, h)` with no `p`-labeled node having an outgoing `h` edge.
    pub fn loose_pairs(&self, size: &GameSize) -> Vec<Record> {
        let used: BTreeSet<(Pigeon, Hole)> = self
            .nodes
            .iter()
            .flat_map(|v| v.children.iter().map(move |&c| (v.label, self.nodes[c].edge.expect("child"))))
            .collect();
        let mut out = Vec::new();
        for p in 0..size.pigeons() {
            for h in 0..size.holes() {
                if !used.contains(&(p, h)) {
                    out.push(Record::new(p, h));
                }
            }
        }
        out
    }

    /// Position of each node as a child-index path (children numbered from 1).
    fn vertex_of(&self, v: usize) -> Vertex {
        let path = self.root_path(v);
        let idx = path
            .windows(2)
            .map(|w| self.nodes[w[0]].children.iter().position(|&c| c == w[1]).expect("child") as u32 + 1)
            .collect();
        Vertex::new(idx).expect("indices start at 1")
    }

    /// Text form: `n <int>`, then `<dot-path> label=<pigeon>` per node and
    /// `edge <dot-path> <hole>` for the edge entering each non-root node.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        let mut order: Vec<(Vertex, usize)> = (0..self.nodes.len()).map(|i| (self.vertex_of(i), i)).collect();
        order.sort();
        for (v, i) in &order {
            writeln!(s, "{v} label={}", self.nodes[*i].label).unwrap();
        }
        for (v, i) in &order {
            if let Some(h) = self.nodes[*i].edge {
                writeln!(s, "edge {v} {h}").unwrap();
            }
        }
        s
    }

    pub fn from_text(src: &str) -> Result<Self> {
        let mut n = None;
        let mut labels: Vec<(Vertex, Pigeon, usize, usize)> = Vec::new();
        let mut edges: Vec<(Vertex, Hole, usize, usize)> = Vec::new();
        for (line, toks) in text::numbered(src) {
            let Some(first) = toks.first() else { continue };
            match (first.text, toks.len()) {
                ("n", 2) => {
                    if n.is_some() {
                        return Err(first.err("duplicate `n`"));
                    }
                    n = Some(toks[1].u32()?);
                }
                ("edge", 3) => {
                    edges.push((parse_vertex(toks[1].text, line, toks[1].col)?, toks[2].u32()?, line, first.col))
                }
                (_, 2) if toks[1].text.starts_with("label=") => {
                    let v = parse_vertex(first.text, line, first.col)?;
                    let p = toks[1].tail("label=".len()).u32()?;
                    labels.push((v, p, line, first.col));
                }
                _ => return Err(first.err(format!("unexpected line starting with `{}`", first.text))),
            }
        }
        let (l, c) = text::eof(src);
        let n = n.ok_or_else(|| parse_err(l, c, "missing `n`"))?;
        labels.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = labels.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(parse_err(w[1].2, w[1].3, format!("duplicate node {}", w[1].0)));
        }
        let Some(root) = labels.first().filter(|x| x.0.is_root()) else {
            return Err(parse_err(l, c, "missing root node `-`"));
        };
        let mut tree = PhpTree::with_root(n, root.1);
        let mut ids: Vec<(Vertex, usize)> = vec![(Vertex::root(), 0)];
        for (v, p, line, col) in &labels[1..] {
            let parent = v.parent().expect("non-root");
            let Some(&(_, pid)) = ids.iter().find(|(w, _)| *w == parent) else {
                return Err(parse_err(*line, *col, format!("node {v} lacks its parent")));
            };
            let expect = tree.nodes[pid].children.len() as u32 + 1;
            if v.last() != Some(expect) {
                return Err(parse_err(*line, *col, format!("node {v} should be child {expect} of {parent}")));
            }
            let hole = match edges.iter().find(|e| e.0 == *v) {
                Some(e) => e.1,
                None => return Err(parse_err(*line, *col, format!("node {v} has no `edge` line"))),
            };
            let id = tree.add_child(pid, hole, *p);
            ids.push((v.clone(), id));
        }
        if let Some(e) = edges.iter().find(|e| e.0.is_root() || !ids.iter().any(|(w, _)| *w == e.0)) {
            return Err(parse_err(e.2, e.3, format!("edge into unknown node {}", e.0)));
        }
        let mut seen = BTreeSet::new();
        if let Some(e) = edges.iter().find(|e| !seen.insert(e.0.clone())) {
            return Err(parse_err(e.2, e.3, format!("duplicate edge into {}", e.0)));
        }
        Ok(tree)
    }
}

/// `𝒯_F`: root labeled `init`; below a node, hole `h` gets a child iff it is
/// unused on the root path and `F(label, h)` is a fresh pigeon.
pub fn build_php_tree(strat: &SimpleStrategy) -> PhpTree {
    let mut tree = PhpTree::with_root(strat.n(), strat.init());
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        let path = tree.root_path(v);
        let seen: BTreeSet<Pigeon> = path.iter().map(|&u| tree.nodes[u].label).collect();
        let used: BTreeSet<Hole> = path.iter().filter_map(|&u| tree.nodes[u].edge).collect();
        let label = tree.nodes[v].label;
        for h in (0..strat.n()).filter(|h| !used.contains(h)) {
            let q = strat.get(label, h);
            if !seen.contains(&q) {
                stack.push(tree.add_child(v, h, q));
            }
        }
    }
    tree
}

/// A restricted strategy with the bijections back to the original labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub strategy: SimpleStrategy,
    /// Original pigeon of each reduced pigeon.
    pub pigeons: Vec<Pigeon>,
    /// Original hole of each reduced hole.
    pub holes: Vec<Hole>,
    /// Records forced before the reduced game starts (commit to the root).
    pub preamble: Vec<Record>,
}

impl Reduction {
    pub fn lift_record(&self, r: Record) -> Record {
        Record::new(self.pigeons[r.pigeon as usize], self.holes[r.hole as usize])
    }

    /// The original play corresponding to a play of the reduced game.
    pub fn lift_play(&self, play: &Play) -> Play {
        let mut answers: Vec<Hole> = self.preamble.iter().map(|r| r.hole).collect();
        answers.extend(play.answers.iter().map(|&h| self.holes[h as usize]));
        Play::new(answers)
    }
}

/// Records reachable by locally consistent plays that start with question
/// `start` after `preamble`, avoid `holes`, and never ask a pigeon in
/// `pigeons`; returns them with any record whose successor lies in `pigeons`.
pub fn admissible_records(
    strat: &SimpleStrategy,
    start: Pigeon,
    preamble: Option<Record>,
    holes: &BTreeSet<Hole>,
    pigeons: &BTreeSet<Pigeon>,
) -> (BTreeSet<Record>, Vec<Record>) {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let mut escapes = Vec::new();
    let ok = |prev: Option<Record>, r: Record| prev.is_none_or(|p| !records_conflict(p, r));
    for h in (0..strat.n()).filter(|h| !holes.contains(h)) {
        let r = Record::new(start, h);
        if ok(preamble, r) && seen.insert(r) {
            queue.push_back(r);
        }
    }
    while let Some(r) = queue.pop_front() {
        let q = strat.get(r.pigeon, r.hole);
        if pigeons.contains(&q) {
            escapes.push(r);
            continue;
        }
        for h in (0..strat.n()).filter(|h| !holes.contains(h)) {
            let r2 = Record::new(q, h);
            if ok(Some(r), r2) && seen.insert(r2) {
                queue.push_back(r2);
            }
        }
    }
    escapes.sort();
    (seen, escapes)
}

fn restrict(
    strat: &SimpleStrategy,
    s: u32,
    init: Pigeon,
    pigeons_out: &BTreeSet<Pigeon>,
    holes_out: &BTreeSet<Hole>,
    preamble: Vec<Record>,
) -> Result<Reduction> {
    let pigeons: Vec<Pigeon> = (0..strat.pigeons()).filter(|p| !pigeons_out.contains(p)).collect();
    let holes: Vec<Hole> = (0..strat.n()).filter(|h| !holes_out.contains(h)).collect();
    let new_p = |p: Pigeon| pigeons.iter().position(|&x| x == p).map(|i| i as u32);
    let size = GameSize::new(holes.len() as u32)?;
    if pigeons.len() as u32 != size.pigeons() {
        return Err(invalid("forbidden pigeons and holes must have equal counts"));
    }
    let mut table = Vec::with_capacity(pigeons.len() * holes.len());
    for &p in &pigeons {
        for &h in &holes {
            // Values leaving the restricted board are completed with pigeon 0.
            table.push(new_p(strat.get(p, h)).unwrap_or(0));
        }
    }
    let init = new_p(init).ok_or_else(|| invalid(format!("initial question {init} is forbidden")))?;
    let strategy = SimpleStrategy::new(size, s, init, table)?;
    Ok(Reduction { strategy, pigeons, holes, preamble })
}

fn escape_error(rule: &str, escapes: &[Record], strat: &SimpleStrategy) -> Error {
    let list: Vec<String> = escapes.iter().map(|r| format!("{r}->{}", strat.get(r.pigeon, r.hole))).collect();
    invalid(format!("{rule}: restriction not closed, admissible records escape: {}", list.join(" ")))
}

/// Delayer answers `h` to the first question and never uses `h` again; the
/// rest of the game lives on `P∖{init} × H∖{h}` with `s' = s − 1`.
pub fn commit_to_root(strat: &SimpleStrategy, h: Hole) -> Result<Reduction> {
    if h >= strat.n() {
        return Err(invalid(format!("{h} is not a hole")));
    }
    if strat.s() < 2 || strat.n() < 2 || !strat.is_standard() {
        return Err(invalid("commit to the root needs a standard board, n ≥ 2 and s ≥ 2"));
    }
    let root = strat.init();
    let first = strat.get(root, h);
    let out_p = BTreeSet::from([root]);
    let out_h = BTreeSet::from([h]);
    if first == root {
        return Err(escape_error("commit to the root", &[Record::new(root, h)], strat));
    }
    let (_, escapes) = admissible_records(strat, first, Some(Record::new(root, h)), &out_h, &out_p);
    if !escapes.is_empty() {
        return Err(escape_error("commit to the root", &escapes, strat));
    }
    restrict(strat, strat.s() - 1, first, &out_p, &out_h, vec![Record::new(root, h)])
}

/// Delayer never uses `holes` and must never meet `pigeons`; the game lives
/// on the complements with the same `s`.
pub fn forbid_holes(strat: &SimpleStrategy, holes: &BTreeSet<Hole>, pigeons: &BTreeSet<Pigeon>) -> Result<Reduction> {
    if holes.len() != pigeons.len() || holes.is_empty() {
        return Err(invalid("forbid holes needs equally many holes and pigeons, at least one"));
    }
    if holes.iter().any(|&h| h >= strat.n()) || pigeons.iter().any(|&p| p >= strat.pigeons()) {
        return Err(invalid("forbidden items must be on the board"));
    }
    if holes.len() as u32 >= strat.n() || !strat.is_standard() {
        return Err(invalid("forbid holes must leave a standard board with at least one hole"));
    }
    if pigeons.contains(&strat.init()) {
        return Err(invalid("forbid holes: the initial question is a forbidden pigeon"));
    }
    let (_, escapes) = admissible_records(strat, strat.init(), None, holes, pigeons);
    if !escapes.is_empty() {
        return Err(escape_error("forbid holes", &escapes, strat));
    }
    restrict(strat, strat.s(), strat.init(), pigeons, holes, Vec::new())
}

/// Length of the shortest locally consistent walk from `init` that ends at
/// `p`, visits `p` only at its end, and never uses label `h`.
pub fn loop_witness_length(strat: &SimpleStrategy, p: Pigeon, h: Hole) -> Option<u32> {
    if strat.init() == p {
        return Some(0);
    }
    let holes = strat.n();
    let idx = |e: EdgeRef| (e.tail * holes + e.label) as usize;
    let mut dist: Vec<Option<u32>> = vec![None; strat.cells()];
    let mut queue = VecDeque::new();
    for l in (0..holes).filter(|&l| l != h) {
        let e = EdgeRef::new(strat.init(), l);
        dist[idx(e)] = Some(1);
        queue.push_back(e);
    }
    while let Some(e) = queue.pop_front() {
        let d = dist[idx(e)].expect("queued");
        let head = strat.get(e.tail, e.label);
        if head == p {
            return Some(d);
        }
        for l in (0..holes).filter(|&l| l != h) {
            let e2 = EdgeRef::new(head, l);
            if edges_compatible(e, e2) && dist[idx(e2)].is_none() {
                dist[idx(e2)] = Some(d + 1);
                queue.push_back(e2);
            }
        }
    }
    None
}

/// The bound on [`loop_witness_length`] for a loop on `n` holes.
pub fn loop_witness_bound(n: u32) -> u32 {
    2 * n.saturating_sub(2) + 1
}

/// First length from which the loop argument makes every `s` Delayer-won:
/// `max(s0, w + 1)` for the loop with the shortest witness `w`, or `None`
/// when no loop is reachable. `s0` is the caller's threshold.
pub fn loop_lemma_start(strat: &SimpleStrategy, s0: u32) -> Option<u32> {
    crate::simple::find_loops(strat)
        .into_iter()
        .filter_map(|e| loop_witness_length(strat, e.tail, e.label))
        .min()
        .map(|w| s0.max(w + 1))
}
