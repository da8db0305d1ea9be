//! Branch and bound on one connected component.

use std::time::Instant;

use crate::bits::{self, Ones};
use crate::graph::{Graph, VertexSet};

const UP_LIMIT: usize = 8;

pub(crate) struct Meter {
    nodes: u64,
    max_nodes: u64,
    deadline: Option<Instant>,
    tripped: bool,
}

impl Meter {
    pub(crate) fn new(max_nodes: u64, deadline: Option<Instant>) -> Self {
        Meter {
            nodes: 0,
            max_nodes,
            deadline,
            tripped: false,
        }
    }

    pub(crate) fn start(budget: &super::Budget) -> Self {
        Meter::new(budget.max_nodes, budget.time_limit.map(|d| Instant::now() + d))
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Counts one node; false once the budget is spent.
    #[inline]
    pub(crate) fn tick(&mut self) -> bool {
        if self.tripped {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.tripped = true;
        } else if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                self.tripped = Instant::now() >= d;
            }
        }
        !self.tripped
    }
}

/// Best set found (original labels) when the budget ran out.
pub(super) struct Exhausted(pub Vec<usize>);

/// Maximum independent set of the component `comp` of `g`, in original labels.
pub(super) fn solve_component(
    g: &Graph,
    comp: &VertexSet,
    hint: Option<&VertexSet>,
    meter: &mut Meter,
) -> Result<Vec<usize>, Exhausted> {
    let verts = comp.to_vec();
    match verts.len() {
        0 => return Ok(vec![]),
        1 | 2 => return Ok(vec![verts[0]]),
        _ => {}
    }
    let order = initial_order(g, &verts);
    let local = LocalGraph::new(g, &order);
    let mut best = local.greedy();
    if let Some(h) = hint {
        if h.len() > best.len() {
            let pos: std::collections::HashMap<usize, usize> =
                order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            best = h.iter().map(|v| pos[&v]).collect();
        }
    }
    let mut search = Search {
        g: &local,
        best,
        current: Vec::new(),
        meter,
        aborted: false,
        colors: Vec::new(),
    };
    // Everything is a candidate at the root.
    let mut root = vec![0u64; local.stride];
    for v in 0..local.k {
        bits::set(&mut root, v);
    }
    search.expand(&mut root);
    let found: Vec<usize> = search.best.iter().map(|&i| order[i]).collect();
    if search.aborted {
        Err(Exhausted(found))
    } else {
        Ok(found)
    }
}

/// Vertex order for the search: repeatedly move a vertex of maximum residual
/// degree (smallest label on ties) to the back. Bit position `i` of the local
/// graph holds `order[i]`, so the greedy clique cover scans low-degree
/// vertices first and branching, which runs back to front, starts from
/// high-degree ones.
fn initial_order(g: &Graph, verts: &[usize]) -> Vec<usize> {
    let k = verts.len();
    let mut deg: Vec<usize> = verts
        .iter()
        .map(|&v| g.neighbors(v).filter(|u| verts.binary_search(u).is_ok()).count())
        .collect();
    let mut alive = vec![true; k];
    let mut back = Vec::with_capacity(k);
    for _ in 0..k {
        let mut pick = usize::MAX;
        for i in 0..k {
            if alive[i] && (pick == usize::MAX || deg[i] > deg[pick]) {
                pick = i;
            }
        }
        alive[pick] = false;
        back.push(verts[pick]);
        for u in g.neighbors(verts[pick]) {
            if let Ok(j) = verts.binary_search(&u) {
                if alive[j] {
                    deg[j] -= 1;
                }
            }
        }
    }
    back.reverse();
    back
}

struct LocalGraph {
    k: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl LocalGraph {
    fn new(g: &Graph, order: &[usize]) -> Self {
        let k = order.len();
        let stride = bits::words_for(k);
        let mut pos = vec![usize::MAX; g.n()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut rows = vec![0u64; k * stride];
        for (i, &v) in order.iter().enumerate() {
            for u in g.neighbors(v) {
                let j = pos[u];
                if j != usize::MAX {
                    bits::set(&mut rows[i * stride..(i + 1) * stride], j);
                }
            }
        }
        LocalGraph { k, stride, rows }
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    /// Minimum-residual-degree greedy independent set.
    fn greedy(&self) -> Vec<usize> {
        let mut cand = vec![0u64; self.stride];
        for v in 0..self.k {
            bits::set(&mut cand, v);
        }
        let mut out = Vec::new();
        while !bits::is_empty(&cand) {
            let v = Ones::new(&cand)
                .min_by_key(|&v| bits::count_and(self.row(v), &cand))
                .expect("non-empty");
            out.push(v);
            bits::clear(&mut cand, v);
            for (c, r) in cand.iter_mut().zip(self.row(v)) {
                *c &= !r;
            }
        }
        out
    }
}

struct Search<'a> {
    g: &'a LocalGraph,
    best: Vec<usize>,
    current: Vec<usize>,
    meter: &'a mut Meter,
    aborted: bool,
    colors: Vec<Vec<(usize, usize)>>,
}

impl Search<'_> {
    fn expand(&mut self, p: &mut [u64]) {
        if !self.meter.tick() {
            self.aborted = true;
            return;
        }
        let mark = self.current.len();
        self.reduce(p);
        if bits::is_empty(p) {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            self.current.truncate(mark);
            return;
        }
        let base = self.current.len();
        if base + bits::count(p) <= self.best.len() {
            self.current.truncate(mark);
            return;
        }
        let depth = mark;
        let list = self.cover(p, base, depth);
        for &(v, c) in list.iter().rev() {
            if base + c <= self.best.len() {
                break;
            }
            let mut child: Vec<u64> = p.iter().zip(self.g.row(v)).map(|(a, r)| a & !r).collect();
            bits::clear(&mut child, v);
            self.current.push(v);
            self.expand(&mut child);
            self.current.pop();
            bits::clear(p, v);
            if self.aborted {
                break;
            }
        }
        self.colors[depth] = list;
        self.current.truncate(mark);
    }

    /// Takes every candidate with at most one candidate neighbour: such a
    /// vertex lies in some maximum independent set of the residual graph.
    fn reduce(&mut self, p: &mut [u64]) {
        loop {
            let mut changed = false;
            let snapshot = p.to_vec();
            for v in Ones::new(&snapshot) {
                if !bits::test(p, v) {
                    continue;
                }
                let row = self.g.row(v);
                match bits::count_and(row, p) {
                    0 => {
                        bits::clear(p, v);
                        self.current.push(v);
                        changed = true;
                    }
                    1 => {
                        let u = row
                            .iter()
                            .zip(p.iter())
                            .enumerate()
                            .find(|(_, (r, q))| *r & *q != 0)
                            .map(|(i, (r, q))| i * bits::WORD_BITS + (r & q).trailing_zeros() as usize)
                            .expect("one neighbour");
                        bits::clear(p, v);
                        bits::clear(p, u);
                        self.current.push(v);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Greedy clique cover of `p` scanned in bit order. Returns the vertices
    /// that may still improve on the incumbent, each with the index of its
    /// clique; the first `best - base` cliques are never branched on. A vertex
    /// beyond them is dropped as well when unit propagation shows that it and
    /// some of the low cliques cannot all contribute; those cliques are then
    /// spent for later vertices.
    fn cover(&mut self, p: &[u64], base: usize, depth: usize) -> Vec<(usize, usize)> {
        if self.colors.len() <= depth {
            self.colors.resize_with(depth + 1, Vec::new);
        }
        let mut out = std::mem::take(&mut self.colors[depth]);
        out.clear();
        let kmin = (self.best.len() + 1).saturating_sub(base);
        let w = p.len();
        let mut uncovered = p.to_vec();
        let mut q = vec![0u64; w];
        let mut classes: Vec<u64> = Vec::new();
        let mut c = 0;
        while !bits::is_empty(&uncovered) {
            c += 1;
            q.copy_from_slice(&uncovered);
            let keep = c < kmin;
            if keep {
                classes.resize(c * w, 0);
            }
            while let Some(v) = bits::first(&q) {
                bits::clear(&mut uncovered, v);
                bits::clear(&mut q, v);
                for (a, r) in q.iter_mut().zip(self.g.row(v)) {
                    *a &= r;
                }
                if keep {
                    bits::set(&mut classes[(c - 1) * w..c * w], v);
                } else {
                    out.push((v, c));
                }
            }
        }
        let extra = out.last().map_or(0, |&(_, c)| c + 1 - kmin);
        if out.is_empty() || classes.is_empty() || extra > UP_LIMIT {
            return out;
        }
        let mut spent = vec![false; classes.len() / w];
        let mut prop = Propagation::default();
        out.retain(|&(v, _)| !prop.refutes(self.g, v, &classes, w, &mut spent));
        out
    }
}

/// Scratch space for unit propagation over clique classes.
#[derive(Default)]
struct Propagation {
    work: Vec<u64>,
    open: Vec<bool>,
    units: Vec<usize>,
    used: Vec<usize>,
}

impl Propagation {
    /// Whether no independent set can hold `v` together with one vertex from
    /// every unspent class. On success the classes involved are marked spent.
    fn refutes(&mut self, g: &LocalGraph, v: usize, classes: &[u64], w: usize, spent: &mut [bool]) -> bool {
        let k = spent.len();
        self.work.clear();
        self.work.extend_from_slice(classes);
        self.open.clear();
        self.open.extend(spent.iter().map(|s| !s));
        self.units.clear();
        self.units.push(v);
        self.used.clear();
        let mut head = 0;
        while head < self.units.len() {
            let row = g.row(self.units[head]);
            head += 1;
            for c in 0..k {
                if !self.open[c] {
                    continue;
                }
                let cls = &mut self.work[c * w..(c + 1) * w];
                let mut hit = false;
                let mut left = 0;
                for (a, r) in cls.iter_mut().zip(row) {
                    hit |= *a & r != 0;
                    *a &= !r;
                    left += a.count_ones();
                }
                if !hit {
                    continue;
                }
                match left {
                    0 => {
                        spent[c] = true;
                        for &u in &self.used {
                            spent[u] = true;
                        }
                        return true;
                    }
                    1 => {
                        self.open[c] = false;
                        self.used.push(c);
                        self.units.push(bits::first(cls).expect("one vertex"));
                    }
                    _ => {}
                }
            }
        }
        false
    }
}
