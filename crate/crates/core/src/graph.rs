//! Immutable simple graphs over vertices `0..n` with row-bitset adjacency.
//!
//! Everything else in the crate consumes [`Graph`] and [`VertexSet`]. Graphs
//! are validated on construction: adjacency must be symmetric, loop-free and
//! have no bits set past `n - 1`.

use std::collections::VecDeque;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{self, Ones};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("adjacency is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("row {0} has bits set beyond the vertex range")]
    StrayBits(usize),
    #[error("vertex set over {found} vertices used with a graph on {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("graph text line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A subset of `0..n` stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet {
            n,
            words: vec![0; bits::words_for(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = VertexSet {
            n,
            words: vec![u64::MAX; bits::words_for(n)],
        };
        if let Some(last) = s.words.last_mut() {
            *last &= bits::tail_mask(n);
        }
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(n: usize, vs: I) -> Result<Self, GraphError> {
        let mut s = VertexSet::new(n);
        for v in vs {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub(crate) fn from_words(n: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), bits::words_for(n));
        VertexSet { n, words }
    }

    /// Size of the universe `0..n` this set lives in.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Inserts `v`, returning whether it was newly added.
    ///
    /// Panics if `v` is outside the universe.
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.n, "vertex {v} outside universe of size {}", self.n);
        let had = bits::test(&self.words, v);
        bits::set(&mut self.words, v);
        !had
    }

    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.n {
            return false;
        }
        let had = bits::test(&self.words, v);
        bits::clear(&mut self.words, v);
        had
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && bits::test(&self.words, v)
    }

    pub fn len(&self) -> usize {
        bits::count(&self.words)
    }

    pub fn is_empty(&self) -> bool {
        bits::is_empty(&self.words)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        Ones::new(&self.words)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> VertexSet {
        VertexSet::full(self.n).difference(self)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn zip_with(&self, other: &VertexSet, f: impl Fn(u64, u64) -> u64) -> VertexSet {
        assert_eq!(self.n, other.n, "vertex sets over different universes");
        VertexSet {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Undirected simple graph on `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    edges: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let stride = bits::words_for(n);
        Graph {
            n,
            stride,
            rows: vec![0; n * stride],
            edges: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut rows = Vec::with_capacity(n * bits::words_for(n));
        for v in 0..n {
            let mut row = VertexSet::full(n);
            row.remove(v);
            rows.extend_from_slice(row.words());
        }
        Graph {
            n,
            stride: bits::words_for(n),
            rows,
            edges: n * n.saturating_sub(1) / 2,
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if g.has_edge(u, v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            g.link(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from `n` adjacency rows of `ceil(n / 64)` words each.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self, GraphError> {
        let stride = bits::words_for(n);
        if rows.len() != n * stride {
            return Err(GraphError::SizeMismatch {
                expected: n * stride,
                found: rows.len(),
            });
        }
        let mut degree_sum = 0;
        for v in 0..n {
            let row = &rows[v * stride..(v + 1) * stride];
            if row.last().is_some_and(|&w| w & !bits::tail_mask(n) != 0) {
                return Err(GraphError::StrayBits(v));
            }
            if bits::test(row, v) {
                return Err(GraphError::SelfLoop(v));
            }
            for u in Ones::new(row) {
                if !bits::test(&rows[u * stride..(u + 1) * stride], v) {
                    return Err(GraphError::Asymmetric(v, u));
                }
            }
            degree_sum += bits::count(row);
        }
        Ok(Graph {
            n,
            stride,
            rows,
            edges: degree_sum / 2,
        })
    }

    /// Used by samplers, which only ever add each unordered pair once.
    pub(crate) fn from_unique_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let mut g = Graph::empty(n);
        for (u, v) in pairs {
            debug_assert!(u != v && u < n && v < n && !g.has_edge(u, v));
            g.link(u, v);
        }
        g
    }

    fn link(&mut self, u: usize, v: usize) {
        let s = self.stride;
        bits::set(&mut self.rows[u * s..(u + 1) * s], v);
        bits::set(&mut self.rows[v * s..(v + 1) * s], u);
        self.edges += 1;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Words per adjacency row.
    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Raw neighbor bitset of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && bits::test(self.row(u), v)
    }

    pub fn degree(&self, v: usize) -> usize {
        bits::count(self.row(v))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        Ones::new(self.row(v))
    }

    pub fn neighbor_set(&self, v: usize) -> VertexSet {
        VertexSet::from_words(self.n, self.row(v).to_vec())
    }

    /// All edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn complement(&self) -> Graph {
        let mut rows = Vec::with_capacity(self.rows.len());
        for v in 0..self.n {
            let mut row = VertexSet::full(self.n).difference(&self.neighbor_set(v));
            row.remove(v);
            rows.extend_from_slice(row.words());
        }
        Graph {
            n: self.n,
            stride: self.stride,
            rows,
            edges: self.n * self.n.saturating_sub(1) / 2 - self.edges,
        }
    }

    /// Subgraph induced on `s`, relabelled to `0..|s|` in ascending order.
    /// The returned vector maps new labels back to the original vertices.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<(Graph, Vec<usize>), GraphError> {
        self.check_set(s)?;
        let map = s.to_vec();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in map.iter().enumerate() {
            index[v] = i;
        }
        let mut h = Graph::empty(map.len());
        for (i, &v) in map.iter().enumerate() {
            for u in self.neighbors(v) {
                let j = index[u];
                if j != usize::MAX && j > i {
                    h.link(i, j);
                }
            }
        }
        Ok((h, map))
    }

    /// Connected components, each as a vertex set, ordered by smallest vertex.
    /// Breadth-first with an explicit queue.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new(self.n);
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen.contains(start) {
                continue;
            }
            let mut comp = VertexSet::new(self.n);
            seen.insert(start);
            comp.insert(start);
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for u in self.neighbors(v) {
                    if seen.insert(u) {
                        comp.insert(u);
                        queue.push_back(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_independent(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| bits::count_and(self.row(v), s.words()) == 0)
    }

    pub(crate) fn check_set(&self, s: &VertexSet) -> Result<(), GraphError> {
        if s.universe() != self.n {
            return Err(GraphError::SizeMismatch {
                expected: self.n,
                found: s.universe(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    /// Parses the fixture format: a header line `n m` followed by `m` lines
    /// `u v` with 0-based endpoints. Blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let [n, m] = parse_pair(hline, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let [u, v] = parse_pair(line, l)?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: hline,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, &edges)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
        Graph::parse_text(&fs::read_to_string(path)?)
    }

    /// Serialises to the fixture format, edges in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

fn parse_pair(line: usize, l: &str) -> Result<[usize; 2], GraphError> {
    let bad = |msg: &str| GraphError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut it = l.split_whitespace();
    let a = it.next().ok_or_else(|| bad("expected two integers"))?;
    let b = it.next().ok_or_else(|| bad("expected two integers"))?;
    if it.next().is_some() {
        return Err(bad("trailing tokens"));
    }
    let a = a.parse().map_err(|_| bad("not a non-negative integer"))?;
    let b = b.parse().map_err(|_| bad("not a non-negative integer"))?;
    Ok([a, b])
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// `|adj(v) ∩ s|`.
pub fn degree_in(g: &Graph, v: usize, s: &VertexSet) -> Result<usize, GraphError> {
    g.check_vertex(v)?;
    g.check_set(s)?;
    Ok(bits::count_and(g.row(v), s.words()))
}

/// Edges with both endpoints in `s`, each once as `(u, v)` with `u < v`.
pub fn induced_edges(g: &Graph, s: &VertexSet) -> Result<Vec<(usize, usize)>, GraphError> {
    g.check_set(s)?;
    let mut out = Vec::new();
    for u in s.iter() {
        for v in Ones::new(g.row(u)) {
            if v > u && s.contains(v) {
                out.push((u, v));
            }
        }
    }
    Ok(out)
}

/// Split of a graph into its 4-vertex tree components and the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree4Decomposition {
    /// Vertex sets of the 4-vertex tree components, sorted within and between.
    pub tree_components: Vec<[usize; 4]>,
    /// How many of those trees are stars `K_{1,3}`.
    pub star_count: usize,
    /// Every vertex not in a 4-vertex tree component.
    pub remainder: VertexSet,
}

impl Tree4Decomposition {
    /// Number of 4-vertex tree components.
    pub fn t(&self) -> usize {
        self.tree_components.len()
    }

    /// Number of paths `P_4` among the tree components.
    pub fn path_count(&self) -> usize {
        self.t() - self.star_count
    }
}

/// Finds every connected component that is a tree on exactly 4 vertices and
/// classifies each as a star or a path.
pub fn tree4_decompose(g: &Graph) -> Tree4Decomposition {
    let mut tree_components = Vec::new();
    let mut star_count = 0;
    let mut remainder = VertexSet::new(g.n());
    for comp in g.components() {
        let vs = comp.to_vec();
        if vs.len() == 4 {
            // Component is connected by construction and closed under
            // adjacency, so degrees inside it are plain degrees.
            let degrees: Vec<usize> = vs.iter().map(|&v| g.degree(v)).collect();
            if degrees.iter().sum::<usize>() == 6 {
                if degrees.contains(&3) {
                    star_count += 1;
                }
                tree_components.push([vs[0], vs[1], vs[2], vs[3]]);
                continue;
            }
        }
        for v in vs {
            remainder.insert(v);
        }
    }
    Tree4Decomposition {
        tree_components,
        star_count,
        remainder,
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &e).unwrap()
    }

    pub fn set(n: usize, vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(n, vs.iter().copied()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn degree_in_examples() {
        let k3 = Graph::complete(3);
        assert_eq!(degree_in(&k3, 0, &set(3, &[1, 2])).unwrap(), 2);
        let e5 = Graph::empty(5);
        for v in 0..5 {
            assert_eq!(degree_in(&e5, v, &VertexSet::full(5)).unwrap(), 0);
        }
        assert_eq!(degree_in(&cycle(5), 0, &set(5, &[1, 3, 4])).unwrap(), 2);
    }

    #[test]
    fn degree_in_rejects_bad_vertex() {
        let g = cycle(5);
        assert!(matches!(
            degree_in(&g, 5, &VertexSet::new(5)),
            Err(GraphError::VertexOutOfRange { vertex: 5, n: 5 })
        ));
        assert!(matches!(
            degree_in(&g, 0, &VertexSet::new(6)),
            Err(GraphError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn induced_edges_examples() {
        assert_eq!(induced_edges(&cycle(5), &set(5, &[0, 2, 3])).unwrap(), vec![(2, 3)]);
        assert!(induced_edges(&petersen(), &VertexSet::new(10)).unwrap().is_empty());
        assert_eq!(induced_edges(&Graph::complete(4), &VertexSet::full(4)).unwrap().len(), 6);
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(Graph::from_edges(3, &[(1, 1)]), Err(GraphError::SelfLoop(1))));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        // row 0 claims 1, row 1 does not claim 0
        assert!(matches!(Graph::from_rows(2, vec![0b10, 0]), Err(GraphError::Asymmetric(0, 1))));
        assert!(matches!(Graph::from_rows(2, vec![0b1, 0]), Err(GraphError::SelfLoop(0))));
        assert!(matches!(Graph::from_rows(2, vec![0b110, 0b1]), Err(GraphError::StrayBits(0))));
        let g = Graph::from_rows(3, vec![0b110, 0b001, 0b001]).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn complement_and_components() {
        let g = cycle(5);
        let c = g.complement();
        assert_eq!(c.edge_count(), 5);
        assert!(c.has_edge(0, 2) && !c.has_edge(0, 1));
        let two = Graph::from_edges(5, &[(0, 1), (3, 4)]).unwrap();
        let comps: Vec<Vec<usize>> = two.components().iter().map(|c| c.to_vec()).collect();
        assert_eq!(comps, vec![vec![0, 1], vec![2], vec![3, 4]]);
    }

    #[test]
    fn text_format_round_trip() {
        let g = petersen();
        let back = Graph::parse_text(&g.to_text()).unwrap();
        assert_eq!(g, back);
        let k5 = "5 10\n0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";
        assert_eq!(Graph::parse_text(k5).unwrap(), Graph::complete(5));
    }

    #[test]
    fn text_format_errors() {
        assert!(matches!(Graph::parse_text(""), Err(GraphError::Parse { .. })));
        assert!(matches!(Graph::parse_text("3 2\n0 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(Graph::parse_text("3 1\n0 x\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse_text("3 1\n0 0\n"), Err(GraphError::SelfLoop(0))));
    }

    #[test]
    fn tree4_examples() {
        // P4 on 0..4 and K_{1,3} centred at 4
        let g = Graph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (4, 5), (4, 6), (4, 7)]).unwrap();
        let d = tree4_decompose(&g);
        assert_eq!(d.t(), 2);
        assert_eq!(d.star_count, 1);
        assert!(d.remainder.is_empty());

        let d = tree4_decompose(&Graph::complete(5));
        assert_eq!(d.t(), 0);
        assert_eq!(d.remainder.len(), 5);

        let tri = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = tree4_decompose(&tri);
        assert_eq!(d.t(), 0);
        assert_eq!(d.remainder, VertexSet::full(4));
    }

    #[test]
    fn tree4_rejects_four_cycle() {
        let d = tree4_decompose(&cycle(4));
        assert_eq!(d.t(), 0);
    }

    /// Exhaustive over the 64 graphs on 4 labelled vertices.
    #[test]
    fn sixteen_trees_four_stars() {
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        let (mut trees, mut stars) = (0, 0);
        for mask in 0u32..64 {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let d = tree4_decompose(&Graph::from_edges(4, &edges).unwrap());
            trees += d.t();
            stars += d.star_count;
        }
        assert_eq!((trees, stars), (16, 4));
    }
}
