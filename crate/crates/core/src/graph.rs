//! Simple undirected graphs on dense labels `0..n` together with the
//! combinatorial moves used throughout the crate: local complementation,
//! pivoting, vertex deletion and odd neighbourhoods.
//!
//! Adjacency is stored as sorted neighbour sets rather than bit rows. The
//! compiled grids reach tens of thousands of vertices while staying sparse,
//! so a quadratic bit matrix is not an option there. [`VertexSet`] is still a
//! bit row because sign sets and odd neighbourhoods are dense set algebra.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0} (graph has {1} vertices)")]
    UnknownVertex(usize, usize),
    #[error("{0}-{1} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("grid dimensions must be positive")]
    ZeroDimension,
    #[error("malformed edge list: {0}")]
    Parse(String),
}

pub type GraphResult<T> = Result<T, GraphError>;

/// A subset of the labels `0..capacity`, stored as a bit row.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    pub fn new(capacity: usize) -> Self {
        Self(FixedBitSet::with_capacity(capacity))
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(capacity: usize, items: I) -> Self {
        let mut s = Self::new(capacity);
        for u in items {
            s.insert(u);
        }
        s
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::new(capacity);
        s.0.insert_range(..);
        s
    }

    /// The set whose members are the one bits of `mask`.
    pub fn from_mask(capacity: usize, mask: u64) -> Self {
        Self::from_iter(capacity, (0..capacity).filter(|&u| mask >> u & 1 == 1))
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.0.contains(u)
    }

    pub fn insert(&mut self, u: usize) {
        self.0.insert(u);
    }

    pub fn remove(&mut self, u: usize) {
        self.0.set(u, false);
    }

    pub fn toggle(&mut self, u: usize) {
        self.0.toggle(u);
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// In-place symmetric difference.
    pub fn xor_with(&mut self, other: &VertexSet) {
        self.0.symmetric_difference_with(&other.0);
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.0.difference_with(&other.0);
    }

    pub fn xor(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.xor_with(other);
        s
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        let cap = items.iter().max().map_or(0, |m| m + 1);
        Ok(Self::from_iter(cap, items))
    }
}

/// Simple undirected graph on the labels `0..n`.
///
/// All moves come in two flavours: a `*_mut` method working in place and a
/// value-returning method that leaves `self` untouched.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Self { adj: vec![BTreeSet::new(); n] }
    }

    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> GraphResult<Self> {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.check(u)?;
            g.check(v)?;
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !g.adj[u].insert(v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            g.adj[v].insert(u);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Graph whose edges are the one bits of `mask`, read in the order of
    /// [`Graph::pair_index`]. Used for exhaustive sweeps over small graphs.
    pub fn from_edge_mask(n: usize, mask: u64) -> Self {
        let mut g = Self::new(n);
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if mask >> k & 1 == 1 {
                    g.add_edge(u, v);
                }
                k += 1;
            }
        }
        g
    }

    /// Every labeled graph on `n` vertices (`n ≤ 8`).
    pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
        assert!(n <= 8, "exhaustive enumeration is limited to 8 vertices");
        let pairs = n * n.saturating_sub(1) / 2;
        (0..1u64 << pairs).map(move |m| Graph::from_edge_mask(n, m))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.adj.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn neighbors(&self, u: usize) -> &BTreeSet<usize> {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|nb| nb.contains(&v))
    }

    pub fn contains_vertex(&self, u: usize) -> bool {
        u < self.adj.len()
    }

    pub fn check(&self, u: usize) -> GraphResult<()> {
        if self.contains_vertex(u) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(u, self.vertex_count()))
        }
    }

    pub fn check_edge(&self, u: usize, v: usize) -> GraphResult<()> {
        self.check(u)?;
        self.check(v)?;
        if self.has_edge(u, v) {
            Ok(())
        } else {
            Err(GraphError::NotAnEdge(u, v))
        }
    }

    /// N(u) as a bit row.
    pub fn neighborhood(&self, u: usize) -> VertexSet {
        VertexSet::from_iter(self.vertex_count(), self.adj[u].iter().copied())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
    }

    pub fn toggle_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        if !self.adj[u].remove(&v) {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        } else {
            self.adj[v].remove(&u);
        }
    }

    /// Remove every edge at `u`, keeping the label.
    pub fn isolate_mut(&mut self, u: usize) {
        let nb = std::mem::take(&mut self.adj[u]);
        for w in nb {
            self.adj[w].remove(&u);
        }
    }

    /// G Δ K_{N(u)}, in place.
    pub fn local_complement_mut(&mut self, u: usize) -> GraphResult<&mut Self> {
        self.check(u)?;
        let nb: Vec<usize> = self.adj[u].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
        Ok(self)
    }

    pub fn local_complement(&self, u: usize) -> GraphResult<Graph> {
        let mut g = self.clone();
        g.local_complement_mut(u)?;
        Ok(g)
    }

    /// Pivot on the edge `uv`, in place.
    ///
    /// With C = N(u) ∩ N(v), A = N(u) ∖ C ∖ {v} and B = N(v) ∖ C ∖ {u}, the
    /// pairs A×B, A×C and B×C are toggled and then u and v exchange their
    /// neighbourhoods. The result is identical, label for label, to
    /// `g * u * v * u`.
    pub fn pivot_mut(&mut self, u: usize, v: usize) -> GraphResult<&mut Self> {
        self.check_edge(u, v)?;
        let nu: BTreeSet<usize> = self.adj[u].iter().copied().filter(|&w| w != v).collect();
        let nv: BTreeSet<usize> = self.adj[v].iter().copied().filter(|&w| w != u).collect();
        let c: Vec<usize> = nu.intersection(&nv).copied().collect();
        let a: Vec<usize> = nu.difference(&nv).copied().collect();
        let b: Vec<usize> = nv.difference(&nu).copied().collect();
        for (x, y) in [(&a, &b), (&a, &c), (&b, &c)] {
            for &p in x.iter() {
                for &q in y.iter() {
                    self.toggle_edge(p, q);
                }
            }
        }
        for &w in &nu {
            self.remove_edge(u, w);
        }
        for &w in &nv {
            self.remove_edge(v, w);
        }
        for &w in &nu {
            self.add_edge(v, w);
        }
        for &w in &nv {
            self.add_edge(u, w);
        }
        Ok(self)
    }

    pub fn pivot(&self, u: usize, v: usize) -> GraphResult<Graph> {
        let mut g = self.clone();
        g.pivot_mut(u, v)?;
        Ok(g)
    }

    /// Pivot computed as three local complementations `*u *v *u`.
    pub fn pivot_by_lc(&self, u: usize, v: usize) -> GraphResult<Graph> {
        self.check_edge(u, v)?;
        let mut g = self.clone();
        g.local_complement_mut(u)?.local_complement_mut(v)?.local_complement_mut(u)?;
        Ok(g)
    }

    /// Induced subgraph on V ∖ {u}; labels above `u` shift down by one.
    pub fn delete_vertex(&self, u: usize) -> GraphResult<Graph> {
        self.check(u)?;
        let keep = VertexSet::from_iter(self.vertex_count(), self.vertices().filter(|&w| w != u));
        Ok(self.induced(&keep).0)
    }

    /// Induced subgraph on `keep`, compacted to `0..|keep|`.
    ///
    /// Also returns the relabeling map: entry `i` is the old label of the new
    /// vertex `i`.
    pub fn induced(&self, keep: &VertexSet) -> (Graph, Vec<usize>) {
        let old: Vec<usize> = keep.iter().filter(|&w| w < self.vertex_count()).collect();
        let mut new_of = vec![usize::MAX; self.vertex_count()];
        for (i, &w) in old.iter().enumerate() {
            new_of[w] = i;
        }
        let adj = old
            .iter()
            .map(|&w| {
                self.adj[w]
                    .iter()
                    .filter_map(|&x| (new_of[x] != usize::MAX).then_some(new_of[x]))
                    .collect()
            })
            .collect();
        (Graph { adj }, old)
    }

    /// Graph with labels permuted: old vertex `u` becomes `perm[u]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.vertex_count());
        let mut adj = vec![BTreeSet::new(); self.vertex_count()];
        for (u, nb) in self.adj.iter().enumerate() {
            adj[perm[u]] = nb.iter().map(|&w| perm[w]).collect();
        }
        Graph { adj }
    }

    /// {v : |N(v) ∩ b| odd}.
    pub fn odd_neighborhood(&self, b: &VertexSet) -> VertexSet {
        let members: Vec<usize> = b.iter().filter(|&w| w < self.vertex_count()).collect();
        VertexSet::from_iter(
            self.vertex_count(),
            self.vertices()
                .filter(|&v| members.iter().filter(|&&w| self.adj[v].contains(&w)).count() % 2 == 1),
        )
    }

    /// Same set as [`Graph::odd_neighborhood`], built incrementally from
    /// Odd(∅) = ∅ and Odd(B ∪ {u}) = Odd(B) Δ N(u).
    pub fn odd_neighborhood_inductive(&self, b: &VertexSet) -> VertexSet {
        let mut odd = VertexSet::new(self.vertex_count());
        for u in b.iter().filter(|&w| w < self.vertex_count()) {
            for &w in &self.adj[u] {
                odd.toggle(w);
            }
        }
        odd
    }

    /// Two-colouring by breadth-first search, or `None` if an odd cycle exists.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let n = self.vertex_count();
        let mut color = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[u];
                        queue.push_back(w);
                    } else if color[w] == color[u] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Parse the edge-list format: a header `n m` followed by `m` lines `u v`.
    pub fn parse_edge_list(text: &str) -> GraphResult<Graph> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| GraphError::Parse("missing header".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines.next().ok_or_else(|| GraphError::Parse(format!("expected {m} edges")))?;
            edges.push(parse_pair(line)?);
        }
        if let Some(extra) = lines.next() {
            return Err(GraphError::Parse(format!("unexpected line {extra:?}")));
        }
        Graph::from_edges(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count(), self.edge_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

fn parse_pair(line: &str) -> GraphResult<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(GraphError::Parse(format!("expected two integers, got {line:?}"))),
    }
}

impl FromStr for Graph {
    type Err = GraphError;

    fn from_str(s: &str) -> GraphResult<Graph> {
        Graph::parse_edge_list(s)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.vertex_count(), self.edges().collect::<Vec<_>>())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphRepr { vertices: self.vertex_count(), edges: self.edges().collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        Graph::from_edges(repr.vertices, repr.edges).map_err(serde::de::Error::custom)
    }
}

/// Families produced by [`generate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Path,
    Rectangular,
    Hexagonal,
    Triangular,
}

impl FromStr for GridKind {
    type Err = GraphError;

    fn from_str(s: &str) -> GraphResult<Self> {
        match s {
            "path" => Ok(Self::Path),
            "rectangular" | "rect" => Ok(Self::Rectangular),
            "hexagonal" | "hex" => Ok(Self::Hexagonal),
            "triangular" | "tri" => Ok(Self::Triangular),
            _ => Err(GraphError::Parse(format!("unknown grid kind {s:?}"))),
        }
    }
}

/// Deterministic grid families. Vertex `(r, c)` gets label `r * cols + c`,
/// with row 0 on top.
///
/// * `Path` ignores `rows` and yields a path on `cols` vertices.
/// * `Triangular` adds the diagonal from the lower-left to the upper-right
///   corner of every unit square, i.e. `(r + 1, c)`–`(r, c + 1)`.
/// * `Hexagonal` is the brick-wall drawing of the honeycomb: all horizontal
///   edges, and vertical edges `(r, c)`–`(r + 1, c)` only where `r + c` is even.
pub fn generate(kind: GridKind, rows: usize, cols: usize) -> GraphResult<Graph> {
    if cols == 0 || (rows == 0 && kind != GridKind::Path) {
        return Err(GraphError::ZeroDimension);
    }
    if kind == GridKind::Path {
        return Graph::from_edges(cols, (1..cols).map(|c| (c - 1, c)));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut g = Graph::new(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                g.add_edge(id(r, c), id(r, c + 1));
            }
            if r + 1 < rows {
                let vertical = match kind {
                    GridKind::Hexagonal => (r + c) % 2 == 0,
                    _ => true,
                };
                if vertical {
                    g.add_edge(id(r, c), id(r + 1, c));
                }
                if kind == GridKind::Triangular && c + 1 < cols {
                    g.add_edge(id(r + 1, c), id(r, c + 1));
                }
            }
        }
    }
    Ok(g)
}
