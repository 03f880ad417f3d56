//! Pivot orbits and pivot-minor search on small graphs.
//!
//! A graph g is a pivot minor of h when some sequence of pivots on h followed
//! by vertex deletions yields g. For h on at most [`CANON_MAX_N`] vertices the
//! orbit of h under pivots is enumerated breadth first and each member is
//! tested for an induced copy of g. Every positive answer carries a witness
//! that [`replay_witness`] re-checks; a truncated orbit never yields a
//! definite negative.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_hash, CanonError, CanonicalDigest, CANON_MAX_N};
use crate::compiler::GridCompilation;
use crate::graph::{Graph, GraphError, VertexSet};
use crate::signed::StepOp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error("graph has {0} vertices, search is limited to {CANON_MAX_N}")]
    TooLarge(usize),
    #[error("witness step {step}: ({u}, {v}) is not an edge")]
    InvalidPivot { step: usize, u: usize, v: usize },
    #[error("malformed witness: {0}")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type SearchResult<T> = Result<T, SearchError>;

/// How orbit members are told apart, and how g must sit inside them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinorMode {
    /// g must appear on the vertices 0..|V(g)| of a pivoted h, with the same
    /// labels. Orbit members are kept as labeled graphs.
    Labeled,
    /// Any induced copy of g counts. Orbit members are deduplicated by
    /// canonical digest.
    #[default]
    UpToIso,
}

/// Search switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub mode: MinorMode,
    /// Orbit size at which enumeration stops and reports truncation.
    pub max_size: usize,
    /// Only follow pivot sequences that use every vertex at most once.
    pub vertex_once: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { mode: MinorMode::UpToIso, max_size: 100_000, vertex_once: false }
    }
}

/// One orbit member with the pivots that reach it from the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMember {
    pub graph: Graph,
    pub digest: CanonicalDigest,
    pub pivots: Vec<(usize, usize)>,
}

/// Breadth-first pivot orbit of a seed graph.
#[derive(Debug, Clone)]
pub struct OrbitIndex {
    pub seed: Graph,
    pub members: Vec<OrbitMember>,
    /// Member index by canonical digest; the first member seen for each class.
    pub by_digest: BTreeMap<CanonicalDigest, usize>,
    pub truncated: bool,
}

impl OrbitIndex {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_digest(&self, d: CanonicalDigest) -> bool {
        self.by_digest.contains_key(&d)
    }

    /// Member equal to `g` as a labeled graph.
    pub fn find_labeled(&self, g: &Graph) -> Option<&OrbitMember> {
        self.members.iter().find(|m| &m.graph == g)
    }
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Digest(CanonicalDigest),
    Labeled(Vec<Vec<usize>>, Vec<usize>),
}

fn member_key(g: &Graph, digest: CanonicalDigest, used: &[usize], opts: &SearchOptions) -> Key {
    if opts.mode == MinorMode::UpToIso && !opts.vertex_once {
        return Key::Digest(digest);
    }
    let adj = g.vertices().map(|u| g.neighbors(u).iter().copied().collect()).collect();
    Key::Labeled(adj, if opts.vertex_once { used.to_vec() } else { Vec::new() })
}

/// Orbit of `g` under pivots, deduplicated by canonical digest.
pub fn pivot_orbit(g: &Graph, max_size: usize) -> SearchResult<OrbitIndex> {
    orbit_with(g, &SearchOptions { max_size, ..SearchOptions::default() })
}

/// Orbit of `g` with explicit options.
pub fn orbit_with(g: &Graph, opts: &SearchOptions) -> SearchResult<OrbitIndex> {
    let n = g.vertex_count();
    if n > CANON_MAX_N {
        return Err(SearchError::TooLarge(n));
    }
    let mut index = OrbitIndex { seed: g.clone(), members: Vec::new(), by_digest: BTreeMap::new(), truncated: false };
    let mut seen = HashMap::new();
    let mut used_of: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let digest = canonical_hash(g)?;
    seen.insert(member_key(g, digest, &[], opts), 0usize);
    index.by_digest.insert(digest, 0);
    index.members.push(OrbitMember { graph: g.clone(), digest, pivots: Vec::new() });
    used_of.push(Vec::new());
    queue.push_back(0usize);
    while let Some(i) = queue.pop_front() {
        let edges: Vec<(usize, usize)> = index.members[i].graph.edges().collect();
        for (u, v) in edges {
            let used = &used_of[i];
            if opts.vertex_once && (used.contains(&u) || used.contains(&v)) {
                continue;
            }
            let next = index.members[i].graph.pivot(u, v)?;
            let digest = canonical_hash(&next)?;
            let mut next_used = used.clone();
            if opts.vertex_once {
                next_used.extend([u, v]);
                next_used.sort_unstable();
            }
            let key = member_key(&next, digest, &next_used, opts);
            if seen.contains_key(&key) {
                continue;
            }
            if index.members.len() >= opts.max_size {
                index.truncated = true;
                return Ok(index);
            }
            let id = index.members.len();
            let mut pivots = index.members[i].pivots.clone();
            pivots.push((u, v));
            seen.insert(key, id);
            index.by_digest.entry(digest).or_insert(id);
            index.members.push(OrbitMember { graph: next, digest, pivots });
            used_of.push(next_used);
            queue.push_back(id);
        }
    }
    Ok(index)
}

/// Pivots on h, then deletions, then g read through `embedding`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Witness {
    pub pivots: Vec<(usize, usize)>,
    pub deletions: Vec<usize>,
    /// g vertex → h vertex.
    pub embedding: BTreeMap<usize, usize>,
}

impl Witness {
    /// The witness carried by a grid compilation's schedule.
    ///
    /// Replay deletes Z vertices first and then pivots; deleting a vertex
    /// commutes with pivots on other vertices, so the same pivots followed by
    /// deleting every measured vertex give the same graph.
    pub fn from_compilation(comp: &GridCompilation) -> Self {
        let pivots = comp
            .schedule
            .iter()
            .filter(|s| s.op == StepOp::XPair)
            .map(|s| (s.vertices[0], s.vertices[1]))
            .collect();
        let mut measured = comp.x_set.clone();
        measured.union_with(&comp.z_set);
        let embedding = comp.output_map.iter().map(|(&o, &v)| (v, o)).collect();
        Self { pivots, deletions: measured.to_vec(), embedding }
    }
}

/// Apply the witness to `h` and return the residual graph.
///
/// With an empty embedding the survivors keep their relative order. With an
/// embedding, residual vertex i is the h vertex `embedding[i]`, and the
/// embedding must cover the survivors exactly.
pub fn replay_witness(h: &Graph, w: &Witness) -> SearchResult<Graph> {
    let mut g = h.clone();
    for (step, &(u, v)) in w.pivots.iter().enumerate() {
        if !g.contains_vertex(u) || !g.contains_vertex(v) || !g.has_edge(u, v) {
            return Err(SearchError::InvalidPivot { step, u, v });
        }
        g.pivot_mut(u, v)?;
    }
    let n = g.vertex_count();
    let mut keep = VertexSet::full(n);
    for &d in &w.deletions {
        g.check(d)?;
        keep.remove(d);
    }
    let (residual, old) = g.induced(&keep);
    if w.embedding.is_empty() {
        return Ok(residual);
    }
    let k = residual.vertex_count();
    let position: BTreeMap<usize, usize> = old.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    if w.embedding.len() != k || w.embedding.keys().copied().ne(0..k) {
        return Err(SearchError::Malformed("embedding must map 0..k onto the survivors".into()));
    }
    let mut perm = vec![usize::MAX; k];
    for (&gv, hv) in &w.embedding {
        let i = *position
            .get(hv)
            .ok_or_else(|| SearchError::Malformed(format!("embedding target {hv} was deleted")))?;
        if perm[i] != usize::MAX {
            return Err(SearchError::Malformed(format!("embedding target {hv} used twice")));
        }
        perm[i] = gv;
    }
    Ok(residual.relabel(&perm))
}

/// Answer of [`is_pivot_minor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinorAnswer {
    Yes(Witness),
    No,
    /// The orbit was truncated before a copy was found.
    Unknown,
}

/// Is `g` a pivot minor of `h`?
pub fn is_pivot_minor(g: &Graph, h: &Graph, opts: &SearchOptions) -> SearchResult<MinorAnswer> {
    let (k, n) = (g.vertex_count(), h.vertex_count());
    if n > CANON_MAX_N {
        return Err(SearchError::TooLarge(n));
    }
    if k > n {
        return Ok(MinorAnswer::No);
    }
    let orbit = orbit_with(h, opts)?;
    for m in &orbit.members {
        let embedding = match opts.mode {
            MinorMode::Labeled => {
                let keep = VertexSet::from_iter(n, 0..k);
                (&m.graph.induced(&keep).0 == g).then(|| (0..k).map(|i| (i, i)).collect::<Vec<_>>())
            }
            MinorMode::UpToIso => find_induced(g, &m.graph),
        };
        if let Some(map) = embedding {
            let mut used = VertexSet::new(n);
            map.iter().for_each(|&(_, hv)| used.insert(hv));
            let witness = Witness {
                pivots: m.pivots.clone(),
                deletions: (0..n).filter(|&u| !used.contains(u)).collect(),
                embedding: map.into_iter().collect(),
            };
            return Ok(MinorAnswer::Yes(witness));
        }
    }
    Ok(if orbit.truncated { MinorAnswer::Unknown } else { MinorAnswer::No })
}

/// Backtracking search for an induced copy of `g` in `h`, as (g, h) pairs.
pub fn find_induced(g: &Graph, h: &Graph) -> Option<Vec<(usize, usize)>> {
    let k = g.vertex_count();
    if k > h.vertex_count() {
        return None;
    }
    // Most constrained first: high degree, then vertices adjacent to earlier ones.
    let mut order: Vec<usize> = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    while order.len() < k {
        let next = (0..k)
            .filter(|&u| !placed[u])
            .max_by_key(|&u| (g.neighbors(u).iter().filter(|&&w| placed[w]).count(), g.degree(u), usize::MAX - u))
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    let mut map = vec![usize::MAX; k];
    let mut taken = vec![false; h.vertex_count()];
    if extend(g, h, &order, 0, &mut map, &mut taken) {
        Some((0..k).map(|u| (u, map[u])).collect())
    } else {
        None
    }
}

fn extend(g: &Graph, h: &Graph, order: &[usize], depth: usize, map: &mut [usize], taken: &mut [bool]) -> bool {
    let Some(&u) = order.get(depth) else {
        return true;
    };
    for x in h.vertices() {
        if taken[x] || h.degree(x) < g.degree(u) {
            continue;
        }
        let consistent = order[..depth].iter().all(|&w| g.has_edge(u, w) == h.has_edge(x, map[w]));
        if !consistent {
            continue;
        }
        map[u] = x;
        taken[x] = true;
        if extend(g, h, order, depth + 1, map, taken) {
            return true;
        }
        taken[x] = false;
    }
    map[u] = usize::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GridKind};

    fn path(n: usize) -> Graph {
        generate(GridKind::Path, 1, n).unwrap()
    }

    #[test]
    fn p2_orbit_is_itself() {
        let o = pivot_orbit(&path(2), 100).unwrap();
        assert_eq!(o.len(), 1);
        assert!(!o.truncated);
    }

    #[test]
    fn p4_orbit_reaches_c4() {
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let o = pivot_orbit(&path(4), 100).unwrap();
        assert!(o.contains_digest(canonical_hash(&c4).unwrap()));
    }

    #[test]
    fn truncation_is_reported() {
        let o = pivot_orbit(&path(5), 1).unwrap();
        assert!(o.truncated);
        let opts = SearchOptions { max_size: 1, ..SearchOptions::default() };
        assert_eq!(is_pivot_minor(&Graph::complete(3), &path(5), &opts).unwrap(), MinorAnswer::Unknown);
    }

    #[test]
    fn graph_is_its_own_minor() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        for mode in [MinorMode::Labeled, MinorMode::UpToIso] {
            let opts = SearchOptions { mode, ..SearchOptions::default() };
            match is_pivot_minor(&g, &g, &opts).unwrap() {
                MinorAnswer::Yes(w) => {
                    assert!(w.pivots.is_empty() && w.deletions.is_empty());
                    assert_eq!(replay_witness(&g, &w).unwrap(), g);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn induced_matcher() {
        let k3 = Graph::complete(3);
        assert!(find_induced(&k3, &Graph::complete(5)).is_some());
        assert!(find_induced(&k3, &generate(GridKind::Rectangular, 3, 3).unwrap()).is_none());
        assert!(find_induced(&path(3), &Graph::complete(4)).is_none());
        assert!(find_induced(&path(3), &path(5)).is_some());
    }

    #[test]
    fn corrupted_witness_is_rejected() {
        let w = Witness { pivots: vec![(0, 1), (0, 3)], ..Witness::default() };
        assert_eq!(replay_witness(&path(4), &w), Err(SearchError::InvalidPivot { step: 1, u: 0, v: 3 }));
        assert_eq!(replay_witness(&path(3), &Witness::default()).unwrap(), path(3));
    }
}
