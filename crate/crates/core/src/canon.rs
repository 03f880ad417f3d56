//! Exact canonical forms for small graphs.
//!
//! Individualisation-refinement search: the vertex partition is refined by
//! neighbour counts until stable, then the first non-trivial cell is split by
//! individualising each of its vertices in turn. The canonical form is the
//! smallest adjacency certificate over all leaves. Cells made of mutual twins
//! are individualised once only, since any permutation of twins is an
//! automorphism.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Largest vertex count accepted by [`canonical_hash`].
pub const CANON_MAX_N: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("canonical forms are limited to {CANON_MAX_N} vertices, got {0}")]
    TooLarge(usize),
}

/// Isomorphism-invariant digest. The low 45 bits hold the upper triangle of
/// the canonical adjacency matrix, the next bits the vertex count, so two
/// graphs share a digest exactly when they are isomorphic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalDigest(pub u64);

impl fmt::Display for CanonicalDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

pub fn canonical_hash(g: &Graph) -> Result<CanonicalDigest, CanonError> {
    canonical_form(g).map(|(d, _)| d)
}

/// Digest plus a canonical labeling: `order[i]` is the vertex placed at
/// position `i` of the canonical form.
pub fn canonical_form(g: &Graph) -> Result<(CanonicalDigest, Vec<usize>), CanonError> {
    let n = g.vertex_count();
    if n > CANON_MAX_N {
        return Err(CanonError::TooLarge(n));
    }
    let adj: Vec<u16> = g
        .vertices()
        .map(|u| g.neighbors(u).iter().fold(0u16, |m, &w| m | 1 << w))
        .collect();
    let mut search = Search { adj, best: None };
    let start = refine(&search.adj, vec![(0..n).collect()]);
    search.descend(start);
    let (cert, order) = search.best.unwrap_or((0, Vec::new()));
    Ok((CanonicalDigest((n as u64) << 48 | cert), order))
}

type Partition = Vec<Vec<usize>>;

struct Search {
    adj: Vec<u16>,
    best: Option<(u64, Vec<usize>)>,
}

impl Search {
    fn descend(&mut self, part: Partition) {
        let Some(ci) = part.iter().position(|c| c.len() > 1) else {
            let order: Vec<usize> = part.into_iter().map(|c| c[0]).collect();
            let cert = certificate(&self.adj, &order);
            if self.best.as_ref().is_none_or(|(b, _)| cert < *b) {
                self.best = Some((cert, order));
            }
            return;
        };
        let cell = part[ci].clone();
        let candidates = if self.all_twins(&cell) { &cell[..1] } else { &cell[..] };
        for &v in candidates {
            let mut next = part.clone();
            let rest: Vec<usize> = cell.iter().copied().filter(|&w| w != v).collect();
            next.splice(ci..=ci, [vec![v], rest]);
            self.descend(refine(&self.adj, next));
        }
    }

    fn all_twins(&self, cell: &[usize]) -> bool {
        cell.iter().enumerate().all(|(i, &x)| {
            cell[i + 1..]
                .iter()
                .all(|&y| self.adj[x] & !(1 << y) == self.adj[y] & !(1 << x))
        })
    }
}

/// Split cells by neighbour counts into every cell until nothing changes.
/// Splits are ordered by count signature, so the result is label-invariant.
fn refine(adj: &[u16], mut part: Partition) -> Partition {
    loop {
        let masks: Vec<u16> = part.iter().map(|c| c.iter().fold(0u16, |m, &w| m | 1 << w)).collect();
        let mut next = Vec::with_capacity(part.len());
        for cell in &part {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| (masks.iter().map(|m| (adj[v] & m).count_ones()).collect(), v))
                .collect();
            keyed.sort();
            let mut group: Vec<usize> = Vec::new();
            for i in 0..keyed.len() {
                if i > 0 && keyed[i].0 != keyed[i - 1].0 {
                    next.push(std::mem::take(&mut group));
                }
                group.push(keyed[i].1);
            }
            next.push(group);
        }
        if next.len() == part.len() {
            return next;
        }
        part = next;
    }
}

fn certificate(adj: &[u16], order: &[usize]) -> u64 {
    let mut cert = 0u64;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            cert = cert << 1 | u64::from(adj[order[i]] >> order[j] & 1);
        }
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GridKind};

    #[test]
    fn relabeled_triangle_has_same_digest() {
        let a = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let b = Graph::from_edges(4, [(3, 1), (1, 2), (3, 2)]).unwrap();
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
    }

    #[test]
    fn distinguishes_small_graphs() {
        let p3 = generate(GridKind::Path, 1, 3).unwrap();
        assert_ne!(canonical_hash(&p3), canonical_hash(&Graph::complete(3)));
        let p4 = generate(GridKind::Path, 1, 4).unwrap();
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_ne!(canonical_hash(&p4), canonical_hash(&c4));
        assert_ne!(canonical_hash(&Graph::new(2)), canonical_hash(&Graph::new(3)));
    }

    #[test]
    fn canonical_order_reproduces_form() {
        let g = generate(GridKind::Triangular, 2, 3).unwrap();
        let (d, order) = canonical_form(&g).unwrap();
        let mut perm = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            perm[v] = i;
        }
        assert_eq!(canonical_form(&g.relabel(&perm)).unwrap().0, d);
    }

    #[test]
    fn rejects_large_graphs() {
        assert_eq!(canonical_hash(&Graph::new(11)), Err(CanonError::TooLarge(11)));
    }
}
