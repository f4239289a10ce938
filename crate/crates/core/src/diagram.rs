//! Persistence diagrams and the bottleneck distance.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::persistence::FeatureTriple;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    /// Sup-norm distance to the diagonal, `(birth - death) / 2`.
    pub fn diagonal_distance(&self) -> f64 {
        (self.birth - self.death) / 2.0
    }

    pub fn distance(&self, other: &DiagramPoint) -> f64 {
        (self.birth - other.birth)
            .abs()
            .max((self.death - other.death).abs())
    }
}

/// Multiset of `(birth, death)` points with `birth >= death`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn from_points(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let points = points
            .into_iter()
            .map(|(birth, death)| {
                if !birth.is_finite() || !death.is_finite() {
                    Err(Error::InvalidParameter(format!(
                        "diagram point ({birth}, {death}) is not finite"
                    )))
                } else if birth < death {
                    Err(Error::InvalidParameter(format!(
                        "diagram point ({birth}, {death}) has birth below death"
                    )))
                } else {
                    Ok(DiagramPoint { birth, death })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points })
    }

    pub(crate) fn from_triples(triples: &[FeatureTriple]) -> Self {
        Self {
            points: triples
                .iter()
                .map(|t| DiagramPoint {
                    birth: t.birth,
                    death: t.death,
                })
                .collect(),
        }
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in canonical order, for multiset comparison.
    pub fn sorted_points(&self) -> Vec<DiagramPoint> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
        });
        pts
    }

    pub fn same_multiset(&self, other: &PersistenceDiagram) -> bool {
        self.sorted_points() == other.sorted_points()
    }
}

/// Bottleneck distance under the sup norm, with diagonal projections allowed.
///
/// The optimum is one of finitely many values (pairwise point distances,
/// diagonal distances, or zero), so the search runs over that sorted candidate
/// set and checks each threshold with a perfect bipartite matching.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    let (pa, pb) = (a.points(), b.points());
    if pa.is_empty() && pb.is_empty() {
        return 0.0;
    }
    let mut candidates = vec![0.0];
    candidates.extend(pa.iter().map(DiagramPoint::diagonal_distance));
    candidates.extend(pb.iter().map(DiagramPoint::diagonal_distance));
    for p in pa {
        candidates.extend(pb.iter().map(|q| p.distance(q)));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // The all-diagonal matching realises the largest diagonal distance, so the
    // last candidate is always feasible.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if matching_exists(pa, pb, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Left side: points of `a`, then diagonal copies of `b`'s points.
/// Right side: points of `b`, then diagonal copies of `a`'s points.
fn matching_exists(a: &[DiagramPoint], b: &[DiagramPoint], eps: f64) -> bool {
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            if p.distance(q) <= eps {
                adj[i].push(j);
            }
        }
        if p.diagonal_distance() <= eps {
            adj[i].push(n2 + i);
        }
    }
    for (j, q) in b.iter().enumerate() {
        if q.diagonal_distance() <= eps {
            adj[n1 + j].push(j);
        }
        adj[n1 + j].extend(n2..n2 + n1);
    }
    hopcroft_karp(&adj, n) == n
}

/// Maximum matching size of a bipartite graph given by left adjacency lists.
pub(crate) fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_left = vec![FREE; n_left];
    let mut match_right = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;

    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_right[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return size;
        }

        // DFS along layers with an explicit stack of (vertex, next edge).
        let mut next = vec![0usize; n_left];
        for root in 0..n_left {
            if match_left[root] != FREE {
                continue;
            }
            let mut path: Vec<usize> = vec![root];
            while let Some(&u) = path.last() {
                if next[u] == adj[u].len() {
                    dist[u] = usize::MAX;
                    path.pop();
                    continue;
                }
                let v = adj[u][next[u]];
                next[u] += 1;
                let w = match_right[v];
                if w == FREE {
                    // Augment along the path; each path vertex took the edge
                    // just before its current `next` cursor.
                    for &x in path.iter().rev() {
                        let y = adj[x][next[x] - 1];
                        match_left[x] = y;
                        match_right[y] = x;
                    }
                    size += 1;
                    break;
                } else if dist[w] == dist[u] + 1 {
                    path.push(w);
                }
            }
        }
    }
}
