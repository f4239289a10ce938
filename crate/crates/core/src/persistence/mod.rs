//! Persistence transformation of a spectrum.
//!
//! Every local maximum `x` of `f` yields a [`FeatureTriple`]
//! `(x, f(x), mu(x))`, where the death value `mu(x)` is the highest threshold at
//! which the component born at `x` joins a component with a higher peak. The
//! global maximum dies at the global minimum of `f`.
//!
//! Ties are resolved through the order of the axis: among equal births the
//! feature at the smaller position is the elder, plateaus are anchored at their
//! leftmost index.

mod extrema;
mod oracle;
mod transform;

pub use extrema::{detect_extrema, ExtremaSet};
pub use oracle::{oracle_transform, oracle_transform_values};
pub use transform::{transform, transform_values};

use crate::diagram::PersistenceDiagram;
use crate::error::{check_percentage, Result};

/// Position, birth and death of one topological feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureTriple {
    pub position: usize,
    pub birth: f64,
    pub death: f64,
}

impl FeatureTriple {
    pub fn persistence(&self) -> f64 {
        self.birth - self.death
    }
}

/// Position and persistence of one feature (the reduced transformation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub position: usize,
    pub persistence: f64,
}

/// Orders triples by descending birth, then ascending position.
pub(crate) fn sort_triples(triples: &mut [FeatureTriple]) {
    triples.sort_by(|a, b| {
        b.birth
            .total_cmp(&a.birth)
            .then(a.position.cmp(&b.position))
    });
}

/// Drops death and birth, keeping `birth - death`; zero-persistence features are omitted.
pub fn reduce(triples: &[FeatureTriple]) -> Vec<PersistencePair> {
    triples
        .iter()
        .filter(|t| t.persistence() > 0.0)
        .map(|t| PersistencePair {
            position: t.position,
            persistence: t.persistence(),
        })
        .collect()
}

/// Projects triples onto their `(birth, death)` coordinates.
pub fn to_diagram(triples: &[FeatureTriple]) -> PersistenceDiagram {
    PersistenceDiagram::from_triples(triples)
}

/// Number of pairs retained by [`filter_top_k`] out of `n`: `ceil(k/100 * n)`.
pub fn top_k_count(n: usize, k: f64) -> usize {
    // k * n first keeps integral percentages exact (30 * 10 / 100 == 3).
    let count = (k * n as f64 / 100.0).ceil();
    (count as usize).min(n)
}

/// Keeps the `ceil(k/100 * n)` most persistent pairs.
///
/// Equal persistence is broken by the smaller position. The retained pairs
/// keep their input order.
pub fn filter_top_k(pairs: &[PersistencePair], k: f64) -> Result<Vec<PersistencePair>> {
    check_percentage(k)?;
    let keep = top_k_count(pairs.len(), k);
    if keep == pairs.len() {
        return Ok(pairs.to_vec());
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| {
        pairs[b]
            .persistence
            .total_cmp(&pairs[a].persistence)
            .then(pairs[a].position.cmp(&pairs[b].position))
    });
    let mut kept = vec![false; pairs.len()];
    for &i in &order[..keep] {
        kept[i] = true;
    }
    Ok(pairs
        .iter()
        .zip(kept)
        .filter_map(|(p, k)| k.then_some(*p))
        .collect())
}

/// Flat `[position, persistence, position, persistence, ...]` encoding of the
/// reduced transformation, two scalars per feature.
pub fn encode_reduced(pairs: &[PersistencePair]) -> Vec<f64> {
    pairs
        .iter()
        .flat_map(|p| [p.position as f64, p.persistence])
        .collect()
}

/// Reduced transformation of raw intensities followed by top-k filtering.
pub fn top_k_features(values: &[f64], k: f64) -> Result<Vec<PersistencePair>> {
    check_percentage(k)?;
    filter_top_k(&reduce(&transform_values(values)), k)
}
