//! Reference implementation by direct threshold sweep.
//!
//! For every distinct value `a` of `f`, from the highest down, the upper-level
//! set `{x : f(x) >= a}` is split into its maximal runs of consecutive indices
//! (its connected components). Each run contains whole runs of the previous
//! level. A run containing none of them is a new feature born at `a`; a run
//! containing several merges them, and all but the elder (highest birth, then
//! smallest position) die at `a`. This shares no code with the recursive
//! algorithm and costs `O(q * distinct values)`.

use super::{sort_triples, FeatureTriple};
use crate::spectrum::Spectrum;

pub fn oracle_transform(spectrum: &Spectrum) -> Vec<FeatureTriple> {
    oracle_transform_values(spectrum.intensity())
}

struct Component {
    lo: usize,
    hi: usize,
    // index into `features`
    feature: usize,
}

pub fn oracle_transform_values(values: &[f64]) -> Vec<FeatureTriple> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut levels: Vec<f64> = values.to_vec();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();

    // (position, birth, death); death is filled in when the feature dies.
    let mut features: Vec<(usize, f64, Option<f64>)> = Vec::new();
    let mut previous: Vec<Component> = Vec::new();

    for &a in &levels {
        let mut current = Vec::new();
        let mut i = 0;
        while i < values.len() {
            if values[i] < a {
                i += 1;
                continue;
            }
            let lo = i;
            while i + 1 < values.len() && values[i + 1] >= a {
                i += 1;
            }
            let hi = i;
            i += 1;

            let inside: Vec<usize> = previous
                .iter()
                .filter(|c| lo <= c.lo && c.hi <= hi)
                .map(|c| c.feature)
                .collect();
            let feature = if inside.is_empty() {
                features.push((lo, a, None));
                features.len() - 1
            } else {
                let elder = *inside
                    .iter()
                    .min_by(|&&x, &&y| {
                        features[y]
                            .1
                            .total_cmp(&features[x].1)
                            .then(features[x].0.cmp(&features[y].0))
                    })
                    .unwrap();
                for &f in &inside {
                    if f != elder {
                        features[f].2 = Some(a);
                    }
                }
                elder
            };
            current.push(Component { lo, hi, feature });
        }
        previous = current;
    }

    let global_min = *levels.last().unwrap();
    let mut triples: Vec<FeatureTriple> = features
        .into_iter()
        .map(|(position, birth, death)| FeatureTriple {
            position,
            birth,
            death: death.unwrap_or(global_min),
        })
        .collect();
    sort_triples(&mut triples);
    triples
}
