//! Recursive peak/minimum pairing.
//!
//! The global maximum is paired with the global minimum. Each remaining part of
//! the axis is then processed as a segment `(start, end)`, where `end` is the
//! position of an elder peak and `start` is either an end of the axis or a
//! minimum lower than everything in the segment. Inside a segment the highest
//! remaining peak `p` must merge into `end`, and it does so at the lowest
//! minimum `v` between `p` and `end`. That yields the triple `(p, f(p), f(v))`
//! and three new segments: `(start, p)`, `(v, p)` and `(v, end)`.
//!
//! Every segment receives its own copy of the candidate maxima and minima and
//! filters them to its range, which bounds the work by `O(q + m^2)` for `m`
//! peaks. Segments live on an explicit stack rather than the call stack.

use super::extrema::detect_extrema_values;
use super::{sort_triples, FeatureTriple};
use crate::spectrum::Spectrum;

struct Segment {
    start: usize,
    end: usize,
    maxima: Vec<usize>,
    minima: Vec<usize>,
}

pub fn transform(spectrum: &Spectrum) -> Vec<FeatureTriple> {
    transform_values(spectrum.intensity())
}

/// Persistence transformation of raw intensities, sorted by descending birth
/// then ascending position. Returns one triple per local maximum; an empty
/// input gives an empty result.
pub fn transform_values(values: &[f64]) -> Vec<FeatureTriple> {
    let q = values.len();
    if q == 0 {
        return Vec::new();
    }
    let extrema = detect_extrema_values(values);
    let mut maxima = extrema.maxima;
    let minima = extrema.minima;
    let mut triples = Vec::with_capacity(maxima.len());

    let global_max = maxima.remove(0);
    let global_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    triples.push(FeatureTriple {
        position: global_max,
        birth: values[global_max],
        death: global_min,
    });

    let mut stack = vec![
        Segment {
            start: q - 1,
            end: global_max,
            maxima: maxima.clone(),
            minima: minima.clone(),
        },
        Segment {
            start: 0,
            end: global_max,
            maxima,
            minima,
        },
    ];

    while let Some(Segment {
        start,
        end,
        mut maxima,
        mut minima,
    }) = stack.pop()
    {
        let (lo, hi) = (start.min(end), start.max(end));
        maxima.retain(|&x| lo <= x && x <= hi);
        if maxima.is_empty() {
            continue;
        }
        let peak = maxima.remove(0);

        // Peaks between `start` and `peak` merge into `peak`.
        stack.push(Segment {
            start,
            end: peak,
            maxima: maxima.clone(),
            minima: minima.clone(),
        });

        // Pairing minimum: the lowest one in the half-open range (peak, end].
        let (lo, hi) = (peak.min(end), peak.max(end));
        minima.retain(|&x| x != peak && lo <= x && x <= hi);
        assert!(
            !minima.is_empty(),
            "no minimum between peak {peak} and elder peak {end}"
        );
        let valley = minima.remove(0);
        triples.push(FeatureTriple {
            position: peak,
            birth: values[peak],
            death: values[valley],
        });

        stack.push(Segment {
            start: valley,
            end: peak,
            maxima: maxima.clone(),
            minima: minima.clone(),
        });
        stack.push(Segment {
            start: valley,
            end,
            maxima,
            minima,
        });
    }

    sort_triples(&mut triples);
    triples
}
