use crate::spectrum::Spectrum;

/// Local extrema of a spectrum.
///
/// `maxima` is sorted by descending value then ascending position, `minima` by
/// ascending value then ascending position. Along the axis the two interleave.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremaSet {
    pub maxima: Vec<usize>,
    pub minima: Vec<usize>,
}

pub fn detect_extrema(spectrum: &Spectrum) -> ExtremaSet {
    detect_extrema_values(spectrum.intensity())
}

/// Scans maximal runs of equal values once.
///
/// A run is a maximum if every existing neighbour is strictly smaller, a
/// minimum if every existing neighbour is strictly larger; it is anchored at
/// its leftmost index. A run with no neighbours at all (constant input) counts
/// as a single maximum.
pub(crate) fn detect_extrema_values(values: &[f64]) -> ExtremaSet {
    let q = values.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut start = 0;
    while start < q {
        let v = values[start];
        let mut end = start;
        while end + 1 < q && values[end + 1] == v {
            end += 1;
        }
        let left = (start > 0).then(|| values[start - 1]);
        let right = (end + 1 < q).then(|| values[end + 1]);
        match (left, right) {
            (None, None) => maxima.push(start),
            (l, r) => {
                if l.is_none_or(|l| l < v) && r.is_none_or(|r| r < v) {
                    maxima.push(start);
                } else if l.is_none_or(|l| l > v) && r.is_none_or(|r| r > v) {
                    minima.push(start);
                }
            }
        }
        start = end + 1;
    }
    maxima.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    minima.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    ExtremaSet { maxima, minima }
}
