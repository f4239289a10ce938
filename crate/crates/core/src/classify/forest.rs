//! Random forest of CART classification trees.
//!
//! Each tree is grown on a bootstrap sample of size `n` drawn with replacement.
//! At every node, candidate features are drawn without replacement until
//! `mtry` features that are not constant within the node have been examined
//! (further features are drawn only while the examined ones are all constant).
//! The split minimising the weighted Gini impurity of the children wins; ties
//! go to the smaller feature index, then the smaller threshold. Nodes are
//! split until pure or until no split leaves `min_leaf` samples on each side.
//!
//! Tree `t` draws from `ChaCha8Rng` seeded with `derive_seed(seed, t)`, so a
//! forest is reproducible regardless of how many threads build it.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::seed::rng_for;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Candidate features per split; `None` means `ceil(sqrt(q))`.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub seed: u64,
    /// Draw a bootstrap sample per tree; when false every tree sees the data as is.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 1000,
            mtry: None,
            min_leaf: 1,
            seed: 1234,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Rows with `z[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Class counts `[zeros, ones]` of the training samples in the leaf.
    Leaf { counts: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaf_counts(&self, row: &[f64]) -> [usize; 2] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return *counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    /// Leaf majority; an even leaf votes 0.
    pub fn predict(&self, row: &[f64]) -> u8 {
        let [zeros, ones] = self.leaf_counts(row);
        u8::from(ones > zeros)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub n_trees: usize,
    pub mtry: usize,
    pub min_leaf: usize,
    pub seed: u64,
    pub n_features: usize,
}

/// Gini impurity `1 - p0^2 - p1^2` of a node with the given class counts.
pub fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

pub fn fit_forest(z: &FeatureMatrix, y: &[u8], params: &ForestParams) -> Result<ForestModel> {
    let (n, q) = (z.n_rows(), z.n_cols());
    if n == 0 || q == 0 {
        return Err(Error::InvalidParameter(
            "random forest needs at least one row and one column".into(),
        ));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::InvalidParameter("labels must be 0 or 1".into()));
    }
    if params.n_trees == 0 || params.min_leaf == 0 {
        return Err(Error::InvalidParameter(
            "n_trees and min_leaf must be positive".into(),
        ));
    }
    let mtry = params
        .mtry
        .unwrap_or_else(|| (q as f64).sqrt().ceil() as usize)
        .clamp(1, q);

    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(params.seed, t as u64);
            let sample: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_tree(z, y, sample, mtry, params.min_leaf, &mut rng)
        })
        .collect();

    Ok(ForestModel {
        trees,
        n_trees: params.n_trees,
        mtry,
        min_leaf: params.min_leaf,
        seed: params.seed,
        n_features: q,
    })
}

struct BestSplit {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl BestSplit {
    fn beats(&self, other: &BestSplit) -> bool {
        self.impurity
            .total_cmp(&other.impurity)
            .then(self.feature.cmp(&other.feature))
            .then(self.threshold.total_cmp(&other.threshold))
            .is_lt()
    }
}

fn class_counts(y: &[u8], sample: &[usize]) -> [usize; 2] {
    let ones = sample.iter().filter(|&&i| y[i] == 1).count();
    [sample.len() - ones, ones]
}

fn grow_tree(
    z: &FeatureMatrix,
    y: &[u8],
    sample: Vec<usize>,
    mtry: usize,
    min_leaf: usize,
    rng: &mut impl Rng,
) -> DecisionTree {
    let q = z.n_cols();
    let mut features: Vec<usize> = (0..q).collect();
    let mut nodes = vec![Node::Leaf { counts: [0, 0] }];
    let mut work = vec![(0usize, sample)];
    let mut column: Vec<(f64, u8)> = Vec::new();

    while let Some((slot, sample)) = work.pop() {
        let counts = class_counts(y, &sample);
        let pure = counts[0] == 0 || counts[1] == 0;
        let best = if pure || sample.len() < 2 * min_leaf {
            None
        } else {
            find_split(
                z,
                y,
                &sample,
                &mut features,
                mtry,
                min_leaf,
                rng,
                &mut column,
            )
        };
        let Some(best) = best else {
            nodes[slot] = Node::Leaf { counts };
            continue;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = sample
            .iter()
            .partition(|&&i| z.get(i, best.feature) <= best.threshold);
        let (li, ri) = (nodes.len(), nodes.len() + 1);
        nodes.push(Node::Leaf { counts: [0, 0] });
        nodes.push(Node::Leaf { counts: [0, 0] });
        nodes[slot] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: li,
            right: ri,
        };
        work.push((ri, right));
        work.push((li, left));
    }
    DecisionTree { nodes }
}

#[allow(clippy::too_many_arguments)]
fn find_split(
    z: &FeatureMatrix,
    y: &[u8],
    sample: &[usize],
    features: &mut [usize],
    mtry: usize,
    min_leaf: usize,
    rng: &mut impl Rng,
    column: &mut Vec<(f64, u8)>,
) -> Option<BestSplit> {
    let q = features.len();
    let n = sample.len();
    let total = class_counts(y, sample);
    let mut best: Option<BestSplit> = None;
    let mut examined = 0;

    // Partial Fisher-Yates: positions 0..j hold the features drawn so far.
    for j in 0..q {
        if examined == mtry {
            break;
        }
        let r = rng.random_range(j..q);
        features.swap(j, r);
        let feature = features[j];

        column.clear();
        column.extend(sample.iter().map(|&i| (z.get(i, feature), y[i])));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));
        if column[0].0 == column[n - 1].0 {
            continue;
        }
        examined += 1;

        let mut left = [0usize; 2];
        for i in 0..n - 1 {
            left[column[i].1 as usize] += 1;
            let (lo, hi) = (column[i].0, column[i + 1].0);
            if lo == hi {
                continue;
            }
            let n_left = i + 1;
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let impurity = (n_left as f64 * gini(left) + n_right as f64 * gini(right)) / n as f64;
            let mut threshold = lo + (hi - lo) / 2.0;
            if threshold >= hi {
                threshold = lo;
            }
            let candidate = BestSplit {
                impurity,
                feature,
                threshold,
            };
            if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                best = Some(candidate);
            }
        }
    }
    best
}

/// Majority vote of the trees; a tie votes 0.
pub fn predict_forest(model: &ForestModel, row: &[f64]) -> Result<u8> {
    if row.len() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            found: row.len(),
        });
    }
    let ones = model.trees.iter().filter(|t| t.predict(row) == 1).count();
    Ok(u8::from(2 * ones > model.trees.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> FeatureMatrix {
        FeatureMatrix::new(vec![1.0], values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    fn single_tree() -> ForestParams {
        ForestParams {
            n_trees: 1,
            mtry: Some(1),
            bootstrap: false,
            ..ForestParams::default()
        }
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini([4, 0]), 0.0);
        assert_eq!(gini([0, 3]), 0.0);
        assert_eq!(gini([2, 2]), 0.5);
    }

    #[test]
    fn four_point_split() {
        let z = column(&[0.0, 1.0, 2.0, 3.0]);
        let y = [0, 0, 1, 1];
        let model = fit_forest(&z, &y, &single_tree()).unwrap();
        let nodes = model.trees[0].nodes();
        assert_eq!(nodes.len(), 3);
        assert!(matches!(
            nodes[0],
            Node::Split { feature: 0, threshold, .. } if threshold == 1.5
        ));
        for (row, &t) in z.rows().zip(&y) {
            assert_eq!(predict_forest(&model, row).unwrap(), t);
        }
    }

    fn leaf_tree(counts: [usize; 2]) -> DecisionTree {
        DecisionTree {
            nodes: vec![Node::Leaf { counts }],
        }
    }

    fn forest_of(trees: Vec<DecisionTree>) -> ForestModel {
        ForestModel {
            n_trees: trees.len(),
            trees,
            mtry: 1,
            min_leaf: 1,
            seed: 0,
            n_features: 1,
        }
    }

    #[test]
    fn vote_rules() {
        let all_one = forest_of(vec![leaf_tree([0, 3]), leaf_tree([1, 2])]);
        assert_eq!(predict_forest(&all_one, &[0.0]).unwrap(), 1);
        let one = forest_of(vec![leaf_tree([2, 5])]);
        assert_eq!(predict_forest(&one, &[0.0]).unwrap(), 1);
        let even = forest_of(vec![leaf_tree([0, 3]), leaf_tree([3, 0])]);
        assert_eq!(predict_forest(&even, &[0.0]).unwrap(), 0);
        assert_eq!(leaf_tree([2, 2]).predict(&[0.0]), 0);
        assert!(predict_forest(&even, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn min_leaf_limits_growth() {
        let z = column(&[0.0, 1.0, 2.0, 3.0]);
        let params = ForestParams {
            min_leaf: 3,
            ..single_tree()
        };
        let model = fit_forest(&z, &[0, 1, 0, 1], &params).unwrap();
        assert_eq!(model.trees[0].nodes().len(), 1);
    }

    #[test]
    fn constant_features_are_skipped() {
        // Column 0 is constant; with mtry = 1 the tree must still find column 1.
        let z = FeatureMatrix::new(
            vec![1.0, 2.0],
            vec![vec![5.0, 0.0], vec![5.0, 1.0], vec![5.0, 2.0]],
        )
        .unwrap();
        let model = fit_forest(&z, &[0, 1, 1], &single_tree()).unwrap();
        assert!(matches!(
            model.trees[0].nodes()[0],
            Node::Split { feature: 1, .. }
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let z = FeatureMatrix::new(
            vec![1.0, 2.0, 3.0],
            (0..30)
                .map(|i| vec![(i % 7) as f64, (i * 3 % 11) as f64, (i % 2) as f64])
                .collect(),
        )
        .unwrap();
        let y: Vec<u8> = (0..30).map(|i| u8::from(i % 3 == 0)).collect();
        let params = ForestParams {
            n_trees: 20,
            ..ForestParams::default()
        };
        let a = fit_forest(&z, &y, &params).unwrap();
        let b = fit_forest(&z, &y, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mtry, 2);
    }
}
