use proptest::prelude::*;
use ptransform::classify::{
    balanced_accuracy, fit_forest, fit_logistic, gradient, group_cv, log_likelihood, make_folds,
    predict_forest, predict_logistic, train_model, Classifier, CvScheme, FitStatus, ForestParams,
    LogisticModel,
};
use ptransform::features::FeatureMatrix;
use ptransform::LabeledDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(rng: &mut ChaCha8Rng, n: usize, q: usize) -> (FeatureMatrix, Vec<u8>) {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..q).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let y = (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect();
    let mz = (0..q).map(|j| j as f64).collect();
    (FeatureMatrix::new(mz, rows).unwrap(), y)
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.random_range(1..=20);
        let q = rng.random_range(1..=5);
        let (z, y) = random_problem(&mut rng, n, q);
        let beta: Vec<f64> = (0..=q).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = gradient(&beta, &z, &y).unwrap();
        for j in 0..=q {
            let h = 1e-5;
            let mut up = beta.clone();
            let mut down = beta.clone();
            up[j] += h;
            down[j] -= h;
            let fd = (log_likelihood(&up, &z, &y).unwrap()
                - log_likelihood(&down, &z, &y).unwrap())
                / (2.0 * h);
            let rel = (fd - g[j]).abs() / g[j].abs().max(1.0);
            assert!(rel <= 1e-5, "component {j}: analytic {} vs fd {fd}", g[j]);
        }
    }
}

#[test]
fn converged_fits_have_tiny_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..40 {
        let (z, y) = random_problem(&mut rng, 40, 3);
        let model = fit_logistic(&z, &y).unwrap();
        if model.status == FitStatus::Separated {
            continue;
        }
        assert_eq!(model.status, FitStatus::Converged);
        let g = gradient(&model.beta, &z, &y).unwrap();
        assert!(g.iter().all(|v| v.abs() <= 1e-6), "{g:?}");
        checked += 1;
    }
    assert!(checked > 30);
}

#[test]
fn logistic_score_is_invariant_under_column_rescaling() {
    let model = LogisticModel {
        beta: vec![0.3, 1.5, -2.0],
        threshold: 0.5,
        status: FitStatus::Converged,
        iterations: 0,
    };
    let scaled = LogisticModel {
        beta: vec![0.3, 1.5 / 4.0, -2.0],
        ..model.clone()
    };
    let row = [0.7, 0.2];
    let scaled_row = [0.7 * 4.0, 0.2];
    assert_eq!(
        predict_logistic(&model, &row).unwrap(),
        predict_logistic(&scaled, &scaled_row).unwrap()
    );
}

#[test]
fn forest_is_invariant_under_positive_column_rescaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (z, y) = random_problem(&mut rng, 60, 4);
    let params = ForestParams {
        n_trees: 25,
        ..ForestParams::default()
    };
    let model = fit_forest(&z, &y, &params).unwrap();
    let rescale = |m: &FeatureMatrix| {
        let rows = m
            .rows()
            .map(|r| {
                let mut r = r.to_vec();
                r[2] *= 4.0;
                r
            })
            .collect();
        FeatureMatrix::new(m.mz().to_vec(), rows).unwrap()
    };
    let zs = rescale(&z);
    let scaled_model = fit_forest(&zs, &y, &params).unwrap();
    let (test, _) = random_problem(&mut rng, 40, 4);
    let test_scaled = rescale(&test);
    for (row, srow) in test.rows().zip(test_scaled.rows()) {
        assert_eq!(
            predict_forest(&model, row).unwrap(),
            predict_forest(&scaled_model, srow).unwrap()
        );
    }
}

#[test]
fn forest_without_bootstrap_fits_training_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (z, y) = random_problem(&mut rng, 80, 6);
    let params = ForestParams {
        n_trees: 5,
        bootstrap: false,
        ..ForestParams::default()
    };
    let model = fit_forest(&z, &y, &params).unwrap();
    let pred: Vec<u8> = z
        .rows()
        .map(|r| predict_forest(&model, r).unwrap())
        .collect();
    assert_eq!(pred, y);
}

proptest! {
    #[test]
    fn balanced_accuracy_is_label_symmetric(
        pairs in prop::collection::vec((0u8..2, 0u8..2), 2..50)
    ) {
        let (t, p): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        prop_assume!(t.contains(&0) && t.contains(&1));
        let flip = |v: &[u8]| v.iter().map(|x| 1 - x).collect::<Vec<_>>();
        let a = balanced_accuracy(&t, &p).unwrap();
        let b = balanced_accuracy(&flip(&t), &flip(&p)).unwrap();
        prop_assert!((a - b).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&a));
    }
}

/// Spectra with a marker peak whose height depends on the label.
fn toy_dataset(n_groups: usize, per_group: usize, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = 40;
    let mut spectra = Vec::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for g in 0..n_groups {
        for i in 0..per_group {
            let label = (i % 2) as u8;
            let mut s: Vec<f64> = (0..q).map(|_| rng.random_range(0.0..0.3)).collect();
            s[10] += 2.0;
            s[25] += if label == 1 { 4.0 } else { 1.0 };
            spectra.push(s);
            labels.push(label);
            groups.push(format!("{}", g + 1));
        }
    }
    let mz = (0..q).map(|j| 600.0 + j as f64).collect();
    LabeledDataset::new(mz, spectra, labels, groups).unwrap()
}

#[test]
fn test_rows_never_influence_training() {
    let dataset = toy_dataset(4, 12, 1);
    let folds = make_folds(dataset.groups(), CvScheme::LeaveOneGroupOut).unwrap();
    let classifiers = [
        Classifier::Logistic { threshold: 0.5 },
        Classifier::Forest(ForestParams {
            n_trees: 15,
            ..ForestParams::default()
        }),
    ];
    for fold in &folds {
        // Poison every test row with sentinel values and flipped labels.
        let spectra: Vec<Vec<f64>> = (0..dataset.len())
            .map(|i| {
                if fold.test.contains(&i) {
                    vec![1e6; dataset.mz().len()]
                } else {
                    dataset.spectrum(i).to_vec()
                }
            })
            .collect();
        let labels: Vec<u8> = (0..dataset.len())
            .map(|i| {
                let l = dataset.labels()[i];
                if fold.test.contains(&i) {
                    1 - l
                } else {
                    l
                }
            })
            .collect();
        let poisoned = LabeledDataset::new(
            dataset.mz().to_vec(),
            spectra,
            labels,
            dataset.groups().to_vec(),
        )
        .unwrap();
        for c in &classifiers {
            let clean = train_model(&dataset, &fold.train, c, 50.0).unwrap();
            let dirty = train_model(&poisoned, &fold.train, c, 50.0).unwrap();
            assert_eq!(clean, dirty, "fold {}", fold.name);
        }
    }
}

#[test]
fn cv_reports_are_consistent() {
    let dataset = toy_dataset(8, 6, 2);
    let forest = Classifier::Forest(ForestParams {
        n_trees: 20,
        ..ForestParams::default()
    });
    let report = group_cv(&dataset, CvScheme::LeaveOneGroupOut, &forest, 100.0).unwrap();
    assert_eq!(report.folds.len(), 8);
    let accs: Vec<f64> = report.folds.iter().map(|f| f.balanced_accuracy).collect();
    let mean = accs.iter().sum::<f64>() / 8.0;
    assert!((report.summary.mean - mean).abs() < 1e-12);
    assert!(accs
        .iter()
        .all(|&a| a >= report.summary.min && a <= report.summary.max));

    let report = group_cv(&dataset, CvScheme::TwoFoldAB, &forest, 100.0).unwrap();
    assert_eq!(report.folds.len(), 2);
    assert_eq!(report.folds[0].name, "Train A");
    assert_eq!(report.folds[0].test_groups, vec!["5", "6", "7", "8"]);
}

#[test]
fn folds_without_both_classes_are_skipped() {
    let base = toy_dataset(3, 4, 4);
    // Group 3 only carries label 0.
    let labels: Vec<u8> = base
        .labels()
        .iter()
        .zip(base.groups())
        .map(|(&l, g)| if g == "3" { 0 } else { l })
        .collect();
    let ds = LabeledDataset::new(
        base.mz().to_vec(),
        base.spectra().to_vec(),
        labels,
        base.groups().to_vec(),
    )
    .unwrap();
    let report = group_cv(
        &ds,
        CvScheme::LeaveOneGroupOut,
        &Classifier::Logistic { threshold: 0.5 },
        100.0,
    )
    .unwrap();
    assert_eq!(report.folds.len(), 2);
    assert_eq!(report.skipped.len(), 1);
    assert_eq!(report.skipped[0].name, "test 3");
}
