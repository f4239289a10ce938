use proptest::prelude::*;
use ptransform::features::build_matrix;
use ptransform::io::{
    load_dataset_csv, load_diagram_csv, load_spectrum_csv, write_dataset_csv, write_diagram_csv,
    write_spectrum_csv,
};
use ptransform::persistence::{to_diagram, top_k_count, transform};
use ptransform::{LabeledDataset, Spectrum};

fn spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec((0.001f64..10.0, 0.0f64..1e4), 1..50).prop_map(|rows| {
        let mut mz = 500.0;
        let (axis, intensity) = rows
            .into_iter()
            .map(|(step, v)| {
                mz += step;
                (mz, v)
            })
            .unzip();
        Spectrum::new(axis, intensity).unwrap()
    })
}

fn dataset() -> impl Strategy<Value = LabeledDataset> {
    (1usize..8, 0usize..10).prop_flat_map(|(q, n)| {
        (
            prop::collection::vec(prop::collection::vec(0u8..5, q), n),
            prop::collection::vec((0u8..2, 0u8..3), n),
        )
            .prop_map(move |(rows, meta)| {
                let mz = (0..q).map(|j| 500.0 + 0.25 * j as f64).collect();
                let spectra = rows
                    .into_iter()
                    .map(|r| r.into_iter().map(f64::from).collect())
                    .collect();
                let (labels, groups) = meta
                    .into_iter()
                    .map(|(l, g)| (l, format!("TMA{g}")))
                    .unzip();
                LabeledDataset::new(mz, spectra, labels, groups).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_round_trip(s in spectrum()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_spectrum_csv(&s, &path).unwrap();
        prop_assert_eq!(load_spectrum_csv(&path).unwrap(), s);
    }

    #[test]
    fn dataset_round_trip_and_feature_sparsity(ds in dataset(), k in 1u32..=100) {
        let dir = tempfile::tempdir().unwrap();
        let (xs, ys) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
        write_dataset_csv(&ds, &xs, &ys).unwrap();
        let loaded = load_dataset_csv(&xs, &ys).unwrap();
        prop_assert_eq!(&loaded, &ds);

        let m = build_matrix(&loaded, k as f64).unwrap();
        prop_assert_eq!(m.n_rows(), ds.len());
        for i in 0..ds.len() {
            let s = Spectrum::new(ds.mz().to_vec(), ds.spectrum(i).to_vec()).unwrap();
            let pairs = ptransform::persistence::reduce(&transform(&s));
            let nonzero = m.row(i).iter().filter(|v| **v != 0.0).count();
            prop_assert_eq!(nonzero, top_k_count(pairs.len(), k as f64));
            prop_assert!(m.row(i).iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn feature_support_is_nested_in_k(ds in dataset(), k1 in 1u32..=100, k2 in 1u32..=100) {
        let (lo, hi) = (k1.min(k2) as f64, k1.max(k2) as f64);
        let a = build_matrix(&ds, lo).unwrap();
        let b = build_matrix(&ds, hi).unwrap();
        for i in 0..ds.len() {
            for (x, y) in a.row(i).iter().zip(b.row(i)) {
                prop_assert!(*x == 0.0 || x == y);
            }
        }
    }
}

#[test]
fn diagram_round_trip() {
    let s = Spectrum::from_intensities(vec![0.0, 2.5, 1.25, 3.0, 0.5]).unwrap();
    let d = to_diagram(&transform(&s));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_diagram_csv(&d, &path).unwrap();
    assert_eq!(load_diagram_csv(&path).unwrap(), d);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dataset_loader_never_panics(
        spectra in "[0-9a-zA-Z,.\\-\n ]{0,200}",
        labels in "[0-9a-zA-Z,.\\-\n ]{0,60}",
    ) {
        let dir = tempfile::tempdir().unwrap();
        let (xs, ys) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
        std::fs::write(&xs, spectra).unwrap();
        std::fs::write(&ys, labels).unwrap();
        let _ = load_dataset_csv(&xs, &ys);
        let _ = load_spectrum_csv(&xs);
    }
}
