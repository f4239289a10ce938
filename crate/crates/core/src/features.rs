//! Dense persistence feature matrices.
//!
//! Row `i` holds, at column `j`, the persistence of the retained peak of
//! spectrum `i` at m/z position `j`, and zero where no peak was retained.

use rayon::prelude::*;

use crate::error::{check_percentage, Error, Result};
use crate::persistence::{top_k_features, PersistencePair};
use crate::spectrum::LabeledDataset;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    mz: Vec<f64>,
    n_rows: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(mz: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let q = mz.len();
        let mut values = Vec::with_capacity(rows.len() * q);
        for row in &rows {
            if row.len() != q {
                return Err(Error::DimensionMismatch {
                    expected: q,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            mz,
            n_rows: rows.len(),
            values,
        })
    }

    pub fn mz(&self) -> &[f64] {
        &self.mz
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.mz.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let q = self.mz.len();
        &self.values[i * q..(i + 1) * q]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.mz.len() + j]
    }
}

pub fn to_persistence_vector(pairs: &[PersistencePair], q: usize) -> Result<Vec<f64>> {
    let mut row = vec![0.0; q];
    for p in pairs {
        let slot = row.get_mut(p.position).ok_or(Error::PositionOutOfRange {
            position: p.position,
            len: q,
        })?;
        *slot = p.persistence;
    }
    Ok(row)
}

/// Persistence vector of one spectrum at level `k`.
pub fn persistence_row(values: &[f64], k: f64) -> Result<Vec<f64>> {
    to_persistence_vector(&top_k_features(values, k)?, values.len())
}

pub fn build_matrix(dataset: &LabeledDataset, k: f64) -> Result<FeatureMatrix> {
    let all: Vec<usize> = (0..dataset.len()).collect();
    build_matrix_rows(dataset, &all, k)
}

/// Feature matrix for a subset of the dataset's spectra, in the given order.
pub fn build_matrix_rows(
    dataset: &LabeledDataset,
    indices: &[usize],
    k: f64,
) -> Result<FeatureMatrix> {
    check_percentage(k)?;
    let rows = indices
        .par_iter()
        .map(|&i| persistence_row(dataset.spectrum(i), k))
        .collect::<Result<Vec<_>>>()?;
    FeatureMatrix::new(dataset.mz().to_vec(), rows)
}
