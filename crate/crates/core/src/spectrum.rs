//! Spectra, MS images, labeled datasets and plain real-valued grids.

use crate::error::{Error, Result};

/// A mass spectrum: strictly increasing m/z axis with non-negative intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    mz: Vec<f64>,
    intensity: Vec<f64>,
}

impl Spectrum {
    pub fn new(mz: Vec<f64>, intensity: Vec<f64>) -> Result<Self> {
        validate_axis(&mz).map_err(Error::InvalidSpectrum)?;
        if mz.len() != intensity.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} m/z values but {} intensities",
                mz.len(),
                intensity.len()
            )));
        }
        validate_intensities(&intensity).map_err(Error::InvalidSpectrum)?;
        Ok(Self { mz, intensity })
    }

    /// Builds a spectrum on the index axis `0, 1, ..., q-1`.
    pub fn from_intensities(intensity: Vec<f64>) -> Result<Self> {
        let mz = (0..intensity.len()).map(|i| i as f64).collect();
        Self::new(mz, intensity)
    }

    pub fn mz(&self) -> &[f64] {
        &self.mz
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn len(&self) -> usize {
        self.mz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mz.is_empty()
    }

    /// The spectrum read back to front on the same axis: `g(x_j) = f(x_{q-1-j})`.
    pub fn mirrored(&self) -> Spectrum {
        let mut intensity = self.intensity.clone();
        intensity.reverse();
        Spectrum {
            mz: self.mz.clone(),
            intensity,
        }
    }
}

pub(crate) fn validate_axis(mz: &[f64]) -> std::result::Result<(), String> {
    if mz.is_empty() {
        return Err("at least one m/z value is required".into());
    }
    if let Some(i) = mz.iter().position(|v| !v.is_finite()) {
        return Err(format!("m/z value at index {i} is not finite"));
    }
    if let Some(i) = mz.windows(2).position(|w| w[1] <= w[0]) {
        return Err(format!(
            "m/z axis not strictly increasing at index {}: {} then {}",
            i + 1,
            mz[i],
            mz[i + 1]
        ));
    }
    Ok(())
}

pub(crate) fn validate_intensities(values: &[f64]) -> std::result::Result<(), String> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(format!("intensity at index {i} is not finite"));
        }
        if v < 0.0 {
            return Err(format!("negative intensity {v} at index {i}"));
        }
    }
    Ok(())
}

/// A rectangular grid of spectra sharing one m/z axis.
///
/// Pixels are stored row-major (`y * width + x`), each pixel owning a
/// contiguous block of `mz.len()` intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct MSImage {
    width: usize,
    height: usize,
    mz: Vec<f64>,
    data: Vec<f64>,
}

impl MSImage {
    pub fn new(width: usize, height: usize, mz: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(
                "width and height must be positive".into(),
            ));
        }
        validate_axis(&mz).map_err(Error::InvalidImage)?;
        let expected = width * height * mz.len();
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} pixels with {} m/z values need {expected} intensities, got {}",
                mz.len(),
                data.len()
            )));
        }
        validate_intensities(&data).map_err(Error::InvalidImage)?;
        Ok(Self {
            width,
            height,
            mz,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn mz(&self) -> &[f64] {
        &self.mz
    }

    pub fn pixel(&self, index: usize) -> &[f64] {
        let q = self.mz.len();
        &self.data[index * q..(index + 1) * q]
    }

    pub fn pixel_at(&self, x: usize, y: usize) -> &[f64] {
        self.pixel(y * self.width + x)
    }

    pub fn pixels(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.mz.len())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Replaces the intensity block, keeping the geometry and axis.
    pub(crate) fn with_data(&self, data: Vec<f64>) -> MSImage {
        debug_assert_eq!(data.len(), self.data.len());
        MSImage {
            width: self.width,
            height: self.height,
            mz: self.mz.clone(),
            data,
        }
    }
}

/// Spectra on a shared axis with binary outcomes and group memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    mz: Vec<f64>,
    spectra: Vec<Vec<f64>>,
    labels: Vec<u8>,
    groups: Vec<String>,
}

impl LabeledDataset {
    pub fn new(
        mz: Vec<f64>,
        spectra: Vec<Vec<f64>>,
        labels: Vec<u8>,
        groups: Vec<String>,
    ) -> Result<Self> {
        validate_axis(&mz).map_err(Error::InvalidDataset)?;
        if spectra.len() != labels.len() || spectra.len() != groups.len() {
            return Err(Error::InvalidDataset(format!(
                "count mismatch: {} spectra, {} labels, {} groups",
                spectra.len(),
                labels.len(),
                groups.len()
            )));
        }
        for (i, row) in spectra.iter().enumerate() {
            if row.len() != mz.len() {
                return Err(Error::InvalidDataset(format!(
                    "spectrum {i} has {} intensities, axis has {}",
                    row.len(),
                    mz.len()
                )));
            }
            validate_intensities(row)
                .map_err(|e| Error::InvalidDataset(format!("spectrum {i}: {e}")))?;
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidDataset(format!(
                "label {} of spectrum {i} is not binary",
                labels[i]
            )));
        }
        Ok(Self {
            mz,
            spectra,
            labels,
            groups,
        })
    }

    pub fn len(&self) -> usize {
        self.spectra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectra.is_empty()
    }

    pub fn mz(&self) -> &[f64] {
        &self.mz
    }

    pub fn spectrum(&self, i: usize) -> &[f64] {
        &self.spectra[i]
    }

    pub fn spectra(&self) -> &[Vec<f64>] {
        &self.spectra
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }
}

/// A dense `height x width` real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_rejects_bad_input() {
        assert!(Spectrum::new(vec![], vec![]).is_err());
        assert!(Spectrum::new(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(Spectrum::new(vec![1.0], vec![-1.0]).is_err());
        assert!(Spectrum::new(vec![1.0], vec![f64::NAN]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0], vec![0.0, 3.0]).is_ok());
    }

    #[test]
    fn mirror_keeps_axis() {
        let s = Spectrum::new(vec![10.0, 11.0, 12.0], vec![1.0, 2.0, 3.0]).unwrap();
        let m = s.mirrored();
        assert_eq!(m.mz(), s.mz());
        assert_eq!(m.intensity(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn image_geometry() {
        let img = MSImage::new(2, 1, vec![1.0, 2.0], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(img.pixel_at(1, 0), &[2.0, 3.0]);
        assert!(MSImage::new(2, 2, vec![1.0, 2.0], vec![0.0; 4]).is_err());
    }

    #[test]
    fn dataset_rejects_non_binary_labels() {
        let err = LabeledDataset::new(vec![1.0], vec![vec![0.0]], vec![2], vec!["a".into()]);
        assert!(matches!(err, Err(Error::InvalidDataset(_))));
    }
}
