//! Synthetic MS images, noise injection and persistence-based denoising.
//!
//! The ground truth is a square image holding a circle in the top-left corner
//! and a square in the bottom-right corner on an empty background. The
//! `n_peaks` peak positions are drawn uniformly on the m/z axis (at least
//! [`MIN_PEAK_SPACING`] steps apart) and split evenly between the two shapes.
//! Each peak is a Gaussian with a standard deviation of
//! [`PEAK_WIDTH_STEPS`] axis steps, truncated at 5 standard deviations, with a
//! height drawn uniformly from `[1, 10]`. Every pixel carries the baseline
//! offset; background pixels carry nothing else.

use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;

use crate::error::{check_percentage, Error, Result};
use crate::features::persistence_row;
use crate::seed::{derive_seed, rng_for};
use crate::spectrum::{Grid, MSImage};

pub const PEAK_WIDTH_STEPS: f64 = 2.0;
const PEAK_HALF_SUPPORT: usize = 10;
pub const MIN_PEAK_SPACING: usize = 2 * PEAK_HALF_SUPPORT + 5;
const PEAK_HEIGHT_RANGE: (f64, f64) = (1.0, 10.0);
const NOISE_STREAM: u64 = 0x006e_6f69_7365;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    /// Additive `N(0, sd^2)`, clamped at zero.
    Gaussian {
        sd: f64,
    },
    /// Additive `Poisson(lambda)` counts.
    Poisson {
        lambda: f64,
    },
}

impl NoiseModel {
    fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Gaussian { sd } if !(sd >= 0.0 && sd.is_finite()) => Err(
                Error::InvalidParameter(format!("Gaussian sd must be >= 0, got {sd}")),
            ),
            NoiseModel::Poisson { lambda } if !(lambda >= 0.0 && lambda.is_finite()) => Err(
                Error::InvalidParameter(format!("Poisson lambda must be >= 0, got {lambda}")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSpec {
    /// Pixels per side.
    pub size: usize,
    pub mz_range: (f64, f64),
    pub n_mz: usize,
    pub n_peaks: usize,
    pub baseline: f64,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            size: 30,
            mz_range: (500.0, 2000.0),
            n_mz: 3466,
            n_peaks: 50,
            baseline: 0.0,
            noise: NoiseModel::None,
            seed: 1234,
        }
    }
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size < 8 {
            return Err(Error::InvalidParameter(format!(
                "image size must be at least 8 pixels per side, got {}",
                self.size
            )));
        }
        let (lo, hi) = self.mz_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "m/z range must be increasing, got ({lo}, {hi})"
            )));
        }
        if self.n_mz < 2 {
            return Err(Error::InvalidParameter("need at least 2 m/z values".into()));
        }
        if self.n_peaks == 0 {
            return Err(Error::InvalidParameter("need at least one peak".into()));
        }
        if (self.n_peaks - 1) * MIN_PEAK_SPACING >= self.n_mz {
            return Err(Error::InvalidParameter(format!(
                "{} peaks spaced {MIN_PEAK_SPACING} steps apart do not fit on {} m/z values",
                self.n_peaks, self.n_mz
            )));
        }
        if !(self.baseline >= 0.0 && self.baseline.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "baseline must be >= 0, got {}",
                self.baseline
            )));
        }
        self.noise.validate()
    }

    pub fn mz_axis(&self) -> Vec<f64> {
        let (lo, hi) = self.mz_range;
        let step = (hi - lo) / (self.n_mz - 1) as f64;
        (0..self.n_mz)
            .map(|j| {
                if j + 1 == self.n_mz {
                    hi
                } else {
                    lo + step * j as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Background,
    Circle,
    Square,
}

/// Per-pixel region labels, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    pub width: usize,
    pub height: usize,
    pub regions: Vec<Region>,
}

impl RegionMask {
    pub fn foreground(&self) -> Vec<bool> {
        self.regions
            .iter()
            .map(|r| *r != Region::Background)
            .collect()
    }

    pub fn to_grid(&self) -> Grid {
        let values = self
            .regions
            .iter()
            .map(|r| if *r == Region::Background { 0.0 } else { 1.0 })
            .collect();
        Grid::new(self.width, self.height, values).expect("mask geometry")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Index on the m/z axis.
    pub center: usize,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub image: MSImage,
    pub mask: RegionMask,
    pub circle_peaks: Vec<Peak>,
    pub square_peaks: Vec<Peak>,
}

fn region_of(size: usize, x: usize, y: usize) -> Region {
    let s = size as f64;
    let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
    let (cx, cy, r) = (0.28 * s, 0.28 * s, 0.2 * s);
    if (px - cx).powi(2) + (py - cy).powi(2) <= r * r {
        return Region::Circle;
    }
    let (lo, hi) = (0.55 * s, 0.85 * s);
    if (lo..=hi).contains(&px) && (lo..=hi).contains(&py) {
        return Region::Square;
    }
    Region::Background
}

fn draw_peaks(spec: &SimulationSpec) -> (Vec<Peak>, Vec<Peak>) {
    let mut rng = rng_for(spec.seed, 0);
    // Uniform over configurations with the minimum spacing: draw offsets in a
    // shortened range, sort, then spread them out.
    let slack = spec.n_mz - 1 - (spec.n_peaks - 1) * MIN_PEAK_SPACING;
    let mut offsets: Vec<usize> = (0..spec.n_peaks)
        .map(|_| rng.random_range(0..=slack))
        .collect();
    offsets.sort_unstable();
    let mut peaks: Vec<Peak> = offsets
        .iter()
        .enumerate()
        .map(|(i, &o)| Peak {
            center: o + i * MIN_PEAK_SPACING,
            height: rng.random_range(PEAK_HEIGHT_RANGE.0..=PEAK_HEIGHT_RANGE.1),
        })
        .collect();
    peaks.shuffle(&mut rng);
    let square = peaks.split_off(spec.n_peaks.div_ceil(2));
    let mut circle = peaks;
    circle.sort_by_key(|p| p.center);
    let mut square = square;
    square.sort_by_key(|p| p.center);
    (circle, square)
}

fn render(peaks: &[Peak], baseline: f64, n_mz: usize) -> Vec<f64> {
    let mut spectrum = vec![baseline; n_mz];
    let two_var = 2.0 * PEAK_WIDTH_STEPS * PEAK_WIDTH_STEPS;
    for p in peaks {
        let lo = p.center.saturating_sub(PEAK_HALF_SUPPORT);
        let hi = (p.center + PEAK_HALF_SUPPORT).min(n_mz - 1);
        for (j, v) in spectrum.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let d = j as f64 - p.center as f64;
            *v += p.height * (-d * d / two_var).exp();
        }
    }
    spectrum
}

/// Noiseless image; `spec.noise` is not applied here.
pub fn generate_ground_truth(spec: &SimulationSpec) -> Result<GroundTruth> {
    spec.validate()?;
    let (circle_peaks, square_peaks) = draw_peaks(spec);
    let circle = render(&circle_peaks, spec.baseline, spec.n_mz);
    let square = render(&square_peaks, spec.baseline, spec.n_mz);
    let background = vec![spec.baseline; spec.n_mz];

    let size = spec.size;
    let mut regions = Vec::with_capacity(size * size);
    let mut data = Vec::with_capacity(size * size * spec.n_mz);
    for y in 0..size {
        for x in 0..size {
            let region = region_of(size, x, y);
            regions.push(region);
            data.extend_from_slice(match region {
                Region::Background => &background,
                Region::Circle => &circle,
                Region::Square => &square,
            });
        }
    }
    Ok(GroundTruth {
        image: MSImage::new(size, size, spec.mz_axis(), data)?,
        mask: RegionMask {
            width: size,
            height: size,
            regions,
        },
        circle_peaks,
        square_peaks,
    })
}

/// Adds noise pixel by pixel; pixel `i` draws from its own stream derived
/// from `seed` and `i`.
pub fn add_noise(image: &MSImage, noise: NoiseModel, seed: u64) -> Result<MSImage> {
    noise.validate()?;
    let q = image.mz().len();
    let mut data = image.data().to_vec();
    let master = derive_seed(seed, NOISE_STREAM);
    match noise {
        NoiseModel::None
        | NoiseModel::Gaussian { sd: 0.0 }
        | NoiseModel::Poisson { lambda: 0.0 } => {}
        NoiseModel::Gaussian { sd } => {
            let normal = Normal::new(0.0, sd).expect("validated sd");
            data.par_chunks_mut(q).enumerate().for_each(|(i, px)| {
                let mut rng = rng_for(master, i as u64);
                for v in px {
                    *v = (*v + normal.sample(&mut rng)).max(0.0);
                }
            });
        }
        NoiseModel::Poisson { lambda } => {
            let poisson = Poisson::new(lambda).expect("validated lambda");
            data.par_chunks_mut(q).enumerate().for_each(|(i, px)| {
                let mut rng = rng_for(master, i as u64);
                for v in px {
                    *v += poisson.sample(&mut rng);
                }
            });
        }
    }
    Ok(image.with_data(data))
}

/// Ground truth with `spec.noise` added, seeded with `spec.seed`.
pub fn simulate(spec: &SimulationSpec) -> Result<(GroundTruth, MSImage)> {
    let truth = generate_ground_truth(spec)?;
    let noisy = add_noise(&truth.image, spec.noise, spec.seed)?;
    Ok((truth, noisy))
}

/// Replaces each pixel's spectrum by its top-k reduced persistence
/// transformation: zero everywhere except at retained peaks, which carry their
/// persistence.
pub fn denoise(image: &MSImage, k: f64) -> Result<MSImage> {
    check_percentage(k)?;
    let q = image.mz().len();
    let mut data = vec![0.0; image.data().len()];
    data.par_chunks_mut(q)
        .zip(image.data().par_chunks(q))
        .try_for_each(|(out, px)| -> Result<()> {
            out.copy_from_slice(&persistence_row(px, k)?);
            Ok(())
        })?;
    Ok(image.with_data(data))
}

/// Arithmetic mean of each pixel's spectrum.
pub fn mean_image(image: &MSImage) -> Grid {
    let q = image.mz().len() as f64;
    let values = image
        .pixels()
        .map(|px| px.iter().sum::<f64>() / q)
        .collect();
    Grid::new(image.width(), image.height(), values).expect("image geometry")
}

/// Otsu's threshold over a 256-bin histogram; values strictly above it are
/// foreground. A constant grid yields its value (no foreground).
pub fn otsu_threshold(values: &[f64]) -> f64 {
    const BINS: usize = 256;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
        return max;
    }
    let width = (max - min) / BINS as f64;
    let mut hist = [0usize; BINS];
    for &v in values {
        let b = (((v - min) / width) as usize).min(BINS - 1);
        hist[b] += 1;
    }
    let total = values.len() as f64;
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let (mut best_t, mut best_var) = (0, -1.0);
    for (t, &c) in hist.iter().enumerate().take(BINS - 1) {
        w0 += c as f64;
        sum0 += t as f64 * c as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let mu0 = sum0 / w0;
        let mu1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (mu0 - mu1).powi(2);
        if between > best_var {
            best_var = between;
            best_t = t;
        }
    }
    min + width * (best_t + 1) as f64
}

pub fn threshold_mask(grid: &Grid) -> Vec<bool> {
    let t = otsu_threshold(grid.values());
    grid.values().iter().map(|&v| v > t).collect()
}

/// Intersection over union of two masks; two empty masks agree perfectly.
pub fn iou(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// IoU between the Otsu-thresholded mean image and the shape mask.
pub fn recovery_iou(image: &MSImage, mask: &RegionMask) -> f64 {
    iou(&threshold_mask(&mean_image(image)), &mask.foreground())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub pixels: usize,
    pub seconds: f64,
    pub seconds_per_pixel: f64,
    /// Time relative to the first size in the run.
    pub time_ratio: f64,
    pub pixel_ratio: f64,
}

/// Times [`denoise`] on noisy images of each size (generation and noise are
/// not timed). After one untimed warm-up run, `repeats` rounds each time every
/// size once, so slow drift in machine load hits all sizes alike; the fastest
/// run per size is kept.
pub fn bench_denoise(
    base: &SimulationSpec,
    sizes: &[usize],
    k: f64,
    repeats: usize,
) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() {
        return Err(Error::InvalidParameter(
            "bench needs at least one size".into(),
        ));
    }
    check_percentage(k)?;
    let images = sizes
        .iter()
        .map(|&size| Ok(simulate(&SimulationSpec { size, ..*base })?.1))
        .collect::<Result<Vec<MSImage>>>()?;
    drop(denoise(&images[0], k)?);

    let mut best = vec![f64::INFINITY; sizes.len()];
    for _ in 0..repeats.max(1) {
        for (image, seconds) in images.iter().zip(best.iter_mut()) {
            let started = Instant::now();
            let denoised = denoise(image, k)?;
            *seconds = seconds.min(started.elapsed().as_secs_f64());
            drop(denoised);
        }
    }

    let (t0, p0) = (best[0], (sizes[0] * sizes[0]) as f64);
    Ok(sizes
        .iter()
        .zip(best)
        .map(|(&size, seconds)| {
            let pixels = size * size;
            log::info!("denoised {size}x{size} in {seconds:.3} s");
            BenchRow {
                size,
                pixels,
                seconds,
                seconds_per_pixel: seconds / pixels as f64,
                time_ratio: seconds / t0,
                pixel_ratio: pixels as f64 / p0,
            }
        })
        .collect())
}

/// `size,pixels,seconds,seconds_per_pixel,time_ratio,pixel_ratio` with a header.
pub fn write_bench_csv(rows: &[BenchRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::from("size,pixels,seconds,seconds_per_pixel,time_ratio,pixel_ratio\n");
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.size, r.pixels, r.seconds, r.seconds_per_pixel, r.time_ratio, r.pixel_ratio
        ));
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| Error::io(path, e))
}
