//! Persistence transformation of one-dimensional spectra.
//!
//! The crate computes, for every local maximum of a spectrum, the triple
//! `(position, birth, death)` of the zero-dimensional feature it creates in the
//! upper-level set filtration. The reduced form keeps only
//! `(position, persistence)`, which is what the denoising and classification
//! pipelines consume.
//!
//! Module map:
//!
//! - [`spectrum`] and [`io`]: data model and CSV/PGM interchange.
//! - [`persistence`]: extrema detection, the recursive transform, the
//!   threshold-sweep reference implementation, reduction and top-k filtering.
//! - [`diagram`]: persistence diagrams and the bottleneck distance.
//! - [`features`]: dense persistence feature matrices.
//! - [`classify`]: logistic regression, random forest, balanced accuracy and
//!   group cross-validation.
//! - [`simulate`]: synthetic MS images, noise injection and denoising.

pub mod classify;
pub mod diagram;
pub mod error;
pub mod features;
pub mod io;
pub mod persistence;
pub mod seed;
pub mod simulate;
pub mod spectrum;

pub use error::{Error, Result};
pub use spectrum::{Grid, LabeledDataset, MSImage, Spectrum};
