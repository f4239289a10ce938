//! CSV and PGM interchange.
//!
//! Formats:
//!
//! - spectrum: `mz,intensity` per line, no header;
//! - dataset: a header row of `q` m/z values, then one row of `q` intensities
//!   per spectrum; labels live in a separate `label,group` file aligned by row;
//! - features: `position_index,mz,birth,death,persistence` per line, or
//!   `position_index,mz,persistence` for the reduced form;
//! - diagram: `birth,death` per line;
//! - feature matrix: header row = m/z axis, one persistence vector per row;
//! - PGM: binary P5 with maxval 255.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::persistence::{FeatureTriple, PersistencePair};
use crate::spectrum::{Grid, LabeledDataset, Spectrum};

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(None)
        .from_reader(file))
}

fn writer(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(BufWriter::new(file))
}

fn parse_error(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        row,
        message: message.into(),
    }
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    let row = err.position().map(|p| p.line() as usize).unwrap_or(0);
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => parse_error(path, row, format!("{other:?}")),
    }
}

fn parse_f64(path: &Path, row: usize, field: &str) -> Result<f64> {
    let value: f64 = field
        .parse()
        .map_err(|_| parse_error(path, row, format!("`{field}` is not a number")))?;
    if !value.is_finite() {
        return Err(parse_error(path, row, format!("`{field}` is not finite")));
    }
    Ok(value)
}

/// Reads an `mz,intensity` file, sorting rows by m/z.
pub fn load_spectrum_csv(path: impl AsRef<Path>) -> Result<Spectrum> {
    let path = path.as_ref();
    let mut rows = Vec::new();
    for record in reader(path)?.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_error(
                path,
                row,
                format!("expected `mz,intensity`, found {} fields", record.len()),
            ));
        }
        let mz = parse_f64(path, row, &record[0])?;
        let intensity = parse_f64(path, row, &record[1])?;
        if intensity < 0.0 {
            return Err(parse_error(
                path,
                row,
                format!("negative intensity {intensity}"),
            ));
        }
        rows.push((mz, intensity, row));
    }
    if rows.is_empty() {
        return Err(Error::InvalidSpectrum(format!(
            "{} contains no data rows",
            path.display()
        )));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(parse_error(
            path,
            w[1].2,
            format!("duplicate m/z value {} (also on row {})", w[1].0, w[0].2),
        ));
    }
    let (mz, intensity) = rows.into_iter().map(|(m, i, _)| (m, i)).unzip();
    Spectrum::new(mz, intensity)
}

pub fn write_spectrum_csv(spectrum: &Spectrum, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = writer(path)?;
    for (mz, v) in spectrum.mz().iter().zip(spectrum.intensity()) {
        writeln!(out, "{mz},{v}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a dataset: intensity matrix with an m/z header plus a `label,group` file.
pub fn load_dataset_csv(
    spectra_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<LabeledDataset> {
    let spectra_path = spectra_path.as_ref();
    let labels_path = labels_path.as_ref();

    let mut mz: Option<Vec<f64>> = None;
    let mut spectra = Vec::new();
    for record in reader(spectra_path)?.records() {
        let record = record.map_err(|e| csv_error(spectra_path, e))?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let values = record
            .iter()
            .map(|f| parse_f64(spectra_path, row, f))
            .collect::<Result<Vec<_>>>()?;
        match &mz {
            None => mz = Some(values),
            Some(axis) => {
                if values.len() != axis.len() {
                    return Err(parse_error(
                        spectra_path,
                        row,
                        format!(
                            "row has {} intensities, header has {} m/z values",
                            values.len(),
                            axis.len()
                        ),
                    ));
                }
                spectra.push(values);
            }
        }
    }
    let mz = mz.ok_or_else(|| {
        Error::InvalidDataset(format!("{} has no header row", spectra_path.display()))
    })?;

    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for record in reader(labels_path)?.records() {
        let record = record.map_err(|e| csv_error(labels_path, e))?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_error(
                labels_path,
                row,
                format!("expected `label,group`, found {} fields", record.len()),
            ));
        }
        let label = match &record[0] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(parse_error(
                    labels_path,
                    row,
                    format!("label `{other}` is not binary (0 or 1)"),
                ))
            }
        };
        labels.push(label);
        groups.push(record[1].to_string());
    }
    if labels.len() != spectra.len() {
        return Err(Error::InvalidDataset(format!(
            "count mismatch: {} spectra but {} labels",
            spectra.len(),
            labels.len()
        )));
    }
    LabeledDataset::new(mz, spectra, labels, groups)
}

pub fn write_dataset_csv(
    dataset: &LabeledDataset,
    spectra_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<()> {
    let spectra_path = spectra_path.as_ref();
    let mut out = writer(spectra_path)?;
    write_row(&mut out, dataset.mz()).map_err(|e| Error::io(spectra_path, e))?;
    for row in dataset.spectra() {
        write_row(&mut out, row).map_err(|e| Error::io(spectra_path, e))?;
    }
    out.flush().map_err(|e| Error::io(spectra_path, e))?;

    let labels_path = labels_path.as_ref();
    let mut out = writer(labels_path)?;
    for (label, group) in dataset.labels().iter().zip(dataset.groups()) {
        writeln!(out, "{label},{group}").map_err(|e| Error::io(labels_path, e))?;
    }
    out.flush().map_err(|e| Error::io(labels_path, e))
}

fn write_row(out: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    for (j, v) in values.iter().enumerate() {
        if j > 0 {
            out.write_all(b",")?;
        }
        write!(out, "{v}")?;
    }
    out.write_all(b"\n")
}

/// Maps a grid to 8-bit grey levels: min-max scaled to 0..=255, rounding half
/// up. A constant grid maps to all zeros.
pub fn pgm_levels(grid: &Grid) -> Vec<u8> {
    let values = grid.values();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|&v| (255.0 * (v - min) / range + 0.5).floor().clamp(0.0, 255.0) as u8)
        .collect()
}

pub fn write_pgm(grid: &Grid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if grid.values().iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter(
            "PGM input must be finite and non-negative".into(),
        ));
    }
    let mut out = writer(path)?;
    let io = |e| Error::io(path, e);
    write!(out, "P5\n{} {}\n255\n", grid.width(), grid.height()).map_err(io)?;
    out.write_all(&pgm_levels(grid)).map_err(io)?;
    out.flush().map_err(io)
}

/// Full feature rows: `position_index,mz,birth,death,persistence`.
pub fn write_triples_csv(
    triples: &[FeatureTriple],
    mz: &[f64],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = writer(path)?;
    for t in triples {
        let x = *mz.get(t.position).ok_or(Error::PositionOutOfRange {
            position: t.position,
            len: mz.len(),
        })?;
        writeln!(
            out,
            "{},{},{},{},{}",
            t.position,
            x,
            t.birth,
            t.death,
            t.persistence()
        )
        .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reduced feature rows: `position_index,mz,persistence`.
pub fn write_pairs_csv(
    pairs: &[PersistencePair],
    mz: &[f64],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = writer(path)?;
    for p in pairs {
        let x = *mz.get(p.position).ok_or(Error::PositionOutOfRange {
            position: p.position,
            len: mz.len(),
        })?;
        writeln!(out, "{},{},{}", p.position, x, p.persistence).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_diagram_csv(diagram: &PersistenceDiagram, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = writer(path)?;
    for p in diagram.points() {
        writeln!(out, "{},{}", p.birth, p.death).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn load_diagram_csv(path: impl AsRef<Path>) -> Result<PersistenceDiagram> {
    let path = path.as_ref();
    let mut points = Vec::new();
    for record in reader(path)?.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_error(path, row, "expected `birth,death`"));
        }
        points.push((
            parse_f64(path, row, &record[0])?,
            parse_f64(path, row, &record[1])?,
        ));
    }
    PersistenceDiagram::from_points(points)
}

pub fn write_matrix_csv(matrix: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = writer(path)?;
    write_row(&mut out, matrix.mz()).map_err(|e| Error::io(path, e))?;
    for i in 0..matrix.n_rows() {
        write_row(&mut out, matrix.row(i)).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
