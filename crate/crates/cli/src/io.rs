//! File formats.
//!
//! Sequences and matrices are JSON documents with complex entries written as
//! `[re, im]` pairs. Floats are printed in shortest round-trip form and parsed
//! with correct rounding, so a write followed by a read reproduces every entry
//! bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use framekz::hilbert::{CMatrix, HVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type Entry = [f64; 2];

pub fn entry(z: Complex64) -> Entry {
    [z.re, z.im]
}

pub fn complex(e: Entry) -> Complex64 {
    Complex64::new(e[0], e[1])
}

/// A finite sequence of vectors in `ℂ^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub dim: usize,
    pub vectors: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl SequenceFile {
    pub fn from_vectors(vs: &[HVector]) -> Self {
        SequenceFile {
            dim: vs.first().map_or(0, |v| v.len()),
            vectors: vs.iter().map(|v| v.iter().copied().map(entry).collect()).collect(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// Checks shape and finiteness.
    pub fn validate(&self) -> Result<(), String> {
        if self.vectors.is_empty() {
            return Err("no vectors".into());
        }
        if self.dim == 0 {
            return Err("dim must be at least 1".into());
        }
        for (i, row) in self.vectors.iter().enumerate() {
            if row.len() != self.dim {
                return Err(format!("vector {i} has {} entries, dim is {}", row.len(), self.dim));
            }
            if row.iter().flatten().any(|x| !x.is_finite()) {
                return Err(format!("vector {i} has a non-finite entry"));
            }
        }
        Ok(())
    }

    pub fn to_vectors(&self) -> Vec<HVector> {
        self.vectors
            .iter()
            .map(|row| HVector::from_iterator(row.len(), row.iter().copied().map(complex)))
            .collect()
    }
}

/// A dense complex matrix, stored row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl MatrixFile {
    pub fn from_matrix(a: &CMatrix) -> Self {
        MatrixFile {
            rows: a.nrows(),
            cols: a.ncols(),
            entries: a.row_iter().map(|r| r.iter().copied().map(entry).collect()).collect(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.entries.len() != self.rows {
            return Err(format!("{} rows listed, rows is {}", self.entries.len(), self.rows));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(format!("row {i} has {} entries, cols is {}", row.len(), self.cols));
            }
            if row.iter().flatten().any(|x| !x.is_finite()) {
                return Err(format!("row {i} has a non-finite entry"));
            }
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| complex(self.entries[i][j]))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.into(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json { path: path.into(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Write { path: path.into(), source })
}

pub fn read_sequence(path: &Path) -> Result<SequenceFile, IoError> {
    let file: SequenceFile = read_json(path)?;
    file.validate().map_err(|message| IoError::Format { path: path.into(), message })?;
    Ok(file)
}

pub fn read_matrix(path: &Path) -> Result<MatrixFile, IoError> {
    let file: MatrixFile = read_json(path)?;
    file.validate().map_err(|message| IoError::Format { path: path.into(), message })?;
    Ok(file)
}

/// Parses a target vector: a JSON array of numbers or `[re, im]` pairs, or a
/// comma-separated list of real numbers.
pub fn parse_vector(text: &str) -> Result<HVector, String> {
    let text = text.trim();
    if text.starts_with('[') {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Item {
            Real(f64),
            Pair(Entry),
        }
        let items: Vec<Item> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let entries: Vec<Complex64> = items
            .into_iter()
            .map(|it| match it {
                Item::Real(x) => Complex64::new(x, 0.0),
                Item::Pair(p) => complex(p),
            })
            .collect();
        return finite_vector(entries);
    }
    let entries = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    finite_vector(entries)
}

fn finite_vector(entries: Vec<Complex64>) -> Result<HVector, String> {
    if entries.is_empty() {
        return Err("empty vector".into());
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err("non-finite entry".into());
    }
    Ok(HVector::from_vec(entries))
}

pub fn read_vector(path: &Path) -> Result<HVector, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })?;
    parse_vector(&text).map_err(|message| IoError::Format { path: path.into(), message })
}

/// Output of `chol`: the factor, 1-based pivot indices and pivot-block
/// determinants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CholeskyFile {
    pub v: MatrixFile,
    pub pivots: Vec<usize>,
    pub deltas: Vec<f64>,
    pub rank: usize,
}

pub fn read_cholesky(path: &Path) -> Result<CholeskyFile, IoError> {
    let file: CholeskyFile = read_json(path)?;
    file.v.validate().map_err(|message| IoError::Format { path: path.into(), message })?;
    Ok(file)
}
