//! JSON coloring files: `{"k": K, "chi": [...]}` for integral colorings,
//! `{"k": K, "Y": [[...], ...]}` for fractional ones.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{ColoringError, FractionalColoring, IntegralColoring};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ColoringFileError {
    #[error("malformed coloring file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("file declares k = {declared} but rows have {rows} entries")]
    RowWidth { declared: usize, rows: usize },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColoringFile {
    Integral(IntegralColoring),
    Fractional(FractionalColoring<f64>),
}

impl ColoringFile {
    pub fn k(&self) -> usize {
        match self {
            ColoringFile::Integral(c) => c.k(),
            ColoringFile::Fractional(y) => y.k(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ColoringFile::Integral(c) => c.n(),
            ColoringFile::Fractional(y) => y.n(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum Raw {
    Integral {
        k: usize,
        chi: Vec<usize>,
    },
    Fractional {
        k: usize,
        #[serde(rename = "Y")]
        y: Vec<Vec<f64>>,
    },
}

#[derive(Serialize)]
struct RawIntegral<'a> {
    k: usize,
    chi: &'a [usize],
}

#[derive(Serialize)]
struct RawFractional {
    k: usize,
    #[serde(rename = "Y")]
    y: Vec<Vec<f64>>,
}

pub fn read_coloring(text: &str) -> Result<ColoringFile, ColoringFileError> {
    match serde_json::from_str::<Raw>(text)? {
        Raw::Integral { k, chi } => Ok(ColoringFile::Integral(IntegralColoring::new(k, chi)?)),
        Raw::Fractional { k, y } => {
            if let Some(row) = y.iter().find(|r| r.len() != k) {
                return Err(ColoringFileError::RowWidth {
                    declared: k,
                    rows: row.len(),
                });
            }
            if y.is_empty() {
                return Ok(ColoringFile::Fractional(FractionalColoring::uniform(0, k)));
            }
            Ok(ColoringFile::Fractional(FractionalColoring::from_rows(y)?))
        }
    }
}

pub fn write_coloring(chi: &IntegralColoring) -> String {
    let mut s = serde_json::to_string(&RawIntegral {
        k: chi.k(),
        chi: chi.colors(),
    })
    .expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_fractional<T: Scalar>(y: &FractionalColoring<T>) -> String {
    let mut s = serde_json::to_string(&RawFractional {
        k: y.k(),
        y: y.to_rows_f64(),
    })
    .expect("plain data serializes");
    s.push('\n');
    s
}
