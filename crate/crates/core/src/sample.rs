//! Dense row-major observation matrices.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("sample has no rows")]
    Empty,
    #[error("sample has no columns")]
    NoColumns,
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{found} column names given for {expected} columns")]
    NameCount { expected: usize, found: usize },
    #[error("non-finite value {value} at row {row}, column {column}")]
    NonFinite {
        row: usize,
        column: usize,
        value: f64,
    },
}

/// An `m x n` matrix of finite observations with named columns.
///
/// Rows are points, columns are variables. The buffer is immutable once
/// built; transformations produce a new `Sample`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    data: Vec<f64>,
    nrows: usize,
    ncols: usize,
    names: Vec<String>,
}

impl Sample {
    /// Builds a sample from a row-major buffer, using default column names
    /// `x1..xn`.
    pub fn from_flat(data: Vec<f64>, ncols: usize) -> Result<Self, SampleError> {
        let names = default_names(ncols);
        Self::from_flat_named(data, ncols, names)
    }

    pub fn from_flat_named(
        data: Vec<f64>,
        ncols: usize,
        names: Vec<String>,
    ) -> Result<Self, SampleError> {
        if ncols == 0 {
            return Err(SampleError::NoColumns);
        }
        if data.is_empty() {
            return Err(SampleError::Empty);
        }
        if !data.len().is_multiple_of(ncols) {
            let nrows = data.len() / ncols;
            return Err(SampleError::RaggedRow {
                row: nrows,
                expected: ncols,
                found: data.len() % ncols,
            });
        }
        if names.len() != ncols {
            return Err(SampleError::NameCount {
                expected: ncols,
                found: names.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(SampleError::NonFinite {
                row: pos / ncols,
                column: pos % ncols,
                value: data[pos],
            });
        }
        Ok(Sample {
            nrows: data.len() / ncols,
            data,
            ncols,
            names,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, SampleError> {
        let first = rows.first().ok_or(SampleError::Empty)?;
        let ncols = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(SampleError::RaggedRow {
                    row: i,
                    expected: ncols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, ncols)
    }

    /// Returns a copy of this sample with different column names.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, SampleError> {
        if names.len() != self.ncols {
            return Err(SampleError::NameCount {
                expected: self.ncols,
                found: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.ncols)
    }

    pub fn column(&self, j: usize) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    /// Row-major view of all values.
    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }
}

pub(crate) fn default_names(ncols: usize) -> Vec<String> {
    (1..=ncols).map(|j| format!("x{j}")).collect()
}
