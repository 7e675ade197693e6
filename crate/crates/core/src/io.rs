//! CSV ingestion and emission, run configuration, and direction parsing.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::{DetectionResult, Mode};
use crate::directions::{classical_from_pattern, first_pca_direction, DirectionError, PcaScaling};
use crate::geometry::{DirectionVector, GeometryError};
use crate::sample::{Sample, SampleError};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },
    #[error("non-finite value {value:?} at line {line}, column {column}")]
    NonFiniteValue {
        line: u64,
        column: usize,
        value: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0}")]
    SchemaVersion(u32),
    #[error("invalid direction {0:?}: expected \"e\", \"pca\", a sign pattern or comma-separated numbers")]
    DirectionSpec(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Direction(#[from] DirectionError),
}

impl IoError {
    fn file(path: &Path, source: std::io::Error) -> Self {
        IoError::File {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Reads a headed numeric CSV. Lines and columns in errors are 1-based.
pub fn read_csv<R: Read>(reader: R) -> Result<Sample, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(IoError::Parse {
            line: 1,
            column: 1,
            message: "missing header row".into(),
        });
    }
    let n = names.len();
    let mut data = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IoError::Parse {
                line,
                column: 1,
                message: e.to_string(),
            }
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != n {
            return Err(IoError::Parse {
                line,
                column: rec.len().min(n) + 1,
                message: format!("expected {n} fields, found {}", rec.len()),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| IoError::Parse {
                line,
                column: j + 1,
                message: format!("not a number: {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(IoError::NonFiniteValue {
                    line,
                    column: j + 1,
                    value: cell.to_string(),
                });
            }
            data.push(v);
        }
    }
    if data.is_empty() {
        return Err(IoError::Parse {
            line: 2,
            column: 1,
            message: "no data rows".into(),
        });
    }
    Ok(Sample::from_flat_named(data, n, names)?)
}

pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Sample, IoError> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| IoError::file(path, e))?;
    read_csv(f)
}

/// Shortest representation that parses back to the same `f64`.
#[inline]
pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

pub fn write_csv<W: Write>(s: &Sample, writer: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(s.column_names())?;
    for row in s.rows() {
        w.write_record(row.iter().map(|v| format_f64(*v)))?;
    }
    w.flush()
        .map_err(|e| IoError::file(Path::new("<output>"), e))?;
    Ok(())
}

pub fn save_csv<P: AsRef<Path>>(s: &Sample, path: P) -> Result<(), IoError> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| IoError::file(path, e))?;
    write_csv(s, std::io::BufWriter::new(f))
}

/// Input columns followed by `P` (orthant probability) and `label`.
pub fn write_labeled_csv<W: Write>(
    s: &Sample,
    det: &DetectionResult,
    writer: W,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = s.column_names().iter().map(String::as_str).collect();
    header.extend(["P", "label"]);
    w.write_record(&header)?;
    for (i, row) in s.rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
        rec.push(format_f64(det.probabilities[i].value()));
        rec.push(det.labels[i].as_str().to_string());
        w.write_record(&rec)?;
    }
    w.flush()
        .map_err(|e| IoError::file(Path::new("<output>"), e))?;
    Ok(())
}

/// How the analysis direction is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirectionSpec {
    /// `"e"`, `"pca"` or a sign pattern such as `"+-"`.
    Named(String),
    /// Explicit components, normalized to unit length.
    Vector(Vec<f64>),
}

impl Default for DirectionSpec {
    fn default() -> Self {
        DirectionSpec::Named("e".into())
    }
}

impl DirectionSpec {
    /// Parses a command-line value: a name, a sign pattern or a
    /// comma-separated vector.
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let t = text.trim();
        if t == "e" || t == "pca" || (!t.is_empty() && t.chars().all(|c| c == '+' || c == '-')) {
            return Ok(DirectionSpec::Named(t.to_string()));
        }
        let comps: Result<Vec<f64>, _> = t.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match comps {
            Ok(v) if v.len() >= 2 => Ok(DirectionSpec::Vector(v)),
            _ => Err(IoError::DirectionSpec(text.to_string())),
        }
    }

    /// Resolves against a sample (needed for `"pca"` and the dimension of `"e"`).
    pub fn resolve(&self, s: &Sample, scaling: PcaScaling) -> Result<DirectionVector, IoError> {
        let n = s.ncols();
        let u = match self {
            DirectionSpec::Named(name) if name == "e" => DirectionVector::canonical(n)?,
            DirectionSpec::Named(name) if name == "pca" => {
                first_pca_direction(s, scaling)?.direction
            }
            DirectionSpec::Named(pattern) => classical_from_pattern(pattern)?,
            DirectionSpec::Vector(v) => DirectionVector::normalized(v.clone())?,
        };
        if u.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: u.dim(),
            }
            .into());
        }
        Ok(u)
    }
}

/// A detection run as read from JSON or assembled from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "config_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub mode: Mode,
    pub alpha: f64,
    #[serde(default)]
    pub slack: Option<f64>,
    #[serde(default)]
    pub direction: DirectionSpec,
    #[serde(default)]
    pub pca_scaling: PcaScaling,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn config_version() -> u32 {
    CONFIG_SCHEMA_VERSION
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let c: RunConfig = serde_json::from_str(text)?;
        if c.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(IoError::SchemaVersion(c.schema_version));
        }
        Ok(c)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, IoError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_small_file() {
        let s = read_csv("a,b\n1,2\n3,4\n5,6\n".as_bytes()).unwrap();
        assert_eq!((s.nrows(), s.ncols()), (3, 2));
        assert_eq!(s.column_names(), &["a", "b"]);
        assert_eq!(s.row(2), &[5.0, 6.0]);
    }

    #[test]
    fn reports_locations() {
        match read_csv("a,b\n1,2\n3,NaN\n".as_bytes()) {
            Err(IoError::NonFiniteValue { line, column, .. }) => assert_eq!((line, column), (3, 2)),
            other => panic!("{other:?}"),
        }
        match read_csv("a,b\n1,x\n".as_bytes()) {
            Err(IoError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            read_csv("a,b\n1\n".as_bytes()),
            Err(IoError::Parse { .. })
        ));
        assert!(matches!(
            read_csv("a,b\n".as_bytes()),
            Err(IoError::Parse { .. })
        ));
    }

    #[test]
    fn bitwise_roundtrip() {
        let vals = [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            781.1187,
        ];
        let s = Sample::from_flat(vals.to_vec(), 2).unwrap();
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(
            back.as_flat()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>(),
            vals.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn direction_specs() {
        let s = Sample::from_rows(&[[0.0, 0.0], [1.0, 2.0], [2.0, 3.9]]).unwrap();
        let e = DirectionSpec::parse("e")
            .unwrap()
            .resolve(&s, PcaScaling::Covariance)
            .unwrap();
        assert!(e.is_canonical());
        let v = DirectionSpec::parse("-1, 1")
            .unwrap()
            .resolve(&s, PcaScaling::Covariance)
            .unwrap();
        assert!((v.components()[0] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(DirectionSpec::parse("+-+")
            .unwrap()
            .resolve(&s, PcaScaling::Covariance)
            .is_err());
        assert!(DirectionSpec::parse("north").is_err());
        assert!(DirectionSpec::parse("1,0")
            .unwrap()
            .resolve(&s, PcaScaling::Covariance)
            .is_err());
    }

    #[test]
    fn config_json() {
        let c = RunConfig::from_json(r#"{"alpha":0.05,"direction":[1,-1],"mode":"distribution"}"#)
            .unwrap();
        assert_eq!(c.direction, DirectionSpec::Vector(vec![1.0, -1.0]));
        assert_eq!(c.mode, Mode::Distribution);
        assert_eq!(c.schema_version, 1);
        assert!(RunConfig::from_json(r#"{"schema_version":2,"alpha":0.05}"#).is_err());
    }
}
