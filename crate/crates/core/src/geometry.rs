//! QR oriented orthants.
//!
//! An oriented orthant with vertex `x` in direction `u` is the set
//! `{ z : R_u (z - x) >= 0 }` where `R_u` is orthogonal and maps `u` onto the
//! main diagonal `e = (1/sqrt(n), ..., 1/sqrt(n))`. Many such `R_u` exist for
//! `n >= 3`; the one used here is pinned down by two QR factorizations with a
//! positive triangular diagonal:
//!
//! ```text
//! M_u = [u, sgn(u_2) e_2, ..., sgn(u_n) e_n] = Q_u T_u
//! M_e = [e, e_2, ..., e_n]                   = Q_e T_e
//! R_u = Q_e Q_u^T
//! ```
//!
//! Both `M` matrices have full rank as long as no component of `u` is zero,
//! which is why [`DirectionVector`] rejects zero components outright.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::sample::{Sample, SampleError};

/// Components with magnitude below this are treated as zero.
pub const ZERO_COMPONENT_TOL: f64 = 1e-12;
/// Maximum accepted deviation of `||u||` from one.
pub const UNIT_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("direction needs at least 2 components, got {0}")]
    TooFewDimensions(usize),
    #[error("direction component {index} is non-finite")]
    NonFinite { index: usize },
    #[error("direction component {index} = {value:e} is zero; QR orthant requires all components non-zero")]
    ZeroComponent { index: usize, value: f64 },
    #[error("direction is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// A unit vector with every component non-zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionVector(Vec<f64>);

impl DirectionVector {
    /// Validates `components` as an admissible analysis direction.
    ///
    /// Vectors whose norm is within [`UNIT_NORM_TOL`] of one are accepted and,
    /// if the deviation exceeds `1e-12`, rescaled to unit length.
    pub fn new(components: Vec<f64>) -> Result<Self, GeometryError> {
        let norm = check_components(&components)?;
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(GeometryError::NotUnit { norm });
        }
        let components = if (norm - 1.0).abs() > 1e-12 {
            components.into_iter().map(|c| c / norm).collect()
        } else {
            components
        };
        Ok(DirectionVector(components))
    }

    /// Scales an arbitrary non-zero vector to unit length, then validates it.
    pub fn normalized(components: Vec<f64>) -> Result<Self, GeometryError> {
        let norm = check_components(&components)?;
        Ok(DirectionVector(
            components.into_iter().map(|c| c / norm).collect(),
        ))
    }

    /// The main diagonal `e = (sqrt(n)/n) [1, ..., 1]`.
    pub fn canonical(n: usize) -> Result<Self, GeometryError> {
        if n < 2 {
            return Err(GeometryError::TooFewDimensions(n));
        }
        Ok(DirectionVector(vec![canonical_component(n); n]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// The opposite direction `-u`.
    pub fn negated(&self) -> Self {
        DirectionVector(self.0.iter().map(|c| -c).collect())
    }

    /// True when this is bitwise the canonical diagonal of its dimension.
    pub fn is_canonical(&self) -> bool {
        let c = canonical_component(self.dim());
        self.0.iter().all(|&v| v.to_bits() == c.to_bits())
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

#[inline]
pub(crate) fn canonical_component(n: usize) -> f64 {
    (n as f64).sqrt() / n as f64
}

fn check_components(components: &[f64]) -> Result<f64, GeometryError> {
    if components.len() < 2 {
        return Err(GeometryError::TooFewDimensions(components.len()));
    }
    for (index, &value) in components.iter().enumerate() {
        if !value.is_finite() {
            return Err(GeometryError::NonFinite { index });
        }
    }
    let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(GeometryError::ZeroComponent {
            index: 0,
            value: 0.0,
        });
    }
    for (index, &value) in components.iter().enumerate() {
        if (value / norm).abs() < ZERO_COMPONENT_TOL {
            return Err(GeometryError::ZeroComponent { index, value });
        }
    }
    Ok(norm)
}

/// The orthogonal matrix `R_u = Q_e Q_u^T` of the QR oriented orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    /// Row-major `n x n` entries.
    entries: Vec<f64>,
    n: usize,
    identity: bool,
    source: DirectionVector,
}

impl RotationMatrix {
    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn source_direction(&self) -> &DirectionVector {
        &self.source
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Whether the matrix is exactly the identity (only for `u = e`).
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    /// Writes `R x` into `out`.
    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        if self.identity {
            out.copy_from_slice(x);
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(r, v)| r * v).sum::<f64>();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        check_dim(self.n, x.len())?;
        let mut out = vec![0.0; self.n];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// Applies `R^T = R^{-1}`, undoing the rotation.
    pub fn apply_inverse(&self, y: &[f64]) -> Result<Vec<f64>, GeometryError> {
        check_dim(self.n, y.len())?;
        if self.identity {
            return Ok(y.to_vec());
        }
        Ok((0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j) * y[i]).sum())
            .collect())
    }
}

#[inline]
fn check_dim(expected: usize, found: usize) -> Result<(), GeometryError> {
    if expected != found {
        Err(GeometryError::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Householder QR of a square matrix, normalised so that the triangular
/// factor has a non-negative diagonal.
///
/// Returns `(Q, T)` with `A = Q T`.
pub fn qr_positive(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "qr_positive expects a square matrix");
    let mut t = a.clone();
    let mut q = DMatrix::<f64>::identity(n, n);
    let mut v = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let norm_x = (k..n).map(|i| t[(i, k)] * t[(i, k)]).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let alpha = if t[(k, k)] >= 0.0 { -norm_x } else { norm_x };
        for i in k..n {
            v[i] = t[(i, k)];
        }
        v[k] -= alpha;
        let norm_v = (k..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        if norm_v == 0.0 {
            continue;
        }
        for vi in &mut v[k..n] {
            *vi /= norm_v;
        }
        // T <- (I - 2 v v^T) T on the trailing block
        for j in k..n {
            let s: f64 = (k..n).map(|i| v[i] * t[(i, j)]).sum();
            for i in k..n {
                t[(i, j)] -= 2.0 * v[i] * s;
            }
        }
        // Q <- Q (I - 2 v v^T)
        for i in 0..n {
            let s: f64 = (k..n).map(|j| q[(i, j)] * v[j]).sum();
            for j in k..n {
                q[(i, j)] -= 2.0 * s * v[j];
            }
        }
        for i in k + 1..n {
            t[(i, k)] = 0.0;
        }
    }

    for k in 0..n {
        if t[(k, k)] < 0.0 {
            for i in 0..n {
                q[(i, k)] = -q[(i, k)];
            }
            for j in 0..n {
                t[(k, j)] = -t[(k, j)];
            }
        }
    }
    (q, t)
}

/// `M_u = [u, sgn(u_2) e_2, ..., sgn(u_n) e_n]`.
pub fn basis_matrix(u: &DirectionVector) -> DMatrix<f64> {
    let n = u.dim();
    let c = u.components();
    DMatrix::from_fn(n, n, |i, j| match j {
        0 => c[i],
        _ if i == j => c[j].signum(),
        _ => 0.0,
    })
}

/// Builds the unique QR oriented-orthant rotation for `u`.
pub fn build_rotation(u: &DirectionVector) -> RotationMatrix {
    let n = u.dim();
    if u.is_canonical() {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        return RotationMatrix {
            entries,
            n,
            identity: true,
            source: u.clone(),
        };
    }
    let e = DirectionVector::canonical(n).expect("n >= 2 by construction");
    let (q_u, _) = qr_positive(&basis_matrix(u));
    let (q_e, _) = qr_positive(&basis_matrix(&e));
    let r = q_e * q_u.transpose();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(r[(i, j)]);
        }
    }
    RotationMatrix {
        entries,
        n,
        identity: false,
        source: u.clone(),
    }
}

/// Whether `z` lies in the closed QR oriented orthant with the given vertex.
pub fn orthant_contains(
    vertex: &[f64],
    u: &DirectionVector,
    z: &[f64],
) -> Result<bool, GeometryError> {
    check_dim(u.dim(), vertex.len())?;
    check_dim(u.dim(), z.len())?;
    let r = build_rotation(u);
    Ok(contains_with(&r, vertex, z))
}

/// Orthant membership with a prebuilt rotation; `R (z - x) >= 0` evaluated
/// on the difference vector.
pub fn contains_with(r: &RotationMatrix, vertex: &[f64], z: &[f64]) -> bool {
    let n = r.dim();
    if r.is_identity() {
        return z.iter().zip(vertex).all(|(a, b)| a - b >= 0.0);
    }
    (0..n).all(|i| {
        r.row(i)
            .iter()
            .zip(z.iter().zip(vertex))
            .map(|(rij, (zj, xj))| rij * (zj - xj))
            .sum::<f64>()
            >= 0.0
    })
}

/// Replaces each row `x` of `s` by `R_u x`, keeping row order and column names.
pub fn rotate_sample(s: &Sample, u: &DirectionVector) -> Result<Sample, GeometryError> {
    check_dim(u.dim(), s.ncols())?;
    let r = build_rotation(u);
    Ok(rotate_with(&r, s))
}

pub fn rotate_with(r: &RotationMatrix, s: &Sample) -> Sample {
    let n = s.ncols();
    let mut out = vec![0.0; s.nrows() * n];
    for (x, y) in s.rows().zip(out.chunks_exact_mut(n)) {
        r.apply_into(x, y);
    }
    Sample::from_flat_named(out, n, s.column_names().to_vec())
        .expect("rotation of a valid sample is valid")
}
