//! Analysis directions: the `2^n` classical orthant directions and the first
//! principal component of a sample.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{canonical_component, DirectionVector, GeometryError};
use crate::sample::Sample;

/// Largest dimension for which the classical catalog is enumerated.
pub const MAX_CLASSICAL_DIM: usize = 16;
/// Relative gap below which the two leading eigenvalues count as tied.
pub const EIGEN_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirectionError {
    #[error("classical catalog requested for n = {0}; supported range is 2..=16")]
    DimensionOutOfRange(usize),
    #[error("need at least 2 observations for a covariance matrix, got {0}")]
    TooFewObservations(usize),
    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),
    #[error("leading principal direction is not admissible: {0}")]
    Admissibility(#[from] GeometryError),
    #[error(
        "leading principal direction is orthogonal to the main diagonal; its sign is ambiguous"
    )]
    AmbiguousSign,
    #[error("unknown direction name {0:?}")]
    UnknownName(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedDirection {
    pub name: String,
    pub direction: DirectionVector,
}

/// The `2^n` unit vectors with components `+-1/sqrt(n)`, named by sign
/// pattern (`"+-+"`), in lexicographic order with `+` first.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionCatalog {
    entries: Vec<NamedDirection>,
}

impl DirectionCatalog {
    pub fn entries(&self) -> &[NamedDirection] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&DirectionVector> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| &e.direction)
    }
}

pub fn classical_directions(n: usize) -> Result<DirectionCatalog, DirectionError> {
    if !(2..=MAX_CLASSICAL_DIM).contains(&n) {
        return Err(DirectionError::DimensionOutOfRange(n));
    }
    let c = canonical_component(n);
    let entries = (0..1usize << n)
        .map(|mask| {
            // bit (n-1-k) set means component k is negative
            let comps: Vec<f64> = (0..n)
                .map(|k| if mask >> (n - 1 - k) & 1 == 1 { -c } else { c })
                .collect();
            let name = comps
                .iter()
                .map(|v| if *v > 0.0 { '+' } else { '-' })
                .collect();
            NamedDirection {
                name,
                direction: DirectionVector::new(comps).expect("classical directions are unit"),
            }
        })
        .collect();
    Ok(DirectionCatalog { entries })
}

/// Parses a sign pattern such as `"+-+"` into the matching classical direction.
pub fn classical_from_pattern(pattern: &str) -> Result<DirectionVector, DirectionError> {
    let n = pattern.chars().count();
    if !pattern.chars().all(|ch| ch == '+' || ch == '-') || n < 2 {
        return Err(DirectionError::UnknownName(pattern.to_string()));
    }
    let c = canonical_component(n);
    let comps = pattern
        .chars()
        .map(|ch| if ch == '+' { c } else { -c })
        .collect();
    Ok(DirectionVector::new(comps)?)
}

/// Whether PCA runs on the covariance or on the correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PcaScaling {
    #[default]
    Covariance,
    Correlation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalDirection {
    pub direction: DirectionVector,
    pub eigenvalue: f64,
    /// All eigenvalues in decreasing order.
    pub eigenvalues: Vec<f64>,
}

impl PrincipalDirection {
    pub fn explained_variance_ratio(&self) -> f64 {
        let total: f64 = self.eigenvalues.iter().sum();
        self.eigenvalue / total
    }
}

/// Unbiased sample covariance of the columns.
pub fn covariance_matrix(s: &Sample) -> DMatrix<f64> {
    let (m, n) = (s.nrows(), s.ncols());
    let mut mean = vec![0.0; n];
    for row in s.rows() {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);
    let mut cov = DMatrix::<f64>::zeros(n, n);
    for row in s.rows() {
        for i in 0..n {
            let di = row[i] - mean[i];
            for j in i..n {
                cov[(i, j)] += di * (row[j] - mean[j]);
            }
        }
    }
    let denom = (m - 1) as f64;
    for i in 0..n {
        for j in i..n {
            cov[(i, j)] /= denom;
            cov[(j, i)] = cov[(i, j)];
        }
    }
    cov
}

/// First principal direction of `s`, sign-fixed so that `u . e > 0`.
pub fn first_pca_direction(
    s: &Sample,
    scaling: PcaScaling,
) -> Result<PrincipalDirection, DirectionError> {
    if s.nrows() < 2 {
        return Err(DirectionError::TooFewObservations(s.nrows()));
    }
    let mut cov = covariance_matrix(s);
    let n = cov.nrows();
    if scaling == PcaScaling::Correlation {
        let sd: Vec<f64> = (0..n).map(|i| cov[(i, i)].sqrt()).collect();
        if let Some(j) = sd.iter().position(|&v| v == 0.0) {
            return Err(DirectionError::DegenerateCovariance(format!(
                "column {j} is constant; correlation undefined"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                cov[(i, j)] /= sd[i] * sd[j];
            }
        }
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let lead = eigenvalues[0];
    if lead.is_nan() || lead <= 0.0 {
        return Err(DirectionError::DegenerateCovariance(
            "covariance matrix is zero".into(),
        ));
    }
    if lead - eigenvalues[1] <= EIGEN_TIE_TOL * lead {
        return Err(DirectionError::DegenerateCovariance(format!(
            "leading eigenvalue {lead} is tied with {}",
            eigenvalues[1]
        )));
    }

    let mut v: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    let along_e: f64 = v.iter().sum::<f64>() * canonical_component(n);
    if along_e.abs() < 1e-12 {
        return Err(DirectionError::AmbiguousSign);
    }
    if along_e < 0.0 {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    let direction = DirectionVector::normalized(v)?;
    Ok(PrincipalDirection {
        direction,
        eigenvalue: lead,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn classical_catalog_sizes_and_names() {
        let c2 = classical_directions(2).unwrap();
        assert_eq!(c2.len(), 4);
        let names: Vec<&str> = c2.entries().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, vec!["++", "+-", "-+", "--"]);
        let anti = c2.get("-+").unwrap().components();
        assert_abs_diff_eq!(anti[0], -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(anti[1], FRAC_1_SQRT_2, epsilon = 1e-15);

        let c3 = classical_directions(3).unwrap();
        assert_eq!(c3.len(), 8);
        assert!(c3.get("+++").unwrap().is_canonical());
        assert_eq!(
            c3.get("---").unwrap(),
            &DirectionVector::canonical(3).unwrap().negated()
        );
    }

    #[test]
    fn classical_catalog_bounds() {
        assert_eq!(
            classical_directions(1),
            Err(DirectionError::DimensionOutOfRange(1))
        );
        assert_eq!(
            classical_directions(17),
            Err(DirectionError::DimensionOutOfRange(17))
        );
        assert_eq!(classical_directions(16).unwrap().len(), 65536);
    }

    #[test]
    fn pattern_parsing() {
        assert!(classical_from_pattern("+++").unwrap().is_canonical());
        assert!(classical_from_pattern("+x").is_err());
        assert!(classical_from_pattern("+").is_err());
    }

    #[test]
    fn two_points_on_diagonal_give_e() {
        let s = Sample::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let pc = first_pca_direction(&s, PcaScaling::Covariance).unwrap();
        for c in pc.direction.components() {
            assert_abs_diff_eq!(*c, FRAC_1_SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn isotropic_covariance_is_degenerate() {
        let s = Sample::from_rows(&[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]).unwrap();
        assert!(matches!(
            first_pca_direction(&s, PcaScaling::Covariance),
            Err(DirectionError::DegenerateCovariance(_))
        ));
    }

    #[test]
    fn axis_aligned_leading_component_is_inadmissible() {
        let s = Sample::from_rows(&[[2.0, 0.0], [-2.0, 0.0], [0.0, 1.0], [0.0, -1.0]]).unwrap();
        assert!(matches!(
            first_pca_direction(&s, PcaScaling::Covariance),
            Err(DirectionError::Admissibility(
                GeometryError::ZeroComponent { .. }
            ))
        ));
    }

    #[test]
    fn anti_diagonal_leading_component_has_ambiguous_sign() {
        let s = Sample::from_rows(&[[1.0, -1.0], [-1.0, 1.0], [0.1, 0.1], [-0.1, -0.1]]).unwrap();
        assert_eq!(
            first_pca_direction(&s, PcaScaling::Covariance),
            Err(DirectionError::AmbiguousSign)
        );
    }

    #[test]
    fn sign_points_toward_positive_diagonal() {
        let s = Sample::from_rows(&[[3.0, -1.0], [-3.0, 1.0], [0.5, 0.6], [-0.5, -0.6]]).unwrap();
        let pc = first_pca_direction(&s, PcaScaling::Covariance).unwrap();
        let c = pc.direction.components();
        assert!(c[0] + c[1] > 0.0);
        assert!(c[0] > 0.0 && c[1] < 0.0);
    }

    #[test]
    fn correlation_scaling_ignores_units() {
        let s = Sample::from_rows(&[[0.0, 0.0], [1.0, 10.0], [2.0, 19.0], [3.0, 31.0]]).unwrap();
        let cov = first_pca_direction(&s, PcaScaling::Covariance).unwrap();
        let cor = first_pca_direction(&s, PcaScaling::Correlation).unwrap();
        assert!(cov.direction.components()[1] > 0.99);
        assert_abs_diff_eq!(cor.direction.components()[0], FRAC_1_SQRT_2, epsilon = 1e-3);
        assert!(cov.explained_variance_ratio() > 0.99);
    }
}
