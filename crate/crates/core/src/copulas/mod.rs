//! Bivariate copulas, their survival and rotated versions, product-nested
//! joint models, and the closed-form rotated Gaussian model.
//!
//! Orientation transforms of a base copula `C`:
//!
//! ```text
//! Survival  Cs(v1, v2)   = v1 + v2 - 1 + C(1 - v1, 1 - v2)
//! Rot90     C90(v1, v2)  = v1 - C(v1, 1 - v2)
//! Rot270    C270(v1, v2) = v2 - C(1 - v1, v2)
//! ```
//!
//! `C90` is the copula of `(U1, 1 - U2)` and `C270` that of `(1 - U1, U2)`
//! when `(U1, U2) ~ C`, which is how the samplers realise them.

pub mod bvn;
mod joint;

pub use joint::{
    nested_cdf, sklar_transform, CopulaTree, JointModel, SklarOrientation, JOINT_SCHEMA_VERSION,
};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::Label;
use crate::geometry::{build_rotation, DirectionVector, GeometryError};
use crate::margins::{std_normal_cdf, std_normal_quantile, GaussianParams, MarginError};
use crate::random::{open_unit, seeded};
use crate::sample::SampleError;

/// Bisection tolerance for conditional inversion.
pub const BISECTION_TOL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 200;

/// Conditional draws are kept inside `[2^-53, 1 - 2^-53]` so that marginal
/// quantiles stay finite.
const UNIT_EDGE: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CopulaError {
    #[error("point ({0}, {1}) is outside the unit square")]
    OutOfUnitSquare(f64, f64),
    #[error("invalid copula parameter: {0}")]
    InvalidParameter(String),
    #[error("conditional inversion did not converge for v1 = {v1}, t = {t}")]
    BisectionFailure { v1: f64, t: f64 },
    #[error("invalid copula tree: {0}")]
    TreeInvalid(String),
    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("level-set grid needs at least 100 cells per side, got {0}")]
    GridTooSmall(usize),
    #[error("expected {expected} coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Margin(#[from] MarginError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CopulaFamily {
    Gaussian { rho: f64 },
    Frank { theta: f64 },
    Gumbel { theta: f64 },
    Independence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Plain,
    Survival,
    Rot90,
    Rot270,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopulaModel {
    #[serde(flatten)]
    pub family: CopulaFamily,
    #[serde(default)]
    pub orientation: Orientation,
}

impl CopulaModel {
    pub fn new(family: CopulaFamily) -> Result<Self, CopulaError> {
        Self::oriented(family, Orientation::Plain)
    }

    pub fn oriented(family: CopulaFamily, orientation: Orientation) -> Result<Self, CopulaError> {
        let c = CopulaModel {
            family,
            orientation,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn gaussian(rho: f64) -> Result<Self, CopulaError> {
        Self::new(CopulaFamily::Gaussian { rho })
    }

    pub fn frank(theta: f64) -> Result<Self, CopulaError> {
        Self::new(CopulaFamily::Frank { theta })
    }

    pub fn gumbel(theta: f64) -> Result<Self, CopulaError> {
        Self::new(CopulaFamily::Gumbel { theta })
    }

    pub fn independence() -> Self {
        CopulaModel {
            family: CopulaFamily::Independence,
            orientation: Orientation::Plain,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn validate(&self) -> Result<(), CopulaError> {
        let bad = |msg: String| Err(CopulaError::InvalidParameter(msg));
        match self.family {
            CopulaFamily::Gaussian { rho } if !(rho > -1.0 && rho < 1.0) => {
                bad(format!("Gaussian rho must lie in (-1, 1), got {rho}"))
            }
            CopulaFamily::Frank { theta } if !theta.is_finite() || theta == 0.0 => bad(format!(
                "Frank theta must be finite and non-zero, got {theta}"
            )),
            CopulaFamily::Gumbel { theta } if !(theta.is_finite() && theta >= 1.0) => {
                bad(format!("Gumbel theta must be >= 1, got {theta}"))
            }
            _ => Ok(()),
        }
    }
}

/// The un-oriented family CDF on the closed unit square.
fn base_cdf(family: CopulaFamily, v1: f64, v2: f64) -> f64 {
    if v1 <= 0.0 || v2 <= 0.0 {
        return 0.0;
    }
    if v1 >= 1.0 {
        return v2;
    }
    if v2 >= 1.0 {
        return v1;
    }
    match family {
        CopulaFamily::Independence => v1 * v2,
        CopulaFamily::Gaussian { rho } => {
            bvn::bvn_cdf(std_normal_quantile(v1), std_normal_quantile(v2), rho)
        }
        CopulaFamily::Frank { theta } => {
            let a = (-theta * v1).exp_m1();
            let b = (-theta * v2).exp_m1();
            let c = (-theta).exp_m1();
            -(a * b / c).ln_1p() / theta
        }
        CopulaFamily::Gumbel { theta } => {
            let x = (-v1.ln()).powf(theta);
            let y = (-v2.ln()).powf(theta);
            (-(x + y).powf(1.0 / theta)).exp()
        }
    }
}

/// `C(v1, v2)` with the model's orientation applied.
pub fn copula_cdf(c: &CopulaModel, v1: f64, v2: f64) -> Result<f64, CopulaError> {
    if !((0.0..=1.0).contains(&v1) && (0.0..=1.0).contains(&v2)) {
        return Err(CopulaError::OutOfUnitSquare(v1, v2));
    }
    Ok(oriented_cdf(c, v1, v2))
}

#[inline]
fn oriented_cdf(c: &CopulaModel, v1: f64, v2: f64) -> f64 {
    let f = c.family;
    match c.orientation {
        Orientation::Plain => base_cdf(f, v1, v2),
        Orientation::Survival => v1 + v2 - 1.0 + base_cdf(f, 1.0 - v1, 1.0 - v2),
        Orientation::Rot90 => v1 - base_cdf(f, v1, 1.0 - v2),
        Orientation::Rot270 => v2 - base_cdf(f, 1.0 - v1, v2),
    }
}

/// `dC/dv1` of the Gumbel copula, the conditional law of `V2` given `V1`.
fn gumbel_conditional(theta: f64, v1: f64, v2: f64) -> f64 {
    if v2 <= 0.0 {
        return 0.0;
    }
    if v2 >= 1.0 {
        return 1.0;
    }
    let x = -v1.ln();
    let y = -v2.ln();
    let s = x.powf(theta) + y.powf(theta);
    let c = (-s.powf(1.0 / theta)).exp();
    c * s.powf(1.0 / theta - 1.0) * x.powf(theta - 1.0) / v1
}

/// Solves `dC/dv1 (v1, v2) = t` for `v2` in the base family.
fn conditional_inverse(family: CopulaFamily, v1: f64, t: f64) -> Result<f64, CopulaError> {
    let v2 = match family {
        CopulaFamily::Independence => t,
        CopulaFamily::Gaussian { rho } => std_normal_cdf(
            rho * std_normal_quantile(v1) + (1.0 - rho * rho).sqrt() * std_normal_quantile(t),
        ),
        CopulaFamily::Frank { theta } => {
            let c = (-theta).exp_m1();
            let b = t * c / (t + (1.0 - t) * (-theta * v1).exp());
            -b.ln_1p() / theta
        }
        CopulaFamily::Gumbel { theta } => {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut iter = 0;
            while hi - lo > BISECTION_TOL {
                if iter == BISECTION_MAX_ITER {
                    return Err(CopulaError::BisectionFailure { v1, t });
                }
                let mid = 0.5 * (lo + hi);
                if gumbel_conditional(theta, v1, mid) < t {
                    lo = mid;
                } else {
                    hi = mid;
                }
                iter += 1;
            }
            0.5 * (lo + hi)
        }
    };
    if !v2.is_finite() {
        return Err(CopulaError::BisectionFailure { v1, t });
    }
    Ok(v2.clamp(UNIT_EDGE, 1.0 - UNIT_EDGE))
}

/// One draw `(v1, v2)` by conditional inversion.
pub fn copula_draw<R: Rng + ?Sized>(c: &CopulaModel, rng: &mut R) -> Result<[f64; 2], CopulaError> {
    let u1 = open_unit(rng);
    let t = open_unit(rng);
    let u2 = conditional_inverse(c.family, u1, t)?;
    Ok(match c.orientation {
        Orientation::Plain => [u1, u2],
        Orientation::Survival => [1.0 - u1, 1.0 - u2],
        Orientation::Rot90 => [u1, 1.0 - u2],
        Orientation::Rot270 => [1.0 - u1, u2],
    })
}

pub fn copula_sample_with<R: Rng + ?Sized>(
    c: &CopulaModel,
    count: usize,
    rng: &mut R,
) -> Result<Vec<[f64; 2]>, CopulaError> {
    c.validate()?;
    (0..count).map(|_| copula_draw(c, rng)).collect()
}

/// `count` draws from `c`, deterministic in `seed`.
pub fn copula_sample(
    c: &CopulaModel,
    count: usize,
    seed: u64,
) -> Result<Vec<[f64; 2]>, CopulaError> {
    copula_sample_with(c, count, &mut seeded(seed))
}

/// Classification of a `grid x grid` lattice of cell centres of the unit
/// square by the copula value: within `1/grid` of `alpha` is the quantile
/// band, below is the upper (extreme) region, above is the lower region.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetGrid {
    pub grid: usize,
    pub alpha: f64,
    pub band: f64,
    /// Row-major over `(i, j)` with `v1 = (i + 0.5)/grid`, `v2 = (j + 0.5)/grid`.
    pub values: Vec<f64>,
    pub labels: Vec<Label>,
}

impl LevelSetGrid {
    #[inline]
    pub fn coordinate(&self, index: usize) -> f64 {
        (index as f64 + 0.5) / self.grid as f64
    }

    pub fn label(&self, i: usize, j: usize) -> Label {
        self.labels[i * self.grid + j]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid + j]
    }

    pub fn points(&self, label: Label) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for i in 0..self.grid {
            for j in 0..self.grid {
                if self.label(i, j) == label {
                    out.push([self.coordinate(i), self.coordinate(j)]);
                }
            }
        }
        out
    }
}

pub fn copula_level_sets(
    c: &CopulaModel,
    alpha: f64,
    grid: usize,
) -> Result<LevelSetGrid, CopulaError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CopulaError::AlphaOutOfRange(alpha));
    }
    if grid < 100 {
        return Err(CopulaError::GridTooSmall(grid));
    }
    c.validate()?;
    let band = 1.0 / grid as f64;
    let coord = |k: usize| (k as f64 + 0.5) / grid as f64;
    let mut values = Vec::with_capacity(grid * grid);
    let mut labels = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let v = oriented_cdf(c, coord(i), coord(j));
            let d = v - alpha;
            labels.push(if d.abs() <= band {
                Label::Quantile
            } else if d < 0.0 {
                Label::Upper
            } else {
                Label::Lower
            });
            values.push(v);
        }
    }
    Ok(LevelSetGrid {
        grid,
        alpha,
        band,
        values,
        labels,
    })
}

/// A bivariate Gaussian law: means, variances and correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateGaussian {
    pub mean: [f64; 2],
    pub variance: [f64; 2],
    pub rho: f64,
}

impl BivariateGaussian {
    pub fn new(mean: [f64; 2], variance: [f64; 2], rho: f64) -> Result<Self, CopulaError> {
        for v in variance {
            GaussianParams::new(0.0, v)?;
        }
        if !(rho > -1.0 && rho < 1.0) {
            return Err(CopulaError::InvalidParameter(format!(
                "rho must lie in (-1, 1), got {rho}"
            )));
        }
        Ok(BivariateGaussian {
            mean,
            variance,
            rho,
        })
    }

    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let c = self.rho * (self.variance[0] * self.variance[1]).sqrt();
        [[self.variance[0], c], [c, self.variance[1]]]
    }

    pub fn margins(&self) -> [GaussianParams; 2] {
        [
            GaussianParams {
                mean: self.mean[0],
                variance: self.variance[0],
            },
            GaussianParams {
                mean: self.mean[1],
                variance: self.variance[1],
            },
        ]
    }

    /// Joint survival `P(X1 > x1, X2 > x2)`.
    pub fn survival(&self, x: [f64; 2]) -> f64 {
        let z1 = (x[0] - self.mean[0]) / self.variance[0].sqrt();
        let z2 = (x[1] - self.mean[1]) / self.variance[1].sqrt();
        bvn::bvn_upper(z1, z2, self.rho)
    }

    /// Draws `count` points through the Gaussian copula and Gaussian margins.
    pub fn sample_with<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<[f64; 2]> {
        let l11 = self.variance[0].sqrt();
        let s2 = self.variance[1].sqrt();
        let l21 = self.rho * s2;
        let l22 = (1.0 - self.rho * self.rho).sqrt() * s2;
        (0..count)
            .map(|_| {
                let z1 = std_normal_quantile(open_unit(rng));
                let z2 = std_normal_quantile(open_unit(rng));
                [self.mean[0] + l11 * z1, self.mean[1] + l21 * z1 + l22 * z2]
            })
            .collect()
    }
}

/// Parameters of `R_u X` for Gaussian `X`: means `R_u mu`, covariance
/// `R_u Sigma R_u^T`, and the implied correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotatedGaussian {
    pub margins: [GaussianParams; 2],
    pub rho: f64,
    pub covariance: [[f64; 2]; 2],
}

impl RotatedGaussian {
    pub fn as_bivariate(&self) -> BivariateGaussian {
        BivariateGaussian {
            mean: [self.margins[0].mean, self.margins[1].mean],
            variance: [self.margins[0].variance, self.margins[1].variance],
            rho: self.rho,
        }
    }
}

pub fn rotated_gaussian_params(
    g: &BivariateGaussian,
    u: &DirectionVector,
) -> Result<RotatedGaussian, CopulaError> {
    if u.dim() != 2 {
        return Err(CopulaError::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    let r = build_rotation(u);
    let mean = r.apply(&g.mean)?;
    let s = g.covariance();
    // R S R^T
    let mut cov = [[0.0; 2]; 2];
    for (i, row) in cov.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            *out = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| r.get(i, a) * s[a][b] * r.get(j, b))
                .sum();
        }
    }
    let rho = cov[0][1] / (cov[0][0] * cov[1][1]).sqrt();
    Ok(RotatedGaussian {
        margins: [
            GaussianParams::new(mean[0], cov[0][0])?,
            GaussianParams::new(mean[1], cov[1][1])?,
        ],
        rho,
        covariance: cov,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::kendall_tau;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn all_models() -> Vec<CopulaModel> {
        let fams = [
            CopulaFamily::Gaussian { rho: 0.2 },
            CopulaFamily::Gaussian { rho: -0.7 },
            CopulaFamily::Frank { theta: 5.0 },
            CopulaFamily::Frank { theta: -8.0 },
            CopulaFamily::Gumbel { theta: 3.1378 },
            CopulaFamily::Independence,
        ];
        let ors = [
            Orientation::Plain,
            Orientation::Survival,
            Orientation::Rot90,
            Orientation::Rot270,
        ];
        fams.iter()
            .flat_map(|&f| {
                ors.iter()
                    .map(move |&o| CopulaModel::oriented(f, o).unwrap())
            })
            .collect()
    }

    #[test]
    fn grounding_and_uniform_margins() {
        for c in all_models() {
            for k in 0..=1000 {
                let v = k as f64 / 1000.0;
                let at = |a, b| copula_cdf(&c, a, b).unwrap();
                assert!(at(v, 0.0).abs() <= 1e-12, "{c:?}");
                assert!(at(0.0, v).abs() <= 1e-12, "{c:?}");
                assert!((at(v, 1.0) - v).abs() <= 1e-12, "{c:?}");
                assert!((at(1.0, v) - v).abs() <= 1e-12, "{c:?}");
            }
        }
    }

    #[test]
    fn frank_upper_edge_examples() {
        let c = CopulaModel::frank(5.0).unwrap();
        for k in 1..=9 {
            let v = k as f64 / 10.0;
            assert!((copula_cdf(&c, v, 1.0).unwrap() - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn gaussian_median_point() {
        let c = CopulaModel::gaussian(0.2).unwrap();
        let expected = 0.25 + 0.2f64.asin() / (2.0 * PI);
        assert!((copula_cdf(&c, 0.5, 0.5).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.282047).abs() < 1e-6);
    }

    #[test]
    fn gumbel_diagonal() {
        let theta = 3.1378;
        let c = CopulaModel::gumbel(theta).unwrap();
        for v in [0.1, 0.5, 0.9] {
            let expected = f64::powf(v, 2f64.powf(1.0 / theta));
            assert!((copula_cdf(&c, v, v).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn rot90_fixes_upper_edge() {
        // the plus-sign variant would give 2 - v2 here
        let c =
            CopulaModel::oriented(CopulaFamily::Frank { theta: 5.0 }, Orientation::Rot90).unwrap();
        for v2 in [0.1, 0.4, 0.8] {
            assert!((copula_cdf(&c, 1.0, v2).unwrap() - v2).abs() <= 1e-12);
        }
    }

    #[test]
    fn survival_transform_is_an_involution() {
        for c in all_models()
            .into_iter()
            .filter(|c| c.orientation == Orientation::Plain)
        {
            let twice = |v1: f64, v2: f64| {
                let s = |a: f64, b: f64| a + b - 1.0 + base_cdf(c.family, 1.0 - a, 1.0 - b);
                v1 + v2 - 1.0 + s(1.0 - v1, 1.0 - v2)
            };
            for i in 0..=20 {
                for j in 0..=20 {
                    let (v1, v2) = (i as f64 / 20.0, j as f64 / 20.0);
                    assert!((twice(v1, v2) - base_cdf(c.family, v1, v2)).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn rectangles_have_non_negative_mass() {
        let mut rng = seeded(5);
        for c in all_models() {
            for _ in 0..500 {
                let (a1, b1) = sorted(open_unit(&mut rng), open_unit(&mut rng));
                let (a2, b2) = sorted(open_unit(&mut rng), open_unit(&mut rng));
                let vol =
                    oriented_cdf(&c, b1, b2) - oriented_cdf(&c, a1, b2) - oriented_cdf(&c, b1, a2)
                        + oriented_cdf(&c, a1, a2);
                assert!(vol >= -1e-12, "{c:?} {vol}");
            }
        }
    }

    fn sorted(a: f64, b: f64) -> (f64, f64) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    #[test]
    fn rejects_bad_parameters_and_points() {
        assert!(CopulaModel::gaussian(1.0).is_err());
        assert!(CopulaModel::frank(0.0).is_err());
        assert!(CopulaModel::gumbel(0.5).is_err());
        let c = CopulaModel::independence();
        assert_eq!(
            copula_cdf(&c, 1.2, 0.5),
            Err(CopulaError::OutOfUnitSquare(1.2, 0.5))
        );
    }

    #[test]
    fn gumbel_conditional_inverse_roundtrip() {
        let theta = 3.1378;
        for v1 in [0.05, 0.3, 0.7, 0.99] {
            for t in [0.01, 0.4, 0.9] {
                let v2 = conditional_inverse(CopulaFamily::Gumbel { theta }, v1, t).unwrap();
                assert!((gumbel_conditional(theta, v1, v2) - t).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sampler_is_seeded_and_in_range() {
        for c in all_models() {
            let a = copula_sample(&c, 200, 17).unwrap();
            assert_eq!(a, copula_sample(&c, 200, 17).unwrap());
            assert!(a.iter().flatten().all(|v| *v > 0.0 && *v < 1.0));
        }
    }

    #[test]
    fn rotated_samples_flip_dependence() {
        let base = CopulaModel::gumbel(3.1378).unwrap();
        let rot = base.with_orientation(Orientation::Rot90);
        let s = copula_sample(&rot, 5000, 2).unwrap();
        let (a, b): (Vec<f64>, Vec<f64>) = s.iter().map(|p| (p[0], p[1])).unzip();
        let tau = kendall_tau(&a, &b);
        assert!((tau + (1.0 - 1.0 / 3.1378)).abs() < 0.03, "{tau}");
    }

    #[test]
    fn level_set_examples() {
        let ind = CopulaModel::independence();
        let g = copula_level_sets(&ind, 0.25, 100).unwrap();
        // cell centres (0.495, 0.505) straddle the curve v1 v2 = 0.25
        assert_eq!(g.label(49, 50), Label::Quantile);
        assert_eq!(g.label(0, 0), Label::Upper);
        assert_eq!(g.label(99, 99), Label::Lower);
        assert!(copula_level_sets(&ind, 0.25, 50).is_err());
        assert!(copula_level_sets(&ind, 1.0, 100).is_err());
    }

    #[test]
    fn gaussian_survival_level_curve_is_on_target() {
        let c = CopulaModel::oriented(CopulaFamily::Gaussian { rho: 0.2 }, Orientation::Survival)
            .unwrap();
        let g = copula_level_sets(&c, 0.01, 200).unwrap();
        let band = g.points(Label::Quantile);
        assert!(!band.is_empty());
        for p in band {
            let v = copula_cdf(&c, p[0], p[1]).unwrap();
            assert!((v - 0.01).abs() <= 1.0 / 200.0);
        }
    }

    #[test]
    fn upper_region_is_a_down_set() {
        for c in all_models() {
            let g = copula_level_sets(&c, 0.1, 100).unwrap();
            for i in 0..100 {
                for j in 0..100 {
                    if g.label(i, j) == Label::Upper {
                        if i > 0 {
                            assert_eq!(g.label(i - 1, j), Label::Upper, "{c:?}");
                        }
                        if j > 0 {
                            assert_eq!(g.label(i, j - 1), Label::Upper, "{c:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rotated_gaussian_identity_and_trace() {
        let g = BivariateGaussian::new([5.0, 10.0], [25.0, 1.0], 0.2).unwrap();
        let e = DirectionVector::canonical(2).unwrap();
        let same = rotated_gaussian_params(&g, &e).unwrap();
        assert_eq!(same.as_bivariate(), g);
        for angle in [0.3f64, 1.1, 2.0, -0.7] {
            let u = DirectionVector::new(vec![angle.cos(), angle.sin()]).unwrap();
            let r = rotated_gaussian_params(&g, &u).unwrap();
            let trace = r.covariance[0][0] + r.covariance[1][1];
            assert!((trace - 26.0).abs() <= 1e-10);
        }
        let anti = DirectionVector::new(vec![-FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let r = rotated_gaussian_params(&g, &anti).unwrap();
        assert!(r.rho.abs() < 1.0);
        assert!(rotated_gaussian_params(&g, &DirectionVector::canonical(3).unwrap()).is_err());
    }
}
