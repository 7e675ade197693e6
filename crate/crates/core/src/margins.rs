//! Univariate marginals: generalized extreme value and Gaussian laws.
//!
//! GEV with location `eps`, scale `beta > 0` and shape `gamma`:
//!
//! ```text
//! F(x) = exp(-[1 + gamma (x - eps)/beta]^(-1/gamma))   gamma != 0
//! F(x) = exp(-exp(-(x - eps)/beta))                    gamma == 0
//! ```
//!
//! The support is bounded below by `eps - beta/gamma` when `gamma > 0` and
//! above by the same point when `gamma < 0`; outside it the CDF clamps to 0
//! or 1.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::random::{open_unit, seeded};

/// Shapes with `|gamma|` below this use the Gumbel branch.
pub const GUMBEL_SHAPE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarginError {
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("variance must be positive and finite, got {0}")]
    InvalidVariance(f64),
    #[error("parameter {name} is not finite")]
    NonFiniteParameter { name: &'static str },
    #[error("probability {0} is outside the open interval (0, 1)")]
    QOutOfRange(f64),
    #[error("moment integral does not converge (heavy tail)")]
    NonFinite,
    #[error("moment grid needs at least 1000 cells, got {0}")]
    GridTooCoarse(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams {
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
}

impl GevParams {
    pub fn new(location: f64, scale: f64, shape: f64) -> Result<Self, MarginError> {
        let p = GevParams {
            location,
            scale,
            shape,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MarginError> {
        if !self.location.is_finite() {
            return Err(MarginError::NonFiniteParameter { name: "location" });
        }
        if !self.shape.is_finite() {
            return Err(MarginError::NonFiniteParameter { name: "shape" });
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(MarginError::InvalidScale(self.scale));
        }
        Ok(())
    }

    #[inline]
    fn is_gumbel(&self) -> bool {
        self.shape.abs() < GUMBEL_SHAPE_TOL
    }

    /// Finite endpoint `eps - beta/gamma` of the support, if any.
    pub fn support_endpoint(&self) -> Option<f64> {
        (!self.is_gumbel()).then(|| self.location - self.scale / self.shape)
    }
}

pub fn gev_cdf(p: &GevParams, x: f64) -> f64 {
    let z = (x - p.location) / p.scale;
    if p.is_gumbel() {
        return (-(-z).exp()).exp();
    }
    let t = 1.0 + p.shape * z;
    if t <= 0.0 {
        return if p.shape > 0.0 { 0.0 } else { 1.0 };
    }
    (-t.powf(-1.0 / p.shape)).exp()
}

pub fn gev_survival(p: &GevParams, x: f64) -> f64 {
    1.0 - gev_cdf(p, x)
}

pub fn gev_quantile(p: &GevParams, q: f64) -> Result<f64, MarginError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(MarginError::QOutOfRange(q));
    }
    Ok(gev_quantile_unchecked(p, q))
}

#[inline]
fn gev_quantile_unchecked(p: &GevParams, q: f64) -> f64 {
    let y = -q.ln();
    if p.is_gumbel() {
        p.location - p.scale * y.ln()
    } else {
        p.location + p.scale / p.shape * (y.powf(-p.shape) - 1.0)
    }
}

/// Inverse-transform sampling, deterministic in `seed`.
pub fn gev_sample(p: &GevParams, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    gev_sample_with(p, count, &mut rng)
}

pub fn gev_sample_with<R: Rng + ?Sized>(p: &GevParams, count: usize, rng: &mut R) -> Vec<f64> {
    (0..count)
        .map(|_| gev_quantile_unchecked(p, open_unit(rng)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianParams {
    pub fn new(mean: f64, variance: f64) -> Result<Self, MarginError> {
        let p = GaussianParams { mean, variance };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MarginError> {
        if !self.mean.is_finite() {
            return Err(MarginError::NonFiniteParameter { name: "mean" });
        }
        if !(self.variance.is_finite() && self.variance > 0.0) {
            return Err(MarginError::InvalidVariance(self.variance));
        }
        Ok(())
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Standard normal CDF.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile.
#[inline]
pub fn std_normal_quantile(q: f64) -> f64 {
    Normal::standard().inverse_cdf(q)
}

pub fn gaussian_cdf(p: &GaussianParams, x: f64) -> f64 {
    std_normal_cdf((x - p.mean) / p.std_dev())
}

pub fn gaussian_survival(p: &GaussianParams, x: f64) -> f64 {
    1.0 - gaussian_cdf(p, x)
}

pub fn gaussian_quantile(p: &GaussianParams, q: f64) -> Result<f64, MarginError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(MarginError::QOutOfRange(q));
    }
    Ok(p.mean + p.std_dev() * std_normal_quantile(q))
}

/// A marginal law usable inside a joint model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Marginal {
    Gev(GevParams),
    Gaussian(GaussianParams),
    /// Identity on `[0, 1]`.
    Uniform,
}

impl Marginal {
    pub fn validate(&self) -> Result<(), MarginError> {
        match self {
            Marginal::Gev(p) => p.validate(),
            Marginal::Gaussian(p) => p.validate(),
            Marginal::Uniform => Ok(()),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Gev(p) => gev_cdf(p, x),
            Marginal::Gaussian(p) => gaussian_cdf(p, x),
            Marginal::Uniform => x.clamp(0.0, 1.0),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    pub fn quantile(&self, q: f64) -> Result<f64, MarginError> {
        match self {
            Marginal::Gev(p) => gev_quantile(p, q),
            Marginal::Gaussian(p) => gaussian_quantile(p, q),
            Marginal::Uniform if (0.0..=1.0).contains(&q) => Ok(q),
            Marginal::Uniform => Err(MarginError::QOutOfRange(q)),
        }
    }

    /// Inverse of the survival function, `F^{-1}(1 - v)`.
    pub fn survival_quantile(&self, v: f64) -> Result<f64, MarginError> {
        match self {
            Marginal::Uniform if (0.0..=1.0).contains(&v) => Ok(1.0 - v),
            _ => self.quantile(1.0 - v),
        }
    }
}

/// Number of grid doublings used to test convergence of moment integrals.
const MOMENT_REFINEMENTS: u32 = 6;
/// Successive-increment ratio at or above which an integral is declared
/// divergent.
const DIVERGENCE_RATIO: f64 = 0.9;

fn midpoint<F: Fn(f64) -> f64>(f: &F, cells: usize) -> Result<f64, MarginError> {
    let h = 1.0 / cells as f64;
    let mut sum = 0.0;
    for i in 0..cells {
        let v = f((i as f64 + 0.5) * h);
        if !v.is_finite() {
            return Err(MarginError::NonFinite);
        }
        sum += v;
    }
    Ok(sum * h)
}

/// Midpoint-rule integral over `(0, 1)` on grids `N, 2N, ..., 64N`.
/// Divergence shows up as increments between successive grids that stop
/// shrinking.
fn integrate_unit<F: Fn(f64) -> f64>(f: F, cells: usize) -> Result<f64, MarginError> {
    let estimates = (0..=MOMENT_REFINEMENTS)
        .map(|k| midpoint(&f, cells << k))
        .collect::<Result<Vec<_>, _>>()?;
    let last = *estimates.last().expect("at least one estimate");
    let k = estimates.len();
    let d_last = (estimates[k - 1] - estimates[k - 2]).abs();
    let d_prev = (estimates[k - 2] - estimates[k - 3]).abs();
    let negligible = 1e-9 * (1.0 + last.abs());
    if d_last > negligible && d_last >= DIVERGENCE_RATIO * d_prev {
        return Err(MarginError::NonFinite);
    }
    Ok(last)
}

/// Mean and variance from a quantile function:
/// `mu = int_0^1 Q(u) du`, `sigma^2 = int_0^1 (Q(u) - mu)^2 du`.
pub fn marginal_moments<F: Fn(f64) -> f64>(
    quantile_fn: F,
    grid_size: usize,
) -> Result<(f64, f64), MarginError> {
    if grid_size < 1000 {
        return Err(MarginError::GridTooCoarse(grid_size));
    }
    let mean = integrate_unit(&quantile_fn, grid_size)?;
    let variance = integrate_unit(
        |u| {
            let d = quantile_fn(u) - mean;
            d * d
        },
        grid_size,
    )?;
    Ok((mean, variance))
}
