//! Non-parametric directional quantiles and level sets.
//!
//! For each sample point `x_i` the empirical probability of its oriented
//! orthant, `P_i = #{ j : R_u (x_j - x_i) >= 0 } / m`, is compared against
//! the level `alpha` with a slack `h`:
//!
//! | mode         | direction | Quantile               | Upper               | Lower               |
//! |--------------|-----------|------------------------|---------------------|---------------------|
//! | Survival     | `u`       | `|P - alpha| <= h`     | `P < alpha - h`     | `P > alpha + h`     |
//! | Distribution | `-u`      | `|P - (1-alpha)| <= h` | `P > 1 - alpha + h` | `P < 1 - alpha - h` |
//!
//! Upper points are the extremes, Quantile points sit on the estimated
//! quantile surface, Lower points are non-risky.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dominance::dominance_counts;
use crate::geometry::{build_rotation, rotate_with, DirectionVector, GeometryError};
use crate::sample::Sample;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectError {
    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("slack must be finite and non-negative, got {0}")]
    NegativeSlack(f64),
    #[error("alpha = {alpha} and slack = {slack} leave no room for the level sets (need alpha - h > 0 and alpha + h < 1)")]
    SlackTooWide { alpha: f64, slack: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Which tail the level sets are defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Orthant probabilities in direction `u` (survival-function analogue).
    #[default]
    Survival,
    /// Orthant probabilities in direction `-u` at level `1 - alpha`
    /// (distribution-function analogue).
    Distribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Upper,
    Quantile,
    Lower,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Upper => "upper",
            Label::Quantile => "quantile",
            Label::Lower => "lower",
        }
    }

    /// Upper and Quantile points are treated as flagged (critical) events.
    pub fn is_flagged(self) -> bool {
        !matches!(self, Label::Lower)
    }
}

/// An empirical orthant probability `count / total`, kept as integers so
/// that comparisons between computation paths are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrthantProbability {
    pub count: usize,
    pub total: usize,
}

impl OrthantProbability {
    #[inline]
    pub fn value(self) -> f64 {
        self.count as f64 / self.total as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    pub alpha: f64,
    pub direction: DirectionVector,
    /// `None` selects the default `1 / (2m)`.
    pub slack: Option<f64>,
    pub mode: Mode,
}

impl DetectionConfig {
    pub fn new(alpha: f64, direction: DirectionVector) -> Self {
        DetectionConfig {
            alpha,
            direction,
            slack: None,
            mode: Mode::Survival,
        }
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = Some(slack);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// The slack actually used for a sample of size `m`.
    pub fn effective_slack(&self, m: usize) -> f64 {
        self.slack.unwrap_or_else(|| default_slack(m))
    }

    pub fn validate(&self, m: usize) -> Result<f64, DetectError> {
        let alpha = self.alpha;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(DetectError::AlphaOutOfRange(alpha));
        }
        let h = self.effective_slack(m);
        if !(h.is_finite() && h >= 0.0) {
            return Err(DetectError::NegativeSlack(h));
        }
        if !(alpha - h > 0.0 && alpha + h < 1.0) {
            return Err(DetectError::SlackTooWide { alpha, slack: h });
        }
        Ok(h)
    }
}

/// Default slack: half the step `1/m` of the empirical probabilities.
pub fn default_slack(m: usize) -> f64 {
    0.5 / m as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Orthant probabilities in the direction actually evaluated
    /// (`u` for Survival, `-u` for Distribution).
    pub probabilities: Vec<OrthantProbability>,
    pub labels: Vec<Label>,
    pub alpha: f64,
    pub slack: f64,
    pub mode: Mode,
    pub direction: DirectionVector,
}

impl DetectionResult {
    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn indices(&self, label: Label) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == label).then_some(i))
            .collect()
    }

    pub fn flagged(&self) -> impl Iterator<Item = bool> + '_ {
        self.labels.iter().map(|l| l.is_flagged())
    }
}

fn check_dims(s: &Sample, u: &DirectionVector) -> Result<(), DetectError> {
    if s.ncols() != u.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: u.dim(),
            found: s.ncols(),
        }
        .into());
    }
    Ok(())
}

/// Empirical orthant probabilities in direction `u`.
///
/// Rotates the sample once and counts weak dominance in the standard
/// orthant; see [`orthant_probabilities_naive`] for the pairwise reference.
pub fn orthant_probabilities(
    s: &Sample,
    u: &DirectionVector,
) -> Result<Vec<OrthantProbability>, DetectError> {
    check_dims(s, u)?;
    let r = build_rotation(u);
    let rotated = rotate_with(&r, s);
    let total = s.nrows();
    Ok(dominance_counts(rotated.as_flat(), s.ncols())
        .into_iter()
        .map(|count| OrthantProbability { count, total })
        .collect())
}

/// Pairwise `O(m^2 n)` evaluation of `R_u (x_j - x_i) >= 0`.
pub fn orthant_probabilities_naive(
    s: &Sample,
    u: &DirectionVector,
) -> Result<Vec<OrthantProbability>, DetectError> {
    check_dims(s, u)?;
    let r = build_rotation(u);
    let total = s.nrows();
    Ok(s.rows()
        .map(|xi| {
            let count = s
                .rows()
                .filter(|xj| crate::geometry::contains_with(&r, xi, xj))
                .count();
            OrthantProbability { count, total }
        })
        .collect())
}

#[inline]
fn label_for(p: f64, level: f64, h: f64, mode: Mode) -> Label {
    let d = p - level;
    if d.abs() <= h {
        Label::Quantile
    } else {
        match (mode, d < 0.0) {
            (Mode::Survival, true) | (Mode::Distribution, false) => Label::Upper,
            _ => Label::Lower,
        }
    }
}

/// Labels every sample point as Upper, Quantile or Lower.
pub fn detect(s: &Sample, cfg: &DetectionConfig) -> Result<DetectionResult, DetectError> {
    check_dims(s, &cfg.direction)?;
    let h = cfg.validate(s.nrows())?;
    let (direction, level) = match cfg.mode {
        Mode::Survival => (cfg.direction.clone(), cfg.alpha),
        Mode::Distribution => (cfg.direction.negated(), 1.0 - cfg.alpha),
    };
    let probabilities = orthant_probabilities(s, &direction)?;
    let labels = probabilities
        .iter()
        .map(|p| label_for(p.value(), level, h, cfg.mode))
        .collect();
    Ok(DetectionResult {
        probabilities,
        labels,
        alpha: cfg.alpha,
        slack: h,
        mode: cfg.mode,
        direction,
    })
}

/// Outcome of comparing the Distribution-mode and Survival-mode upper sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub alpha: f64,
    /// Points with `P[C^{-u}] > 1 - alpha`.
    pub distribution_upper: Vec<usize>,
    /// Points with `P[C^{u}] < alpha`.
    pub survival_upper: Vec<usize>,
    /// Distribution-upper points with `P[C^{u}] >= alpha + 1/m`.
    pub violations: Vec<usize>,
}

impl ContainmentReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the sample analogue of "distribution-upper set is contained in the
/// survival-upper set", allowing one point of boundary mass (`1/m`) since a
/// vertex belongs to both of its opposite orthants.
pub fn containment_check(
    s: &Sample,
    u: &DirectionVector,
    alpha: f64,
) -> Result<ContainmentReport, DetectError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DetectError::AlphaOutOfRange(alpha));
    }
    let forward = orthant_probabilities(s, u)?;
    let backward = orthant_probabilities(s, &u.negated())?;
    let m = s.nrows() as f64;
    let distribution_upper: Vec<usize> = (0..s.nrows())
        .filter(|&i| backward[i].value() > 1.0 - alpha)
        .collect();
    let survival_upper = (0..s.nrows())
        .filter(|&i| forward[i].value() < alpha)
        .collect();
    let violations = distribution_upper
        .iter()
        .copied()
        .filter(|&i| forward[i].value() >= alpha + 1.0 / m)
        .collect();
    Ok(ContainmentReport {
        alpha,
        distribution_upper,
        survival_upper,
        violations,
    })
}
