//! Dam flood case study: simulate (Q, V, L) events, route triangular
//! hydrographs through a level-pool reservoir with an uncontrolled weir
//! spillway, classify the peak levels and score directional detections
//! against them.
//!
//! Units: Q in m^3/s, V in 10^6 m^3, levels in m a.s.l., times in hours.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::copulas::{CopulaError, JointModel};
use crate::detector::{detect, DetectError, DetectionConfig, DetectionResult, Label, Mode};
use crate::directions::{first_pca_direction, DirectionError, PcaScaling};
use crate::geometry::DirectionVector;
use crate::random::stream;
use crate::sample::Sample;

const SECONDS_PER_HOUR: f64 = 3600.0;
/// Default integration step as a fraction of the time of rise.
pub const DEFAULT_STEPS_PER_RISE: f64 = 50.0;
/// Coarsest accepted step as a fraction of the time of rise.
pub const MIN_STEPS_PER_RISE: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FloodError {
    #[error("invalid flood event: {0}")]
    InvalidEvent(String),
    #[error("step {dt} h is coarser than T_p/10 = {limit} h")]
    ResolutionTooCoarse { dt: f64, limit: f64 },
    #[error("invalid dam specification: {0}")]
    SpecInvalid(String),
    #[error("detection has {detections} labels but routing has {outcomes} outcomes")]
    LengthMismatch { detections: usize, outcomes: usize },
    #[error("sample must have 3 columns (Q, V, L), got {0}")]
    Columns(usize),
    #[error("replicas and years must be positive")]
    EmptyExperiment,
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Direction(#[from] DirectionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloodEvent {
    pub peak: f64,
    pub volume: f64,
    pub initial_level: f64,
}

impl FloodEvent {
    pub fn new(peak: f64, volume: f64, initial_level: f64) -> Result<Self, FloodError> {
        if !(peak > 0.0 && peak.is_finite() && volume > 0.0 && volume.is_finite()) {
            return Err(FloodError::InvalidEvent(format!(
                "peak and volume must be positive, got Q = {peak}, V = {volume}"
            )));
        }
        if !initial_level.is_finite() {
            return Err(FloodError::InvalidEvent(format!(
                "initial level must be finite, got {initial_level}"
            )));
        }
        Ok(FloodEvent {
            peak,
            volume,
            initial_level,
        })
    }
}

/// Triangular inflow hydrograph. Times in hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hydrograph {
    pub peak: f64,
    pub base_time: f64,
    pub time_of_rise: f64,
    pub recession: f64,
}

impl Hydrograph {
    /// `T_b = 2V/Q`, `T_p = T_b/2.67`, `T_r = 1.67 T_p`.
    pub fn from_event(e: &FloodEvent) -> Self {
        let base_time = 2.0 * e.volume * 1e6 / e.peak / SECONDS_PER_HOUR;
        let time_of_rise = base_time / 2.67;
        Hydrograph {
            peak: e.peak,
            base_time,
            time_of_rise,
            recession: 1.67 * time_of_rise,
        }
    }

    /// Inflow in m^3/s at `t` hours.
    pub fn inflow(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.base_time {
            0.0
        } else if t <= self.time_of_rise {
            self.peak * t / self.time_of_rise
        } else {
            self.peak * (self.base_time - t) / (self.base_time - self.time_of_rise)
        }
    }

    /// Inflow volume in m^3 delivered over `[0, t]`.
    pub fn cumulative(&self, t: f64) -> f64 {
        let (tp, tb, q) = (self.time_of_rise, self.base_time, self.peak);
        let hours = if t <= 0.0 {
            0.0
        } else if t <= tp {
            0.5 * q * t * t / tp
        } else if t < tb {
            let fall = tb - tp;
            0.5 * q * tp + q * (t - tp) - 0.5 * q * (t - tp) * (t - tp) / fall
        } else {
            0.5 * q * tb
        };
        hours * SECONDS_PER_HOUR
    }

    /// Total volume in m^3.
    pub fn volume(&self) -> f64 {
        0.5 * self.peak * self.base_time * SECONDS_PER_HOUR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FloodClass {
    Regular,
    Risky,
    Catastrophic,
}

impl FloodClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FloodClass::Regular => "regular",
            FloodClass::Risky => "risky",
            FloodClass::Catastrophic => "catastrophic",
        }
    }

    /// Risky or catastrophic.
    pub fn is_critical(self) -> bool {
        self != FloodClass::Regular
    }
}

/// Reservoir geometry and spillway.
///
/// `storage_curve` is a table of `(level m, volume m^3)` pairs, interpolated
/// linearly and extended past its ends with the end slopes. Spillway outflow
/// is `discharge_coefficient * width * (h - spillway_level)^1.5` m^3/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DamSpec {
    pub spillway_level: f64,
    pub max_regulation_level: f64,
    pub crest_level: f64,
    pub storage_curve: Vec<(f64, f64)>,
    pub discharge_coefficient: f64,
    pub spillway_width: f64,
}

/// Calibrated surface area (m^2) of the default linear storage curve.
pub const DEFAULT_SURFACE_AREA: f64 = 200_000.0;
/// Calibrated weir coefficient (m^0.5/s) and crest width (m).
pub const DEFAULT_DISCHARGE_COEFFICIENT: f64 = 2.1;
pub const DEFAULT_SPILLWAY_WIDTH: f64 = 248.0;

impl Default for DamSpec {
    fn default() -> Self {
        DamSpec::linear(
            DEFAULT_SURFACE_AREA,
            DEFAULT_DISCHARGE_COEFFICIENT,
            DEFAULT_SPILLWAY_WIDTH,
        )
    }
}

impl DamSpec {
    /// Vertical-walled reservoir of the given surface area between 775 m and
    /// the 784 m crest, spillway at 781.5 m, regulation maximum at 782.5 m.
    pub fn linear(area: f64, discharge_coefficient: f64, spillway_width: f64) -> Self {
        DamSpec {
            spillway_level: 781.5,
            max_regulation_level: 782.5,
            crest_level: 784.0,
            storage_curve: vec![(775.0, 0.0), (784.0, 9.0 * area)],
            discharge_coefficient,
            spillway_width,
        }
    }

    pub fn validate(&self) -> Result<(), FloodError> {
        let bad = |m: &str| Err(FloodError::SpecInvalid(m.into()));
        if !(self.spillway_level < self.max_regulation_level
            && self.max_regulation_level < self.crest_level)
        {
            return bad("levels must satisfy spillway < max regulation < crest");
        }
        if self.storage_curve.len() < 2 {
            return bad("storage curve needs at least two points");
        }
        if self
            .storage_curve
            .iter()
            .any(|(h, s)| !h.is_finite() || !s.is_finite())
        {
            return bad("storage curve has non-finite entries");
        }
        if self
            .storage_curve
            .windows(2)
            .any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1))
        {
            return bad("storage curve must be strictly increasing");
        }
        if !(self.discharge_coefficient > 0.0 && self.spillway_width > 0.0) {
            return bad("spillway coefficient and width must be positive");
        }
        Ok(())
    }

    fn interpolate(table: &[(f64, f64)], x: f64, forward: bool) -> f64 {
        let key = |p: &(f64, f64)| if forward { p.0 } else { p.1 };
        let val = |p: &(f64, f64)| if forward { p.1 } else { p.0 };
        let k = table
            .windows(2)
            .position(|w| x <= key(&w[1]))
            .unwrap_or(table.len() - 2);
        let (a, b) = (&table[k], &table[k + 1]);
        val(a) + (x - key(a)) * (val(b) - val(a)) / (key(b) - key(a))
    }

    /// Stored volume (m^3) at a level.
    pub fn storage(&self, level: f64) -> f64 {
        Self::interpolate(&self.storage_curve, level, true)
    }

    /// Level at a stored volume; inverse of [`DamSpec::storage`].
    pub fn level(&self, storage: f64) -> f64 {
        Self::interpolate(&self.storage_curve, storage, false)
    }

    /// Surface area `dS/dh` (m^2) at a level.
    pub fn area(&self, level: f64) -> f64 {
        let t = &self.storage_curve;
        let k = t
            .windows(2)
            .position(|w| level <= w[1].0)
            .unwrap_or(t.len() - 2);
        (t[k + 1].1 - t[k].1) / (t[k + 1].0 - t[k].0)
    }

    fn outflow_slope(&self, level: f64) -> f64 {
        let head = level - self.spillway_level;
        if head <= 0.0 {
            0.0
        } else {
            1.5 * self.discharge_coefficient * self.spillway_width * head.sqrt()
        }
    }

    /// Spillway discharge in m^3/s.
    pub fn outflow(&self, level: f64) -> f64 {
        let head = level - self.spillway_level;
        if head <= 0.0 {
            0.0
        } else {
            self.discharge_coefficient * self.spillway_width * head.powf(1.5)
        }
    }

    pub fn classify(&self, max_level: f64) -> FloodClass {
        if max_level > self.crest_level {
            FloodClass::Catastrophic
        } else if max_level > self.max_regulation_level {
            FloodClass::Risky
        } else {
            FloodClass::Regular
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoutingOutcome {
    pub max_level: f64,
    pub class: FloodClass,
    /// Inflow, outflow and storage change over the run, in m^3.
    pub inflow_volume: f64,
    pub outflow_volume: f64,
    pub storage_change: f64,
}

impl RoutingOutcome {
    /// `|in - out - dS| / in`.
    pub fn mass_balance_error(&self) -> f64 {
        let r = self.inflow_volume - self.outflow_volume - self.storage_change;
        r.abs() / self.inflow_volume.max(f64::MIN_POSITIVE)
    }
}

/// Level trajectory of a routing run.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTrace {
    pub times: Vec<f64>,
    pub levels: Vec<f64>,
    pub outcome: RoutingOutcome,
}

/// Level-pool routing of an arbitrary inflow given by its cumulative volume
/// function (m^3 over `[0, t]` hours), over `steps` steps of `dt` hours.
///
/// Each step solves the implicit storage balance
/// `S' = S + (In(t') - In(t)) - dt * O(h(S'))` by bisection on the level,
/// which is stable at any step size and keeps the outflow from draining the
/// pool below the spillway.
pub fn route_inflow<F: Fn(f64) -> f64>(
    dam: &DamSpec,
    initial_level: f64,
    cumulative_inflow: F,
    dt: f64,
    steps: usize,
) -> Result<RoutingTrace, FloodError> {
    dam.validate()?;
    let dt_s = dt * SECONDS_PER_HOUR;
    let s0 = dam.storage(initial_level);
    let spill_storage = dam.storage(dam.spillway_level);
    let mut storage = s0;
    let mut level = initial_level;
    let (mut inflow_total, mut outflow_total) = (0.0, 0.0);
    let mut times = Vec::with_capacity(steps + 1);
    let mut levels = Vec::with_capacity(steps + 1);
    times.push(0.0);
    levels.push(level);
    let mut max_level = level;
    let mut prev_cum = cumulative_inflow(0.0);

    for k in 1..=steps {
        let t = k as f64 * dt;
        let cum = cumulative_inflow(t);
        let step_in = cum - prev_cum;
        prev_cum = cum;
        let target = storage + step_in;

        let (next_storage, step_out) = if target <= spill_storage {
            (target, 0.0)
        } else {
            // storage(h) + dt * O(h) = target for h in [spillway, level(target)];
            // the left side is increasing, so Newton is kept inside the bracket.
            let f = |h: f64| dam.storage(h) + dt_s * dam.outflow(h) - target;
            let (mut lo, mut hi) = (dam.spillway_level, dam.level(target));
            let mut h = hi;
            for _ in 0..200 {
                let fh = f(h);
                if fh > 0.0 {
                    hi = h;
                } else {
                    lo = h;
                }
                let slope = dam.area(h) + dt_s * dam.outflow_slope(h);
                let mut next = h - fh / slope;
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                if (next - h).abs() <= 1e-12 * h.abs() || hi - lo <= 1e-12 * hi.abs() {
                    h = next;
                    break;
                }
                h = next;
            }
            let lvl = h;
            let out = (target - dam.storage(lvl)).clamp(0.0, target - spill_storage);
            (target - out, out)
        };

        inflow_total += step_in;
        outflow_total += step_out;
        storage = next_storage;
        level = dam.level(storage);
        max_level = max_level.max(level);
        times.push(t);
        levels.push(level);
    }

    Ok(RoutingTrace {
        times,
        levels,
        outcome: RoutingOutcome {
            max_level,
            class: dam.classify(max_level),
            inflow_volume: inflow_total,
            outflow_volume: outflow_total,
            storage_change: storage - s0,
        },
    })
}

/// Routes one event's hydrograph over its base time. `dt` defaults to
/// `T_p / 50` and may not exceed `T_p / 10`.
pub fn route_event(
    e: &FloodEvent,
    dam: &DamSpec,
    dt: Option<f64>,
) -> Result<RoutingOutcome, FloodError> {
    Ok(route_event_trace(e, dam, dt)?.outcome)
}

pub fn route_event_trace(
    e: &FloodEvent,
    dam: &DamSpec,
    dt: Option<f64>,
) -> Result<RoutingTrace, FloodError> {
    let hg = Hydrograph::from_event(e);
    let limit = hg.time_of_rise / MIN_STEPS_PER_RISE;
    let dt = dt.unwrap_or(hg.time_of_rise / DEFAULT_STEPS_PER_RISE);
    if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
        return Err(FloodError::ResolutionTooCoarse { dt, limit });
    }
    let steps = (hg.base_time / dt).ceil() as usize;
    route_inflow(dam, e.initial_level, |t| hg.cumulative(t), dt, steps)
}

/// The four detection scores against routed truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationReport {
    /// Flagged but not critical, over flagged. `None` with no detections.
    pub false_positive_ratio: Option<f64>,
    /// Flagged and critical, over critical. `None` with no critical events.
    pub true_positive_ratio: Option<f64>,
    pub extremes_detection_ratio: f64,
    pub true_extremes_ratio: f64,
    pub detections: usize,
    pub critical: usize,
    pub hits: usize,
}

/// Scores Upper-or-Quantile labels against Risky-or-Catastrophic outcomes.
pub fn evaluate_detection(
    det: &DetectionResult,
    truth: &[RoutingOutcome],
) -> Result<EvaluationReport, FloodError> {
    let classes: Vec<FloodClass> = truth.iter().map(|o| o.class).collect();
    evaluate_labels(&det.labels, &classes)
}

pub fn evaluate_labels(
    labels: &[Label],
    truth: &[FloodClass],
) -> Result<EvaluationReport, FloodError> {
    if labels.len() != truth.len() {
        return Err(FloodError::LengthMismatch {
            detections: labels.len(),
            outcomes: truth.len(),
        });
    }
    let m = labels.len() as f64;
    let (mut detections, mut critical, mut hits) = (0, 0, 0);
    for (l, c) in labels.iter().zip(truth) {
        let flagged = l.is_flagged();
        let crit = c.is_critical();
        detections += flagged as usize;
        critical += crit as usize;
        hits += (flagged && crit) as usize;
    }
    Ok(EvaluationReport {
        false_positive_ratio: (detections > 0)
            .then(|| (detections - hits) as f64 / detections as f64),
        true_positive_ratio: (critical > 0).then(|| hits as f64 / critical as f64),
        extremes_detection_ratio: detections as f64 / m,
        true_extremes_ratio: critical as f64 / m,
        detections,
        critical,
        hits,
    })
}

/// One event per year from `model`, columns Q, V, L.
pub fn simulate_floods(model: &JointModel, years: usize, seed: u64) -> Result<Sample, FloodError> {
    if years == 0 {
        return Err(FloodError::EmptyExperiment);
    }
    if model.dim() != 3 {
        return Err(FloodError::Columns(model.dim()));
    }
    Ok(model.sample(years, seed)?)
}

pub fn route_sample(s: &Sample, dam: &DamSpec) -> Result<Vec<RoutingOutcome>, FloodError> {
    if s.ncols() != 3 {
        return Err(FloodError::Columns(s.ncols()));
    }
    s.rows()
        .map(|r| {
            if r[0] > 0.0 && r[1] > 0.0 {
                route_event(&FloodEvent::new(r[0], r[1], r[2])?, dam, None)
            } else {
                Ok(dry_event(r[2], dam))
            }
        })
        .collect()
}

/// The outcome of a year without inflow. The fitted GEV margins put a small
/// mass below zero (about 0.1% for V); those draws are treated as no flood.
pub fn dry_event(initial_level: f64, dam: &DamSpec) -> RoutingOutcome {
    RoutingOutcome {
        max_level: initial_level,
        class: dam.classify(initial_level),
        inflow_volume: 0.0,
        outflow_volume: 0.0,
        storage_change: 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub replicas: usize,
    pub years: usize,
    pub alpha: f64,
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    /// `None` selects the detector default `1/(2m)`.
    #[serde(default)]
    pub slack: Option<f64>,
    #[serde(default)]
    pub dam: DamSpec,
    #[serde(default = "JointModel::flood_default")]
    pub model: JointModel,
}

impl ExperimentConfig {
    pub fn new(replicas: usize, years: usize, alpha: f64, seed: u64) -> Self {
        ExperimentConfig {
            replicas,
            years,
            alpha,
            seed,
            mode: Mode::Survival,
            slack: None,
            dam: DamSpec::default(),
            model: JointModel::flood_default(),
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }
}

/// Everything computed for one simulated record.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaRun {
    pub index: usize,
    pub sample: Sample,
    pub outcomes: Vec<RoutingOutcome>,
    pub pca_direction: DirectionVector,
    pub classical: DetectionResult,
    pub pca: DetectionResult,
    pub classical_eval: EvaluationReport,
    pub pca_eval: EvaluationReport,
}

pub fn run_replica(cfg: &ExperimentConfig, index: usize) -> Result<ReplicaRun, FloodError> {
    let mut rng = stream(cfg.seed, index as u64);
    let sample = cfg.model.sample_with(cfg.years, &mut rng)?;
    let outcomes = route_sample(&sample, &cfg.dam)?;
    let e = DirectionVector::canonical(3).expect("n = 3");
    let pca_direction = first_pca_direction(&sample, PcaScaling::Covariance)?.direction;
    let make = |u: DirectionVector| {
        let mut c = DetectionConfig::new(cfg.alpha, u).with_mode(cfg.mode);
        c.slack = cfg.slack;
        c
    };
    let classical = detect(&sample, &make(e))?;
    let pca = detect(&sample, &make(pca_direction.clone()))?;
    let classical_eval = evaluate_detection(&classical, &outcomes)?;
    let pca_eval = evaluate_detection(&pca, &outcomes)?;
    Ok(ReplicaRun {
        index,
        sample,
        outcomes,
        pca_direction,
        classical,
        pca,
        classical_eval,
        pca_eval,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaSummary {
    pub replica: usize,
    pub pca_direction: Vec<f64>,
    pub classical: EvaluationReport,
    pub pca: EvaluationReport,
}

impl From<&ReplicaRun> for ReplicaSummary {
    fn from(r: &ReplicaRun) -> Self {
        ReplicaSummary {
            replica: r.index,
            pca_direction: r.pca_direction.components().to_vec(),
            classical: r.classical_eval,
            pca: r.pca_eval,
        }
    }
}

/// Ratio means over replicas; undefined ratios are skipped and counted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanRatios {
    pub false_positive_ratio: Option<f64>,
    pub false_positive_undefined: usize,
    pub true_positive_ratio: Option<f64>,
    pub true_positive_undefined: usize,
    pub extremes_detection_ratio: f64,
    pub true_extremes_ratio: f64,
}

impl MeanRatios {
    fn of(reports: &[EvaluationReport]) -> Self {
        let mean_opt = |vals: Vec<Option<f64>>| {
            let defined: Vec<f64> = vals.iter().flatten().copied().collect();
            let mean =
                (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
            (mean, vals.len() - defined.len())
        };
        let mean = |f: fn(&EvaluationReport) -> f64| {
            reports.iter().map(f).sum::<f64>() / reports.len() as f64
        };
        let (fpr, fpr_u) = mean_opt(reports.iter().map(|r| r.false_positive_ratio).collect());
        let (tpr, tpr_u) = mean_opt(reports.iter().map(|r| r.true_positive_ratio).collect());
        MeanRatios {
            false_positive_ratio: fpr,
            false_positive_undefined: fpr_u,
            true_positive_ratio: tpr,
            true_positive_undefined: tpr_u,
            extremes_detection_ratio: mean(|r| r.extremes_detection_ratio),
            true_extremes_ratio: mean(|r| r.true_extremes_ratio),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub replicas: usize,
    pub years: usize,
    pub alpha: f64,
    pub seed: u64,
    pub mode: Mode,
    pub classical: MeanRatios,
    pub pca: MeanRatios,
    /// Share of replicas where the PCA false-positive ratio is strictly below
    /// the classical one (replicas with either undefined count as failures).
    pub pca_fpr_lower_share: f64,
    /// Share of replicas where the classical detection ratio strictly exceeds
    /// the PCA one.
    pub classical_detects_more_share: f64,
    pub per_replica: Vec<ReplicaSummary>,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

impl ExperimentReport {
    pub fn from_runs(cfg: &ExperimentConfig, runs: &[ReplicaSummary]) -> Self {
        let n = runs.len() as f64;
        let classical: Vec<EvaluationReport> = runs.iter().map(|r| r.classical).collect();
        let pca: Vec<EvaluationReport> = runs.iter().map(|r| r.pca).collect();
        let fpr_lower = runs
            .iter()
            .filter(
                |r| match (r.pca.false_positive_ratio, r.classical.false_positive_ratio) {
                    (Some(p), Some(c)) => p < c,
                    _ => false,
                },
            )
            .count();
        let det_more = runs
            .iter()
            .filter(|r| r.classical.extremes_detection_ratio > r.pca.extremes_detection_ratio)
            .count();
        ExperimentReport {
            schema_version: REPORT_SCHEMA_VERSION,
            replicas: cfg.replicas,
            years: cfg.years,
            alpha: cfg.alpha,
            seed: cfg.seed,
            mode: cfg.mode,
            classical: MeanRatios::of(&classical),
            pca: MeanRatios::of(&pca),
            pca_fpr_lower_share: fpr_lower as f64 / n,
            classical_detects_more_share: det_more as f64 / n,
            per_replica: runs.to_vec(),
        }
    }
}

/// Runs every replica (in parallel when enabled) and calls `each` on the
/// full runs in replica order before they are reduced to summaries.
pub fn run_experiment_with<F: FnMut(&ReplicaRun)>(
    cfg: &ExperimentConfig,
    mut each: F,
) -> Result<ExperimentReport, FloodError> {
    if cfg.replicas == 0 || cfg.years == 0 {
        return Err(FloodError::EmptyExperiment);
    }
    cfg.dam.validate()?;
    let runs: Vec<Result<ReplicaRun, FloodError>> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..cfg.replicas)
                .into_par_iter()
                .map(|i| run_replica(cfg, i))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..cfg.replicas).map(|i| run_replica(cfg, i)).collect()
        }
    };
    let mut summaries = Vec::with_capacity(runs.len());
    for r in runs {
        let r = r?;
        each(&r);
        summaries.push(ReplicaSummary::from(&r));
    }
    Ok(ExperimentReport::from_runs(cfg, &summaries))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, FloodError> {
    run_experiment_with(cfg, |_| {})
}
