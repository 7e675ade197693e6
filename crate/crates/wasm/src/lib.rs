//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string; errors come back as a JS exception
//! carrying the message.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use direx::copulas::{
    copula_level_sets, BivariateGaussian, CopulaFamily, CopulaModel, Orientation,
};
use direx::detector::{detect, DetectionConfig, Label, Mode};
use direx::directions::{first_pca_direction, PcaScaling};
use direx::geometry::{build_rotation, DirectionVector};
use direx::random::seeded;
use direx::sample::Sample;

#[derive(Serialize)]
struct Detection {
    points: Vec<[f64; 2]>,
    labels: Vec<Label>,
    probabilities: Vec<f64>,
    direction: Vec<f64>,
    upper: usize,
    quantile: usize,
    lower: usize,
}

fn direction_from_angle(degrees: f64) -> Result<DirectionVector, String> {
    let r = degrees.to_radians();
    DirectionVector::normalized(vec![r.cos(), r.sin()]).map_err(|e| e.to_string())
}

/// Samples a bivariate Gaussian and labels it in the direction at
/// `angle_deg` (or the first principal direction when `use_pca`).
#[allow(clippy::too_many_arguments)]
pub fn gaussian_detection(
    count: usize,
    mean: [f64; 2],
    variance: [f64; 2],
    rho: f64,
    angle_deg: f64,
    use_pca: bool,
    alpha: f64,
    distribution_mode: bool,
    seed: u64,
) -> Result<String, String> {
    if count == 0 || count > 20_000 {
        return Err("count must be in 1..=20000".into());
    }
    let g = BivariateGaussian::new(mean, variance, rho).map_err(|e| e.to_string())?;
    let pts = g.sample_with(count, &mut seeded(seed));
    let s = Sample::from_rows(&pts).map_err(|e| e.to_string())?;
    let u = if use_pca {
        first_pca_direction(&s, PcaScaling::Covariance)
            .map_err(|e| e.to_string())?
            .direction
    } else {
        direction_from_angle(angle_deg)?
    };
    let mode = if distribution_mode {
        Mode::Distribution
    } else {
        Mode::Survival
    };
    let det = detect(&s, &DetectionConfig::new(alpha, u.clone()).with_mode(mode))
        .map_err(|e| e.to_string())?;
    let out = Detection {
        upper: det.count(Label::Upper),
        quantile: det.count(Label::Quantile),
        lower: det.count(Label::Lower),
        probabilities: det.probabilities.iter().map(|p| p.value()).collect(),
        labels: det.labels,
        direction: u.into_inner(),
        points: pts,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct OrthantView {
    direction: [f64; 2],
    rotation: [[f64; 2]; 2],
    /// Unit vectors along the two boundary rays of the orthant.
    edges: [[f64; 2]; 2],
}

/// Rotation and boundary rays of the oriented orthant for the direction at
/// `angle_deg`. The orthant at `x` is `x + a * edge0 + b * edge1`, `a, b >= 0`.
pub fn orthant_view(angle_deg: f64) -> Result<String, String> {
    let u = direction_from_angle(angle_deg)?;
    let r = build_rotation(&u);
    let c = u.components();
    let view = OrthantView {
        direction: [c[0], c[1]],
        rotation: [[r.get(0, 0), r.get(0, 1)], [r.get(1, 0), r.get(1, 1)]],
        // columns of R^T, i.e. rows of R
        edges: [[r.get(0, 0), r.get(0, 1)], [r.get(1, 0), r.get(1, 1)]],
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct LevelSets {
    grid: usize,
    values: Vec<f64>,
    labels: Vec<Label>,
}

/// Copula level-set lattice; `family` is gaussian, frank, gumbel or
/// independence, `orientation` is plain, survival, rot90 or rot270.
pub fn level_sets(
    family: &str,
    param: f64,
    orientation: &str,
    alpha: f64,
    grid: usize,
) -> Result<String, String> {
    let family = match family {
        "gaussian" => CopulaFamily::Gaussian { rho: param },
        "frank" => CopulaFamily::Frank { theta: param },
        "gumbel" => CopulaFamily::Gumbel { theta: param },
        "independence" => CopulaFamily::Independence,
        other => return Err(format!("unknown family {other:?}")),
    };
    let orientation = match orientation {
        "plain" => Orientation::Plain,
        "survival" => Orientation::Survival,
        "rot90" => Orientation::Rot90,
        "rot270" => Orientation::Rot270,
        other => return Err(format!("unknown orientation {other:?}")),
    };
    if grid > 400 {
        return Err("grid must be at most 400".into());
    }
    let c = CopulaModel::oriented(family, orientation).map_err(|e| e.to_string())?;
    let g = copula_level_sets(&c, alpha, grid).map_err(|e| e.to_string())?;
    serde_json::to_string(&LevelSets {
        grid: g.grid,
        values: g.values,
        labels: g.labels,
    })
    .map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = gaussianDetection)]
#[allow(clippy::too_many_arguments)]
pub fn gaussian_detection_js(
    count: usize,
    mean1: f64,
    mean2: f64,
    var1: f64,
    var2: f64,
    rho: f64,
    angle_deg: f64,
    use_pca: bool,
    alpha: f64,
    distribution_mode: bool,
    seed: u32,
) -> Result<String, JsValue> {
    gaussian_detection(
        count,
        [mean1, mean2],
        [var1, var2],
        rho,
        angle_deg,
        use_pca,
        alpha,
        distribution_mode,
        seed as u64,
    )
    .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = orthantView)]
pub fn orthant_view_js(angle_deg: f64) -> Result<String, JsValue> {
    orthant_view(angle_deg).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = levelSets)]
pub fn level_sets_js(
    family: &str,
    param: f64,
    orientation: &str,
    alpha: f64,
    grid: usize,
) -> Result<String, JsValue> {
    level_sets(family, param, orientation, alpha, grid).map_err(|e| JsValue::from_str(&e))
}
