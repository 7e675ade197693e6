//! Joint models: marginals plus a copula tree, glued by Sklar's theorem.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{copula_draw, oriented_cdf, CopulaError, CopulaModel};
use crate::margins::{GevParams, Marginal};
use crate::random::{open_unit, seeded};
use crate::sample::Sample;

pub const JOINT_SCHEMA_VERSION: u32 = 1;

/// A pair copula on two coordinates, or a sub-tree multiplied by an
/// independent coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum CopulaTree {
    Pair {
        copula: CopulaModel,
        coords: [usize; 2],
    },
    Nest {
        inner: Box<CopulaTree>,
        coord: usize,
    },
}

impl CopulaTree {
    fn coords_into(&self, out: &mut Vec<usize>) {
        match self {
            CopulaTree::Pair { coords, .. } => out.extend_from_slice(coords),
            CopulaTree::Nest { inner, coord } => {
                inner.coords_into(out);
                out.push(*coord);
            }
        }
    }

    pub fn coordinates(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.coords_into(&mut v);
        v
    }

    fn eval(&self, v: &[f64]) -> f64 {
        match self {
            CopulaTree::Pair { copula, coords } => oriented_cdf(copula, v[coords[0]], v[coords[1]]),
            CopulaTree::Nest { inner, coord } => v[*coord] * inner.eval(v),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> Result<(), CopulaError> {
        match self {
            CopulaTree::Pair { copula, coords } => {
                let [a, b] = copula_draw(copula, rng)?;
                out[coords[0]] = a;
                out[coords[1]] = b;
            }
            CopulaTree::Nest { inner, coord } => {
                inner.draw(rng, out)?;
                out[*coord] = open_unit(rng);
            }
        }
        Ok(())
    }

    fn validate_copulas(&self) -> Result<(), CopulaError> {
        match self {
            CopulaTree::Pair { copula, .. } => copula.validate(),
            CopulaTree::Nest { inner, .. } => inner.validate_copulas(),
        }
    }
}

/// How unit-cube points become data: `x = F^{-1}(v)` or `x = Fbar^{-1}(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SklarOrientation {
    #[default]
    Distribution,
    Survival,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointModel {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub orientation: SklarOrientation,
    pub marginals: Vec<Marginal>,
    pub copula: CopulaTree,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column_names: Option<Vec<String>>,
}

fn schema_version() -> u32 {
    JOINT_SCHEMA_VERSION
}

impl JointModel {
    pub fn new(marginals: Vec<Marginal>, copula: CopulaTree) -> Result<Self, CopulaError> {
        let j = JointModel {
            schema_version: JOINT_SCHEMA_VERSION,
            orientation: SklarOrientation::Distribution,
            marginals,
            copula,
            column_names: None,
        };
        j.validate()?;
        Ok(j)
    }

    pub fn with_orientation(mut self, orientation: SklarOrientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self, CopulaError> {
        if names.len() != self.dim() {
            return Err(CopulaError::DimensionMismatch {
                expected: self.dim(),
                found: names.len(),
            });
        }
        self.column_names = Some(names);
        Ok(self)
    }

    /// Gumbel(3.1378) on (Q, V), with the water level L independent; GEV
    /// margins for peak, volume and initial level.
    pub fn flood_default() -> Self {
        let gev = |l, s, g| Marginal::Gev(GevParams::new(l, s, g).expect("valid GEV"));
        JointModel::new(
            vec![
                gev(59.358, 36.203, 0.368),
                gev(1.7231, 1.5246, 0.6149),
                gev(780.6261, 0.7623, -1.5476),
            ],
            CopulaTree::Nest {
                inner: Box::new(CopulaTree::Pair {
                    copula: CopulaModel::gumbel(3.1378).expect("valid theta"),
                    coords: [0, 1],
                }),
                coord: 2,
            },
        )
        .expect("valid model")
        .with_column_names(vec!["Q".into(), "V".into(), "L".into()])
        .expect("three names")
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.column_names
            .clone()
            .unwrap_or_else(|| crate::sample::default_names(self.dim()))
    }

    pub fn validate(&self) -> Result<(), CopulaError> {
        let n = self.dim();
        let mut coords = self.copula.coordinates();
        coords.sort_unstable();
        if coords != (0..n).collect::<Vec<_>>() {
            return Err(CopulaError::TreeInvalid(format!(
                "tree covers coordinates {:?} but the model has {n} marginals",
                self.copula.coordinates()
            )));
        }
        for m in &self.marginals {
            m.validate()?;
        }
        if let Some(names) = &self.column_names {
            if names.len() != n {
                return Err(CopulaError::DimensionMismatch {
                    expected: n,
                    found: names.len(),
                });
            }
        }
        self.copula.validate_copulas()
    }

    /// Unit-cube draws from the copula tree.
    pub fn sample_unit_with<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Vec<f64>>, CopulaError> {
        self.validate()?;
        let n = self.dim();
        (0..count)
            .map(|_| {
                let mut v = vec![0.0; n];
                self.copula.draw(rng, &mut v)?;
                Ok(v)
            })
            .collect()
    }

    /// Data-space draws: copula tree, then the marginal quantiles.
    pub fn sample_with<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<Sample, CopulaError> {
        let pts = self.sample_unit_with(count, rng)?;
        sklar_transform(self, &pts)
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Sample, CopulaError> {
        self.sample_with(count, &mut seeded(seed))
    }
}

/// The joint copula value at `v`.
pub fn nested_cdf(j: &JointModel, v: &[f64]) -> Result<f64, CopulaError> {
    j.validate()?;
    if v.len() != j.dim() {
        return Err(CopulaError::DimensionMismatch {
            expected: j.dim(),
            found: v.len(),
        });
    }
    if let Some(&bad) = v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(CopulaError::OutOfUnitSquare(bad, bad));
    }
    Ok(j.copula.eval(v))
}

/// Maps unit-cube points to data space through the marginal quantiles.
pub fn sklar_transform<P: AsRef<[f64]>>(
    j: &JointModel,
    points: &[P],
) -> Result<Sample, CopulaError> {
    let n = j.dim();
    let mut data = Vec::with_capacity(points.len() * n);
    for p in points {
        let p = p.as_ref();
        if p.len() != n {
            return Err(CopulaError::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        for (m, &v) in j.marginals.iter().zip(p) {
            data.push(match j.orientation {
                SklarOrientation::Distribution => m.quantile(v)?,
                SklarOrientation::Survival => m.survival_quantile(v)?,
            });
        }
    }
    Ok(Sample::from_flat_named(data, n, j.names())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::copula_cdf;

    #[test]
    fn flood_model_nesting() {
        let j = JointModel::flood_default();
        let pair = CopulaModel::gumbel(3.1378).unwrap();
        let c = copula_cdf(&pair, 0.3, 0.7).unwrap();
        assert!((nested_cdf(&j, &[0.3, 0.7, 1.0]).unwrap() - c).abs() < 1e-15);
        assert!((nested_cdf(&j, &[1.0, 1.0, 0.5]).unwrap() - 0.5).abs() < 1e-15);
        let half = copula_cdf(&pair, 0.5, 0.5).unwrap();
        assert!((nested_cdf(&j, &[0.5, 0.5, 0.5]).unwrap() - 0.5 * half).abs() < 1e-15);
    }

    #[test]
    fn tree_must_cover_each_coordinate_once() {
        let pair = CopulaTree::Pair {
            copula: CopulaModel::independence(),
            coords: [0, 1],
        };
        let dup = CopulaTree::Nest {
            inner: Box::new(pair.clone()),
            coord: 1,
        };
        let m = vec![Marginal::Uniform; 3];
        assert!(matches!(
            JointModel::new(m.clone(), dup),
            Err(CopulaError::TreeInvalid(_))
        ));
        assert!(matches!(
            JointModel::new(m, pair),
            Err(CopulaError::TreeInvalid(_))
        ));
    }

    #[test]
    fn uniform_margins_are_identity() {
        let j = JointModel::new(
            vec![Marginal::Uniform; 2],
            CopulaTree::Pair {
                copula: CopulaModel::frank(5.0).unwrap(),
                coords: [0, 1],
            },
        )
        .unwrap();
        let pts = vec![vec![0.1, 0.9], vec![0.5, 0.25]];
        let s = sklar_transform(&j, &pts).unwrap();
        assert_eq!(s.as_flat(), &[0.1, 0.9, 0.5, 0.25]);
    }

    #[test]
    fn gumbel_margin_maps_e_inverse_to_location() {
        let g = Marginal::Gev(GevParams::new(3.0, 2.0, 0.0).unwrap());
        let j = JointModel::new(
            vec![g, g],
            CopulaTree::Pair {
                copula: CopulaModel::independence(),
                coords: [0, 1],
            },
        )
        .unwrap();
        let v = (-1.0f64).exp();
        let s = sklar_transform(&j, &[[v, v]]).unwrap();
        for x in s.row(0) {
            assert!((x - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn json_roundtrip() {
        let j = JointModel::flood_default();
        let text = serde_json::to_string(&j).unwrap();
        let back: JointModel = serde_json::from_str(&text).unwrap();
        assert_eq!(j, back);
        assert!(text.contains("\"schema_version\":1"));
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let j = JointModel::flood_default();
        let a = j.sample(50, 9).unwrap();
        assert_eq!(a, j.sample(50, 9).unwrap());
        assert_eq!(a.column_names(), &["Q", "V", "L"]);
        let top = GevParams::new(780.6261, 0.7623, -1.5476)
            .unwrap()
            .support_endpoint()
            .unwrap();
        assert!(a.column(2).all(|l| l <= top));
    }
}
