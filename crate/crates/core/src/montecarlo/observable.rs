use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{apply_flow, lattice_from_matrix, FlowParam, TorusPoint};
use crate::testfns::{character_eval, siegel_transform, BumpSpec, TrigPoly};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    #[default]
    Re,
    Im,
}

/// A real function on `Y`, evaluated along the translate `a(t)Λ_B`.
///
/// Lattice observables (`Siegel`) see `a(t)Λ_B`; torus observables
/// (`Character`, `Trig`) see `B` itself and ignore `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Observable {
    Constant { value: f64 },
    Siegel(BumpSpec),
    Character {
        freq: Vec<i64>,
        #[serde(default)]
        part: Part,
    },
    Trig {
        poly: TrigPoly,
        #[serde(default)]
        part: Part,
    },
    Product { factors: Vec<Observable> },
}

impl Observable {
    pub fn constant(value: f64) -> Self {
        Observable::Constant { value }
    }

    pub fn check_shape(&self, m: usize, n: usize) -> Result<()> {
        match self {
            Observable::Constant { .. } => Ok(()),
            Observable::Siegel(b) if b.dim != m + n => Err(Error::Dimension { expected: m + n, got: b.dim }),
            Observable::Siegel(_) => Ok(()),
            Observable::Character { freq, .. } if freq.len() != m * n => {
                Err(Error::Dimension { expected: m * n, got: freq.len() })
            }
            Observable::Character { .. } => Ok(()),
            Observable::Trig { poly, .. } if (poly.m(), poly.n()) != (m, n) => {
                Err(Error::Dimension { expected: m * n, got: poly.m() * poly.n() })
            }
            Observable::Trig { .. } => Ok(()),
            Observable::Product { factors } => factors.iter().try_for_each(|f| f.check_shape(m, n)),
        }
    }

    pub fn eval(&self, b: &TorusPoint, t: &FlowParam) -> Result<f64> {
        let pick = |z: num_complex::Complex64, part: Part| match part {
            Part::Re => z.re,
            Part::Im => z.im,
        };
        match self {
            Observable::Constant { value } => Ok(*value),
            Observable::Siegel(spec) => siegel_transform(spec, &apply_flow(t, &lattice_from_matrix(b))?),
            Observable::Character { freq, part } => Ok(pick(character_eval(freq, b), *part)),
            Observable::Trig { poly, part } => Ok(pick(poly.eval(b), *part)),
            Observable::Product { factors } => factors.iter().try_fold(1.0, |acc, f| Ok(acc * f.eval(b, t)?)),
        }
    }

    /// Whether the value is the same at every point.
    pub fn is_constant(&self) -> bool {
        match self {
            Observable::Constant { .. } => true,
            Observable::Siegel(spec) => spec.amplitude == 0.0,
            Observable::Product { factors } => factors.iter().all(Observable::is_constant),
            _ => false,
        }
    }
}
