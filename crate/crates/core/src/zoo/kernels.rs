//! Nonlocal integral operators with a spatially varying parameter `α(x)`.

use serde::{Deserialize, Serialize};

use super::grid_function::GridFunction;
use super::quadrature::{nodes_1d, quad_integrate_box, QuadratureRule};
use crate::error::{Error, Result};

/// Radial profile `ρ` of a homogeneous kernel. Each has unit mass on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `½ · 1_{r ≤ 1}`
    #[default]
    Indicator,
    /// `(1 − r)_+`
    Hat,
    /// `exp(−r²)/√π`
    Gaussian,
}

impl Profile {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            Profile::Indicator => {
                if r <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Profile::Hat => (1.0 - r).max(0.0),
            Profile::Gaussian => (-r * r).exp() / std::f64::consts::PI.sqrt(),
        }
    }

    fn compact(self) -> bool {
        !matches!(self, Profile::Gaussian)
    }

    /// `∫_{ℝ^d} ρ(|z|) dz`.
    pub fn mass(self, d: usize) -> f64 {
        let d = d as f64;
        let ball = std::f64::consts::PI.powf(d / 2.0) / libm::tgamma(d / 2.0 + 1.0);
        match self {
            Profile::Indicator => 0.5 * ball,
            Profile::Hat => ball / (d + 1.0),
            Profile::Gaussian => std::f64::consts::PI.powf((d - 1.0) / 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// `K_α(x, y) = ρ(|x − y|/α(x)) / α(x)^d`
    Homogeneous { profile: Profile },
    /// `K_α(x, y) = c / |x − y|^{d + 2α(x)}` outside the truncation ball.
    Fractional { c: f64 },
}

/// Area of the unit sphere in `ℝ^d`.
pub(crate) fn sphere_area(d: usize) -> f64 {
    let d = d as f64;
    2.0 * std::f64::consts::PI.powf(d / 2.0) / libm::tgamma(d / 2.0)
}

/// `∫_{Ω_U} K_α(x, y) u(y) dy` with `Ω_U` the box of `u`.
pub fn kernel_apply(
    kernel: &Kernel,
    alpha: &GridFunction,
    u: &GridFunction,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    let d = u.dim();
    if x.len() != d {
        return Err(Error::Shape(format!(
            "point has {} coordinates, input functions have {d}",
            x.len()
        )));
    }
    let a = alpha.eval(x)?;
    let (lo, hi) = u.bounds();
    let dist = |y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    match *kernel {
        Kernel::Homogeneous { profile } => {
            if !(a > 0.0) {
                return Err(Error::Domain(format!(
                    "interaction length must be positive, got {a} at {x:?}"
                )));
            }
            let norm = a.powi(d as i32);
            if d == 1 {
                let breaks: &[f64] = if profile.compact() { &[x[0] - a, x[0] + a] } else { &[] };
                let nodes = nodes_1d(lo, hi, breaks, rule, |_| false)?;
                Ok(nodes.sum(|y| profile.eval((x[0] - y).abs() / a) / norm * u.eval1(y)))
            } else {
                quad_integrate_box(
                    |y| profile.eval(dist(y) / a) / norm * u.eval_unchecked(y),
                    d,
                    lo,
                    hi,
                    rule,
                )
            }
        }
        Kernel::Fractional { c } => {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Domain(format!(
                    "fractional order must lie in (0, 1), got {a} at {x:?}"
                )));
            }
            let r = rule
                .truncation_radius
                .ok_or_else(|| Error::Config("the fractional kernel needs quadrature.truncation_radius".into()))?;
            let power = d as f64 + 2.0 * a;
            if d == 1 {
                let x0 = x[0];
                let nodes = nodes_1d(lo, hi, &[x0 - r, x0 + r], rule, |m| (m - x0).abs() < r)?;
                Ok(nodes.sum(|y| {
                    let s = (x0 - y).abs();
                    if s < r {
                        0.0
                    } else {
                        c / s.powf(power) * u.eval1(y)
                    }
                }))
            } else {
                quad_integrate_box(
                    |y| {
                        let s = dist(y);
                        if s < r {
                            0.0
                        } else {
                            c / s.powf(power) * u.eval_unchecked(y)
                        }
                    },
                    d,
                    lo,
                    hi,
                    rule,
                )
            }
        }
    }
}
