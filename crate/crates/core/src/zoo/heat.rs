//! Heat semigroup `S_t^ν[u] = Γ_ν(t, ·) * u` on the line.

use serde::{Deserialize, Serialize};

use super::grid_function::GridFunction;
use super::quadrature::{nodes_1d, QuadratureRule};
use crate::error::{Error, Result};

/// How a function given on a box is continued to the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    /// Constant, equal to the nearest boundary value.
    #[default]
    Clamp,
    /// Periodic with the box as period cell.
    Periodic,
}

impl Extension {
    pub fn map(self, y: f64, lo: f64, hi: f64) -> f64 {
        match self {
            Extension::Clamp => y.clamp(lo, hi),
            Extension::Periodic => lo + (y - lo).rem_euclid(hi - lo),
        }
    }

    pub(crate) fn eval(self, u: &GridFunction, y: f64) -> f64 {
        let (lo, hi) = u.bounds();
        u.eval1(self.map(y, lo, hi))
    }

    /// Where the extended function may fail to be smooth inside `[a, b]`,
    /// mirrored about the window centre so the node set stays symmetric and
    /// odd integrands cancel.
    pub(crate) fn kinks(self, lo: f64, hi: f64, a: f64, b: f64) -> Vec<f64> {
        let mid = 0.5 * (a + b);
        let mut k = self.raw_kinks(lo, hi, a, b);
        let mirrored: Vec<f64> = k.iter().map(|&c| 2.0 * mid - c).collect();
        k.extend(mirrored);
        k
    }

    fn raw_kinks(self, lo: f64, hi: f64, a: f64, b: f64) -> Vec<f64> {
        match self {
            Extension::Clamp => vec![lo, hi],
            Extension::Periodic => {
                let period = hi - lo;
                let first = ((a - lo) / period).floor() as i64;
                let last = ((b - lo) / period).ceil() as i64;
                (first..=last).map(|k| lo + k as f64 * period).collect()
            }
        }
    }
}

/// `Γ_ν(t, z) = exp(−z²/(4νt)) / √(4πνt)`
pub fn heat_kernel(nu: f64, t: f64, z: f64) -> f64 {
    (-z * z / (4.0 * nu * t)).exp() / (4.0 * std::f64::consts::PI * nu * t).sqrt()
}

/// Window half-width with Gaussian tail mass far below `1e-14`.
pub fn default_window(nu: f64, t: f64) -> f64 {
    8.0 * (2.0 * nu * t).sqrt()
}

pub(crate) fn check_viscous(nu: f64, t: f64, u: &GridFunction) -> Result<()> {
    if !(nu > 0.0) || !(t > 0.0) || !nu.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!("need nu > 0 and t > 0, got nu = {nu}, t = {t}")));
    }
    if u.dim() != 1 {
        return Err(Error::Shape(format!(
            "line operators act on 1D inputs, got dimension {}",
            u.dim()
        )));
    }
    Ok(())
}

/// `∫_{x−W}^{x+W} Γ_ν(t, x − y) ũ(y) dy` where `ũ` extends `u` off its box and
/// `W` is `rule.truncation_radius` or [`default_window`].
pub fn heat_apply(nu: f64, t: f64, u: &GridFunction, x: f64, rule: &QuadratureRule, ext: Extension) -> Result<f64> {
    check_viscous(nu, t, u)?;
    let w = rule.truncation_radius.unwrap_or_else(|| default_window(nu, t));
    let (lo, hi) = u.bounds();
    let (a, b) = (x - w, x + w);
    let nodes = nodes_1d(a, b, &ext.kinks(lo, hi, a, b), rule, |_| false)?;
    Ok(nodes.sum(|y| heat_kernel(nu, t, x - y) * ext.eval(u, y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_preserved() {
        let rule = QuadratureRule::trapezoid(2001);
        let c = GridFunction::constant(1, -1.0, 1.0, 0.7).unwrap();
        for x in [-1.0, 0.0, 0.4] {
            let v = heat_apply(0.3, 0.2, &c, x, &rule, Extension::Clamp).unwrap();
            assert!((v - 0.7).abs() < 1e-6);
        }
    }

    #[test]
    fn gaussian_moments() {
        let rule = QuadratureRule::trapezoid(2001);
        let lin = GridFunction::on_symmetric_box(1, 20.0, 1.0, 20.0, |y| y[0]).unwrap();
        assert!((heat_apply(0.5, 1.0, &lin, 0.3, &rule, Extension::Clamp).unwrap() - 0.3).abs() < 1e-6);
        let g = GridFunction::on_symmetric_box(1, 20.0, 1.0, 1.0, |y| (-y[0] * y[0] / 2.0).exp()).unwrap();
        let v = heat_apply(0.5, 1.0, &g, 0.0, &rule, Extension::Clamp).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn periodic_map() {
        assert!((Extension::Periodic.map(1.5, -1.0, 1.0) + 0.5).abs() < 1e-15);
        assert_eq!(Extension::Clamp.map(1.5, -1.0, 1.0), 1.0);
        let c = GridFunction::constant(1, -1.0, 1.0, 1.0).unwrap();
        assert!(heat_apply(0.0, 1.0, &c, 0.0, &QuadratureRule::default(), Extension::Clamp).is_err());
    }
}
