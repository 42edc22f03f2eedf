//! Real functions on a box with declared sup and Lipschitz bounds.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A function on `[lo, hi]^dim` with `‖f‖∞ ≤ sup_beta` and `Lip(f) ≤ lipschitz_l`.
#[derive(Clone)]
pub struct GridFunction {
    dim: usize,
    lo: f64,
    hi: f64,
    lipschitz_l: f64,
    sup_beta: f64,
    eval: Evaluator,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("dim", &self.dim)
            .field("box", &(self.lo, self.hi))
            .field("lipschitz_l", &self.lipschitz_l)
            .field("sup_beta", &self.sup_beta)
            .finish_non_exhaustive()
    }
}

/// Result of evaluating a function on the audit grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub points_per_axis: usize,
    pub max_abs: f64,
    pub max_slope: f64,
    pub passed: bool,
}

/// Audit points per axis; the full 1000 only in one dimension.
pub fn audit_points_per_axis(dim: usize) -> usize {
    match dim {
        0 | 1 => 1000,
        2 => 200,
        _ => 30,
    }
}

impl GridFunction {
    pub fn new(
        dim: usize,
        lo: f64,
        hi: f64,
        lipschitz_l: f64,
        sup_beta: f64,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("function dimension must be at least 1".into()));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("invalid box [{lo}, {hi}]")));
        }
        if !(lipschitz_l >= 0.0) || !(sup_beta >= 0.0) {
            return Err(Error::Domain(format!(
                "bounds must be nonnegative, got L = {lipschitz_l}, beta = {sup_beta}"
            )));
        }
        Ok(GridFunction {
            dim,
            lo,
            hi,
            lipschitz_l,
            sup_beta,
            eval: Arc::new(f),
        })
    }

    /// On the symmetric box `[−γ, γ]^dim`.
    pub fn on_symmetric_box(
        dim: usize,
        gamma: f64,
        lipschitz_l: f64,
        sup_beta: f64,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(dim, -gamma, gamma, lipschitz_l, sup_beta, f)
    }

    pub fn constant(dim: usize, lo: f64, hi: f64, c: f64) -> Result<Self> {
        Self::new(dim, lo, hi, 0.0, c.abs(), move |_| c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz_l
    }

    pub fn sup(&self) -> f64 {
        self.sup_beta
    }

    pub fn center(&self) -> Vec<f64> {
        vec![0.5 * (self.lo + self.hi); self.dim]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = 1e-12 * (self.hi - self.lo).max(1.0);
        x.len() == self.dim && x.iter().all(|&v| v >= self.lo - tol && v <= self.hi + tol)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Shape(format!(
                "point has {} coordinates, function has {}",
                x.len(),
                self.dim
            )));
        }
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "point {x:?} outside [{}, {}]^{}",
                self.lo, self.hi, self.dim
            )));
        }
        Ok((self.eval)(x))
    }

    /// Evaluates without the box check (callers handle extension).
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn eval1(&self, x: f64) -> f64 {
        (self.eval)(&[x])
    }

    /// Checks the declared bounds on a tensor grid: `|f| ≤ β` at every point
    /// and `|f(x + h e_k) − f(x)| / h ≤ L (1 + 1e-9)` between axis neighbours.
    pub fn audit(&self, points_per_axis: usize) -> Audit {
        let n = points_per_axis.max(2);
        let h = (self.hi - self.lo) / (n - 1) as f64;
        let coord = |i: usize| if i == n - 1 { self.hi } else { self.lo + i as f64 * h };
        let total = n.pow(self.dim as u32);
        let mut values = vec![0.0; total];
        let mut idx = vec![0usize; self.dim];
        let mut point = vec![0.0; self.dim];
        for v in values.iter_mut() {
            for (p, &i) in point.iter_mut().zip(&idx) {
                *p = coord(i);
            }
            *v = (self.eval)(&point);
            for k in (0..self.dim).rev() {
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
        }
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut max_slope = 0.0f64;
        for (flat, &v) in values.iter().enumerate() {
            let mut stride = 1;
            for _ in 0..self.dim {
                let i_k = (flat / stride) % n;
                if i_k + 1 < n {
                    let step = coord(i_k + 1) - coord(i_k);
                    max_slope = max_slope.max((values[flat + stride] - v).abs() / step);
                }
                stride *= n;
            }
        }
        let finite = values.iter().all(|v| v.is_finite());
        Audit {
            points_per_axis: n,
            max_abs,
            max_slope,
            passed: finite
                && max_abs <= self.sup_beta * (1.0 + 1e-12)
                && max_slope <= self.lipschitz_l * (1.0 + 1e-9) + 1e-12,
        }
    }

    pub fn audit_default(&self) -> Audit {
        self.audit(audit_points_per_axis(self.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_checks_box() {
        let f = GridFunction::on_symmetric_box(1, 1.0, 1.0, 1.0, |x| x[0]).unwrap();
        assert_eq!(f.eval(&[0.5]).unwrap(), 0.5);
        assert!(matches!(f.eval(&[1.5]), Err(Error::Domain(_))));
        assert!(matches!(f.eval(&[0.0, 0.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn audit_detects_violations() {
        let f = GridFunction::on_symmetric_box(1, 1.0, 1.0, 1.0, |x| x[0]).unwrap();
        assert!(f.audit_default().passed);
        let g = GridFunction::on_symmetric_box(1, 1.0, 0.5, 1.0, |x| x[0]).unwrap();
        assert!(!g.audit_default().passed);
        let h = GridFunction::on_symmetric_box(2, 1.0, 2.0, 1.0, |x| x[0] + x[1]).unwrap();
        let a = h.audit(20);
        assert!(!a.passed);
        assert!((a.max_abs - 2.0).abs() < 1e-12);
        let h2 = GridFunction::on_symmetric_box(2, 1.0, 2.0, 2.0, |x| 0.5 * (x[0] - x[1])).unwrap();
        let a2 = h2.audit(20);
        assert!(a2.passed);
        assert!((a2.max_slope - 0.5).abs() < 1e-9);
    }
}
