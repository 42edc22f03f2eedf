//! One-dimensional and tensor-product quadrature.
//!
//! Integrands in this crate are often only piecewise smooth (kinks of the
//! Green kernel, support edges of compact kernels, truncation balls), so the 1D
//! rules accept breakpoints: the trapezoid rule is applied per piece, and the
//! node budget is shared in proportion to piece length.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    #[default]
    Trapezoid,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    /// Nodes per interval (trapezoid, per axis) or total samples (Monte Carlo).
    pub node_count: usize,
    pub seed: u64,
    /// Excluded ball radius for singular kernels, or the half-width of the
    /// window for integrals over the whole line.
    pub truncation_radius: Option<f64>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            kind: QuadratureKind::Trapezoid,
            node_count: 1001,
            seed: 0,
            truncation_radius: None,
        }
    }
}

impl QuadratureRule {
    pub fn trapezoid(node_count: usize) -> Self {
        QuadratureRule {
            node_count,
            ..Default::default()
        }
    }

    pub fn monte_carlo(node_count: usize, seed: u64) -> Self {
        QuadratureRule {
            kind: QuadratureKind::MonteCarlo,
            node_count,
            seed,
            truncation_radius: None,
        }
    }

    pub fn with_truncation(mut self, r: f64) -> Self {
        self.truncation_radius = Some(r);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 2 {
            return Err(Error::Config(format!(
                "quadrature needs node_count >= 2, got {}",
                self.node_count
            )));
        }
        if let Some(r) = self.truncation_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Config(format!("truncation_radius must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// Sorted nodes with weights; `integral = scale · Σ w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nodes {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    scale: f64,
    count: f64,
}

impl Nodes {
    pub fn sum(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let s: f64 = self.x.iter().zip(&self.w).map(|(&x, &w)| w * f(x)).sum();
        self.finish(s)
    }

    /// Applies the rule's normalization to a raw weighted sum.
    pub fn finish(&self, weighted_sum: f64) -> f64 {
        // Monte Carlo: divide last so that constant integrands come out exact.
        weighted_sum * self.scale / self.count
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!("degenerate or infinite interval [{a}, {b}]")));
    }
    Ok(())
}

/// Nodes on `[a, b]`. Breakpoints split the trapezoid rule into pieces; pieces
/// whose midpoint satisfies `skip` contribute nothing. For Monte Carlo the
/// breakpoints are ignored and skipped nodes get weight 0.
pub fn nodes_1d(a: f64, b: f64, breaks: &[f64], rule: &QuadratureRule, skip: impl Fn(f64) -> bool) -> Result<Nodes> {
    check_interval(a, b)?;
    rule.validate()?;
    match rule.kind {
        QuadratureKind::Trapezoid => {
            let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut ends = Vec::with_capacity(cuts.len() + 2);
            ends.push(a);
            ends.extend(cuts);
            ends.push(b);
            let total = b - a;
            let mut x = Vec::with_capacity(rule.node_count + ends.len());
            let mut w: Vec<f64> = Vec::with_capacity(rule.node_count + ends.len());
            for piece in ends.windows(2) {
                let (lo, hi) = (piece[0], piece[1]);
                if hi - lo <= 0.0 || skip(0.5 * (lo + hi)) {
                    continue;
                }
                let n = (((rule.node_count - 1) as f64 * (hi - lo) / total).round() as usize).max(1);
                let h = (hi - lo) / n as f64;
                for k in 0..=n {
                    let xk = if k == n { hi } else { lo + k as f64 * h };
                    let wk = if k == 0 || k == n { 0.5 * h } else { h };
                    if k == 0 && x.last() == Some(&lo) {
                        *w.last_mut().unwrap() += wk;
                    } else {
                        x.push(xk);
                        w.push(wk);
                    }
                }
            }
            Ok(Nodes {
                x,
                w,
                scale: 1.0,
                count: 1.0,
            })
        }
        QuadratureKind::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(rule.seed);
            let mut x: Vec<f64> = (0..rule.node_count).map(|_| rng.random_range(a..b)).collect();
            x.sort_by(f64::total_cmp);
            let w = x.iter().map(|&xi| if skip(xi) { 0.0 } else { 1.0 }).collect();
            Ok(Nodes {
                x,
                w,
                scale: b - a,
                count: rule.node_count as f64,
            })
        }
    }
}

/// `∫_a^b f` with the given rule.
pub fn quad_integrate(f: impl Fn(f64) -> f64, interval: (f64, f64), rule: &QuadratureRule) -> Result<f64> {
    Ok(nodes_1d(interval.0, interval.1, &[], rule, |_| false)?.sum(f))
}

/// `∫ f` over the box `[lo, hi]^dim`: tensor trapezoid with `node_count` nodes
/// per axis, or `node_count` uniform samples.
pub fn quad_integrate_box(
    f: impl Fn(&[f64]) -> f64,
    dim: usize,
    lo: f64,
    hi: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    check_interval(lo, hi)?;
    rule.validate()?;
    if dim == 0 {
        return Err(Error::Domain("box dimension must be at least 1".into()));
    }
    let mut point = vec![0.0; dim];
    match rule.kind {
        QuadratureKind::Trapezoid => {
            let axis = nodes_1d(lo, hi, &[], rule, |_| false)?;
            let n = axis.len();
            let total = n
                .checked_pow(dim as u32)
                .ok_or_else(|| Error::Config("tensor grid too large".into()))?;
            let mut s = 0.0;
            let mut idx = vec![0usize; dim];
            for _ in 0..total {
                let mut w = 1.0;
                for (k, &i) in idx.iter().enumerate() {
                    point[k] = axis.x[i];
                    w *= axis.w[i];
                }
                s += w * f(&point);
                for k in (0..dim).rev() {
                    idx[k] += 1;
                    if idx[k] < n {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            Ok(s)
        }
        QuadratureKind::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(rule.seed);
            let mut s = 0.0;
            for _ in 0..rule.node_count {
                for p in point.iter_mut() {
                    *p = rng.random_range(lo..hi);
                }
                s += f(&point);
            }
            Ok(s * (hi - lo).powi(dim as i32) / rule.node_count as f64)
        }
    }
}
