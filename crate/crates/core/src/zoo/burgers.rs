//! Viscous Burgers `z_t + z z_x = ν z_xx` on the line via Cole–Hopf, and an
//! explicit finite-difference solver used as an independent check.

use super::grid_function::GridFunction;
use super::heat::{check_viscous, default_window, Extension};
use super::quadrature::{nodes_1d, QuadratureRule};
use crate::error::{Error, Result};

/// `z(t, x) = (1/t) ∫(x−y) Γ E dy / ∫ Γ E dy` with
/// `E(y) = exp(−(1/2ν) ∫_0^y u)`.
///
/// The antiderivative is a cumulative trapezoid on the outer nodes, anchored
/// at the left end of the window; the anchor only rescales numerator and
/// denominator alike. Weights are formed in log space and shifted by their
/// maximum before exponentiation.
pub fn burgers_cole_hopf(
    nu: f64,
    t: f64,
    u: &GridFunction,
    x: f64,
    rule: &QuadratureRule,
    ext: Extension,
) -> Result<f64> {
    check_viscous(nu, t, u)?;
    // the Gaussian is centred at the characteristic foot x − t·u(y), which may
    // sit up to t·sup|u| away from x
    let w = rule.truncation_radius.unwrap_or_else(|| default_window(nu, t)) + t * u.sup();
    let (lo, hi) = u.bounds();
    let (a, b) = (x - w, x + w);
    let nodes = nodes_1d(a, b, &ext.kinks(lo, hi, a, b), rule, |_| false)?;
    let vals: Vec<f64> = nodes.x.iter().map(|&y| ext.eval(u, y)).collect();
    let mut log_w = Vec::with_capacity(nodes.len());
    let mut anti = 0.0;
    for k in 0..nodes.len() {
        if k > 0 {
            anti += 0.5 * (vals[k] + vals[k - 1]) * (nodes.x[k] - nodes.x[k - 1]);
        }
        let z = x - nodes.x[k];
        log_w.push(-z * z / (4.0 * nu * t) - anti / (2.0 * nu));
    }
    let shift = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for ((xk, wk), lw) in nodes.x.iter().zip(&nodes.w).zip(&log_w) {
        let e = wk * (lw - shift).exp();
        num += (x - xk) * e;
        den += e;
    }
    if !(den >= 1e-300) || !num.is_finite() {
        return Err(Error::Underflow(format!(
            "Cole-Hopf denominator {den:e} at x = {x}; try a larger nu or a smaller t"
        )));
    }
    Ok(num / (t * den))
}

/// Solves Burgers on the periodic box of `u` with `grid_n` cells, central
/// differences in space and `steps` forward Euler steps. Returns the periodic
/// piecewise-linear interpolant of the final field.
pub fn burgers_fd_reference(nu: f64, t: f64, u: &GridFunction, grid_n: usize, steps: usize) -> Result<GridFunction> {
    check_viscous(nu, t, u)?;
    if grid_n < 3 || steps == 0 {
        return Err(Error::Config(format!(
            "need grid_n >= 3 and steps >= 1, got {grid_n}, {steps}"
        )));
    }
    let (lo, hi) = u.bounds();
    let dx = (hi - lo) / grid_n as f64;
    let dt = t / steps as f64;
    let mut z: Vec<f64> = (0..grid_n).map(|k| u.eval1(lo + k as f64 * dx)).collect();
    let umax = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut limit = dx * dx / (2.0 * nu);
    if umax > 0.0 {
        limit = limit.min(dx / umax);
    }
    if dt > limit / 2.0 {
        return Err(Error::Config(format!(
            "unstable explicit scheme: dt = {dt:e} exceeds {:e}; increase steps to at least {}",
            limit / 2.0,
            (2.0 * t / limit).ceil()
        )));
    }
    let mut next = vec![0.0; grid_n];
    let (c_adv, c_diff) = (dt / (2.0 * dx), nu * dt / (dx * dx));
    for _ in 0..steps {
        for k in 0..grid_n {
            let l = z[(k + grid_n - 1) % grid_n];
            let r = z[(k + 1) % grid_n];
            next[k] = z[k] - c_adv * z[k] * (r - l) + c_diff * (r - 2.0 * z[k] + l);
        }
        std::mem::swap(&mut z, &mut next);
        if !z.iter().all(|v| v.is_finite()) {
            return Err(Error::Underflow("finite-difference field became non-finite".into()));
        }
    }
    let sup = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lip = (0..grid_n).fold(0.0f64, |m, k| m.max((z[(k + 1) % grid_n] - z[k]).abs() / dx));
    GridFunction::new(1, lo, hi, lip, sup, move |y| {
        let s = (y[0] - lo).rem_euclid(hi - lo) / dx;
        let k = (s.floor() as usize).min(grid_n - 1);
        let f = s - k as f64;
        (1.0 - f) * z[k] + f * z[(k + 1) % grid_n]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine() -> GridFunction {
        let pi = std::f64::consts::PI;
        GridFunction::on_symmetric_box(1, 1.0, pi, 1.0, move |y| (pi * y[0]).sin()).unwrap()
    }

    #[test]
    fn trivial_data() {
        let rule = QuadratureRule::trapezoid(2001);
        let zero = GridFunction::constant(1, -1.0, 1.0, 0.0).unwrap();
        assert!(
            burgers_cole_hopf(0.1, 0.5, &zero, 0.3, &rule, Extension::Clamp)
                .unwrap()
                .abs()
                < 1e-12
        );
        let c = GridFunction::constant(1, -1.0, 1.0, 0.4).unwrap();
        let v = burgers_cole_hopf(0.1, 0.5, &c, 0.3, &rule, Extension::Clamp).unwrap();
        assert!((v - 0.4).abs() < 1e-4, "{v}");
        let fd = burgers_fd_reference(0.1, 0.5, &c, 50, 2000).unwrap();
        assert!((fd.eval1(0.3) - 0.4).abs() < 1e-12);
        let fz = burgers_fd_reference(0.1, 0.5, &zero, 50, 2000).unwrap();
        assert_eq!(fz.eval1(0.3), 0.0);
    }

    #[test]
    fn unstable_step_is_rejected() {
        assert!(matches!(
            burgers_fd_reference(0.1, 0.5, &sine(), 400, 10),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cole_hopf_matches_finite_differences() {
        let rule = QuadratureRule::trapezoid(4001);
        let fd = burgers_fd_reference(0.1, 0.5, &sine(), 400, 40_000).unwrap();
        let xs = [-0.5, 0.0, 0.5];
        let ch: Vec<f64> = xs
            .iter()
            .map(|&x| burgers_cole_hopf(0.1, 0.5, &sine(), x, &rule, Extension::Periodic).unwrap())
            .collect();
        let scale = xs.iter().fold(0.0f64, |m, &x| m.max(fd.eval1(x).abs()));
        let err = xs
            .iter()
            .zip(&ch)
            .fold(0.0f64, |m, (&x, c)| m.max((c - fd.eval1(x)).abs()));
        assert!(err / scale < 1e-2, "{err} / {scale}");
    }
}
