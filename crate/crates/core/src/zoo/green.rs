//! Dirichlet problem `−v'' = u` on `[0, a]`, `v(0) = v(a) = 0`.

use super::grid_function::GridFunction;
use super::quadrature::{nodes_1d, QuadratureRule};
use crate::error::{Error, Result};
use crate::relu_net::relu;

fn check(a: f64, x: f64, y: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("interval length must be positive, got {a}")));
    }
    if !(0.0..=a).contains(&x) || !(0.0..=a).contains(&y) {
        return Err(Error::Domain(format!("({x}, {y}) outside [0, {a}]^2")));
    }
    Ok(())
}

/// `K_a(x, y) = x(a − y)/a` for `x ≤ y`, `y(a − x)/a` otherwise.
pub fn green_kernel(a: f64, x: f64, y: f64) -> Result<f64> {
    check(a, x, y)?;
    Ok(if x <= y { x * (a - y) / a } else { y * (a - x) / a })
}

/// The same kernel as `(x + y)/2 − |x − y|/2 − xy/a`, with `|t| = ReLU(t) + ReLU(−t)`.
pub fn green_kernel_relu_form(a: f64, x: f64, y: f64) -> Result<f64> {
    check(a, x, y)?;
    Ok((x + y) / 2.0 - (relu(x - y) + relu(y - x)) / 2.0 - x * y / a)
}

/// `v(x) = ∫_0^a K_a(x, y) u(y) dy`.
pub fn green_apply(a: f64, u: &GridFunction, x: f64, rule: &QuadratureRule) -> Result<f64> {
    check(a, x, 0.0)?;
    if u.dim() != 1 {
        return Err(Error::Shape(format!(
            "Green operator acts on 1D inputs, got dimension {}",
            u.dim()
        )));
    }
    let (lo, hi) = u.bounds();
    if lo > 0.0 || hi < a {
        return Err(Error::Domain(format!(
            "input defined on [{lo}, {hi}] does not cover [0, {a}]"
        )));
    }
    let nodes = nodes_1d(0.0, a, &[x], rule, |_| false)?;
    Ok(nodes.sum(|y| {
        let k = if x <= y { x * (a - y) / a } else { y * (a - x) / a };
        k * u.eval1(y)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert_eq!(green_kernel(1.0, 0.25, 0.5).unwrap(), 0.125);
        assert_eq!(green_kernel(1.0, 0.0, 0.7).unwrap(), 0.0);
        assert_eq!(green_kernel(1.0, 0.5, 0.25).unwrap(), 0.125);
        assert_eq!(green_kernel_relu_form(1.0, 0.25, 0.5).unwrap(), 0.125);
        assert!(matches!(green_kernel(1.0, 1.5, 0.5), Err(Error::Domain(_))));
        assert!(matches!(green_kernel_relu_form(1.0, 0.5, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn apply_examples() {
        let rule = QuadratureRule::trapezoid(1001);
        let one = GridFunction::constant(1, 0.0, 1.0, 1.0).unwrap();
        assert!((green_apply(1.0, &one, 0.5, &rule).unwrap() - 0.125).abs() < 1e-6);
        let zero = GridFunction::constant(1, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(green_apply(1.0, &zero, 0.3, &rule).unwrap(), 0.0);
        let pi = std::f64::consts::PI;
        let s = GridFunction::new(1, 0.0, 1.0, pi, 1.0, move |y| (pi * y[0]).sin()).unwrap();
        assert!((green_apply(1.0, &s, 0.5, &rule).unwrap() - 1.0 / (pi * pi)).abs() < 1e-5);
        assert!(green_apply(2.0, &s, 0.5, &rule).is_err());
    }
}
