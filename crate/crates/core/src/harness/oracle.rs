//! Reference-solver comparisons reported by `mno oracle`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::zoo::{
    burgers_cole_hopf, burgers_fd_reference, green_apply, heat_apply, kernel_apply, Extension, GridFunction, Kernel,
    QuadratureRule,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: &str, value: f64, reference: f64, tolerance: f64) -> OracleCheck {
    let error = (value - reference).abs();
    OracleCheck {
        name: name.into(),
        value,
        reference,
        error,
        tolerance,
        pass: error <= tolerance,
    }
}

/// Closed-form and finite-difference comparisons for every operator family.
pub fn run_oracles() -> Result<Vec<OracleCheck>> {
    let pi = std::f64::consts::PI;
    let rule = QuadratureRule::trapezoid(1001);
    let mut out = Vec::new();

    let one = GridFunction::constant(1, 0.0, 1.0, 1.0)?;
    for x in [0.1, 0.5, 0.9] {
        let v = green_apply(1.0, &one, x, &rule)?;
        out.push(check(&format!("green u=1 x={x}"), v, x * (1.0 - x) / 2.0, 1e-6));
    }
    let s = GridFunction::new(1, 0.0, 1.0, pi, 1.0, move |y| (pi * y[0]).sin())?;
    out.push(check(
        "green u=sin(pi y) x=0.5",
        green_apply(1.0, &s, 0.5, &rule)?,
        1.0 / (pi * pi),
        1e-5,
    ));

    let wide = QuadratureRule::trapezoid(2001);
    let c = GridFunction::constant(1, -1.0, 1.0, 1.0)?;
    out.push(check(
        "heat mass",
        heat_apply(0.5, 1.0, &c, 0.0, &wide, Extension::Clamp)?,
        1.0,
        1e-6,
    ));
    let g = GridFunction::on_symmetric_box(1, 20.0, 1.0, 1.0, |y| (-y[0] * y[0] / 2.0).exp())?;
    out.push(check(
        "heat gaussian x=0",
        heat_apply(0.5, 1.0, &g, 0.0, &wide, Extension::Clamp)?,
        0.5f64.sqrt(),
        1e-5,
    ));

    let frac = QuadratureRule::trapezoid(4001).with_truncation(0.01);
    let quarter = GridFunction::constant(1, -1.0, 1.0, 0.25)?;
    out.push(check(
        "fractional truncated u=1",
        kernel_apply(&Kernel::Fractional { c: 1.0 }, &quarter, &c, &[0.0], &frac)?,
        36.0,
        0.1,
    ));

    let sine = GridFunction::on_symmetric_box(1, 1.0, pi, 1.0, move |y| (pi * y[0]).sin())?;
    let fd = burgers_fd_reference(0.1, 0.5, &sine, 400, 40_000)?;
    let ch_rule = QuadratureRule::trapezoid(4001);
    let xs = [-0.5, 0.0, 0.5];
    // relative to the largest reference value
    let scale = xs.iter().fold(0.0f64, |m, &x| m.max(fd.eval1(x).abs()));
    for x in xs {
        let v = burgers_cole_hopf(0.1, 0.5, &sine, x, &ch_rule, Extension::Periodic)?;
        out.push(check(&format!("burgers sine x={x}"), v, fd.eval1(x), 1e-2 * scale));
    }
    Ok(out)
}
