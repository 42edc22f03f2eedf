//! Uniform dispatch over the operator families `G[α][u](x)`.

use serde::{Deserialize, Serialize};

use super::burgers::burgers_cole_hopf;
use super::green::green_apply;
use super::grid_function::GridFunction;
use super::heat::{heat_apply, Extension};
use super::kernels::{kernel_apply, sphere_area, Kernel, Profile};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};

fn default_c() -> f64 {
    1.0
}

fn default_domain_len() -> f64 {
    1.0
}

fn default_t() -> f64 {
    0.5
}

/// An operator family together with its fixed parameters.
///
/// For `green_dirichlet` the descriptor `α` is a constant function whose value
/// is the interval length `a`; outputs are taken on `[0, domain_len]` and the
/// solution is continued by zero past `a`. For the two viscous families `α` is
/// constant as well and its value is the viscosity `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum OperatorFamily {
    HomogeneousKernel {
        #[serde(default)]
        profile: Profile,
    },
    FractionalKernel {
        /// Normalization constant `c_{d,α}`, taken constant.
        #[serde(default = "default_c")]
        c: f64,
    },
    GreenDirichlet {
        #[serde(default = "default_domain_len")]
        domain_len: f64,
    },
    HeatSemigroup {
        #[serde(default = "default_t")]
        t: f64,
        #[serde(default)]
        extension: Extension,
    },
    BurgersColeHopf {
        #[serde(default = "default_t")]
        t: f64,
        #[serde(default)]
        extension: Extension,
    },
}

impl Default for OperatorFamily {
    fn default() -> Self {
        OperatorFamily::GreenDirichlet { domain_len: 1.0 }
    }
}

impl OperatorFamily {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorFamily::HomogeneousKernel { .. } => "homogeneous_kernel",
            OperatorFamily::FractionalKernel { .. } => "fractional_kernel",
            OperatorFamily::GreenDirichlet { .. } => "green_dirichlet",
            OperatorFamily::HeatSemigroup { .. } => "heat_semigroup",
            OperatorFamily::BurgersColeHopf { .. } => "burgers_cole_hopf",
        }
    }

    /// The flag `σ` of the viscous families: 0 for heat, 1 for Burgers.
    pub fn sigma_flag(&self) -> Option<u8> {
        match self {
            OperatorFamily::HeatSemigroup { .. } => Some(0),
            OperatorFamily::BurgersColeHopf { .. } => Some(1),
            _ => None,
        }
    }

    /// Whether `α` must be a constant function.
    pub fn constant_descriptor(&self) -> bool {
        matches!(
            self,
            OperatorFamily::GreenDirichlet { .. }
                | OperatorFamily::HeatSemigroup { .. }
                | OperatorFamily::BurgersColeHopf { .. }
        )
    }

    /// The output domain `Ω_V` as a box `[lo, hi]^d`, given the input box.
    pub fn output_box(&self, u_dim: usize, u_box: (f64, f64)) -> (usize, f64, f64) {
        match *self {
            OperatorFamily::GreenDirichlet { domain_len } => (1, 0.0, domain_len),
            _ => (u_dim, u_box.0, u_box.1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::Config(format!("{} needs {what} > 0, got {v}", self.name())));
        match *self {
            OperatorFamily::FractionalKernel { c } if !(c > 0.0) => bad("c", c),
            OperatorFamily::GreenDirichlet { domain_len } if !(domain_len > 0.0) => bad("domain_len", domain_len),
            OperatorFamily::HeatSemigroup { t, .. } | OperatorFamily::BurgersColeHopf { t, .. } if !(t > 0.0) => {
                bad("t", t)
            }
            _ => Ok(()),
        }
    }

    /// A bound `β_V` on `|G[α][u](x)|` for `‖u‖∞ ≤ beta_u` and `α` with values in
    /// `alpha_range`.
    pub fn output_bound(&self, dim: usize, beta_u: f64, alpha_range: (f64, f64), rule: &QuadratureRule) -> Result<f64> {
        match *self {
            OperatorFamily::HomogeneousKernel { profile } => Ok(beta_u * profile.mass(dim)),
            OperatorFamily::FractionalKernel { c } => {
                let r = rule
                    .truncation_radius
                    .ok_or_else(|| Error::Config("the fractional kernel needs quadrature.truncation_radius".into()))?;
                // ∫_{|z| ≥ r} |z|^{−d−2α} dz = S_{d−1} r^{−2α} / (2α)
                let worst = |a: f64| r.powf(-2.0 * a) / (2.0 * a);
                Ok(c * beta_u * sphere_area(dim) * worst(alpha_range.0).max(worst(alpha_range.1)))
            }
            OperatorFamily::GreenDirichlet { .. } => Ok(beta_u * alpha_range.1 * alpha_range.1 / 8.0),
            // maximum principle
            OperatorFamily::HeatSemigroup { .. } | OperatorFamily::BurgersColeHopf { .. } => Ok(beta_u),
        }
    }
}

/// `G[α][u](x)` for the given family.
pub fn family_eval(
    family: &OperatorFamily,
    alpha: &GridFunction,
    u: &GridFunction,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    let scalar_x = || -> Result<f64> {
        match x {
            [v] => Ok(*v),
            _ => Err(Error::Shape(format!(
                "{} takes 1D points, got {}",
                family.name(),
                x.len()
            ))),
        }
    };
    match *family {
        OperatorFamily::HomogeneousKernel { profile } => {
            kernel_apply(&Kernel::Homogeneous { profile }, alpha, u, x, rule)
        }
        OperatorFamily::FractionalKernel { c } => kernel_apply(&Kernel::Fractional { c }, alpha, u, x, rule),
        OperatorFamily::GreenDirichlet { domain_len } => {
            let x = scalar_x()?;
            let a = alpha.eval(&alpha.center())?;
            if !(0.0..=domain_len).contains(&x) {
                return Err(Error::Domain(format!("x = {x} outside [0, {domain_len}]")));
            }
            if x > a {
                Ok(0.0)
            } else {
                green_apply(a, u, x, rule)
            }
        }
        OperatorFamily::HeatSemigroup { t, extension } => {
            let nu = alpha.eval(&alpha.center())?;
            heat_apply(nu, t, u, scalar_x()?, rule, extension)
        }
        OperatorFamily::BurgersColeHopf { t, extension } => {
            let nu = alpha.eval(&alpha.center())?;
            burgers_cole_hopf(nu, t, u, scalar_x()?, rule, extension)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_examples() {
        let rule = QuadratureRule::trapezoid(1001);
        let one = GridFunction::constant(1, -1.0, 1.0, 1.0).unwrap();
        let g = OperatorFamily::GreenDirichlet { domain_len: 1.0 };
        assert!((family_eval(&g, &one, &one, &[0.5], &rule).unwrap() - 0.125).abs() < 1e-6);

        let nu = GridFunction::constant(1, -1.0, 1.0, 0.2).unwrap();
        let c = GridFunction::constant(1, -1.0, 1.0, 0.3).unwrap();
        let h = OperatorFamily::HeatSemigroup {
            t: 0.5,
            extension: Extension::Clamp,
        };
        assert!((family_eval(&h, &nu, &c, &[0.1], &rule).unwrap() - 0.3).abs() < 1e-6);

        let zero = GridFunction::constant(1, -1.0, 1.0, 0.0).unwrap();
        let b = OperatorFamily::BurgersColeHopf {
            t: 0.5,
            extension: Extension::Clamp,
        };
        assert!(family_eval(&b, &nu, &zero, &[0.1], &rule).unwrap().abs() < 1e-12);
    }

    #[test]
    fn green_is_zero_past_the_interval() {
        let rule = QuadratureRule::trapezoid(101);
        let a = GridFunction::constant(1, -1.0, 1.0, 0.5).unwrap();
        let one = GridFunction::constant(1, -1.0, 1.0, 1.0).unwrap();
        let g = OperatorFamily::GreenDirichlet { domain_len: 1.0 };
        assert_eq!(family_eval(&g, &a, &one, &[0.75], &rule).unwrap(), 0.0);
        assert!(family_eval(&g, &a, &one, &[1.5], &rule).is_err());
    }

    #[test]
    fn serde_names() {
        let f: OperatorFamily = toml::from_str("name = \"heat_semigroup\"\nt = 0.25").unwrap();
        assert_eq!(
            f,
            OperatorFamily::HeatSemigroup {
                t: 0.25,
                extension: Extension::Clamp
            }
        );
        assert_eq!(f.sigma_flag(), Some(0));
    }
}
