//! Theory-mode architecture sizes.
//!
//! Given a target accuracy ε, the approximation rates prescribe the counts
//! `N, H, P` (the model then uses `N^{d_V} H^{n_cU} P^{n_cW}` terms) and the
//! cover radii `δ, ζ` of the sensor grids, along with the shape of each
//! subnetwork class. Two variants exist: `Base` sizes
//! the unclipped approximant to accuracy ε, `Halved` sizes it to ε/2 so that the
//! clipped class used by the generalization bound reaches ε.
//!
//! Hidden `O(·)` factors are the multipliers in [`BoundConstants`] (default 1).
//! Counts are rounded up; depths and sparsities are at least 1 and `κ ≥ 1`.

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundConstants, ClassShape, ProductClass};
use crate::error::{Error, Result};
use crate::mno::MnoSpec;
use crate::relu_net::NetClassSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PrescribeMode {
    Base,
    #[default]
    Halved,
}

/// A count kept both rounded and as a natural log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Count {
    /// Rounded-up value; `+∞` past `2^53`.
    pub value: f64,
    pub ln: f64,
}

impl Count {
    fn from_ln(ln: f64) -> Self {
        let raw = ln.exp();
        if raw < 9_007_199_254_740_992.0 {
            // exp(ln 128) may land a few ulps above 128
            let near = raw.round();
            let value = if (raw - near).abs() <= 1e-9 * near {
                near
            } else {
                raw.ceil()
            }
            .max(1.0);
            Count { value, ln: value.ln() }
        } else {
            Count {
                value: f64::INFINITY,
                ln,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prescription {
    pub mode: PrescribeMode,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: Count,
    #[serde(rename = "H")]
    pub h: Count,
    #[serde(rename = "P")]
    pub p: Count,
    /// Cover radius of the input-function sensors `{c_s}`.
    pub delta: f64,
    /// Cover radius of the descriptor sensors `{y_s}`.
    pub zeta: f64,
    /// `F1`, on `Ω_V`.
    pub trunk: ClassShape,
    /// `F2`, on `n_cU` sensor values.
    pub branch: ClassShape,
    /// `F3`, on `n_cW` sensor values.
    pub encoder: ClassShape,
    /// `ln(P^{n_cW} · H^{n_cU} · N^{d_V})`, the number of separable terms.
    pub ln_terms: f64,
    /// Whether `I ≥ β_V` holds for the clip level `a = β_V`.
    pub coefficient_hypothesis_ok: bool,
}

impl Prescription {
    /// The clipped class `Cl_{β_V}(I, F1, F2, F3, ..., P^{n_cW}, H^{n_cU}, N^{d_V})`.
    pub fn product_class(&self, constants: &BoundConstants) -> ProductClass {
        ProductClass {
            count: self.ln_terms.exp(),
            ln_count: self.ln_terms,
            coeff_bound: constants.coeff_bound,
            trunk: self.trunk,
            branch: self.branch,
            encoder: self.encoder,
        }
    }

    /// A trainable spec, when every size fits in memory (at most `max_terms`
    /// separable terms, finite `κ`).
    pub fn mno_spec(&self, constants: &BoundConstants, max_terms: f64) -> Option<MnoSpec> {
        if self.ln_terms > max_terms.ln() {
            return None;
        }
        let pow = |c: &Count, e: usize| -> Option<usize> {
            let v = c.value.powi(e as i32);
            (v.is_finite() && v <= max_terms).then_some(v as usize)
        };
        let class = |s: &ClassShape, d_in: usize| -> Option<NetClassSpec> {
            if !s.kappa.is_finite() || s.depth > 1e6 || s.sparsity > 1e9 {
                return None;
            }
            NetClassSpec::new(
                d_in,
                1,
                s.depth as usize,
                s.width as usize,
                s.sparsity as usize,
                s.kappa,
                s.output_r,
            )
            .ok()
        };
        Some(MnoSpec {
            p: pow(&self.p, constants.n_cw)?,
            h: pow(&self.h, constants.n_cu)?,
            n: pow(&self.n, constants.d_v)?,
            spec_l: class(&self.encoder, constants.n_cw)?,
            spec_b: class(&self.branch, constants.n_cu)?,
            spec_tau: class(&self.trunk, constants.d_v)?,
            coeff_bound: constants.coeff_bound,
            clip: constants.beta_v,
        })
    }
}

fn shape(depth_expr: f64, ln_kappa_expr: f64, c: &BoundConstants) -> ClassShape {
    let depth = (c.depth_factor * depth_expr).ceil().max(1.0);
    let sparsity = (c.sparsity_factor * depth_expr).ceil().max(1.0);
    let ln_kappa = (c.kappa_factor.ln() + ln_kappa_expr).max(0.0);
    let kappa = ln_kappa.exp();
    ClassShape {
        depth,
        width: c.width.ceil().max(1.0),
        sparsity,
        kappa,
        ln_kappa,
        output_r: 1.0,
    }
}

/// Architecture sizes for target accuracy `eps`. Dimensions and constants come
/// from `constants` (`d_V`, `n_cW`, `n_cU`, `C`, `C'`, `C''`, `C_δ`, `C_ζ`).
pub fn prescribe_architecture(eps: f64, constants: &BoundConstants, mode: PrescribeMode) -> Result<Prescription> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    constants.validate()?;
    let ln2 = 2f64.ln();
    let nw = constants.n_cw as f64;
    let nu = constants.n_cu as f64;
    let dv = constants.d_v as f64;
    let ln_eps = eps.ln();
    let ln_inv_eps = -ln_eps;
    // ln(C''√n_cW) and ln(C√d_V)
    let ln_a = constants.c_dprime.ln() + 0.5 * nw.ln();
    let ln_b = constants.c.ln() + 0.5 * dv.ln();
    let halved = mode == PrescribeMode::Halved;

    let ln_n = if halved { 2.0 * nw + 3.0 } else { nw + 2.0 } * ln2 + ln_b + nw * ln_a - (nw + 1.0) * ln_eps;
    let h_pow2 = if halved {
        3.0 + 2.0 * nw + 3.0 * dv + 2.0 * dv * nw
    } else {
        (dv + 1.0) * (nw + 2.0)
    };
    let ln_h = h_pow2 * ln2 + constants.c_prime.ln() + 0.5 * nu.ln() + dv * ln_b + nw * (dv + 1.0) * ln_a
        - (dv + 1.0) * (1.0 + nw) * ln_eps;
    let ln_p = if halved { 4f64.ln() } else { ln2 } + ln_a - ln_eps;

    let delta_pow2 = if halved {
        2.0 * dv + 2.0 * nw + 3.0 + dv * nw
    } else {
        dv + nw + 2.0
    };
    let ln_delta = constants.c_delta.ln() + (1.0 + dv) * (1.0 + nw) * ln_eps - delta_pow2 * ln2 - dv * ln_b - nw * ln_a;
    let zeta = constants.c_zeta * eps * if halved { 0.5 } else { 1.0 };

    // ln(2^{n_cW+1} (C''√n_cW)^{n_cW})
    let ln_enc_scale = (nw + 1.0) * ln2 + nw * ln_a;
    let extra = |k: f64| if halved { 0.0 } else { k * ln2 };

    let trunk_depth = dv * dv * dv.ln() + dv * dv * (nw + 1.0) * ln_inv_eps + dv * dv * ln_enc_scale + extra(dv * dv);
    let trunk_kappa = (dv / 2.0 + 1.0) * dv.ln() - (dv + 1.0) * (nw + 1.0) * ln_eps
        + (dv + 1.0) * ((nw + 2.0) * ln2 + nw * ln_a)
        + if halved { (dv + 1.0) * (nw + 1.0) * ln2 } else { 0.0 };

    let ln_trunk_scale = (dv + 1.0) * ln2 + dv * ln_b;
    let branch_depth = nu * nu * nu.ln()
        + nu * nu * (dv + 1.0) * (nw + 1.0) * ln_inv_eps
        + nu * nu * ln_trunk_scale
        + nu * nu * (dv + 1.0) * ln_enc_scale
        + extra(nu * nu);
    let ln_eps_branch = if halved { ln_eps - ln2 } else { ln_eps };
    let branch_kappa = (nu / 2.0 + 1.0) * nu.ln() - (dv + 1.0) * (nu + 1.0) * (nw + 1.0) * ln_eps_branch
        + (nu + 1.0) * ((dv + 2.0) * ln2 + dv * ln_b)
        + (dv + 1.0) * (nu + 1.0) * ln_trunk_scale;

    let encoder_depth = nw * nw * nw.ln() + nw * nw * ln_inv_eps + extra(nw * nw);
    let encoder_kappa = (nw / 2.0 + 1.0) * nw.ln() + (nw + 1.0) * ln2 - (nw + 1.0) * ln_eps
        + if halved { (nw + 1.0) * ln2 } else { 0.0 };

    let (n, h, p) = (Count::from_ln(ln_n), Count::from_ln(ln_h), Count::from_ln(ln_p));
    Ok(Prescription {
        mode,
        eps,
        n,
        h,
        p,
        delta: ln_delta.exp(),
        zeta,
        trunk: shape(trunk_depth, trunk_kappa, constants),
        branch: shape(branch_depth, branch_kappa, constants),
        encoder: shape(encoder_depth, encoder_kappa, constants),
        ln_terms: nw * p.ln + nu * h.ln + dv * n.ln,
        coefficient_hypothesis_ok: constants.satisfies_coefficient_hypothesis(),
    })
}
