//! Covering numbers, metric entropy and generalization bounds, all in log space.
//!
//! The theory-mode quantities are far beyond `f64` range, so every product is
//! accumulated as a natural logarithm. Floors `⌊x⌋ + 1` are applied exactly while
//! `x` is below `2^53`; past that the floor is dropped (`x + 1` is used instead,
//! which keeps the upper-bound direction) and the result is flagged.
//!
//! Binomial-times-grid counts `C(n, K)·m^K` are evaluated as
//! `max_{k ≤ K} C(n, k)·m^k`. This equals the plain product whenever the product
//! is still increasing at `K` (all small worked cases) and keeps the bound
//! monotone in `K` once `K` passes the binomial peak.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mno::MnoSpec;
use crate::relu_net::NetClassSpec;

const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

/// A nonnegative real stored by its natural log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogReal {
    pub log_value: f64,
    pub sign: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Zero,
}

impl LogReal {
    pub fn from_ln(log_value: f64) -> Self {
        LogReal {
            log_value,
            sign: Sign::Positive,
        }
    }

    pub fn zero() -> Self {
        LogReal {
            log_value: f64::NEG_INFINITY,
            sign: Sign::Zero,
        }
    }

    pub fn from_value(v: f64) -> Self {
        if v > 0.0 {
            LogReal::from_ln(v.ln())
        } else {
            LogReal::zero()
        }
    }

    /// `ln` of the value (`-∞` for zero).
    pub fn ln(&self) -> f64 {
        match self.sign {
            Sign::Positive => self.log_value,
            Sign::Zero => f64::NEG_INFINITY,
        }
    }

    /// Linear value; may overflow to `+∞`.
    pub fn value(&self) -> f64 {
        self.ln().exp()
    }
}

/// A log-domain bound with its floor-relaxation flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBound {
    pub value: LogReal,
    pub floor_relaxed: bool,
}

/// Unspecified constants of the scaling laws. All default to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundConstants {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_prime")]
    pub c_prime: f64,
    #[serde(rename = "C_dprime")]
    pub c_dprime: f64,
    #[serde(rename = "C_delta")]
    pub c_delta: f64,
    #[serde(rename = "C_zeta")]
    pub c_zeta: f64,
    pub sigma: f64,
    pub beta_v: f64,
    pub beta_u: f64,
    pub beta_w: f64,
    pub gamma_v: f64,
    #[serde(rename = "I")]
    pub coeff_bound: f64,
    pub d_w: usize,
    pub d_u: usize,
    pub d_v: usize,
    pub n_cw: usize,
    pub n_cu: usize,
    /// Multipliers of the hidden `O(·)` factors in the depth, sparsity and
    /// magnitude prescriptions, and the `O(1)` widths.
    pub depth_factor: f64,
    pub sparsity_factor: f64,
    pub kappa_factor: f64,
    pub width: f64,
    /// Exponents of the effective parameter-count scaling.
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants {
            c: 1.0,
            c_prime: 1.0,
            c_dprime: 1.0,
            c_delta: 1.0,
            c_zeta: 1.0,
            sigma: 0.0,
            beta_v: 1.0,
            beta_u: 1.0,
            beta_w: 1.0,
            gamma_v: 1.0,
            coeff_bound: 1.0,
            d_w: 1,
            d_u: 1,
            d_v: 1,
            n_cw: 1,
            n_cu: 1,
            depth_factor: 1.0,
            sparsity_factor: 1.0,
            kappa_factor: 1.0,
            width: 1.0,
            gamma1: 1.0,
            gamma2: 1.0,
        }
    }
}

impl BoundConstants {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("C", self.c),
            ("C_prime", self.c_prime),
            ("C_dprime", self.c_dprime),
            ("C_delta", self.c_delta),
            ("C_zeta", self.c_zeta),
            ("beta_v", self.beta_v),
            ("beta_u", self.beta_u),
            ("beta_w", self.beta_w),
            ("gamma_v", self.gamma_v),
            ("I", self.coeff_bound),
            ("depth_factor", self.depth_factor),
            ("sparsity_factor", self.sparsity_factor),
            ("kappa_factor", self.kappa_factor),
            ("width", self.width),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(Error::Domain(format!("constant {name} must be positive, got {v}")));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::Domain("sigma must be nonnegative".into()));
        }
        if [self.d_w, self.d_u, self.d_v, self.n_cw, self.n_cu].contains(&0) {
            return Err(Error::Domain("dimensions must be positive".into()));
        }
        Ok(())
    }

    /// The generalization bound requires `I ≥ β_V` when the clip level is `β_V`.
    pub fn satisfies_coefficient_hypothesis(&self) -> bool {
        self.coeff_bound >= self.beta_v
    }
}

/// Architecture of one subnetwork class in real arithmetic, so that
/// theory-mode sizes beyond integer range can still be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassShape {
    pub depth: f64,
    pub width: f64,
    pub sparsity: f64,
    /// `κ`; `+∞` when only `ln κ` is representable.
    pub kappa: f64,
    pub ln_kappa: f64,
    pub output_r: f64,
}

impl From<&NetClassSpec> for ClassShape {
    fn from(s: &NetClassSpec) -> Self {
        ClassShape {
            depth: s.depth as f64,
            width: s.width as f64,
            sparsity: s.sparsity as f64,
            kappa: s.kappa,
            ln_kappa: s.kappa.ln(),
            output_r: s.output_r,
        }
    }
}

impl ClassShape {
    fn slots(&self) -> f64 {
        self.depth * (self.width * self.width + self.width)
    }

    fn check(&self) -> Result<()> {
        if !(self.ln_kappa >= 0.0) {
            return Err(Error::Domain(format!(
                "covering bounds require kappa >= 1, got exp({})",
                self.ln_kappa
            )));
        }
        if !(self.depth >= 1.0 && self.width >= 1.0 && self.sparsity >= 1.0 && self.output_r > 0.0) {
            return Err(Error::Domain(format!("invalid class shape {self:?}")));
        }
        Ok(())
    }

    /// `κ^e` in linear arithmetic when finite.
    fn kappa_pow(&self, e: f64) -> f64 {
        if self.kappa.is_finite() {
            self.kappa.powf(e)
        } else {
            f64::INFINITY
        }
    }
}

/// A clipped product class `Cl_a(I, F1, F2, F3, ..., P, H, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductClass {
    /// `P·H·N`, possibly `+∞`.
    pub count: f64,
    /// `ln(P·H·N)`.
    pub ln_count: f64,
    pub coeff_bound: f64,
    /// `F1`: trunk networks τ on `Ω_V`.
    pub trunk: ClassShape,
    /// `F2`: branch networks b on discretized inputs.
    pub branch: ClassShape,
    /// `F3`: operator encoders l on discretized descriptors.
    pub encoder: ClassShape,
}

impl From<&MnoSpec> for ProductClass {
    fn from(s: &MnoSpec) -> Self {
        let count = (s.p * s.h * s.n) as f64;
        ProductClass {
            count,
            ln_count: count.ln(),
            coeff_bound: s.coeff_bound,
            trunk: (&s.spec_tau).into(),
            branch: (&s.spec_b).into(),
            encoder: (&s.spec_l).into(),
        }
    }
}

/// Sup-norm bounds on the three model inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputNorms {
    pub gamma_v: f64,
    pub beta_u: f64,
    pub beta_w: f64,
}

pub fn ln_binomial(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0.0 || k == n {
        return 0.0;
    }
    let k = k.min(n - k);
    if k <= 64.0 {
        (0..k as u64).map(|i| ((n - i as f64) / (i as f64 + 1.0)).ln()).sum()
    } else {
        libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
    }
}

/// `ln(⌊x⌋ + 1)` from the linear value (when available) and `ln x`.
fn ln_floor_plus_one(linear: f64, ln_x: f64) -> (f64, bool) {
    if linear.is_finite() && linear < EXACT_INT_LIMIT {
        ((linear.floor() + 1.0).ln(), false)
    } else if ln_x == f64::NEG_INFINITY {
        (0.0, false)
    } else {
        (ln_x + (-ln_x).exp().ln_1p(), true)
    }
}

/// `max_{k ≤ min(K, n)} [ln C(n, k) + k ln m]`.
fn ln_support_count(slots: f64, sparsity: f64, ln_m: f64) -> f64 {
    let kmax = sparsity.min(slots).floor();
    let peak = if ln_m > 40.0 {
        slots
    } else {
        let m = ln_m.exp();
        ((m * slots - 1.0) / (m + 1.0)).floor() + 1.0
    };
    let centre = peak.clamp(0.0, kmax);
    [centre - 1.0, centre, centre + 1.0]
        .into_iter()
        .filter(|k| *k >= 0.0 && *k <= kmax)
        .map(|k| ln_binomial(slots, k) + if k == 0.0 { 0.0 } else { k * ln_m })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Covering number of a ReLU class at scale `η`:
/// `C(L(p²+p), K) · (⌊L κ^L (p+1)^{L-1} (p‖x‖∞+1) / η⌋ + 1)^K`.
pub fn log_net_covering(spec: &NetClassSpec, x_inf_norm: f64, eta: f64) -> Result<LogBound> {
    log_net_covering_shape(&spec.into(), x_inf_norm, eta)
}

pub fn log_net_covering_shape(shape: &ClassShape, x_inf_norm: f64, eta: f64) -> Result<LogBound> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("covering scale must be positive, got {eta}")));
    }
    shape.check()?;
    let (l, p) = (shape.depth, shape.width);
    let input = p * x_inf_norm + 1.0;
    let ln_x = l.ln() + l * shape.ln_kappa + (l - 1.0) * (p + 1.0).ln() + input.ln() - eta.ln();
    let linear = l * shape.kappa_pow(l) * (p + 1.0).powf(l - 1.0) * input / eta;
    let (ln_m, relaxed) = ln_floor_plus_one(linear, ln_x);
    Ok(LogBound {
        value: LogReal::from_ln(ln_support_count(shape.slots(), shape.sparsity, ln_m)),
        floor_relaxed: relaxed,
    })
}

/// `F(L, p, K, κ, h) = C(L(p²+p), K) · (⌊2κ/h⌋ + 1)^K`.
pub fn log_f(depth: f64, width: f64, sparsity: f64, kappa: f64, h: f64) -> Result<LogBound> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("grid step h must be positive, got {h}")));
    }
    let shape = ClassShape {
        depth,
        width,
        sparsity,
        kappa,
        ln_kappa: kappa.ln(),
        output_r: 1.0,
    };
    log_f_shape(&shape, h, h.ln())
}

fn log_f_shape(shape: &ClassShape, h: f64, ln_h: f64) -> Result<LogBound> {
    let ln_x = 2f64.ln() + shape.ln_kappa - ln_h;
    let linear = if h > 0.0 { 2.0 * shape.kappa / h } else { f64::INFINITY };
    let (ln_m, relaxed) = ln_floor_plus_one(linear, ln_x);
    Ok(LogBound {
        value: LogReal::from_ln(ln_support_count(shape.slots(), shape.sparsity, ln_m)),
        floor_relaxed: relaxed,
    })
}

fn ln_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `T = PHN · [I R2 R3 L1 κ1^{L1-1}(p1+1)^{L1-1}(p1 γ_V+1) + (same for F2 with β_U)
/// + (same for F3 with β_W) + R1 R2 R3]`, returned as `ln T`.
pub fn covering_t(class: &ProductClass, norms: &InputNorms) -> Result<LogReal> {
    Ok(LogReal::from_ln(covering_t_parts(class, norms)?.0))
}

/// `(ln T, T)`; the linear value is `+∞` when not representable.
fn covering_t_parts(class: &ProductClass, norms: &InputNorms) -> Result<(f64, f64)> {
    for s in [&class.trunk, &class.branch, &class.encoder] {
        s.check()?;
    }
    let (r1, r2, r3) = (class.trunk.output_r, class.branch.output_r, class.encoder.output_r);
    let i = class.coeff_bound;
    let term = |s: &ClassShape, others: f64, norm: f64| -> (f64, f64) {
        let (l, p) = (s.depth, s.width);
        let ln =
            i.ln() + others.ln() + l.ln() + (l - 1.0) * s.ln_kappa + (l - 1.0) * (p + 1.0).ln() + (p * norm + 1.0).ln();
        let lin = i * others * l * s.kappa_pow(l - 1.0) * (p + 1.0).powf(l - 1.0) * (p * norm + 1.0);
        (ln, lin)
    };
    let t1 = term(&class.trunk, r2 * r3, norms.gamma_v);
    let t2 = term(&class.branch, r1 * r3, norms.beta_u);
    let t3 = term(&class.encoder, r1 * r2, norms.beta_w);
    let t4 = ((r1 * r2 * r3).ln(), r1 * r2 * r3);
    let ln_bracket = ln_sum_exp(&[t1.0, t2.0, t3.0, t4.0]);
    let linear = class.count * (t1.1 + t2.1 + t3.1 + t4.1);
    Ok((class.ln_count + ln_bracket, linear))
}

/// Every intermediate of the product-class covering bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnoCovering {
    pub ln_t: f64,
    pub ln_h: f64,
    /// `ln(⌊2I/h⌋ + 1)`.
    pub ln_coeff_grid: f64,
    /// `ln F` for the trunk, branch and encoder classes (F1, F2, F3).
    pub ln_f_trunk: f64,
    pub ln_f_branch: f64,
    pub ln_f_encoder: f64,
    /// `ln` of the bracketed per-tuple count.
    pub ln_per_tuple: f64,
    /// `ln N = PHN · ln(per-tuple)`; `+∞` when beyond `f64`.
    pub ln_covering: f64,
    /// `ln ln N`.
    pub ln_ln_covering: f64,
    pub floor_relaxed: bool,
}

impl MnoCovering {
    pub fn log(&self) -> LogBound {
        LogBound {
            value: LogReal::from_ln(self.ln_covering),
            floor_relaxed: self.floor_relaxed,
        }
    }
}

/// `N(η) ≤ [(⌊2I/h⌋+1) F3 F2 F1]^{PHN}` with `h = 2η/T`.
pub fn log_mno_covering(class: &ProductClass, norms: &InputNorms, eta: f64) -> Result<MnoCovering> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("covering scale must be positive, got {eta}")));
    }
    let (ln_t, t_lin) = covering_t_parts(class, norms)?;
    let ln_h = 2f64.ln() + eta.ln() - ln_t;
    let h = if t_lin.is_finite() {
        2.0 * eta / t_lin
    } else {
        ln_h.exp()
    };
    let i = class.coeff_bound;
    let coeff_lin = if h > 0.0 { 2.0 * i / h } else { f64::INFINITY };
    let (ln_coeff_grid, r0) = ln_floor_plus_one(coeff_lin, 2f64.ln() + i.ln() - ln_h);
    let f1 = log_f_shape(&class.trunk, h, ln_h)?;
    let f2 = log_f_shape(&class.branch, h, ln_h)?;
    let f3 = log_f_shape(&class.encoder, h, ln_h)?;
    let ln_per_tuple = ln_coeff_grid + f1.value.ln() + f2.value.ln() + f3.value.ln();
    Ok(MnoCovering {
        ln_t,
        ln_h,
        ln_coeff_grid,
        ln_f_trunk: f1.value.ln(),
        ln_f_branch: f2.value.ln(),
        ln_f_encoder: f3.value.ln(),
        ln_per_tuple,
        ln_covering: class.count * ln_per_tuple,
        ln_ln_covering: class.ln_count + ln_per_tuple.ln(),
        floor_relaxed: r0 || f1.floor_relaxed || f2.floor_relaxed || f3.floor_relaxed,
    })
}

/// `δ₂ = d_U (1 + d_V)(1 + d_W/2)`.
pub fn delta2(d_w: usize, d_u: usize, d_v: usize) -> f64 {
    d_u as f64 * (1.0 + d_v as f64) * (1.0 + d_w as f64 / 2.0)
}

/// `δ₁ = δ₂ + d_W (d_V + 1)/2 + (d_V + 1)`.
pub fn delta1(d_w: usize, d_u: usize, d_v: usize) -> f64 {
    delta2(d_w, d_u, d_v) + d_w as f64 * (d_v as f64 + 1.0) / 2.0 + (d_v as f64 + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEps {
    pub delta1: f64,
    pub delta2: f64,
    /// `ln` of the bound `ε^{-δ₁ ε^{-δ₂ ε^{-d_W}}} (1 + ln η⁻¹)` on `ln N(η)`.
    pub ln_bound: f64,
    /// `ln ln` of the same bound when the leading factor exceeds one; stays
    /// finite after `ln_bound` overflows.
    pub ln_ln_bound: Option<f64>,
    /// Set when `1 + ln η⁻¹ ≤ 0` and the additive factor was floored.
    pub eta_clamped: bool,
}

/// Metric-entropy growth of the ε-prescribed class.
pub fn entropy_eps(eps: f64, eta: f64, d_w: usize, d_u: usize, d_v: usize) -> Result<EntropyEps> {
    if !(eps > 0.0) || !(eta > 0.0) {
        return Err(Error::Domain(format!("need eps > 0 and eta > 0, got {eps}, {eta}")));
    }
    let (d1, d2) = (delta1(d_w, d_u, d_v), delta2(d_w, d_u, d_v));
    let ln_eps = eps.ln();
    // ε^{-δ₂ ε^{-d_W}}
    let inner_exp = -d2 * eps.powi(-(d_w as i32)) * ln_eps;
    let leading = -d1 * inner_exp.exp() * ln_eps;
    let additive = 1.0 + (1.0 / eta).ln();
    let eta_clamped = additive <= 0.0;
    let ln_additive = additive.max(f64::MIN_POSITIVE).ln();
    let ln_ln_bound = (eps < 1.0).then(|| {
        let ln_leading = d1.ln() + inner_exp + (-ln_eps).ln();
        if ln_additive > 0.0 {
            ln_sum_exp(&[ln_leading, ln_additive.ln()])
        } else {
            ln_leading
        }
    });
    Ok(EntropyEps {
        delta1: d1,
        delta2: d2,
        ln_bound: leading + ln_additive,
        ln_ln_bound,
        eta_clamped,
    })
}

/// Individual terms of the expected generalization-error bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    /// `4ε²`
    pub approximation: f64,
    /// `η(8σ + 6)`
    pub discretization: f64,
    /// `8ση/√(n_α n_u n_x) · √(ln N(η) + ln 2)`
    pub noise_cross: f64,
    /// `16σ²/(n_α n_u n_x) · (ln N(η) + ln 2)`
    pub noise_variance: f64,
    /// `112 β_V²/(3 n_α) · ln N(η/(4β_V))`
    pub operator_sampling: f64,
    pub total: f64,
}

/// Sample budgets and noise level entering the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub n_alpha: f64,
    pub n_u: f64,
    pub n_x: f64,
    pub sigma: f64,
}

/// Right-hand side of the expected generalization-error bound. `ln_n_eta` and
/// `ln_n_scaled` are the log covering numbers at `η` and `η/(4β_V)`.
pub fn generalization_bound_rhs(
    eps: f64,
    eta: f64,
    budgets: &Budgets,
    beta_v: f64,
    ln_n_eta: f64,
    ln_n_scaled: f64,
) -> Result<BoundTerms> {
    let Budgets {
        n_alpha,
        n_u,
        n_x,
        sigma,
    } = *budgets;
    if !(n_alpha >= 1.0 && n_u >= 1.0 && n_x >= 1.0) {
        return Err(Error::Domain("sample budgets must be at least 1".into()));
    }
    if !(ln_n_eta >= 0.0) || !(ln_n_scaled >= 0.0) {
        return Err(Error::Domain(format!(
            "log covering numbers must be nonnegative, got {ln_n_eta} and {ln_n_scaled}"
        )));
    }
    if !(eps > 0.0 && eta > 0.0 && sigma >= 0.0 && beta_v > 0.0) {
        return Err(Error::Domain("need eps, eta, beta_v > 0 and sigma >= 0".into()));
    }
    let n_total = n_alpha * n_u * n_x;
    let ln2 = 2f64.ln();
    let approximation = 4.0 * eps * eps;
    let discretization = eta * (8.0 * sigma + 6.0);
    let noise_cross = if sigma == 0.0 {
        0.0
    } else {
        8.0 * sigma * eta / n_total.sqrt() * (ln_n_eta + ln2).sqrt()
    };
    let noise_variance = if sigma == 0.0 {
        0.0
    } else {
        16.0 * sigma * sigma / n_total * (ln_n_eta + ln2)
    };
    let operator_sampling = 112.0 * beta_v * beta_v / (3.0 * n_alpha) * ln_n_scaled;
    Ok(BoundTerms {
        approximation,
        discretization,
        noise_cross,
        noise_variance,
        operator_sampling,
        total: approximation + discretization + noise_cross + noise_variance + operator_sampling,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSchedule {
    pub eps: f64,
    pub eta: f64,
    /// `4ε²`, the dominant term with unit constants.
    pub rate: f64,
}

/// `e^e`: below this `ln ln ln n_α` is not positive.
pub const RATE_MIN_N_ALPHA: f64 = 15.154_262_241_479_262;

/// `ε = ((d_W/(2δ₂)) · lnln n_α / lnlnln n_α)^{-1/d_W}`, `η = 4β_V/n_α`.
pub fn rate_schedule(n_alpha: f64, d_w: usize, d_u: usize, d_v: usize, beta_v: f64) -> Result<RateSchedule> {
    let ll = n_alpha.ln().ln();
    let lll = ll.ln();
    if !(n_alpha > RATE_MIN_N_ALPHA) || !(lll > 0.0) {
        return Err(Error::Domain(format!(
            "rate schedule needs n_alpha > e^e ≈ {RATE_MIN_N_ALPHA:.4}, got {n_alpha}"
        )));
    }
    let base = d_w as f64 / (2.0 * delta2(d_w, d_u, d_v)) * ll / lll;
    let eps = base.powf(-1.0 / d_w as f64);
    Ok(RateSchedule {
        eps,
        eta: 4.0 * beta_v / n_alpha,
        rate: 4.0 * eps * eps,
    })
}

/// `ln N_#` for `N_# ≲ ε^{-γ₁ ε^{-γ₂ ε^{-d_W}}}`.
pub fn param_count_scaling(eps: f64, gamma1: f64, gamma2: f64, d_w: usize) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!(
            "parameter scaling needs eps in (0, 1), got {eps}"
        )));
    }
    let inner = (-gamma2 * eps.powi(-(d_w as i32)) * eps.ln()).exp();
    Ok(-gamma1 * inner * eps.ln())
}
