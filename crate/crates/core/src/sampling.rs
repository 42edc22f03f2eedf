//! Function-space samplers, sensor grids and the hierarchical training set
//! `w_{ℓij} = G[α_ℓ][u_{ℓi}](x_{ℓij}) + ζ_{ℓij}`.
//!
//! Every random draw comes from its own stream, seeded from the master seed,
//! a tag naming the kind of draw, and the index path `(ℓ, i, j)`. Changing one
//! cell's stream leaves all others untouched and generation can run in
//! parallel without affecting the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{shape_check, Error, Result};
use crate::zoo::{family_eval, GridFunction, OperatorFamily, QuadratureRule};

pub const TAG_ALPHA: u64 = 0;
pub const TAG_U: u64 = 1;
pub const TAG_X: u64 = 2;
pub const TAG_NOISE: u64 = 3;
pub const TAG_SHUFFLE: u64 = 4;
pub const TAG_RUN: u64 = 5;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream `(master, tag, path)`.
pub fn stream_seed(master: u64, tag: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ tag);
    for &i in path {
        h = splitmix64(h ^ i);
    }
    h
}

pub fn stream(master: u64, tag: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, tag, path))
}

fn default_modes() -> usize {
    8
}

fn default_decay() -> f64 {
    2.0
}

fn default_knots() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// `β · clip_1(Σ_{m≤M} c_m cos(ω_m·x + φ_m) / Z)` with `|c_m| ≤ m^{−decay}`.
    RandomFourier {
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "default_decay")]
        decay: f64,
    },
    /// Linear interpolation of a clamped random walk on equispaced knots (1D).
    PiecewiseLinear {
        #[serde(default = "default_knots")]
        knots: usize,
    },
    /// A constant drawn uniformly from `[lo, hi]`.
    Constant { lo: f64, hi: f64 },
}

impl Default for SamplerKind {
    fn default() -> Self {
        SamplerKind::RandomFourier {
            modes: default_modes(),
            decay: default_decay(),
        }
    }
}

/// Functions on `[−γ, γ]^dim` with `‖f‖∞ ≤ β` and `Lip(f) ≤ L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpaceSpec {
    pub dim: usize,
    pub gamma: f64,
    pub lipschitz_l: f64,
    pub sup_beta: f64,
    #[serde(default)]
    pub sampler: SamplerKind,
}

impl FunctionSpaceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("function space dimension must be at least 1".into()));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("lipschitz_l", self.lipschitz_l),
            ("sup_beta", self.sup_beta),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("function space needs {name} > 0, got {v}")));
            }
        }
        match self.sampler {
            SamplerKind::RandomFourier { modes, decay } => {
                if modes == 0 || !decay.is_finite() {
                    return Err(Error::Config(format!(
                        "random_fourier needs modes >= 1 and finite decay, got {modes}, {decay}"
                    )));
                }
            }
            SamplerKind::PiecewiseLinear { knots } => {
                if self.dim != 1 || knots < 2 {
                    return Err(Error::Config(format!(
                        "piecewise_linear needs dim = 1 and knots >= 2, got dim {}, {knots} knots",
                        self.dim
                    )));
                }
            }
            SamplerKind::Constant { lo, hi } => {
                if !(lo <= hi) || lo.abs().max(hi.abs()) > self.sup_beta {
                    return Err(Error::Config(format!(
                        "constant sampler range [{lo}, {hi}] must be ordered and within ±{}",
                        self.sup_beta
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match self.sampler {
            SamplerKind::RandomFourier { modes, decay } => {
                format!("random Fourier series, {modes} modes, coefficient decay m^-{decay}, clipped and rescaled to the Lipschitz budget")
            }
            SamplerKind::PiecewiseLinear { knots } => {
                format!("clamped random walk on {knots} knots, linear interpolation")
            }
            SamplerKind::Constant { lo, hi } => format!("constant, uniform on [{lo}, {hi}]"),
        }
    }
}

/// Draws one function from the sampler; the result passes its audit.
pub fn sample_function(spec: &FunctionSpaceSpec, seed: u64) -> Result<GridFunction> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (d, gamma, l, beta) = (spec.dim, spec.gamma, spec.lipschitz_l, spec.sup_beta);
    let f = match spec.sampler {
        SamplerKind::RandomFourier { modes, decay } => {
            let mut coeff = Vec::with_capacity(modes);
            let mut omega = Vec::with_capacity(modes);
            let mut phase = Vec::with_capacity(modes);
            let (mut sum_c, mut sum_lip) = (0.0, 0.0);
            for m in 1..=modes {
                let c = rng.random_range(-1.0..=1.0) * (m as f64).powf(-decay);
                let axis = rng.random_range(0..d);
                let mi = m as i64;
                let k: Vec<f64> = (0..d)
                    .map(|j| {
                        if j == axis {
                            mi as f64
                        } else {
                            rng.random_range(-mi..=mi) as f64
                        }
                    })
                    .collect();
                let w: Vec<f64> = k.iter().map(|v| std::f64::consts::PI * v / gamma).collect();
                let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                sum_c += c.abs();
                sum_lip += c.abs() * norm;
                coeff.push(c);
                omega.push(w);
                phase.push(rng.random_range(0.0..std::f64::consts::TAU));
            }
            let z = (sum_lip * beta / l).max(sum_c).max(f64::MIN_POSITIVE);
            GridFunction::on_symmetric_box(d, gamma, l, beta, move |x| {
                let s: f64 = coeff
                    .iter()
                    .zip(&omega)
                    .zip(&phase)
                    .map(|((c, w), p)| c * (w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + p).cos())
                    .sum();
                beta * (s / z).clamp(-1.0, 1.0)
            })?
        }
        SamplerKind::PiecewiseLinear { knots } => {
            let h = 2.0 * gamma / (knots - 1) as f64;
            let mut v = Vec::with_capacity(knots);
            v.push(rng.random_range(-beta..=beta));
            for _ in 1..knots {
                let prev = *v.last().unwrap();
                v.push((prev + rng.random_range(-1.0..=1.0) * l * h).clamp(-beta, beta));
            }
            GridFunction::on_symmetric_box(1, gamma, l, beta, move |x| {
                let s = ((x[0] + gamma) / h).clamp(0.0, (knots - 1) as f64);
                let k = (s.floor() as usize).min(knots - 2);
                let t = s - k as f64;
                (1.0 - t) * v[k] + t * v[k + 1]
            })?
        }
        SamplerKind::Constant { lo, hi } => {
            let c = if lo == hi { lo } else { rng.random_range(lo..=hi) };
            GridFunction::on_symmetric_box(d, gamma, l, beta, move |_| c)?
        }
    };
    let audit = f.audit_default();
    if !audit.passed {
        return Err(Error::Domain(format!(
            "sampled function failed its audit: max |f| = {}, max slope = {} (bounds {beta}, {l})",
            audit.max_abs, audit.max_slope
        )));
    }
    Ok(f)
}

/// Tensor grid over `[−γ, γ]^dim`, last axis fastest; a single point per axis
/// gives the centre.
pub fn uniform_grid(dim: usize, gamma: f64, count_per_axis: usize) -> Result<Vec<Vec<f64>>> {
    if count_per_axis == 0 || dim == 0 {
        return Err(Error::Config(format!(
            "grid needs dim >= 1 and count >= 1, got {dim}, {count_per_axis}"
        )));
    }
    let n = count_per_axis;
    let coord = |i: usize| {
        if n == 1 {
            0.0
        } else if i == n - 1 {
            gamma
        } else {
            -gamma + 2.0 * gamma * i as f64 / (n - 1) as f64
        }
    };
    let total = n
        .checked_pow(dim as u32)
        .ok_or_else(|| Error::Config("grid too large".into()))?;
    Ok((0..total)
        .map(|mut flat| {
            let mut p = vec![0.0; dim];
            for k in (0..dim).rev() {
                p[k] = coord(flat % n);
                flat /= n;
            }
            p
        })
        .collect())
}

/// Euclidean covering radius of [`uniform_grid`].
pub fn covering_radius(dim: usize, gamma: f64, count_per_axis: usize) -> f64 {
    let d = (dim as f64).sqrt();
    if count_per_axis <= 1 {
        gamma * d
    } else {
        gamma * d / (count_per_axis - 1) as f64
    }
}

/// Smallest count per axis whose grid covers with radius at most `radius`.
pub fn count_for_radius(dim: usize, gamma: f64, radius: f64) -> Result<usize> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("cover radius must be positive, got {radius}")));
    }
    let c = (gamma * (dim as f64).sqrt() / radius).ceil();
    if c > 1e7 {
        return Err(Error::Config(format!(
            "cover radius {radius} needs {c} points per axis"
        )));
    }
    Ok(c as usize + 1)
}

pub fn discretize(f: &GridFunction, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    points.iter().map(|p| f.eval(p)).collect()
}

/// Sensor locations `{y_s}` in the descriptor domain and `{c_s}` in the input domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorGrids {
    pub y_points: Vec<Vec<f64>>,
    pub c_points: Vec<Vec<f64>>,
    pub y_count_per_axis: usize,
    pub c_count_per_axis: usize,
    pub y_covering_radius: f64,
    pub c_covering_radius: f64,
}

impl SensorGrids {
    pub fn from_counts(
        alpha: &FunctionSpaceSpec,
        u: &FunctionSpaceSpec,
        y_count: usize,
        c_count: usize,
    ) -> Result<Self> {
        Ok(SensorGrids {
            y_points: uniform_grid(alpha.dim, alpha.gamma, y_count)?,
            c_points: uniform_grid(u.dim, u.gamma, c_count)?,
            y_count_per_axis: y_count,
            c_count_per_axis: c_count,
            y_covering_radius: covering_radius(alpha.dim, alpha.gamma, y_count),
            c_covering_radius: covering_radius(u.dim, u.gamma, c_count),
        })
    }

    /// Grids that are `ζ`- and `δ`-covers respectively.
    pub fn from_radii(alpha: &FunctionSpaceSpec, u: &FunctionSpaceSpec, zeta: f64, delta: f64) -> Result<Self> {
        let y = count_for_radius(alpha.dim, alpha.gamma, zeta)?;
        let c = count_for_radius(u.dim, u.gamma, delta)?;
        Self::from_counts(alpha, u, y, c)
    }

    pub fn n_cw(&self) -> usize {
        self.y_points.len()
    }

    pub fn n_cu(&self) -> usize {
        self.c_points.len()
    }
}

/// Everything needed to draw a hierarchical data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetPlan {
    pub family: OperatorFamily,
    pub quadrature: QuadratureRule,
    pub alpha_space: FunctionSpaceSpec,
    pub u_space: FunctionSpaceSpec,
    pub grids: SensorGrids,
    pub n_alpha: usize,
    pub n_u: usize,
    pub n_x: usize,
    pub sigma: f64,
    pub master_seed: u64,
    /// Mixed into every stream tag; distinct salts give independent draws from
    /// the same master seed (used for held-out evaluation sets).
    #[serde(default)]
    pub salt: u64,
}

impl DatasetPlan {
    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        self.quadrature.validate()?;
        self.alpha_space.validate()?;
        self.u_space.validate()?;
        if self.n_alpha == 0 || self.n_u == 0 || self.n_x == 0 {
            return Err(Error::Config(format!(
                "budgets must be at least 1, got n_alpha = {}, n_u = {}, n_x = {}",
                self.n_alpha, self.n_u, self.n_x
            )));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be nonnegative, got {}", self.sigma)));
        }
        if self.family.constant_descriptor() && !matches!(self.alpha_space.sampler, SamplerKind::Constant { .. }) {
            return Err(Error::Config(format!(
                "{} needs a constant descriptor sampler",
                self.family.name()
            )));
        }
        let hi = self.x_box().1 .1;
        if matches!(self.family, OperatorFamily::GreenDirichlet { .. }) {
            if let SamplerKind::Constant { lo: a_lo, hi: a_hi } = self.alpha_space.sampler {
                if !(a_lo > 0.0) || a_hi > self.u_space.gamma || a_hi > hi {
                    return Err(Error::Config(format!(
                        "interval lengths [{a_lo}, {a_hi}] must be positive and within the input box and [0, {hi}]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(d_V, (lo, hi))` of the output domain.
    pub fn x_box(&self) -> (usize, (f64, f64)) {
        let (d, lo, hi) = self
            .family
            .output_box(self.u_space.dim, (-self.u_space.gamma, self.u_space.gamma));
        (d, (lo, hi))
    }

    fn tag(&self, t: u64) -> u64 {
        if self.salt == 0 {
            t
        } else {
            splitmix64(self.salt) ^ t
        }
    }

    pub fn alpha_fn(&self, l: usize) -> Result<GridFunction> {
        sample_function(
            &self.alpha_space,
            stream_seed(self.master_seed, self.tag(TAG_ALPHA), &[l as u64]),
        )
    }

    pub fn u_fn(&self, l: usize, i: usize) -> Result<GridFunction> {
        sample_function(
            &self.u_space,
            stream_seed(self.master_seed, self.tag(TAG_U), &[l as u64, i as u64]),
        )
    }

    pub fn x_point(&self, l: usize, i: usize, j: usize) -> Vec<f64> {
        let (d, (lo, hi)) = self.x_box();
        let mut rng = stream(self.master_seed, self.tag(TAG_X), &[l as u64, i as u64, j as u64]);
        (0..d).map(|_| rng.random_range(lo..=hi)).collect()
    }

    fn noise(&self, l: usize, i: usize, j: usize) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let mut rng = stream(self.master_seed, self.tag(TAG_NOISE), &[l as u64, i as u64, j as u64]);
        Normal::new(0.0, self.sigma).expect("sigma validated").sample(&mut rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n_alpha: usize,
    pub n_u: usize,
    pub n_x: usize,
    pub sigma: f64,
    pub family: OperatorFamily,
    pub quadrature: QuadratureRule,
    pub alpha_space: FunctionSpaceSpec,
    pub u_space: FunctionSpaceSpec,
    pub alpha_sampler: String,
    pub u_sampler: String,
    pub grids: SensorGrids,
    pub x_domain: (f64, f64),
    pub master_seed: u64,
    pub salt: u64,
    pub notes: Vec<String>,
}

/// `{ "schema": 1, "meta", "alpha_disc", "u_disc", "x_pts", "w_vals" }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalDataset {
    pub schema: u32,
    pub meta: DatasetMeta,
    /// `n_α × n_cW`
    pub alpha_disc: Vec<Vec<f64>>,
    /// `n_α × n_u × n_cU`
    pub u_disc: Vec<Vec<Vec<f64>>>,
    /// `n_α × n_u × n_x × d_V`
    pub x_pts: Vec<Vec<Vec<Vec<f64>>>>,
    /// `n_α × n_u × n_x`
    pub w_vals: Vec<Vec<Vec<f64>>>,
}

pub const DATASET_SCHEMA: u32 = 1;

impl HierarchicalDataset {
    pub fn n_alpha(&self) -> usize {
        self.alpha_disc.len()
    }

    pub fn total_points(&self) -> usize {
        self.w_vals.iter().flatten().map(Vec::len).sum()
    }

    pub fn check_shapes(&self) -> Result<()> {
        shape_check(self.schema == DATASET_SCHEMA, || {
            format!("unsupported dataset schema {}", self.schema)
        })?;
        let m = &self.meta;
        let (n_cw, n_cu) = (m.grids.n_cw(), m.grids.n_cu());
        let d_v = m.family.output_box(m.u_space.dim, (0.0, 1.0)).0;
        shape_check(
            self.alpha_disc.len() == m.n_alpha
                && self.u_disc.len() == m.n_alpha
                && self.x_pts.len() == m.n_alpha
                && self.w_vals.len() == m.n_alpha,
            || "outer length differs from n_alpha".into(),
        )?;
        for l in 0..m.n_alpha {
            shape_check(self.alpha_disc[l].len() == n_cw, || {
                format!("alpha_disc[{l}] length != {n_cw}")
            })?;
            shape_check(
                self.u_disc[l].len() == m.n_u && self.x_pts[l].len() == m.n_u && self.w_vals[l].len() == m.n_u,
                || format!("operator {l}: inner length differs from n_u"),
            )?;
            for i in 0..m.n_u {
                shape_check(self.u_disc[l][i].len() == n_cu, || {
                    format!("u_disc[{l}][{i}] length != {n_cu}")
                })?;
                shape_check(
                    self.x_pts[l][i].len() == m.n_x && self.w_vals[l][i].len() == m.n_x,
                    || format!("cell ({l}, {i}): length differs from n_x"),
                )?;
                for (j, x) in self.x_pts[l][i].iter().enumerate() {
                    shape_check(x.len() == d_v, || {
                        format!("x_pts[{l}][{i}][{j}] has {} coordinates, expected {d_v}", x.len())
                    })?;
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: HierarchicalDataset = serde_json::from_str(s)?;
        d.check_shapes()?;
        Ok(d)
    }
}

type OperatorBlock = (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>, Vec<Vec<f64>>);

fn operator_block(plan: &DatasetPlan, l: usize) -> Result<OperatorBlock> {
    let alpha = plan.alpha_fn(l).map_err(|e| e.at(format!("alpha[{l}]")))?;
    let alpha_disc = discretize(&alpha, &plan.grids.y_points).map_err(|e| e.at(format!("alpha[{l}]")))?;
    let mut u_disc = Vec::with_capacity(plan.n_u);
    let mut xs = Vec::with_capacity(plan.n_u);
    let mut ws = Vec::with_capacity(plan.n_u);
    for i in 0..plan.n_u {
        let path = || format!("alpha[{l}]/u[{i}]");
        let u = plan.u_fn(l, i).map_err(|e| e.at(path()))?;
        u_disc.push(discretize(&u, &plan.grids.c_points).map_err(|e| e.at(path()))?);
        let mut x_row = Vec::with_capacity(plan.n_x);
        let mut w_row = Vec::with_capacity(plan.n_x);
        for j in 0..plan.n_x {
            let x = plan.x_point(l, i, j);
            let g = family_eval(&plan.family, &alpha, &u, &x, &plan.quadrature)
                .map_err(|e| e.at(format!("{}/x[{j}]", path())))?;
            let w = if plan.sigma == 0.0 { g } else { g + plan.noise(l, i, j) };
            x_row.push(x);
            w_row.push(w);
        }
        xs.push(x_row);
        ws.push(w_row);
    }
    Ok((alpha_disc, u_disc, xs, ws))
}

/// Draws the data set described by `plan`; parallel over operators, assembled
/// in index order.
pub fn generate_dataset(plan: &DatasetPlan) -> Result<HierarchicalDataset> {
    plan.validate()?;
    let blocks: Vec<OperatorBlock> = (0..plan.n_alpha)
        .into_par_iter()
        .map(|l| operator_block(plan, l))
        .collect::<Result<_>>()?;
    let mut alpha_disc = Vec::with_capacity(plan.n_alpha);
    let mut u_disc = Vec::with_capacity(plan.n_alpha);
    let mut x_pts = Vec::with_capacity(plan.n_alpha);
    let mut w_vals = Vec::with_capacity(plan.n_alpha);
    for (a, u, x, w) in blocks {
        alpha_disc.push(a);
        u_disc.push(u);
        x_pts.push(x);
        w_vals.push(w);
    }
    let mut notes = vec!["noise: Gaussian with standard deviation sigma".to_string()];
    if let OperatorFamily::FractionalKernel { c } = plan.family {
        notes.push(format!("fractional kernel normalization constant c = {c}"));
    }
    if plan.family.constant_descriptor() {
        notes.push("descriptor alpha is constant; its value is the family parameter".into());
    }
    Ok(HierarchicalDataset {
        schema: DATASET_SCHEMA,
        meta: DatasetMeta {
            n_alpha: plan.n_alpha,
            n_u: plan.n_u,
            n_x: plan.n_x,
            sigma: plan.sigma,
            family: plan.family,
            quadrature: plan.quadrature,
            alpha_space: plan.alpha_space,
            u_space: plan.u_space,
            alpha_sampler: plan.alpha_space.describe(),
            u_sampler: plan.u_space.describe(),
            grids: plan.grids.clone(),
            x_domain: plan.x_box().1,
            master_seed: plan.master_seed,
            salt: plan.salt,
            notes,
        },
        alpha_disc,
        u_disc,
        x_pts,
        w_vals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fourier(dim: usize) -> FunctionSpaceSpec {
        FunctionSpaceSpec {
            dim,
            gamma: 1.0,
            lipschitz_l: 2.0,
            sup_beta: 1.0,
            sampler: SamplerKind::default(),
        }
    }

    #[test]
    fn samplers_are_deterministic_and_audited() {
        for spec in [
            fourier(1),
            fourier(2),
            FunctionSpaceSpec {
                sampler: SamplerKind::PiecewiseLinear { knots: 9 },
                ..fourier(1)
            },
            FunctionSpaceSpec {
                sampler: SamplerKind::Constant { lo: -0.5, hi: 0.5 },
                ..fourier(1)
            },
        ] {
            for seed in 0..5 {
                let f = sample_function(&spec, seed).unwrap();
                let g = sample_function(&spec, seed).unwrap();
                let a = f.audit(50);
                assert!(a.passed);
                let pts = uniform_grid(spec.dim, 1.0, 7).unwrap();
                assert_eq!(discretize(&f, &pts).unwrap(), discretize(&g, &pts).unwrap());
            }
        }
    }

    #[test]
    fn infeasible_specs() {
        let mut s = fourier(1);
        s.lipschitz_l = 0.0;
        assert!(matches!(sample_function(&s, 0), Err(Error::Config(_))));
        let s = FunctionSpaceSpec {
            sampler: SamplerKind::PiecewiseLinear { knots: 4 },
            ..fourier(2)
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn grid_examples() {
        assert_eq!(uniform_grid(1, 1.0, 3).unwrap(), vec![vec![-1.0], vec![0.0], vec![1.0]]);
        let g = uniform_grid(2, 1.0, 2).unwrap();
        assert_eq!(
            g,
            vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]]
        );
        assert_eq!(covering_radius(1, 1.0, 3), 0.5);
        assert_eq!(uniform_grid(2, 1.0, 1).unwrap(), vec![vec![0.0, 0.0]]);
        assert!(covering_radius(1, 1.0, count_for_radius(1, 1.0, 0.3).unwrap()) <= 0.3);
    }

    #[test]
    fn discretize_examples() {
        let c = GridFunction::constant(1, -1.0, 1.0, 2.5).unwrap();
        let pts = uniform_grid(1, 1.0, 3).unwrap();
        assert_eq!(discretize(&c, &pts).unwrap(), vec![2.5; 3]);
        let id = GridFunction::on_symmetric_box(1, 1.0, 1.0, 1.0, |x| x[0]).unwrap();
        assert_eq!(discretize(&id, &pts).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(discretize(&id, &[vec![2.0]]).is_err());
    }

    #[test]
    fn streams_are_independent_of_siblings() {
        assert_ne!(stream_seed(1, TAG_U, &[0, 1]), stream_seed(1, TAG_U, &[1, 0]));
        assert_ne!(stream_seed(1, TAG_U, &[0]), stream_seed(1, TAG_X, &[0]));
        assert_ne!(stream_seed(1, TAG_U, &[0]), stream_seed(2, TAG_U, &[0]));
    }
}
