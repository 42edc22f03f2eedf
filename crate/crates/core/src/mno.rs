//! The clipped fully separable multiple-operator model
//!
//! `Clip_a( Σ_{p,k,ℓ} θ_{pkℓ} · l_p(ᾱ) · b_k(ū) · τ_ℓ(x) )`
//!
//! where `l_p` encode the operator descriptor, `b_k` the input function and
//! `τ_ℓ` the query point. All three families are scalar-output ReLU networks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{shape_check, Error, Result};
use crate::relu_net::{
    accumulate_grad, clip_derivative, clip_scalar, forward_trace, project_to_class, GradBundle, MlpParams, NetClassSpec,
};

/// Sizes and class constraints of a clipped separable model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MnoSpec {
    /// Operator-encoder count.
    #[serde(rename = "P")]
    pub p: usize,
    /// Branch count.
    #[serde(rename = "H")]
    pub h: usize,
    /// Trunk count.
    #[serde(rename = "N")]
    pub n: usize,
    /// Class of the operator encoders `l_p`, input dimension `n_cW`.
    pub spec_l: NetClassSpec,
    /// Class of the branches `b_k`, input dimension `n_cU`.
    pub spec_b: NetClassSpec,
    /// Class of the trunks `τ_ℓ`, input dimension `d_V`.
    pub spec_tau: NetClassSpec,
    /// Coefficient bound `I`.
    pub coeff_bound: f64,
    /// Clip level `a`.
    pub clip: f64,
}

impl MnoSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.h == 0 || self.n == 0 {
            return Err(Error::Config("P, H and N must be positive".into()));
        }
        for (name, s) in [("l", &self.spec_l), ("b", &self.spec_b), ("tau", &self.spec_tau)] {
            s.validate().map_err(|e| Error::Config(format!("{name} class: {e}")))?;
            if s.d_out != 1 {
                return Err(Error::Config(format!("{name} class must be scalar-output")));
            }
        }
        if !(self.coeff_bound > 0.0) || !(self.clip > 0.0) {
            return Err(Error::Config(
                "coefficient bound and clip level must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn n_cw(&self) -> usize {
        self.spec_l.d_in
    }

    pub fn n_cu(&self) -> usize {
        self.spec_b.d_in
    }

    pub fn d_v(&self) -> usize {
        self.spec_tau.d_in
    }
}

/// Coefficient tensor of shape `P×H×N`, serialized as nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Vec<f64>>>", into = "Vec<Vec<Vec<f64>>>")]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(p: usize, h: usize, n: usize) -> Self {
        Tensor3 {
            dims: [p, h, n],
            data: vec![0.0; p * h * n],
        }
    }

    pub fn filled(p: usize, h: usize, n: usize, v: f64) -> Self {
        Tensor3 {
            dims: [p, h, n],
            data: vec![v; p * h * n],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    fn idx(&self, p: usize, k: usize, l: usize) -> usize {
        (p * self.dims[1] + k) * self.dims[2] + l
    }

    pub fn get(&self, p: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(p, k, l)]
    }

    pub fn set(&mut self, p: usize, k: usize, l: usize, v: f64) {
        let i = self.idx(p, k, l);
        self.data[i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

impl TryFrom<Vec<Vec<Vec<f64>>>> for Tensor3 {
    type Error = Error;

    fn try_from(v: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let p = v.len();
        let h = v.first().map_or(0, Vec::len);
        let n = v.first().and_then(|x| x.first()).map_or(0, Vec::len);
        if v.iter().any(|a| a.len() != h || a.iter().any(|b| b.len() != n)) {
            return Err(Error::Shape("ragged coefficient tensor".into()));
        }
        Ok(Tensor3 {
            dims: [p, h, n],
            data: v.into_iter().flatten().flatten().collect(),
        })
    }
}

impl From<Tensor3> for Vec<Vec<Vec<f64>>> {
    fn from(t: Tensor3) -> Self {
        let [p, h, n] = t.dims;
        (0..p)
            .map(|i| {
                (0..h)
                    .map(|k| t.data[(i * h + k) * n..(i * h + k + 1) * n].to_vec())
                    .collect()
            })
            .collect()
    }
}

/// Full parameter set of a clipped separable model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnoParams {
    pub spec: MnoSpec,
    pub theta: Tensor3,
    pub l_nets: Vec<MlpParams>,
    pub b_nets: Vec<MlpParams>,
    pub tau_nets: Vec<MlpParams>,
}

/// Gradient congruent with [`MnoParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct MnoGrad {
    pub theta: Tensor3,
    pub l_nets: Vec<GradBundle>,
    pub b_nets: Vec<GradBundle>,
    pub tau_nets: Vec<GradBundle>,
}

/// One training or test observation.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub alpha: &'a [f64],
    pub u: &'a [f64],
    pub x: &'a [f64],
    pub target: f64,
}

impl MnoParams {
    /// θ uniform on `±I/√(PHN)`, subnetworks via [`MlpParams::random`].
    pub fn init<R: Rng + ?Sized>(spec: MnoSpec, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let scale = spec.coeff_bound / ((spec.p * spec.h * spec.n) as f64).sqrt();
        let mut theta = Tensor3::zeros(spec.p, spec.h, spec.n);
        theta
            .data
            .iter_mut()
            .for_each(|v| *v = rng.random_range(-scale..=scale));
        let l_nets = (0..spec.p).map(|_| MlpParams::random(spec.spec_l, rng)).collect();
        let b_nets = (0..spec.h).map(|_| MlpParams::random(spec.spec_b, rng)).collect();
        let tau_nets = (0..spec.n).map(|_| MlpParams::random(spec.spec_tau, rng)).collect();
        Ok(MnoParams {
            spec,
            theta,
            l_nets,
            b_nets,
            tau_nets,
        })
    }

    /// Every subnetwork outputs the constant 1 and θ ≡ `theta`.
    pub fn constant(spec: MnoSpec, theta: f64) -> Self {
        MnoParams {
            theta: Tensor3::filled(spec.p, spec.h, spec.n, theta),
            l_nets: vec![MlpParams::constant(spec.spec_l, 1.0); spec.p],
            b_nets: vec![MlpParams::constant(spec.spec_b, 1.0); spec.h],
            tau_nets: vec![MlpParams::constant(spec.spec_tau, 1.0); spec.n],
            spec,
        }
    }

    pub fn check_shapes(&self) -> Result<()> {
        let s = &self.spec;
        shape_check(self.theta.dims == [s.p, s.h, s.n], || {
            format!("theta has shape {:?}, expected {:?}", self.theta.dims, [s.p, s.h, s.n])
        })?;
        shape_check(
            self.l_nets.len() == s.p && self.b_nets.len() == s.h && self.tau_nets.len() == s.n,
            || "subnetwork counts do not match P, H, N".into(),
        )?;
        for (nets, class) in [
            (&self.l_nets, &s.spec_l),
            (&self.b_nets, &s.spec_b),
            (&self.tau_nets, &s.spec_tau),
        ] {
            for net in nets {
                shape_check(net.spec.d_in == class.d_in && net.spec.d_out == 1, || {
                    "subnetwork input dimension differs from its class".into()
                })?;
                net.check_shapes()?;
            }
        }
        Ok(())
    }

    /// Whether θ and every subnetwork satisfy their constraints.
    pub fn is_feasible(&self) -> bool {
        self.theta.data.iter().all(|v| v.abs() <= self.spec.coeff_bound)
            && self
                .l_nets
                .iter()
                .chain(&self.b_nets)
                .chain(&self.tau_nets)
                .all(MlpParams::is_feasible)
    }

    pub fn apply_gradient(&mut self, grad: &MnoGrad, step: f64) {
        self.theta
            .data
            .iter_mut()
            .zip(&grad.theta.data)
            .for_each(|(v, d)| *v -= step * d);
        for (net, g) in self
            .l_nets
            .iter_mut()
            .chain(self.b_nets.iter_mut())
            .chain(self.tau_nets.iter_mut())
            .zip(grad.l_nets.iter().chain(&grad.b_nets).chain(&grad.tau_nets))
        {
            net.apply_gradient(g, step);
        }
    }

    /// All parameters flattened: θ, then l, b, τ networks in canonical order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = self.theta.data.clone();
        for net in self.l_nets.iter().chain(&self.b_nets).chain(&self.tau_nets) {
            out.extend(net.entries());
        }
        out
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn set_flat(&mut self, values: &[f64]) {
        let (theta, mut rest) = values.split_at(self.theta.data.len());
        self.theta.data.copy_from_slice(theta);
        for net in self
            .l_nets
            .iter_mut()
            .chain(self.b_nets.iter_mut())
            .chain(self.tau_nets.iter_mut())
        {
            let mut i = 0;
            net.for_each_entry_mut(|v| {
                *v = rest[i];
                i += 1;
            });
            rest = &rest[i..];
        }
    }
}

impl MnoGrad {
    pub fn zeros_like(params: &MnoParams) -> Self {
        let [p, h, n] = params.theta.dims;
        MnoGrad {
            theta: Tensor3::zeros(p, h, n),
            l_nets: params.l_nets.iter().map(GradBundle::zeros_like).collect(),
            b_nets: params.b_nets.iter().map(GradBundle::zeros_like).collect(),
            tau_nets: params.tau_nets.iter().map(GradBundle::zeros_like).collect(),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = self.theta.data.clone();
        for g in self.l_nets.iter().chain(&self.b_nets).chain(&self.tau_nets) {
            out.extend(g.entries());
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        self.theta.data.iter_mut().for_each(|v| *v *= s);
        self.l_nets
            .iter_mut()
            .chain(self.b_nets.iter_mut())
            .chain(self.tau_nets.iter_mut())
            .for_each(|g| g.scale(s));
    }

    pub fn add_scaled(&mut self, other: &MnoGrad, s: f64) {
        self.theta
            .data
            .iter_mut()
            .zip(&other.theta.data)
            .for_each(|(v, d)| *v += s * d);
        for (g, o) in self
            .l_nets
            .iter_mut()
            .chain(self.b_nets.iter_mut())
            .chain(self.tau_nets.iter_mut())
            .zip(other.l_nets.iter().chain(&other.b_nets).chain(&other.tau_nets))
        {
            g.add_scaled(o, s);
        }
    }
}

/// Forward traces and scalar outputs of one family of subnetworks on one input.
pub(crate) struct FamilyEval {
    pub traces: Vec<Vec<Vec<f64>>>,
    pub outputs: Vec<f64>,
}

pub(crate) fn eval_family(nets: &[MlpParams], input: &[f64]) -> Result<FamilyEval> {
    let mut traces = Vec::with_capacity(nets.len());
    let mut outputs = Vec::with_capacity(nets.len());
    for net in nets {
        let t = forward_trace(net, input)?;
        outputs.push(t.last().map_or(0.0, |z| z[0]));
        traces.push(t);
    }
    Ok(FamilyEval { traces, outputs })
}

/// `Σ θ_{pkℓ} l_p b_k τ_ℓ` from precomputed subnetwork outputs.
pub(crate) fn contract(theta: &Tensor3, l: &[f64], b: &[f64], tau: &[f64]) -> f64 {
    let [_, h, n] = theta.dims;
    let mut s = 0.0;
    for (p, &lp) in l.iter().enumerate() {
        let mut inner = 0.0;
        for (k, &bk) in b.iter().enumerate() {
            let row = &theta.data[(p * h + k) * n..(p * h + k + 1) * n];
            inner += bk * row.iter().zip(tau).map(|(t, v)| t * v).sum::<f64>();
        }
        s += lp * inner;
    }
    s
}

fn check_inputs(spec: &MnoSpec, alpha: &[f64], u: &[f64], x: &[f64]) -> Result<()> {
    shape_check(
        alpha.len() == spec.n_cw() && u.len() == spec.n_cu() && x.len() == spec.d_v(),
        || {
            format!(
                "inputs have lengths ({}, {}, {}), model expects ({}, {}, {})",
                alpha.len(),
                u.len(),
                x.len(),
                spec.n_cw(),
                spec.n_cu(),
                spec.d_v()
            )
        },
    )
}

/// Model output; wrapped in `Clip_a` when `clipped` is set.
pub fn mno_forward(params: &MnoParams, alpha: &[f64], u: &[f64], x: &[f64], clipped: bool) -> Result<f64> {
    params.check_shapes()?;
    check_inputs(&params.spec, alpha, u, x)?;
    let l = eval_family(&params.l_nets, alpha)?.outputs;
    let b = eval_family(&params.b_nets, u)?.outputs;
    let tau = eval_family(&params.tau_nets, x)?.outputs;
    let s = contract(&params.theta, &l, &b, &tau);
    if clipped {
        clip_scalar(params.spec.clip, s)
    } else {
        Ok(s)
    }
}

/// Adds the gradient of `weight · s(ᾱ, ū, x)` into `grad`, where `s` is the
/// unclipped output and all three families have been evaluated already.
pub(crate) fn accumulate_output_grad(
    params: &MnoParams,
    inputs: (&[f64], &[f64], &[f64]),
    evals: (&FamilyEval, &FamilyEval, &FamilyEval),
    weight: f64,
    grad: &mut MnoGrad,
) {
    let (alpha, u, x) = inputs;
    let (le, be, te) = evals;
    let [_, h, n] = params.theta.dims;
    let (l, b, tau) = (&le.outputs, &be.outputs, &te.outputs);
    let mut dl = vec![0.0; l.len()];
    let mut db = vec![0.0; b.len()];
    let mut dtau = vec![0.0; tau.len()];
    for (p, &lp) in l.iter().enumerate() {
        for (k, &bk) in b.iter().enumerate() {
            let base = (p * h + k) * n;
            for (ell, &tl) in tau.iter().enumerate() {
                let th = params.theta.data[base + ell];
                grad.theta.data[base + ell] += weight * lp * bk * tl;
                dl[p] += th * bk * tl;
                db[k] += th * lp * tl;
                dtau[ell] += th * lp * bk;
            }
        }
    }
    for (p, d) in dl.iter().enumerate() {
        if *d != 0.0 {
            accumulate_grad(
                &params.l_nets[p],
                alpha,
                &le.traces[p],
                &[weight * d],
                &mut grad.l_nets[p],
            );
        }
    }
    for (k, d) in db.iter().enumerate() {
        if *d != 0.0 {
            accumulate_grad(&params.b_nets[k], u, &be.traces[k], &[weight * d], &mut grad.b_nets[k]);
        }
    }
    for (ell, d) in dtau.iter().enumerate() {
        if *d != 0.0 {
            accumulate_grad(
                &params.tau_nets[ell],
                x,
                &te.traces[ell],
                &[weight * d],
                &mut grad.tau_nets[ell],
            );
        }
    }
}

/// Mean squared clipped loss over `batch` and its gradient. At or beyond the
/// clip level the clip derivative is 0.
pub fn mno_loss_and_grad(params: &MnoParams, batch: &[Sample<'_>]) -> Result<(f64, MnoGrad)> {
    if batch.is_empty() {
        return Err(Error::Domain("gradient requires a nonempty batch".into()));
    }
    params.check_shapes()?;
    let a = params.spec.clip;
    let scale = 1.0 / batch.len() as f64;
    let mut grad = MnoGrad::zeros_like(params);
    let mut loss = 0.0;
    for s in batch {
        check_inputs(&params.spec, s.alpha, s.u, s.x)?;
        let le = eval_family(&params.l_nets, s.alpha)?;
        let be = eval_family(&params.b_nets, s.u)?;
        let te = eval_family(&params.tau_nets, s.x)?;
        let raw = contract(&params.theta, &le.outputs, &be.outputs, &te.outputs);
        let out = raw.max(-a).min(a);
        let resid = out - s.target;
        loss += scale * resid * resid;
        let w = scale * 2.0 * resid * clip_derivative(a, raw);
        if w != 0.0 {
            accumulate_output_grad(params, (s.alpha, s.u, s.x), (&le, &be, &te), w, &mut grad);
        }
    }
    Ok((loss, grad))
}

pub fn mno_grad(params: &MnoParams, batch: &[Sample<'_>]) -> Result<MnoGrad> {
    mno_loss_and_grad(params, batch).map(|(_, g)| g)
}

/// Clamps θ to `[-I, I]` and projects every subnetwork onto its class.
pub fn mno_project(params: &MnoParams) -> MnoParams {
    let bound = params.spec.coeff_bound;
    let mut out = params.clone();
    out.theta.data.iter_mut().for_each(|v| *v = v.clamp(-bound, bound));
    for net in out
        .l_nets
        .iter_mut()
        .chain(out.b_nets.iter_mut())
        .chain(out.tau_nets.iter_mut())
    {
        *net = project_to_class(net);
    }
    out
}
