//! Constrained feedforward ReLU networks.
//!
//! A network of depth `L` computes
//! `q(x) = W_L · ReLU(W_{L-1} ··· ReLU(W_1 x + b_1) ··· + b_{L-1}) + b_L`.
//! Hidden layers all have width `p`; a depth-1 network is a plain affine map.
//! The class constraints (entry magnitude `κ`, total nonzero count `K`) are
//! enforced by [`project_to_class`], and [`class_bounds`] gives the closed-form
//! output and parameter-Lipschitz bounds used by the covering-number calculator.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{shape_check, Error, Result};

/// Architectural constraints of a ReLU network class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetClassSpec {
    pub d_in: usize,
    pub d_out: usize,
    /// Number of affine layers.
    pub depth: usize,
    /// Width of every hidden layer.
    pub width: usize,
    /// Maximum number of nonzero entries over all weights and biases.
    pub sparsity: usize,
    /// Maximum absolute value of any parameter; at least 1.
    pub kappa: f64,
    /// Sup-norm output bound of the class.
    pub output_r: f64,
}

impl NetClassSpec {
    pub fn new(
        d_in: usize,
        d_out: usize,
        depth: usize,
        width: usize,
        sparsity: usize,
        kappa: f64,
        output_r: f64,
    ) -> Result<Self> {
        let spec = NetClassSpec {
            d_in,
            d_out,
            depth,
            width,
            sparsity,
            kappa,
            output_r,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Dense spec with no active sparsity constraint (`K` = parameter count).
    pub fn dense(d_in: usize, depth: usize, width: usize, kappa: f64, output_r: f64) -> Result<Self> {
        let mut spec = NetClassSpec {
            d_in,
            d_out: 1,
            depth,
            width,
            sparsity: 1,
            kappa,
            output_r,
        };
        spec.sparsity = spec.param_count();
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_in == 0 || self.d_out == 0 || self.depth == 0 || self.width == 0 || self.sparsity == 0 {
            return Err(Error::Config(format!(
                "network class counts must be positive: {self:?}"
            )));
        }
        if !(self.kappa >= 1.0) || !self.kappa.is_finite() {
            return Err(Error::Config(format!(
                "network class requires kappa >= 1, got {}",
                self.kappa
            )));
        }
        if !(self.output_r > 0.0) {
            return Err(Error::Config(format!(
                "network class requires output_r > 0, got {}",
                self.output_r
            )));
        }
        Ok(())
    }

    /// `(rows, cols)` of each weight matrix, first layer first.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        (0..self.depth)
            .map(|l| {
                let rows = if l + 1 == self.depth { self.d_out } else { self.width };
                let cols = if l == 0 { self.d_in } else { self.width };
                (rows, cols)
            })
            .collect()
    }

    /// Total number of weight and bias entries.
    pub fn param_count(&self) -> usize {
        self.layer_shapes().iter().map(|(r, c)| r * c + r).sum()
    }
}

/// Dense row-major matrix. Serialized as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::try_from(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn matvec_into(&self, x: &[f64], bias: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.rows).map(|r| self.row(r).iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias[r]));
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.data.chunks(m.cols.max(1)).take(m.rows).map(<[f64]>::to_vec).collect()
    }
}

/// Parameters of one network: `weights[l]`, `biases[l]` for `l = 0..depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub spec: NetClassSpec,
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

/// Gradient of a scalar with respect to every entry of an [`MlpParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradBundle {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpParams {
    pub fn zeros(spec: NetClassSpec) -> Self {
        let shapes = spec.layer_shapes();
        MlpParams {
            weights: shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect(),
            biases: shapes.iter().map(|&(r, _)| vec![0.0; r]).collect(),
            spec,
        }
    }

    /// Network that outputs `value` everywhere: zero weights, output bias `value`.
    pub fn constant(spec: NetClassSpec, value: f64) -> Self {
        let mut params = MlpParams::zeros(spec);
        if let Some(last) = params.biases.last_mut() {
            last.iter_mut().for_each(|b| *b = value);
        }
        params
    }

    /// Entries uniform on `[-min(κ,1)/√p, min(κ,1)/√p]`.
    pub fn random<R: Rng + ?Sized>(spec: NetClassSpec, rng: &mut R) -> Self {
        let scale = spec.kappa.min(1.0) / (spec.width as f64).sqrt();
        let mut params = MlpParams::zeros(spec);
        params.for_each_entry_mut(|v| *v = rng.random_range(-scale..=scale));
        params
    }

    pub fn check_shapes(&self) -> Result<()> {
        let shapes = self.spec.layer_shapes();
        shape_check(
            self.weights.len() == shapes.len() && self.biases.len() == shapes.len(),
            || format!("expected {} layers, got {}", shapes.len(), self.weights.len()),
        )?;
        for (l, (&(r, c), (w, b))) in shapes.iter().zip(self.weights.iter().zip(&self.biases)).enumerate() {
            shape_check(w.rows == r && w.cols == c && b.len() == r, || {
                format!(
                    "layer {l}: expected {r}x{c} weights and {r} biases, got {}x{} and {}",
                    w.rows,
                    w.cols,
                    b.len()
                )
            })?;
        }
        Ok(())
    }

    /// Visits entries in canonical order: layer by layer, weights row-major, then biases.
    pub fn for_each_entry(&self, mut f: impl FnMut(f64)) {
        for (w, b) in self.weights.iter().zip(&self.biases) {
            w.data.iter().for_each(|&v| f(v));
            b.iter().for_each(|&v| f(v));
        }
    }

    pub fn for_each_entry_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            w.data.iter_mut().for_each(&mut f);
            b.iter_mut().for_each(&mut f);
        }
    }

    pub fn entries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.spec.param_count());
        self.for_each_entry(|v| out.push(v));
        out
    }

    pub fn nonzero_count(&self) -> usize {
        let mut n = 0;
        self.for_each_entry(|v| n += usize::from(v != 0.0));
        n
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        self.for_each_entry(|v| m = m.max(v.abs()));
        m
    }

    /// Whether the magnitude and sparsity constraints hold.
    pub fn is_feasible(&self) -> bool {
        self.max_abs() <= self.spec.kappa && self.nonzero_count() <= self.spec.sparsity
    }

    pub fn apply_gradient(&mut self, grad: &GradBundle, step: f64) {
        for (w, g) in self.weights.iter_mut().zip(&grad.weights) {
            w.data.iter_mut().zip(&g.data).for_each(|(v, d)| *v -= step * d);
        }
        for (b, g) in self.biases.iter_mut().zip(&grad.biases) {
            b.iter_mut().zip(g).for_each(|(v, d)| *v -= step * d);
        }
    }
}

impl GradBundle {
    pub fn zeros_like(params: &MlpParams) -> Self {
        GradBundle {
            weights: params.weights.iter().map(|w| Matrix::zeros(w.rows, w.cols)).collect(),
            biases: params.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn entries(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(&w.data);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn add_scaled(&mut self, other: &GradBundle, scale: f64) {
        for (w, o) in self.weights.iter_mut().zip(&other.weights) {
            w.data.iter_mut().zip(&o.data).for_each(|(v, d)| *v += scale * d);
        }
        for (b, o) in self.biases.iter_mut().zip(&other.biases) {
            b.iter_mut().zip(o).for_each(|(v, d)| *v += scale * d);
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.weights
            .iter_mut()
            .for_each(|w| w.data.iter_mut().for_each(|v| *v *= s));
        self.biases.iter_mut().for_each(|b| b.iter_mut().for_each(|v| *v *= s));
    }
}

#[inline]
pub fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Pre-activations `z_1..z_L` of every layer; the last entry is the output.
pub fn forward_trace(params: &MlpParams, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    params.check_shapes()?;
    shape_check(x.len() == params.spec.d_in, || {
        format!("network expects input of length {}, got {}", params.spec.d_in, x.len())
    })?;
    let mut pre = Vec::with_capacity(params.spec.depth);
    let mut act: Vec<f64> = x.to_vec();
    for (l, (w, b)) in params.weights.iter().zip(&params.biases).enumerate() {
        let mut z = Vec::with_capacity(w.rows);
        w.matvec_into(&act, b, &mut z);
        if l + 1 < params.spec.depth {
            act = z.iter().map(|&v| relu(v)).collect();
        }
        pre.push(z);
    }
    Ok(pre)
}

pub fn forward(params: &MlpParams, x: &[f64]) -> Result<Vec<f64>> {
    let mut pre = forward_trace(params, x)?;
    Ok(pre.pop().unwrap_or_default())
}

/// `Clip_a(v) = min(max(v, -a), a)`.
pub fn clip_scalar(a: f64, v: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("clip level must be positive, got {a}")));
    }
    Ok(v.max(-a).min(a))
}

/// Two-layer ReLU realization of the clip: `-ReLU(-ReLU(v + a) + 2a) + a`.
pub fn clip_relu_form(a: f64, v: f64) -> f64 {
    -relu(-relu(v + a) + 2.0 * a) + a
}

/// Derivative of the clip under the ReLU-form convention: 1 strictly inside `(-a, a)`, else 0.
pub fn clip_derivative(a: f64, v: f64) -> f64 {
    if v > -a && v < a {
        1.0
    } else {
        0.0
    }
}

/// Gradient of `upstream · q(x)` with respect to every parameter.
/// The ReLU derivative at 0 is taken as 0.
pub fn backprop(params: &MlpParams, x: &[f64], upstream: &[f64]) -> Result<GradBundle> {
    let pre = forward_trace(params, x)?;
    shape_check(upstream.len() == params.spec.d_out, || {
        format!("upstream has length {}, expected {}", upstream.len(), params.spec.d_out)
    })?;
    let mut grad = GradBundle::zeros_like(params);
    accumulate_grad(params, x, &pre, upstream, &mut grad);
    Ok(grad)
}

/// Adds `∂(upstream · q(x))/∂params` into `grad`, reusing the trace from [`forward_trace`].
/// Shapes are assumed checked.
pub(crate) fn accumulate_grad(
    params: &MlpParams,
    x: &[f64],
    pre: &[Vec<f64>],
    upstream: &[f64],
    grad: &mut GradBundle,
) {
    let depth = params.spec.depth;
    let mut delta = upstream.to_vec();
    let mut input: Vec<f64> = Vec::new();
    for l in (0..depth).rev() {
        input.clear();
        if l == 0 {
            input.extend_from_slice(x);
        } else {
            input.extend(pre[l - 1].iter().map(|&v| relu(v)));
        }
        let gw = &mut grad.weights[l];
        let cols = gw.cols;
        for (r, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let row = &mut gw.data[r * cols..(r + 1) * cols];
            row.iter_mut().zip(&input).for_each(|(g, &a)| *g += d * a);
        }
        grad.biases[l].iter_mut().zip(&delta).for_each(|(g, &d)| *g += d);
        if l > 0 {
            let w = &params.weights[l];
            delta = (0..w.cols)
                .map(|c| {
                    if pre[l - 1][c] > 0.0 {
                        (0..w.rows).map(|r| w.get(r, c) * delta[r]).sum()
                    } else {
                        0.0
                    }
                })
                .collect();
        }
    }
}

/// Clamps every entry to `[-κ, κ]`, then zeroes the smallest-magnitude entries
/// until at most `K` remain nonzero. Ties go to the entry that comes first in
/// canonical order (earliest layer, weights row-major, then biases).
pub fn project_to_class(params: &MlpParams) -> MlpParams {
    let mut out = params.clone();
    let kappa = out.spec.kappa;
    out.for_each_entry_mut(|v| *v = v.clamp(-kappa, kappa));
    let entries = out.entries();
    let nonzero: Vec<(usize, f64)> = entries
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| (i, v.abs()))
        .collect();
    if nonzero.len() > out.spec.sparsity {
        let mut order = nonzero;
        // stable sort keeps canonical order among equal magnitudes
        order.sort_by(|a, b| a.1.total_cmp(&b.1));
        let excess = order.len() - out.spec.sparsity;
        let mut kill = vec![false; entries.len()];
        order.iter().take(excess).for_each(|&(i, _)| kill[i] = true);
        let mut idx = 0;
        out.for_each_entry_mut(|v| {
            if kill[idx] {
                *v = 0.0;
            }
            idx += 1;
        });
    }
    out
}

/// Maximum parameter discrepancy `max_l max(‖W_l - W'_l‖_max, ‖b_l - b'_l‖_∞)`.
pub fn param_distance(a: &MlpParams, b: &MlpParams) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Output bound `κ^L (p+1)^{L-1} (p‖x‖∞ + 1)` and parameter-Lipschitz constant
/// `L κ^{L-1} (p+1)^{L-1} (p‖x‖∞ + 1)` of the class.
pub fn class_bounds(spec: &NetClassSpec, x_inf_norm: f64) -> Result<(f64, f64)> {
    if !(spec.kappa >= 1.0) {
        return Err(Error::Domain(format!(
            "class bounds require kappa >= 1, got {}",
            spec.kappa
        )));
    }
    if !(x_inf_norm >= 0.0) {
        return Err(Error::Domain(format!(
            "input norm must be nonnegative, got {x_inf_norm}"
        )));
    }
    let l = spec.depth as f64;
    let p = spec.width as f64;
    let input_term = p * x_inf_norm + 1.0;
    let growth = (p + 1.0).powf(l - 1.0);
    let output = spec.kappa.powf(l) * growth * input_term;
    let lipschitz = l * spec.kappa.powf(l - 1.0) * growth * input_term;
    Ok((output, lipschitz))
}
