//! Projected (stochastic) gradient descent on the empirical squared risk
//! `(1/(n_α n_u n_x)) Σ_{ℓ,i,j} (Clip_a(s(ᾱ_ℓ, ū_ℓi, x_ℓij)) − w_ℓij)²`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mno::{contract, eval_family, mno_project, MnoGrad, MnoParams, MnoSpec};
use crate::relu_net::{accumulate_grad, clip_derivative};
use crate::sampling::{stream, HierarchicalDataset, TAG_SHUFFLE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    #[default]
    Sgd,
    SgdMomentum {
        beta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub steps: usize,
    /// Minibatch size; 0 means the full data set.
    pub batch_size: usize,
    pub projection_every: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1.0,
            steps: 2000,
            batch_size: 0,
            projection_every: 1,
            seed: 0,
            optimizer: Optimizer::Sgd,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.projection_every == 0 {
            return Err(Error::Config("steps and projection_every must be at least 1".into()));
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "learning_rate must be nonnegative, got {}",
                self.learning_rate
            )));
        }
        if let Optimizer::SgdMomentum { beta } = self.optimizer {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::Config(format!("momentum must lie in [0, 1), got {beta}")));
            }
        }
        Ok(())
    }
}

/// Flat view of a data set: cell `f` is `(ℓ, i, j)` in row-major order.
pub(crate) struct Cells<'a> {
    pub data: &'a HierarchicalDataset,
    pub n_u: usize,
    pub n_x: usize,
}

impl<'a> Cells<'a> {
    pub fn new(spec: &MnoSpec, data: &'a HierarchicalDataset) -> Result<Self> {
        data.check_shapes()?;
        let m = &data.meta;
        let (n_cw, n_cu) = (m.grids.n_cw(), m.grids.n_cu());
        let d_v = data
            .x_pts
            .first()
            .and_then(|r| r.first())
            .and_then(|r| r.first())
            .map_or(spec.d_v(), Vec::len);
        if (n_cw, n_cu, d_v) != (spec.n_cw(), spec.n_cu(), spec.d_v()) {
            return Err(Error::Config(format!(
                "data set has (n_cW, n_cU, d_V) = ({n_cw}, {n_cu}, {d_v}), model expects ({}, {}, {})",
                spec.n_cw(),
                spec.n_cu(),
                spec.d_v()
            )));
        }
        Ok(Cells {
            data,
            n_u: m.n_u,
            n_x: m.n_x,
        })
    }

    pub fn len(&self) -> usize {
        self.data.n_alpha() * self.n_u * self.n_x
    }

    fn split(&self, f: usize) -> (usize, usize, usize) {
        (f / (self.n_u * self.n_x), (f / self.n_x) % self.n_u, f % self.n_x)
    }
}

/// Mean clipped squared loss over `batch` (sorted cell indices); accumulates
/// the gradient into `grad` when given.
///
/// Encoder outputs are shared by all cells of one operator and branch outputs
/// by all cells of one input function. Backpropagation is linear in the
/// upstream signal, so their upstream contributions are summed first and each
/// shared network is backpropagated once per group.
pub(crate) fn batch_loss(
    params: &MnoParams,
    cells: &Cells<'_>,
    batch: &[usize],
    mut grad: Option<&mut MnoGrad>,
) -> Result<f64> {
    let a = params.spec.clip;
    let scale = 1.0 / batch.len() as f64;
    let [_, h, n] = params.theta.dims();
    let data = cells.data;
    let mut loss = 0.0;
    let mut k = 0;
    while k < batch.len() {
        let (l, _, _) = cells.split(batch[k]);
        let alpha = &data.alpha_disc[l];
        let le = eval_family(&params.l_nets, alpha)?;
        let mut dl = vec![0.0; le.outputs.len()];
        while k < batch.len() && cells.split(batch[k]).0 == l {
            let (_, i, _) = cells.split(batch[k]);
            let u = &data.u_disc[l][i];
            let be = eval_family(&params.b_nets, u)?;
            let mut db = vec![0.0; be.outputs.len()];
            while k < batch.len() && cells.split(batch[k]).0 == l && cells.split(batch[k]).1 == i {
                let j = cells.split(batch[k]).2;
                let x = &data.x_pts[l][i][j];
                let te = eval_family(&params.tau_nets, x)?;
                let raw = contract(&params.theta, &le.outputs, &be.outputs, &te.outputs);
                let resid = raw.clamp(-a, a) - data.w_vals[l][i][j];
                loss += scale * resid * resid;
                if let Some(g) = grad.as_deref_mut() {
                    let w = scale * 2.0 * resid * clip_derivative(a, raw);
                    if w != 0.0 {
                        let mut dtau = vec![0.0; te.outputs.len()];
                        for (p, &lp) in le.outputs.iter().enumerate() {
                            for (kk, &bk) in be.outputs.iter().enumerate() {
                                let base = (p * h + kk) * n;
                                for (ell, &tl) in te.outputs.iter().enumerate() {
                                    let th = params.theta.as_slice()[base + ell];
                                    g.theta.as_mut_slice()[base + ell] += w * lp * bk * tl;
                                    dl[p] += w * th * bk * tl;
                                    db[kk] += w * th * lp * tl;
                                    dtau[ell] += w * th * lp * bk;
                                }
                            }
                        }
                        for (ell, d) in dtau.iter().enumerate() {
                            if *d != 0.0 {
                                accumulate_grad(&params.tau_nets[ell], x, &te.traces[ell], &[*d], &mut g.tau_nets[ell]);
                            }
                        }
                    }
                }
                k += 1;
            }
            if let Some(g) = grad.as_deref_mut() {
                for (kk, d) in db.iter().enumerate() {
                    if *d != 0.0 {
                        accumulate_grad(&params.b_nets[kk], u, &be.traces[kk], &[*d], &mut g.b_nets[kk]);
                    }
                }
            }
        }
        if let Some(g) = grad.as_deref_mut() {
            for (p, d) in dl.iter().enumerate() {
                if *d != 0.0 {
                    accumulate_grad(&params.l_nets[p], alpha, &le.traces[p], &[*d], &mut g.l_nets[p]);
                }
            }
        }
    }
    Ok(loss)
}

/// Empirical risk of `params` on the whole data set.
pub fn empirical_risk(params: &MnoParams, data: &HierarchicalDataset) -> Result<f64> {
    params.check_shapes()?;
    let cells = Cells::new(&params.spec, data)?;
    let all: Vec<usize> = (0..cells.len()).collect();
    batch_loss(params, &cells, &all, None)
}

/// Loss and gradient on the whole data set.
pub fn empirical_risk_and_grad(params: &MnoParams, data: &HierarchicalDataset) -> Result<(f64, MnoGrad)> {
    params.check_shapes()?;
    let cells = Cells::new(&params.spec, data)?;
    let all: Vec<usize> = (0..cells.len()).collect();
    let mut grad = MnoGrad::zeros_like(params);
    let loss = batch_loss(params, &cells, &all, Some(&mut grad))?;
    Ok((loss, grad))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub params: MnoParams,
    /// Full empirical loss: initial value, then after each epoch; the last
    /// entry is measured after the final projection.
    pub loss_trace: Vec<f64>,
    pub steps_per_epoch: usize,
}

impl TrainOutcome {
    pub fn final_loss(&self) -> f64 {
        *self.loss_trace.last().expect("trace is never empty")
    }
}

/// Runs `cfg.steps` projected gradient steps from a seeded initialization.
pub fn train_erm(spec: MnoSpec, data: &HierarchicalDataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = MnoParams::init(spec, &mut rng)?;
    train_from(init, data, cfg)
}

/// As [`train_erm`], starting from given parameters.
pub fn train_from(init: MnoParams, data: &HierarchicalDataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    init.spec.validate()?;
    init.check_shapes()?;
    let cells = Cells::new(&init.spec, data)?;
    let total = cells.len();
    let batch = if cfg.batch_size == 0 {
        total
    } else {
        cfg.batch_size.min(total)
    };
    let steps_per_epoch = total.div_ceil(batch);
    // shuffling uses its own stream so that it does not depend on the init draws
    let mut rng = stream(cfg.seed, TAG_SHUFFLE, &[]);
    let mut order: Vec<usize> = (0..total).collect();
    let all: Vec<usize> = order.clone();

    let mut params = init;
    let mut velocity = MnoGrad::zeros_like(&params);
    let full_loss = |p: &MnoParams, step: usize| -> Result<f64> {
        let l = batch_loss(p, &cells, &all, None)?;
        if l.is_finite() {
            Ok(l)
        } else {
            Err(Error::Divergence { step, loss: l })
        }
    };
    let mut trace = vec![full_loss(&params, 0)?];
    let mut idx = Vec::with_capacity(batch);
    for step in 0..cfg.steps {
        let pos = step % steps_per_epoch;
        if pos == 0 && batch < total {
            order.shuffle(&mut rng);
        }
        idx.clear();
        idx.extend_from_slice(&order[pos * batch..((pos + 1) * batch).min(total)]);
        idx.sort_unstable();
        let mut grad = MnoGrad::zeros_like(&params);
        let loss = batch_loss(&params, &cells, &idx, Some(&mut grad))?;
        if !loss.is_finite() {
            return Err(Error::Divergence { step, loss });
        }
        match cfg.optimizer {
            Optimizer::Sgd => params.apply_gradient(&grad, cfg.learning_rate),
            Optimizer::SgdMomentum { beta } => {
                velocity.scale(beta);
                velocity.add_scaled(&grad, 1.0);
                params.apply_gradient(&velocity, cfg.learning_rate);
            }
        }
        if (step + 1) % cfg.projection_every == 0 {
            params = mno_project(&params);
        }
        if (step + 1) % steps_per_epoch == 0 && step + 1 < cfg.steps {
            trace.push(full_loss(&params, step + 1)?);
        }
    }
    params = mno_project(&params);
    trace.push(full_loss(&params, cfg.steps)?);
    Ok(TrainOutcome {
        params,
        loss_trace: trace,
        steps_per_epoch,
    })
}
