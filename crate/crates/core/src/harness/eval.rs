//! Monte Carlo estimate of the expected generalization error
//! `E_{α,u} (1/n_x) Σ_j (Ĝ[ᾱ][ū](x_j) − G[α][u](x_j))²` on fresh draws.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mno::{mno_forward, MnoParams};
use crate::sampling::{generate_dataset, DatasetPlan, HierarchicalDataset};

/// Salt separating held-out draws from training draws of the same seed.
pub const EVAL_SALT: u64 = 0xE7A1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalBudget {
    pub m_alpha: usize,
    pub m_u: usize,
    pub m_x: usize,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            m_alpha: 64,
            m_u: 8,
            m_x: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub test_error: f64,
    /// Standard error over the per-operator means.
    pub stderr: f64,
    pub per_alpha: Vec<f64>,
}

/// Held-out plan: same family, spaces and grids as `template`, noiseless,
/// with the given budgets and seed.
pub fn eval_plan(template: &DatasetPlan, budget: &EvalBudget, seed: u64) -> DatasetPlan {
    DatasetPlan {
        n_alpha: budget.m_alpha,
        n_u: budget.m_u,
        n_x: budget.m_x,
        sigma: 0.0,
        master_seed: seed,
        salt: EVAL_SALT,
        ..template.clone()
    }
}

/// Error of `params` against the noiseless values stored in `truth`.
pub fn error_on(params: &MnoParams, truth: &HierarchicalDataset) -> Result<EvalResult> {
    truth.check_shapes()?;
    let per_alpha: Vec<f64> = (0..truth.n_alpha())
        .into_par_iter()
        .map(|l| -> Result<f64> {
            let mut s = 0.0;
            let mut count = 0usize;
            for (i, u) in truth.u_disc[l].iter().enumerate() {
                for (x, w) in truth.x_pts[l][i].iter().zip(&truth.w_vals[l][i]) {
                    let d = mno_forward(params, &truth.alpha_disc[l], u, x, true)? - w;
                    s += d * d;
                    count += 1;
                }
            }
            Ok(s / count as f64)
        })
        .collect::<Result<_>>()?;
    let m = per_alpha.len() as f64;
    let mean = per_alpha.iter().sum::<f64>() / m;
    let stderr = if per_alpha.len() > 1 {
        let var = per_alpha.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    } else {
        0.0
    };
    Ok(EvalResult {
        test_error: mean,
        stderr,
        per_alpha,
    })
}

/// Draws `m_alpha · m_u` fresh `(α, u)` pairs with `m_x` points each and
/// compares the clipped model to the ground truth.
pub fn eval_generalization(
    params: &MnoParams,
    template: &DatasetPlan,
    budget: &EvalBudget,
    seed: u64,
) -> Result<EvalResult> {
    if budget.m_alpha == 0 || budget.m_u == 0 || budget.m_x == 0 {
        return Err(Error::Config("evaluation budgets must be at least 1".into()));
    }
    let truth = generate_dataset(&eval_plan(template, budget, seed))?;
    error_on(params, &truth)
}
