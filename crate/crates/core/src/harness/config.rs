//! The run configuration, read from TOML. Every field has a default, so a
//! partial file (or none) is valid; `--dump-config` prints the resolved form.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::eval::EvalBudget;
use super::train::TrainConfig;
use crate::bounds::BoundConstants;
use crate::error::{Error, Result};
use crate::mno::MnoSpec;
use crate::prescribe::PrescribeMode;
use crate::relu_net::NetClassSpec;
use crate::sampling::{DatasetPlan, FunctionSpaceSpec, SamplerKind, SensorGrids};
use crate::zoo::{OperatorFamily, QuadratureRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Sensors per axis in the descriptor domain.
    pub y_count: usize,
    /// Sensors per axis in the input domain.
    pub c_count: usize,
    /// If set, overrides `y_count` with the coarsest grid of this cover radius.
    pub zeta: Option<f64>,
    /// If set, overrides `c_count` likewise.
    pub delta: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            y_count: 1,
            c_count: 9,
            zeta: None,
            delta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub n_alpha: usize,
    pub n_u: usize,
    pub n_x: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            n_alpha: 16,
            n_u: 4,
            n_x: 16,
            sigma: 0.05,
            seed: 0,
        }
    }
}

/// Practice-mode model sizes; input dimensions come from the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "P")]
    pub p: usize,
    #[serde(rename = "H")]
    pub h: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub depth: usize,
    pub width: usize,
    /// Nonzero budget per subnetwork; absent means dense.
    pub sparsity: Option<usize>,
    pub kappa: f64,
    pub output_r: f64,
    pub coeff_bound: f64,
    pub clip: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            p: 2,
            h: 2,
            n: 2,
            depth: 2,
            width: 8,
            sparsity: None,
            kappa: 10.0,
            output_r: 1.0,
            coeff_bound: 1.0,
            clip: 0.25,
        }
    }
}

impl ModelConfig {
    pub fn net_class(&self, d_in: usize) -> Result<NetClassSpec> {
        match self.sparsity {
            Some(k) => NetClassSpec::new(d_in, 1, self.depth, self.width, k, self.kappa, self.output_r),
            None => NetClassSpec::dense(d_in, self.depth, self.width, self.kappa, self.output_r),
        }
    }

    pub fn spec(&self, n_cw: usize, n_cu: usize, d_v: usize) -> Result<MnoSpec> {
        let spec = MnoSpec {
            p: self.p,
            h: self.h,
            n: self.n,
            spec_l: self.net_class(n_cw)?,
            spec_b: self.net_class(n_cu)?,
            spec_tau: self.net_class(d_v)?,
            coeff_bound: self.coeff_bound,
            clip: self.clip,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub m_alpha: usize,
    pub m_u: usize,
    pub m_x: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        let b = EvalBudget::default();
        EvalConfig {
            m_alpha: b.m_alpha,
            m_u: b.m_u,
            m_x: b.m_x,
            seed: 1,
        }
    }
}

impl EvalConfig {
    pub fn budget(&self) -> EvalBudget {
        EvalBudget {
            m_alpha: self.m_alpha,
            m_u: self.m_u,
            m_x: self.m_x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_alpha_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Record wall-clock time per run. Off, the CSV is byte-reproducible.
    pub timing: bool,
    /// Directory for per-run model files, if any.
    pub models_dir: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_alpha_grid: vec![4, 8, 16, 32],
            trials: 5,
            seed: 0,
            timing: false,
            models_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub constants: BoundConstants,
    pub eps: f64,
    pub eta: f64,
    pub mode: PrescribeMode,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            constants: BoundConstants::default(),
            eps: 0.5,
            eta: 0.01,
            mode: PrescribeMode::Halved,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrescribeConfig {
    pub eps: f64,
    pub mode: PrescribeMode,
    /// Largest `P^{n_cW} H^{n_cU} N^{d_V}` for which a trainable spec is emitted.
    pub max_terms: f64,
}

impl Default for PrescribeConfig {
    fn default() -> Self {
        PrescribeConfig {
            eps: 0.5,
            mode: PrescribeMode::Halved,
            max_terms: 1e6,
        }
    }
}

fn default_alpha_space() -> FunctionSpaceSpec {
    FunctionSpaceSpec {
        dim: 1,
        gamma: 1.0,
        lipschitz_l: 1.0,
        sup_beta: 1.0,
        sampler: SamplerKind::Constant { lo: 0.5, hi: 1.0 },
    }
}

fn default_u_space() -> FunctionSpaceSpec {
    FunctionSpaceSpec {
        dim: 1,
        gamma: 1.0,
        lipschitz_l: 8.0,
        sup_beta: 2.0,
        sampler: SamplerKind::default(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub family: OperatorFamily,
    pub quadrature: QuadratureRule,
    pub alpha: FunctionSpaceSpec,
    pub u: FunctionSpaceSpec,
    pub grids: GridConfig,
    pub data: DataConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub sweep: SweepConfig,
    pub bounds: BoundsConfig,
    pub prescribe: PrescribeConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            family: OperatorFamily::default(),
            quadrature: QuadratureRule::default(),
            alpha: default_alpha_space(),
            u: default_u_space(),
            grids: GridConfig::default(),
            data: DataConfig::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            eval: EvalConfig::default(),
            sweep: SweepConfig::default(),
            bounds: BoundsConfig::default(),
            prescribe: PrescribeConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn sensor_grids(&self) -> Result<SensorGrids> {
        let mut g = SensorGrids::from_counts(&self.alpha, &self.u, self.grids.y_count, self.grids.c_count)?;
        if self.grids.zeta.is_some() || self.grids.delta.is_some() {
            let y = match self.grids.zeta {
                Some(z) => crate::sampling::count_for_radius(self.alpha.dim, self.alpha.gamma, z)?,
                None => self.grids.y_count,
            };
            let c = match self.grids.delta {
                Some(d) => crate::sampling::count_for_radius(self.u.dim, self.u.gamma, d)?,
                None => self.grids.c_count,
            };
            g = SensorGrids::from_counts(&self.alpha, &self.u, y, c)?;
        }
        Ok(g)
    }

    /// Training-set plan with `n_alpha` operators and the given master seed.
    pub fn plan_with(&self, n_alpha: usize, seed: u64) -> Result<DatasetPlan> {
        let plan = DatasetPlan {
            family: self.family,
            quadrature: self.quadrature,
            alpha_space: self.alpha,
            u_space: self.u,
            grids: self.sensor_grids()?,
            n_alpha,
            n_u: self.data.n_u,
            n_x: self.data.n_x,
            sigma: self.data.sigma,
            master_seed: seed,
            salt: 0,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn plan(&self) -> Result<DatasetPlan> {
        self.plan_with(self.data.n_alpha, self.data.seed)
    }

    /// Model spec matching the plan's input dimensions.
    pub fn model_spec(&self, plan: &DatasetPlan) -> Result<MnoSpec> {
        self.model.spec(plan.grids.n_cw(), plan.grids.n_cu(), plan.x_box().0)
    }

    pub fn validate(&self) -> Result<()> {
        let plan = self.plan()?;
        self.model_spec(&plan)?;
        self.train.validate()?;
        if self.sweep.trials == 0 || self.sweep.n_alpha_grid.is_empty() || self.sweep.n_alpha_grid.contains(&0) {
            return Err(Error::Config(
                "sweep needs trials >= 1 and a nonempty grid of positive n_alpha".into(),
            ));
        }
        self.bounds.constants.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = Config::default();
        c.validate().unwrap();
        let text = c.to_toml().unwrap();
        assert_eq!(Config::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn partial_files_and_unknown_keys() {
        let c = Config::from_toml("[data]\nn_alpha = 3\n").unwrap();
        assert_eq!(c.data.n_alpha, 3);
        assert_eq!(c.data.n_u, DataConfig::default().n_u);
        assert!(matches!(
            Config::from_toml("[data]\nbogus = 1\n"),
            Err(Error::Config(_))
        ));
    }
}
