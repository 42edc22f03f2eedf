//! Training, evaluation, sweeps and run configuration.

pub mod config;
pub mod eval;
pub mod oracle;
pub mod report;
pub mod sweep;
pub mod train;

pub use config::Config;
pub use eval::{eval_generalization, EvalBudget, EvalResult};
pub use report::{emit_report, RateInputs, Report};
pub use sweep::{run_sweep, write_csv, RunRecord};
pub use train::{empirical_risk, empirical_risk_and_grad, train_erm, train_from, Optimizer, TrainConfig, TrainOutcome};
