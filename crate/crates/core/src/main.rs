use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use mno::bounds::{
    entropy_eps, generalization_bound_rhs, log_mno_covering, rate_schedule, Budgets, InputNorms, ProductClass,
    RATE_MIN_N_ALPHA,
};
use mno::harness::oracle::run_oracles;
use mno::harness::report::RateInputs;
use mno::harness::sweep::write_csv_file;
use mno::harness::{emit_report, eval_generalization, run_sweep, train_erm, Config};
use mno::mno::MnoParams;
use mno::prescribe::{prescribe_architecture, PrescribeMode};
use mno::sampling::{generate_dataset, HierarchicalDataset};
use mno::{Error, Result};

#[derive(Parser)]
#[command(name = "mno", version, about = "Clipped separable multiple neural operators")]
struct Cli {
    /// TOML configuration; defaults apply to anything not given.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Print the fully resolved configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Theory-mode architecture sizes for a target accuracy.
    Prescribe {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<PrescribeMode>,
    },
    /// Draw a hierarchical data set and write it as JSON.
    GenData {
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Fit a model to a data set.
    Train {
        #[arg(short, long)]
        data: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Per-epoch loss trace as CSV.
        #[arg(long)]
        loss: Option<PathBuf>,
    },
    /// Estimate the generalization error of a model on fresh draws.
    Eval {
        #[arg(short, long)]
        model: PathBuf,
    },
    /// Train and evaluate over a grid of operator counts.
    Sweep {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Covering numbers, entropy and generalization bound for the configuration.
    Bounds,
    /// Compare the operator families against reference solutions.
    Oracle,
}

fn parse_mode(s: &str) -> std::result::Result<PrescribeMode, String> {
    match s {
        "base" => Ok(PrescribeMode::Base),
        "halved" => Ok(PrescribeMode::Halved),
        _ => Err(format!("unknown mode {s:?} (expected base or halved)")),
    }
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn bounds_report(cfg: &Config) -> Result<serde_json::Value> {
    let b = &cfg.bounds;
    let k = &b.constants;
    let pr = prescribe_architecture(b.eps, k, b.mode)?;
    let class = pr.product_class(k);
    let norms = InputNorms {
        gamma_v: k.gamma_v,
        beta_u: k.beta_u,
        beta_w: k.beta_w,
    };
    let cov = log_mno_covering(&class, &norms, b.eta)?;
    let cov_scaled = log_mno_covering(&class, &norms, b.eta / (4.0 * k.beta_v))?;
    let budgets = Budgets {
        n_alpha: cfg.data.n_alpha as f64,
        n_u: cfg.data.n_u as f64,
        n_x: cfg.data.n_x as f64,
        sigma: k.sigma,
    };
    let terms = generalization_bound_rhs(
        b.eps,
        b.eta,
        &budgets,
        k.beta_v,
        cov.ln_covering,
        cov_scaled.ln_covering,
    )?;
    let entropy = entropy_eps(b.eps, b.eta, k.d_w, k.d_u, k.d_v)?;
    let n = cfg.data.n_alpha as f64;
    let rate = if n > RATE_MIN_N_ALPHA {
        Some(rate_schedule(n, k.d_w, k.d_u, k.d_v, k.beta_v)?)
    } else {
        None
    };
    let plan = cfg.plan()?;
    let practice = ProductClass::from(&cfg.model_spec(&plan)?);
    let practice_cov = log_mno_covering(&practice, &norms, b.eta)?;
    Ok(json!({
        "prescription": pr,
        "theory_covering": cov,
        "theory_covering_scaled": cov_scaled,
        "bound_terms": terms,
        "entropy": entropy,
        "rate": rate,
        "practice_covering": practice_cov,
    }))
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if cli.dump_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(Error::Config("no subcommand given; see --help".into()));
    };
    match command {
        Command::Prescribe { eps, mode } => {
            let eps = eps.unwrap_or(cfg.prescribe.eps);
            let mode = mode.unwrap_or(cfg.prescribe.mode);
            let pr = prescribe_architecture(eps, &cfg.bounds.constants, mode)?;
            let spec = pr.mno_spec(&cfg.bounds.constants, cfg.prescribe.max_terms);
            print_json(&json!({ "prescription": pr, "trainable_spec": spec }))
        }
        Command::GenData { out } => {
            let data = generate_dataset(&cfg.plan()?)?;
            fs::write(&out, data.to_json()?)?;
            print_json(&json!({ "out": out, "points": data.total_points() }))
        }
        Command::Train { data, out, loss } => {
            let data = HierarchicalDataset::from_json(&read(&data)?)?;
            let plan = cfg.plan()?;
            let spec = cfg.model_spec(&plan)?;
            let result = train_erm(spec, &data, &cfg.train)?;
            fs::write(&out, serde_json::to_string(&result.params)?)?;
            if let Some(path) = loss {
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(["epoch", "loss"])?;
                for (e, l) in result.loss_trace.iter().enumerate() {
                    w.write_record([e.to_string(), format!("{l:e}")])?;
                }
                w.flush()?;
            }
            print_json(&json!({ "out": out, "final_loss": result.final_loss(), "epochs": result.loss_trace.len() - 1 }))
        }
        Command::Eval { model } => {
            let params: MnoParams = serde_json::from_str(&read(&model)?)?;
            params.check_shapes()?;
            let r = eval_generalization(&params, &cfg.plan()?, &cfg.eval.budget(), cfg.eval.seed)?;
            print_json(&json!({ "test_error": r.test_error, "stderr": r.stderr }))
        }
        Command::Sweep { out, report } => {
            cfg.validate()?;
            let records = run_sweep(&cfg)?;
            write_csv_file(&records, &out)?;
            if let Some(path) = report {
                let inputs = RateInputs {
                    d_w: cfg.alpha.dim,
                    d_u: cfg.u.dim,
                    d_v: cfg.plan()?.x_box().0,
                    beta_v: cfg.model.clip,
                };
                fs::write(&path, serde_json::to_string_pretty(&emit_report(&records, &inputs)?)?)?;
            }
            let failed = records.iter().filter(|r| !r.ok()).count();
            print_json(&json!({ "out": out, "runs": records.len(), "failed": failed }))
        }
        Command::Bounds => print_json(&bounds_report(&cfg)?),
        Command::Oracle => {
            let checks = run_oracles()?;
            let failed = checks.iter().filter(|c| !c.pass).count();
            print_json(&serde_json::to_value(&checks)?)?;
            if failed > 0 {
                return Err(Error::Mismatch(format!(
                    "{failed} oracle comparison(s) out of tolerance"
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
