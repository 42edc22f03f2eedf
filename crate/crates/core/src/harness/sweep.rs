//! Scaling sweeps over the number of operators `n_α`.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Config;
use super::eval::eval_generalization;
use super::train::train_erm;
use crate::error::{Error, Result};
use crate::sampling::{generate_dataset, stream_seed, TAG_RUN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n_alpha: usize,
    pub trial: usize,
    pub seed: u64,
    /// Final empirical risk; `None` if the run failed.
    pub train_loss: Option<f64>,
    pub test_error: Option<f64>,
    pub test_stderr: Option<f64>,
    pub wall_ms: u64,
    /// `ok` or `error: <message>`.
    pub status: String,
    pub model_file: Option<String>,
    #[serde(skip)]
    pub loss_trace: Vec<f64>,
}

impl RunRecord {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Seed of run `(n_alpha, trial)`.
pub fn run_seed(master: u64, n_alpha: usize, trial: usize) -> u64 {
    stream_seed(master, TAG_RUN, &[n_alpha as u64, trial as u64])
}

fn run_one(cfg: &Config, n_alpha: usize, trial: usize) -> RunRecord {
    let seed = run_seed(cfg.sweep.seed, n_alpha, trial);
    let start = Instant::now();
    let mut rec = RunRecord {
        n_alpha,
        trial,
        seed,
        train_loss: None,
        test_error: None,
        test_stderr: None,
        wall_ms: 0,
        status: "ok".into(),
        model_file: None,
        loss_trace: Vec::new(),
    };
    let result = (|| -> Result<()> {
        let plan = cfg.plan_with(n_alpha, seed)?;
        let data = generate_dataset(&plan)?;
        let spec = cfg.model_spec(&plan)?;
        let train = super::train::TrainConfig { seed, ..cfg.train };
        let out = train_erm(spec, &data, &train)?;
        rec.train_loss = Some(out.final_loss());
        // every run is scored on the same held-out draws
        let ev = eval_generalization(&out.params, &plan, &cfg.eval.budget(), cfg.eval.seed)?;
        rec.test_error = Some(ev.test_error);
        rec.test_stderr = Some(ev.stderr);
        if let Some(dir) = &cfg.sweep.models_dir {
            let path = dir.join(format!("model_n{n_alpha}_t{trial}.json"));
            std::fs::write(&path, serde_json::to_string(&out.params)?)?;
            rec.model_file = Some(path.display().to_string());
        }
        rec.loss_trace = out.loss_trace;
        Ok(())
    })();
    if let Err(e) = result {
        rec.status = format!("error: {e}");
    }
    if cfg.sweep.timing {
        rec.wall_ms = start.elapsed().as_millis() as u64;
    }
    rec
}

/// Every `(n_alpha, trial)` run, ordered by `n_alpha` then trial. Runs execute
/// concurrently; failures are recorded and do not stop the sweep.
pub fn run_sweep(cfg: &Config) -> Result<Vec<RunRecord>> {
    if cfg.sweep.trials == 0 || cfg.sweep.n_alpha_grid.is_empty() {
        return Err(Error::Config(
            "sweep needs trials >= 1 and a nonempty n_alpha grid".into(),
        ));
    }
    if let Some(dir) = &cfg.sweep.models_dir {
        std::fs::create_dir_all(dir)?;
    }
    let jobs: Vec<(usize, usize)> = cfg
        .sweep
        .n_alpha_grid
        .iter()
        .flat_map(|&n| (0..cfg.sweep.trials).map(move |t| (n, t)))
        .collect();
    let mut records: Vec<RunRecord> = jobs.par_iter().map(|&(n, t)| run_one(cfg, n, t)).collect();
    records.sort_by_key(|r| (r.n_alpha, r.trial));
    Ok(records)
}

const CSV_HEADER: [&str; 7] = [
    "n_alpha",
    "trial",
    "seed",
    "train_loss",
    "test_error",
    "wall_ms",
    "status",
];

pub fn write_csv<W: std::io::Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:e}"));
    for r in records {
        w.write_record([
            r.n_alpha.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            opt(r.train_loss),
            opt(r.test_error),
            r.wall_ms.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(records: &[RunRecord], path: &Path) -> Result<()> {
    write_csv(records, std::fs::File::create(path)?)
}

/// Reads back the columns written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let num = |i: usize| -> Result<Option<f64>> {
            let s = field(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| Error::Config(format!("bad number {s:?} in column {}", CSV_HEADER[i])))
            }
        };
        let int = |i: usize| -> Result<u64> {
            field(i)
                .parse()
                .map_err(|_| Error::Config(format!("bad integer {:?} in column {}", field(i), CSV_HEADER[i])))
        };
        out.push(RunRecord {
            n_alpha: int(0)? as usize,
            trial: int(1)? as usize,
            seed: int(2)?,
            train_loss: num(3)?,
            test_error: num(4)?,
            test_stderr: None,
            wall_ms: int(5)?,
            status: field(6).to_string(),
            model_file: None,
            loss_trace: Vec::new(),
        });
    }
    Ok(out)
}
