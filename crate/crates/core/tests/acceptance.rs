//! Acceptance suite. Runs every criterion in sequence, prints one line per
//! criterion and exits nonzero if any fails.

use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use mno::bounds::{
    delta1, delta2, generalization_bound_rhs, log_f, log_mno_covering, log_net_covering, rate_schedule, Budgets,
    ClassShape, InputNorms, ProductClass,
};
use mno::harness::{run_sweep, Config};
use mno::mno::{mno_loss_and_grad, MnoParams, MnoSpec, Sample};
use mno::relu_net::{backprop, clip_relu_form, forward, MlpParams, NetClassSpec};
use mno::zoo::{
    burgers_cole_hopf, burgers_fd_reference, green_apply, green_kernel, green_kernel_relu_form, heat_apply, Extension,
    GridFunction, QuadratureRule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;

type Criterion = (&'static str, fn() -> Outcome);
/// Encoder input, branch input, point, target.
type Observation = (Vec<f64>, Vec<f64>, Vec<f64>, f64);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn c1_clipping() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 2.0] {
        for i in 0..1000 {
            let v = -3.0 * a + 6.0 * a * i as f64 / 999.0;
            let reference = v.max(-a).min(a);
            worst = worst.max((clip_relu_form(a, v) - reference).abs());
        }
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-12 && within(t, 1.0),
        format!("max err {worst:.2e} (tol 1e-12), {t:.2?} (limit 1 s)"),
    )
}

fn c2_green() -> Outcome {
    let start = Instant::now();
    let rule = QuadratureRule::trapezoid(1001);
    let one = GridFunction::constant(1, 0.0, 1.0, 1.0).unwrap();
    let mut worst_const = 0.0f64;
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let v = green_apply(1.0, &one, x, &rule).unwrap();
        worst_const = worst_const.max((v - x * (1.0 - x) / 2.0).abs());
    }
    let s = GridFunction::new(1, 0.0, 1.0, PI, 1.0, |y| (PI * y[0]).sin()).unwrap();
    let mut worst_sin = 0.0f64;
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let v = green_apply(1.0, &s, x, &rule).unwrap();
        worst_sin = worst_sin.max((v - (PI * x).sin() / (PI * PI)).abs());
    }
    let t = start.elapsed();
    outcome(
        worst_const < 1e-6 && worst_sin < 1e-5 && within(t, 1.0),
        format!("u=1 err {worst_const:.2e} (tol 1e-6), sin err {worst_sin:.2e} (tol 1e-5), {t:.2?} (limit 1 s)"),
    )
}

fn c3_separable_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut worst_closed = 0.0f64;
    for _ in 0..300 {
        let a = rng.random_range(0.1..5.0);
        let x = rng.random_range(0.0..=a);
        let y = rng.random_range(0.0..=a);
        let k = green_kernel(a, x, y).unwrap();
        worst = worst.max((green_kernel_relu_form(a, x, y).unwrap() - k).abs());
        let closed = if x <= y { x * (a - y) / a } else { y * (a - x) / a };
        worst_closed = worst_closed.max((k - closed).abs());
    }
    outcome(
        worst < 1e-12 && worst_closed < 1e-12,
        format!("relu form err {worst:.2e}, closed form err {worst_closed:.2e} (tol 1e-12, 300 triples)"),
    )
}

fn c4_burgers() -> Outcome {
    let start = Instant::now();
    let sine = GridFunction::on_symmetric_box(1, 1.0, PI, 1.0, |y| (PI * y[0]).sin()).unwrap();
    let (nu, t) = (0.1, 0.5);
    let coarse = burgers_fd_reference(nu, t, &sine, 400, 8_000).unwrap();
    let fine = burgers_fd_reference(nu, t, &sine, 800, 32_000).unwrap();
    let rule = QuadratureRule::trapezoid(4001);
    let xs = [-0.5, 0.0, 0.5];
    let scale = xs.iter().fold(0.0f64, |m, &x| m.max(fine.eval1(x).abs()));
    let mut rel = 0.0f64;
    for x in xs {
        let v = burgers_cole_hopf(nu, t, &sine, x, &rule, Extension::Periodic).unwrap();
        rel = rel.max((v - fine.eval1(x)).abs() / scale);
    }
    let mut self_conv = 0.0f64;
    for i in 0..=400 {
        let x = -1.0 + 2.0 * i as f64 / 400.0;
        self_conv = self_conv.max((fine.eval1(x) - coarse.eval1(x)).abs());
    }
    let el = start.elapsed();
    outcome(
        rel < 1e-2 && self_conv < 1e-3 && within(el, 30.0),
        format!("rel err {rel:.2e} (tol 1e-2), self-convergence {self_conv:.2e} (tol 1e-3), {el:.2?} (limit 30 s)"),
    )
}

fn c5_heat() -> Outcome {
    let rule = QuadratureRule::trapezoid(2001);
    let one = GridFunction::constant(1, -1.0, 1.0, 1.0).unwrap();
    let mass = heat_apply(0.5, 1.0, &one, 0.0, &rule, Extension::Clamp).unwrap();
    let g = GridFunction::on_symmetric_box(1, 20.0, 1.0, 1.0, |y| (-y[0] * y[0] / 2.0).exp()).unwrap();
    let conv = heat_apply(0.5, 1.0, &g, 0.0, &rule, Extension::Clamp).unwrap();
    // Gaussian of variance 1 smoothed by variance 2νt = 1 keeps mass, so the peak scales by 1/√2
    let e_mass = (mass - 1.0).abs();
    let e_conv = (conv - 0.5f64.sqrt()).abs();
    outcome(
        e_mass < 1e-6 && e_conv < 1e-5,
        format!("mass err {e_mass:.2e} (tol 1e-6), gaussian err {e_conv:.2e} (tol 1e-5)"),
    )
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-4)
}

fn perturb(p: &MlpParams, idx: usize, h: f64) -> MlpParams {
    let mut q = p.clone();
    let mut k = 0;
    q.for_each_entry_mut(|v| {
        if k == idx {
            *v += h;
        }
        k += 1;
    });
    q
}

fn small_net(rng: &mut ChaCha8Rng, d_in: usize) -> NetClassSpec {
    let depth = rng.random_range(1..=3);
    let width = rng.random_range(1..=4);
    NetClassSpec::dense(d_in, depth, width, 2.0, 1.0).unwrap()
}

fn c6_gradients() -> Outcome {
    let start = Instant::now();
    let h = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_net, mut worst_mno) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let d_in = rng.random_range(1..=3);
        let spec = small_net(&mut rng, d_in);
        let net = MlpParams::random(spec, &mut rng);
        let x: Vec<f64> = (0..d_in).map(|_| rng.random_range(-1.0..1.0)).collect();
        let up = [rng.random_range(-1.0..1.0)];
        let g = backprop(&net, &x, &up).unwrap().entries();
        let f = |p: &MlpParams| up[0] * forward(p, &x).unwrap()[0];
        for (i, gi) in g.iter().enumerate() {
            let fd = (f(&perturb(&net, i, h)) - f(&perturb(&net, i, -h))) / (2.0 * h);
            worst_net = worst_net.max(rel_err(*gi, fd));
        }

        let (n_cw, n_cu, d_v) = (
            rng.random_range(1..=2),
            rng.random_range(1..=3),
            rng.random_range(1..=2),
        );
        let mspec = MnoSpec {
            p: rng.random_range(1..=2),
            h: rng.random_range(1..=2),
            n: rng.random_range(1..=2),
            spec_l: small_net(&mut rng, n_cw),
            spec_b: small_net(&mut rng, n_cu),
            spec_tau: small_net(&mut rng, d_v),
            coeff_bound: 2.0,
            clip: 10.0,
        };
        let params = MnoParams::init(mspec, &mut rng).unwrap();
        let inputs: Vec<Observation> = (0..3)
            .map(|_| {
                let mut v = |n: usize| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
                (v(n_cw), v(n_cu), v(d_v), rng.random_range(-0.5..0.5))
            })
            .collect();
        let batch: Vec<Sample> = inputs
            .iter()
            .map(|(a, u, x, t)| Sample {
                alpha: a,
                u,
                x,
                target: *t,
            })
            .collect();
        let (_, grad) = mno_loss_and_grad(&params, &batch).unwrap();
        let flat = params.flatten();
        let loss_at = |vals: &[f64]| {
            let mut q = params.clone();
            q.set_flat(vals);
            mno_loss_and_grad(&q, &batch).unwrap().0
        };
        for (i, gi) in grad.flatten().iter().enumerate() {
            let (mut plus, mut minus) = (flat.clone(), flat.clone());
            plus[i] += h;
            minus[i] -= h;
            let fd = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
            worst_mno = worst_mno.max(rel_err(*gi, fd));
        }
    }
    let t = start.elapsed();
    outcome(
        worst_net < 1e-5 && worst_mno < 1e-5 && within(t, 10.0),
        format!("backprop rel err {worst_net:.2e}, model rel err {worst_mno:.2e} (tol 1e-5, denominator floor 1e-4), {t:.2?} (limit 10 s)"),
    )
}

fn unit_shape(depth: f64, width: f64, sparsity: f64, kappa: f64) -> ClassShape {
    ClassShape {
        depth,
        width,
        sparsity,
        kappa,
        ln_kappa: kappa.ln(),
        output_r: 1.0,
    }
}

fn product(p: f64, h: f64, n: f64, coeff: f64, shape: ClassShape) -> ProductClass {
    let count = p * h * n;
    ProductClass {
        count,
        ln_count: count.ln(),
        coeff_bound: coeff,
        trunk: shape,
        branch: shape,
        encoder: shape,
    }
}

fn c7_covering() -> Outcome {
    let ones = InputNorms {
        gamma_v: 1.0,
        beta_u: 1.0,
        beta_w: 1.0,
    };
    let unit = NetClassSpec::new(1, 1, 1, 1, 1, 1.0, 1.0).unwrap();
    // C(2,1)·(⌊2/2⌋+1)
    let v4 = log_net_covering(&unit, 1.0, 2.0).unwrap().value.ln();
    // C(2,1)·(⌊2⌋+1)
    let v6 = log_f(1.0, 1.0, 1.0, 1.0, 1.0).unwrap().value.ln();
    let cls = product(1.0, 1.0, 1.0, 1.0, unit_shape(1.0, 1.0, 1.0, 1.0));
    // three network terms of 2 plus R1 R2 R3 = 1
    let v7 = log_mno_covering(&cls, &ones, 7.0).unwrap().ln_t;
    // (⌊2/2⌋+1)·4·4·4 with h = 2
    let v128 = log_mno_covering(&cls, &ones, 7.0).unwrap().ln_covering;
    let worked = [(v4, 4f64), (v6, 6.0), (v7, 7.0), (v128, 128.0)];
    let worked_err = worked.iter().fold(0.0f64, |m, (v, n)| m.max((v - n.ln()).abs()));

    let mut lattice = 0;
    let mut points = 0;
    let mut violations = 0;
    let mut check = |ok: bool| {
        points += 1;
        violations += usize::from(!ok);
    };
    for l in [1.0, 2.0, 3.0] {
        for w in [1.0, 2.0, 3.0] {
            for k in [1.0, 3.0, 6.0] {
                for kappa in [1.0, 2.5] {
                    for eta in [0.05, 0.5] {
                        for (p, h, n, i) in [(1.0, 1.0, 1.0, 1.0), (2.0, 3.0, 2.0, 2.0)] {
                            lattice += 1;
                            let s = unit_shape(l, w, k, kappa);
                            let net = |s: ClassShape, e: f64| {
                                mno::bounds::log_net_covering_shape(&s, 1.0, e).unwrap().value.ln()
                            };
                            let base = net(s, eta);
                            check(net(s, 2.0 * eta) <= base);
                            check(net(unit_shape(l, w, k + 1.0, kappa), eta) >= base);
                            check(net(unit_shape(l + 1.0, w, k, kappa), eta) >= base);
                            check(net(unit_shape(l, w, k, kappa * 1.5), eta) >= base);

                            let cov = |p: f64, h: f64, n: f64, i: f64, s: ClassShape, e: f64| {
                                log_mno_covering(&product(p, h, n, i, s), &ones, e).unwrap().ln_covering
                            };
                            let base = cov(p, h, n, i, s, eta);
                            check(cov(p, h, n, i, s, 2.0 * eta) <= base);
                            check(cov(p, h, n, i + 1.0, s, eta) >= base);
                            check(cov(p + 1.0, h, n, i, s, eta) >= base);
                            check(cov(p, h + 1.0, n, i, s, eta) >= base);
                            check(cov(p, h, n + 1.0, i, s, eta) >= base);
                            check(cov(p, h, n, i, unit_shape(l, w, k + 1.0, kappa), eta) >= base);
                            check(cov(p, h, n, i, unit_shape(l + 1.0, w, k, kappa), eta) >= base);
                            check(cov(p, h, n, i, unit_shape(l, w, k, kappa * 1.5), eta) >= base);
                        }
                    }
                }
            }
        }
    }
    outcome(
        worked_err < 1e-12 && violations == 0,
        format!(
            "worked values err {worked_err:.2e} (tol 1e-12), {violations} monotonicity violations in {points} comparisons over {lattice} lattice points"
        ),
    )
}

fn c8_bound() -> Outcome {
    let b = Budgets {
        n_alpha: 100.0,
        n_u: 1.0,
        n_x: 1.0,
        sigma: 0.0,
    };
    let v = generalization_bound_rhs(0.1, 0.01, &b, 1.0, 0.0, 10.0).unwrap().total;
    // 4ε² + 6η + 112/(3·100)·10
    let reference = 4.0 * 0.01 + 6.0 * 0.01 + 112.0 / 300.0 * 10.0;
    let err = (v - reference).abs();

    let mut violations = 0;
    for sigma in [0.0, 0.1, 1.0] {
        for n in [1.0, 10.0, 1000.0] {
            let base = Budgets {
                n_alpha: n,
                n_u: n,
                n_x: n,
                sigma,
            };
            let rhs = |b: Budgets| generalization_bound_rhs(0.1, 0.01, &b, 1.0, 5.0, 10.0).unwrap().total;
            let r0 = rhs(base);
            for more in [
                Budgets {
                    n_alpha: 2.0 * n,
                    ..base
                },
                Budgets { n_u: 2.0 * n, ..base },
                Budgets { n_x: 2.0 * n, ..base },
            ] {
                violations += usize::from(rhs(more) > r0);
            }
        }
    }
    let deltas = (delta1(1, 1, 1), delta2(1, 1, 1));
    outcome(
        err < 1e-5 && violations == 0 && deltas == (6.0, 3.0),
        format!(
            "worked value {v:.6} vs {reference:.6} (tol 1e-5), {violations} antitonicity violations, deltas {deltas:?}"
        ),
    )
}

fn c9_rate() -> Outcome {
    let beta_v = 0.25;
    let mut eta_exact = true;
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut eps_seen = Vec::new();
    for e in 7..=12 {
        let n = 10f64.powi(e);
        let r = rate_schedule(n, 1, 1, 1, beta_v).unwrap();
        eta_exact &= r.eta == 4.0 * beta_v / n;
        monotone &= r.eps <= prev;
        prev = r.eps;
        eps_seen.push(format!("{:.4}", r.eps));
    }
    outcome(
        eta_exact && monotone,
        format!(
            "eta exact: {eta_exact}, eps nonincreasing: {monotone} [{}]",
            eps_seen.join(", ")
        ),
    )
}

fn nonincreasing_tail(trace: &[f64]) -> bool {
    let start = trace.len() - (trace.len() / 10).max(2);
    trace[start..].windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs())
}

fn c10_sweep() -> Outcome {
    let start = Instant::now();
    let mut cfg = Config::default();
    cfg.model.p = 2;
    cfg.model.h = 2;
    cfg.model.n = 2;
    cfg.data.n_u = 4;
    cfg.data.n_x = 16;
    cfg.data.sigma = 0.05;
    cfg.sweep.trials = 5;
    cfg.sweep.n_alpha_grid = vec![4, 8, 16, 32];
    cfg.train.steps = 2000;
    let records = run_sweep(&cfg).unwrap();
    let failed = records.iter().filter(|r| !r.ok()).count();
    let median = |n: usize| {
        let mut v: Vec<f64> = records
            .iter()
            .filter(|r| r.n_alpha == n)
            .filter_map(|r| r.test_error)
            .collect();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let (m4, m32) = (median(4), median(32));
    let mut tails = Vec::new();
    let mut tails_ok = true;
    for n in [4, 8, 16, 32] {
        let good = records
            .iter()
            .filter(|r| r.n_alpha == n && r.ok() && nonincreasing_tail(&r.loss_trace))
            .count();
        tails_ok &= good >= 4;
        tails.push(format!("n{n}:{good}/5"));
    }
    let t = start.elapsed();
    outcome(
        failed == 0 && m32 <= m4 && tails_ok && within(t, 600.0),
        format!(
            "median test error n_alpha=4 {m4:.4e}, n_alpha=32 {m32:.4e}; monotone tails {} (need 4/5, rel slack 1e-12); {failed} failed runs; {t:.1?} (limit 10 min)",
            tails.join(" ")
        ),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_mno"))
        .current_dir(dir)
        .args(["-c", "small.toml"])
        .args(args)
        .stdout(Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Config::default();
    cfg.data.n_alpha = 6;
    cfg.train.steps = 100;
    cfg.sweep.n_alpha_grid = vec![2, 4];
    cfg.sweep.trials = 2;
    std::fs::write(dir.path().join("small.toml"), cfg.to_toml().unwrap()).unwrap();
    let mut identical = Vec::new();
    let mut all = true;
    for (name, args_a, args_b, out_a, out_b) in [
        (
            "gen-data",
            vec!["gen-data", "-o", "d1.json"],
            vec!["gen-data", "-o", "d2.json"],
            "d1.json",
            "d2.json",
        ),
        (
            "train",
            vec!["train", "-d", "d1.json", "-o", "m1.json"],
            vec!["train", "-d", "d1.json", "-o", "m2.json"],
            "m1.json",
            "m2.json",
        ),
        (
            "sweep",
            vec!["sweep", "-o", "s1.csv"],
            vec!["sweep", "-o", "s2.csv"],
            "s1.csv",
            "s2.csv",
        ),
    ] {
        let ran = run_cli(dir.path(), &args_a) && run_cli(dir.path(), &args_b);
        let same = ran && {
            let a = std::fs::read(dir.path().join(out_a)).unwrap();
            let b = std::fs::read(dir.path().join(out_b)).unwrap();
            !a.is_empty() && a == b
        };
        all &= same;
        identical.push(format!("{name}: {}", if same { "identical" } else { "DIFFERENT" }));
    }
    outcome(all, identical.join(", "))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("clipping identity", c1_clipping),
        ("green oracle", c2_green),
        ("separable kernel identity", c3_separable_kernel),
        ("cole-hopf vs finite differences", c4_burgers),
        ("heat semigroup", c5_heat),
        ("gradient correctness", c6_gradients),
        ("covering calculator", c7_covering),
        ("bound evaluator", c8_bound),
        ("rate schedule", c9_rate),
        ("scaling sweep", c10_sweep),
        ("determinism", c11_determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failures += usize::from(!o.pass);
        println!(
            "criterion {:>2} {name}: {} ({})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
