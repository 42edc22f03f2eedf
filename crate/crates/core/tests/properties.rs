use mno::relu_net::{clip_relu_form, clip_scalar};
use mno::sampling::{
    covering_radius, sample_function, stream, stream_seed, uniform_grid, FunctionSpaceSpec, SamplerKind, TAG_NOISE,
    TAG_U, TAG_X,
};
use mno::zoo::{green_apply, green_kernel, green_kernel_relu_form, GridFunction, QuadratureRule};
use proptest::prelude::*;
use rand::Rng;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn green_kernel_symmetric_and_nonnegative(a in 0.05f64..10.0, s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let (x, y) = (a * s, a * t);
        let k = green_kernel(a, x, y).unwrap();
        prop_assert_eq!(k, green_kernel(a, y, x).unwrap());
        prop_assert!(k >= 0.0);
        prop_assert!((green_kernel_relu_form(a, x, y).unwrap() - k).abs() < 1e-12);
        prop_assert_eq!(green_kernel(a, 0.0, y).unwrap(), 0.0);
        prop_assert!(green_kernel(a, a, y).unwrap().abs() < 1e-12);
    }

    #[test]
    fn clipping_forms_agree(a in 0.01f64..10.0, v in -50.0f64..50.0) {
        let c = clip_scalar(a, v).unwrap();
        prop_assert!(c.abs() <= a);
        prop_assert!((clip_relu_form(a, v) - c).abs() < 1e-12 * a.max(1.0));
    }

    #[test]
    fn green_apply_is_linear(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, k in 1.0f64..4.0, x in 0.0f64..=1.0) {
        let rule = QuadratureRule::trapezoid(501);
        let f1 = GridFunction::new(1, 0.0, 1.0, k, 1.0, move |y| (k * y[0]).sin()).unwrap();
        let f2 = GridFunction::new(1, 0.0, 1.0, 1.0, 1.0, |y| y[0] * y[0]).unwrap();
        let mix = GridFunction::new(1, 0.0, 1.0, 2.0 * k + 4.0, 4.0, move |y| c1 * (k * y[0]).sin() + c2 * y[0] * y[0]).unwrap();
        let lhs = green_apply(1.0, &mix, x, &rule).unwrap();
        let rhs = c1 * green_apply(1.0, &f1, x, &rule).unwrap() + c2 * green_apply(1.0, &f2, x, &rule).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn grid_covers_within_radius(dim in 1usize..=3, count in 2usize..=9, gamma in 0.1f64..3.0, seed: u64) {
        let grid = uniform_grid(dim, gamma, count).unwrap();
        prop_assert_eq!(grid.len(), count.pow(dim as u32));
        let r = covering_radius(dim, gamma, count);
        let mut rng = stream(seed, 0, &[]);
        for _ in 0..50 {
            let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-gamma..=gamma)).collect();
            let nearest = grid.iter().map(|g| dist(g, &p)).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= r + 1e-12);
        }
        // the centre of a grid cell is exactly at the covering radius
        let h = 2.0 * gamma / (count - 1) as f64;
        let centre = vec![-gamma + h / 2.0; dim];
        let nearest = grid.iter().map(|g| dist(g, &centre)).fold(f64::INFINITY, f64::min);
        prop_assert!((nearest - r).abs() < 1e-9);
    }

    #[test]
    fn sampled_functions_respect_their_space(seed: u64, l in 0.5f64..10.0, beta in 0.1f64..3.0, dim in 1usize..=2) {
        for sampler in [SamplerKind::RandomFourier { modes: 6, decay: 2.0 }, SamplerKind::Constant { lo: -beta, hi: beta }] {
            let spec = FunctionSpaceSpec { dim, gamma: 1.0, lipschitz_l: l, sup_beta: beta, sampler };
            let f = sample_function(&spec, seed).unwrap();
            let audit = f.audit_default();
            prop_assert!(audit.passed);
            prop_assert!(audit.max_abs <= beta + 1e-12);
            prop_assert!(audit.max_slope <= l + 1e-9);
        }
    }

    #[test]
    fn streams_depend_on_every_coordinate(master: u64, a in 0u64..1000, b in 0u64..1000) {
        let base = stream_seed(master, TAG_U, &[a, b]);
        prop_assert_eq!(base, stream_seed(master, TAG_U, &[a, b]));
        prop_assert_ne!(base, stream_seed(master, TAG_X, &[a, b]));
        prop_assert_ne!(base, stream_seed(master, TAG_U, &[a + 1, b]));
        prop_assert_ne!(base, stream_seed(master, TAG_U, &[a, b + 1]));
        prop_assert_ne!(base, stream_seed(master, TAG_U, &[b, a, 0]));
        prop_assert_ne!(base, stream_seed(master.wrapping_add(1), TAG_U, &[a, b]));
    }
}

#[test]
fn sibling_noise_streams_are_uncorrelated() {
    let n = 4000;
    let draws = |k: u64| -> Vec<f64> {
        (0..n)
            .map(|j| stream(11, TAG_NOISE, &[k, j]).random_range(-1.0..1.0))
            .collect()
    };
    let (a, b) = (draws(0), draws(1));
    let corr = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / n as f64 / (1.0 / 3.0);
    // standard error of the sample correlation is 1/√n ≈ 0.016
    assert!(corr.abs() < 0.08, "{corr}");
}
