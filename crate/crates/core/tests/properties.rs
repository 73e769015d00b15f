use fbgain::{
    db_residual, f_of, from_db, gain_factor, massive_parametric, solve_lambda_massive,
    solve_lambda_star, sweep_curve, to_db, ResidualForm, SolverSettings, Users,
};
use proptest::prelude::*;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..=hi.ln()).prop_map(f64::exp)
}

fn k_strategy() -> impl Strategy<Value = u64> {
    log_uniform(2.0, 1e4).prop_map(|k| k.round() as u64)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #[test]
    fn db_round_trip(x in log_uniform(1e-6, 1e6)) {
        prop_assert!(rel(from_db(to_db(x).unwrap()), x) < 1e-12);
    }

    #[test]
    fn balanced_identity(k in k_strategy(), p in log_uniform(1e-3, 1e3), frac in 0.0..=1.0f64) {
        let kf = k as f64;
        let lambda = 1.0 + frac * (kf - 1.0);
        let denom = 1.0 + (kf - lambda) * p * lambda;
        let lhs = 1.0 + p * lambda * lambda / denom;
        let rhs = (1.0 + kf * p * lambda) / denom;
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn residual_forms_agree_in_sign(k in k_strategy(), p in log_uniform(1e-3, 1e3), frac in 0.0..=1.0f64) {
        let lambda = 1.0 + frac * (k as f64 - 1.0);
        let raw = db_residual(lambda, k, p, ResidualForm::Raw).unwrap();
        let bal = db_residual(lambda, k, p, ResidualForm::Balanced).unwrap();
        // below noise level the sign is not meaningful
        prop_assume!(raw.abs() > 1e-13 && bal.abs() > 1e-12);
        prop_assert_eq!(raw.signum(), bal.signum());
    }

    #[test]
    fn balanced_is_scaled_raw(k in k_strategy(), p in log_uniform(1e-3, 1e3), frac in 0.0..=1.0f64) {
        let kf = k as f64;
        let lambda = 1.0 + frac * (kf - 1.0);
        let raw = db_residual(lambda, k, p, ResidualForm::Raw).unwrap();
        let bal = db_residual(lambda, k, p, ResidualForm::Balanced).unwrap();
        let scale = (1.0 + kf * p * lambda).ln() * kf;
        prop_assert!((bal - kf * (kf - 1.0) * raw).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn residual_forms_share_root(k in k_strategy(), p in log_uniform(1e-3, 1e3)) {
        let sol = solve_lambda_star(k, p, &SolverSettings::default()).unwrap();
        let bal = db_residual(sol.lambda_star, k, p, ResidualForm::Balanced).unwrap();
        let kf = k as f64;
        prop_assert!(bal.abs() <= 1e-10 * kf * (kf - 1.0));
    }

    #[test]
    fn log_sandwich(x in prop_oneof![-0.999_999..0.0f64, log_uniform(1e-12, 1e6)]) {
        prop_assume!(x != 0.0);
        let l = x.ln_1p();
        prop_assert!(l - x / (1.0 + x) > 0.0);
        prop_assert!(x - l > 0.0);
    }

    #[test]
    fn f_slope_bounds(pi in log_uniform(1e-3, 1e3), lambda in log_uniform(1.0, 100.0)) {
        prop_assert!(f_of(pi, 1.0).unwrap() > 1.0);
        let h = 1e-6 * lambda;
        let slope = (f_of(pi, lambda + h).unwrap() - f_of(pi, lambda).unwrap()) / h;
        prop_assert!(slope > 0.0);
        // finite-difference noise allowance on the upper bound
        prop_assert!(slope < pi / (1.0 + pi * lambda) + 1e-6);
        prop_assert!(pi / (1.0 + pi * lambda) <= 1.0);
    }

    #[test]
    fn parametric_lies_on_curve(t in log_uniform(1e-6, 1e6)) {
        let (pi, lambda) = massive_parametric(t).unwrap();
        prop_assert!((lambda - f_of(pi, lambda).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn parametric_power_increasing(t in log_uniform(1e-6, 1e6), ratio in 1.0001..10.0f64) {
        let (a, _) = massive_parametric(t).unwrap();
        let (b, _) = massive_parametric(t * ratio).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn solved_points_respect_bounds(k in k_strategy(), p in log_uniform(1e-3, 1e3)) {
        let s = SolverSettings::default();
        let sol = solve_lambda_star(k, p, &s).unwrap();
        let kf = k as f64;
        let lambda = sol.lambda_star;
        let pi = kf * p;
        prop_assert!((1.0..=kf).contains(&lambda));
        prop_assert!(sol.residual.abs() <= s.residual_tol);
        prop_assert!(sol.capacity_fb >= sol.capacity_nofb);
        prop_assert!(sol.gain_f >= 1.0 && sol.gain_f < 2.0);
        prop_assert_eq!(sol.gain_f, gain_factor(pi, lambda).unwrap());

        let ln_term = (pi * lambda).ln_1p();
        prop_assert!(kf * ln_term / (kf + ln_term) < lambda);
        prop_assert!(f_of(pi, lambda).unwrap() - lambda >= -1e-10);
    }

    #[test]
    fn lambda_monotone_in_k_and_bounded_by_massive(k in 2u64..500, extra in 1u64..500, pi in log_uniform(0.1, 1e3)) {
        let s = SolverSettings::default();
        let small = solve_lambda_star(k, pi / k as f64, &s).unwrap().lambda_star;
        let k2 = k + extra;
        let large = solve_lambda_star(k2, pi / k2 as f64, &s).unwrap().lambda_star;
        let massive = solve_lambda_massive(pi, &s).unwrap().lambda_star;
        prop_assert!(small <= large + 1e-9);
        prop_assert!(large <= massive + 1e-9);
    }
}

#[test]
fn massive_limits() {
    let s = SolverSettings::default();
    let f_small = solve_lambda_massive(1e-3, &s).unwrap().gain_f;
    assert!(f_small <= 1.01);

    // F decreases toward 1 on the upper tail, but slowly: F(1e6) is about 1.2
    let tail: Vec<f64> = [1e3, 1e6, 1e12, 1e20]
        .iter()
        .map(|&pi| solve_lambda_massive(pi, &s).unwrap().gain_f)
        .collect();
    assert!(tail.windows(2).all(|w| w[1] < w[0]), "{tail:?}");
    assert!((tail[1] - 1.2035).abs() < 1e-3);
    assert!(tail[3] <= 1.1);
}

#[test]
fn unimodal_on_default_grid() {
    let s = SolverSettings::default();
    for users in [Users::Finite(2), Users::Finite(10), Users::Massive] {
        let pts = sweep_curve(users, -10.0, 30.0, 0.1, &s).unwrap();
        let diffs: Vec<f64> = pts.windows(2).map(|w| w[1].gain_f - w[0].gain_f).collect();
        let changes = diffs
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum())
            .count();
        assert_eq!(changes, 1, "{users}");
        assert!(diffs[0] > 0.0);
    }
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let s = SolverSettings::default();
    let run = |threads: usize| {
        rayon_pool(threads)
            .install(|| sweep_curve(Users::Finite(10), -10.0, 30.0, 0.5, &s).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.len(), four.len());
    for (a, b) in one.iter().zip(&four) {
        assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
        assert_eq!(a.gain_f.to_bits(), b.gain_f.to_bits());
    }
}

fn rayon_pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
}
