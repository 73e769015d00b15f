use super::{BoundReport, Checker, SampleSpec, Tally};
use crate::channel::Users;
use crate::formulas::{dlambda_dpi_massive, f_unchecked, gain_factor_unchecked, raw_residual};
use crate::solver::{GainSolution, SolverSettings};
use crate::sweep::db_grid;

/// Total powers at which the implicit derivative is compared against finite
/// differences.
pub const DERIVATIVE_GRID: [f64; 7] = [0.1, 0.5, 1.0, 5.38, 10.0, 100.0, 1000.0];

/// Relative step of the central difference.
const FD_STEP: f64 = 1e-6;
const FD_REL_TOL: f64 = 1e-5;

/// Ceiling on F over the sampled finite-K set, slightly above the massive
/// peak value 1.537.
const IMPROVED_BOUND: f64 = 1.5372;
const TAIL_BOUND: f64 = 1.321;
const SMALL_PI_BOUND: f64 = 11.0 / 9.0;

/// Bound chain at `(K, P, λ)` where `λ` should be the dependence-balance
/// root. Off-root inputs are allowed and will typically fail.
fn bound_chain(t: &mut Tally, k: u64, p: f64, lambda: f64) {
    let kf = k as f64;
    let pi = kf * p;
    let x = pi * lambda;
    let ln_term = x.ln_1p();
    let ctx = || format!("K={k} P={p:e} lambda={lambda:.15e}");

    let lower = pi * lambda * lambda / (1.0 + x);
    let upper = pi * lambda * lambda / (1.0 + (kf - lambda) * p * lambda);
    t.le("log_sandwich.lower", lower, ln_term, ctx);
    t.le("log_sandwich.upper", ln_term, upper, ctx);
    if lambda < kf {
        t.lt(
            "log_sandwich.upper_below_k_ratio",
            upper,
            kf * lambda / (kf - lambda),
            ctx,
        );
    }
    t.lt("lambda.lower", kf * ln_term / (kf + ln_term), lambda, ctx);
    t.le("lambda.below_f", lambda, f_unchecked(pi, lambda), ctx);
}

fn root_quality(t: &mut Tally, checker: &Checker, sol: &GainSolution, k: u64, p: f64) {
    let kf = k as f64;
    let lambda = sol.lambda_star;
    let ctx = || format!("K={k} P={p:e} lambda={lambda:.15e}");
    let residual = raw_residual(lambda, kf, p);
    // measured in units of the tolerance so it does not mask the bound slacks
    t.le(
        "root.residual_over_tol",
        residual.abs() / checker.settings.residual_tol,
        1.0,
        ctx,
    );
    t.le("root.lambda_ge_1", 1.0, lambda, ctx);
    t.le("root.lambda_le_k", lambda, kf, ctx);
}

pub(crate) fn point_bounds(checker: &Checker, k: u64, p: f64) -> BoundReport {
    let mut t = Tally::new(format!("point_bounds[K={k},P={p}]"), checker.slop);
    t.sample();
    match checker.solve_finite(k, p) {
        Ok(sol) => {
            root_quality(&mut t, checker, &sol, k, p);
            bound_chain(&mut t, k, p, sol.lambda_star);
        }
        Err(e) => t.error("solve", &e, || format!("K={k} P={p:e}")),
    }
    t.finish()
}

/// Solves `λ*` for `(K, P)` and checks the logarithm sandwich on both sides
/// of the dependence-balance equality, the resulting bounds on `λ*`, and the
/// quality of the root.
pub fn check_point_bounds(k: u64, p: f64, settings: &SolverSettings) -> BoundReport {
    point_bounds(&Checker::new(*settings), k, p)
}

/// Evaluates the same bound chain at an arbitrary `λ` without solving.
pub fn point_bounds_at(k: u64, p: f64, lambda: f64) -> BoundReport {
    let mut t = Tally::new(
        format!("point_bounds_at[K={k},P={p},lambda={lambda}]"),
        super::DEFAULT_SLOP,
    );
    t.sample();
    bound_chain(&mut t, k, p, lambda);
    t.finish()
}

pub(crate) fn sampled_point_bounds(checker: &Checker, sample: &SampleSpec) -> BoundReport {
    let mut t = Tally::new("sampled_point_bounds", checker.slop);
    if let Err(e) = sample.validate() {
        t.error("sample spec", &e, String::new);
        return t.finish();
    }
    for (k, p) in sample.draw() {
        t.sample();
        match checker.solve_finite(k, p) {
            Ok(sol) => {
                root_quality(&mut t, checker, &sol, k, p);
                bound_chain(&mut t, k, p, sol.lambda_star);
            }
            Err(e) => t.error("solve", &e, || format!("K={k} P={p:e}")),
        }
    }
    t.finish()
}

pub fn check_sampled_point_bounds(sample: &SampleSpec, settings: &SolverSettings) -> BoundReport {
    sampled_point_bounds(&Checker::new(*settings), sample)
}

/// The sandwich on `λ*` at unit per-user power for K up to 1e8, where `λ*`
/// grows without bound.
pub(crate) fn large_k_sandwich(checker: &Checker) -> BoundReport {
    let mut t = Tally::new("large_k_sandwich", checker.slop);
    let mut previous = 1.0;
    for exp in 2..=8 {
        let k = 10u64.pow(exp);
        t.sample();
        match checker.solve_finite(k, 1.0) {
            Ok(sol) => {
                root_quality(&mut t, checker, &sol, k, 1.0);
                bound_chain(&mut t, k, 1.0, sol.lambda_star);
                t.lt("lambda_grows_with_k", previous, sol.lambda_star, || {
                    format!("K={k}")
                });
                previous = sol.lambda_star;
            }
            Err(e) => t.error("solve", &e, || format!("K={k} P=1")),
        }
    }
    t.finish()
}

fn solve_users(checker: &Checker, users: Users, pi: f64) -> Result<GainSolution, crate::GainError> {
    match users {
        Users::Finite(k) => checker.solve_finite(k, pi / k as f64),
        Users::Massive => checker.solve_massive(pi),
    }
}

/// Bounds on `F` outside the plotted range: `π ≤ −10 dB` and `π ≥ 30 dB`.
pub(crate) fn tail_bounds(checker: &Checker) -> BoundReport {
    let mut t = Tally::new("tail_bounds", checker.slop);
    let users = [
        Users::Finite(2),
        Users::Finite(3),
        Users::Finite(10),
        Users::Finite(100),
        Users::Massive,
    ];

    let low = db_grid(-60.0, -10.0, 1.0).expect("static grid");
    for &users in &users {
        for &db in &low {
            let pi = crate::special::from_db(db);
            t.sample();
            let ctx = || format!("K={users} pi={pi:e}");
            let sol = match solve_users(checker, users, pi) {
                Ok(sol) => sol,
                Err(e) => {
                    t.error("solve", &e, ctx);
                    continue;
                }
            };
            let lambda = sol.lambda_star;
            t.le("small_pi.lambda_le_inverse", (1.0 - pi) * lambda, 1.0, ctx);
            t.le("small_pi.f_le_scaled_lambda", sol.gain_f, (1.0 + pi) * lambda, ctx);
            t.le(
                "small_pi.scaled_lambda_le_ratio",
                (1.0 + pi) * lambda,
                (1.0 + pi) / (1.0 - pi),
                ctx,
            );
            t.le("small_pi.11_9", sol.gain_f, SMALL_PI_BOUND, ctx);
            t.le("small_pi.1_321", sol.gain_f, TAIL_BOUND, ctx);
        }
    }

    let high = db_grid(30.0, 80.0, 1.0).expect("static grid");
    for &users in &users {
        for &db in &high {
            let pi = crate::special::from_db(db);
            t.sample();
            let ctx = || format!("K={users} pi={pi:e}");
            let sol = match solve_users(checker, users, pi) {
                Ok(sol) => sol,
                Err(e) => {
                    t.error("solve", &e, ctx);
                    continue;
                }
            };
            let (lambda, f) = (sol.lambda_star, sol.gain_f);
            t.le("large_pi.1_321", f, TAIL_BOUND, ctx);
            if users != Users::Massive {
                continue;
            }
            let x = pi * lambda;
            t.le("large_pi.log_below_lambda", x.ln_1p(), lambda, ctx);
            let a = pi * lambda * lambda / (1.0 + x);
            let first = lambda / ((a.exp() + lambda - 1.0).ln() - lambda.ln());
            t.le("large_pi.first_step", f, first, ctx);
            // the second step uses ln λ / λ decreasing, valid for λ > e
            if lambda > std::f64::consts::E {
                let second = 1.0 / (x / (1.0 + x) - lambda.ln() / lambda);
                t.le("large_pi.second_step", first, second, ctx);
                if db == 30.0 {
                    t.le("large_pi.second_step_at_30db", second, TAIL_BOUND, ctx);
                }
            }
        }
    }
    t.finish()
}

pub fn check_tail_bounds(settings: &SolverSettings) -> BoundReport {
    tail_bounds(&Checker::new(*settings))
}

/// Compares the implicit-differentiation slope of the massive curve with a
/// central finite difference of the massive solver, and checks positivity.
pub(crate) fn derivative(checker: &Checker, pi_grid: &[f64]) -> BoundReport {
    let mut t = Tally::new("derivative", checker.slop);
    for &pi in pi_grid {
        t.sample();
        let ctx = || format!("pi={pi:e}");
        let (pi_plus, pi_minus) = (pi * (1.0 + FD_STEP), pi * (1.0 - FD_STEP));
        let solved = checker.solve_massive(pi).and_then(|s| {
            Ok((
                s,
                checker.solve_massive(pi_plus)?,
                checker.solve_massive(pi_minus)?,
            ))
        });
        let (at, plus, minus) = match solved {
            Ok(v) => v,
            Err(e) => {
                t.error("solve", &e, ctx);
                continue;
            }
        };
        let lambda = at.lambda_star;
        let analytic = match dlambda_dpi_massive(pi, lambda) {
            Ok(d) => d,
            Err(e) => {
                t.error("dlambda_dpi", &e, ctx);
                continue;
            }
        };
        // elasticity (π/λ)·dλ/dπ is O(1/λ) and scale-free
        t.lt("positive", 0.0, analytic * pi / lambda, ctx);
        let fd = (plus.lambda_star - minus.lambda_star) / (pi_plus - pi_minus);
        let rel = ((fd - analytic) / analytic).abs();
        t.le("finite_difference_over_tol", rel / FD_REL_TOL, 1.0, || {
            format!("pi={pi:e} analytic={analytic:.12e} fd={fd:.12e}")
        });
    }
    t.finish()
}

pub fn check_derivative(pi_grid: &[f64], settings: &SolverSettings) -> BoundReport {
    derivative(&Checker::new(*settings), pi_grid)
}

/// Counts sign changes of consecutive differences, ignoring exact zeros.
/// Returns the count and the sign of the first nonzero difference.
fn difference_sign_changes(values: &[f64]) -> (usize, f64) {
    let signs: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d != 0.0)
        .map(f64::signum)
        .collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    (changes, signs.first().copied().unwrap_or(0.0))
}

pub(crate) fn monotone_unimodal(
    checker: &Checker,
    users_list: &[Users],
    from_db: f64,
    to_db: f64,
    step_db: f64,
) -> BoundReport {
    let mut t = Tally::new("monotone_unimodal", checker.slop);
    let grid = match db_grid(from_db, to_db, step_db) {
        Ok(g) => g,
        Err(e) => {
            t.error("grid", &e, String::new);
            return t.finish();
        }
    };

    // ascending in K with the massive limit last
    let mut order: Vec<Users> = users_list.to_vec();
    order.sort_by_key(|u| u.count().unwrap_or(u64::MAX));
    order.dedup();

    let mut curves: Vec<Vec<(f64, f64)>> = Vec::with_capacity(order.len());
    for &users in &order {
        let mut curve = Vec::with_capacity(grid.len());
        for &db in &grid {
            t.sample();
            let pi = crate::special::from_db(db);
            match solve_users(checker, users, pi) {
                Ok(sol) => curve.push((sol.lambda_star, sol.gain_f)),
                Err(e) => {
                    t.error("solve", &e, || format!("K={users} pi_db={db}"));
                    curve.push((f64::NAN, f64::NAN));
                }
            }
        }

        for (i, w) in curve.windows(2).enumerate() {
            t.le("lambda_nondecreasing", w[0].0, w[1].0, || {
                format!("K={users} pi_db={}", grid[i + 1])
            });
        }
        if let Users::Finite(k) = users {
            for (i, (lambda, _)) in curve.iter().enumerate() {
                t.le("lambda_le_k", *lambda, k as f64, || {
                    format!("K={users} pi_db={}", grid[i])
                });
                t.le("lambda_ge_1", 1.0, *lambda, || {
                    format!("K={users} pi_db={}", grid[i])
                });
            }
        }

        let fs: Vec<f64> = curve.iter().map(|c| c.1).collect();
        let (changes, first) = difference_sign_changes(&fs);
        t.flag("f_unimodal", changes == 1 && first > 0.0, || {
            format!("K={users}: {changes} sign changes, first direction {first}")
        });
        let peak = fs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if let (Some(&lo), Some(&hi)) = (fs.first(), fs.last()) {
            t.lt("f_left_edge_below_peak", lo, peak, || format!("K={users}"));
            t.lt("f_right_edge_below_peak", hi, peak, || format!("K={users}"));
        }
        curves.push(curve);
    }

    for pair in curves.windows(2).zip(order.windows(2)) {
        let ([smaller, larger], [u_small, u_large]) = pair else {
            unreachable!()
        };
        for (i, (a, b)) in smaller.iter().zip(larger).enumerate() {
            t.le("lambda_dominated", a.0, b.0, || {
                format!("K={u_small} vs K={u_large} pi_db={}", grid[i])
            });
        }
    }

    if order.contains(&Users::Massive) {
        t.sample();
        match checker.solve_massive(1e-3) {
            Ok(sol) => t.le("massive_f_at_1e-3", sol.gain_f, 1.01, || "pi=1e-3".into()),
            Err(e) => t.error("solve", &e, || "pi=1e-3".into()),
        }
    }
    t.finish()
}

pub fn check_monotone_unimodal(
    users_list: &[Users],
    from_db: f64,
    to_db: f64,
    step_db: f64,
    settings: &SolverSettings,
) -> BoundReport {
    monotone_unimodal(
        &Checker::new(*settings),
        users_list,
        from_db,
        to_db,
        step_db,
    )
}

/// Thomas' doubling bound `1 ≤ F < 2` and the improved ceiling on sampled
/// `(K, P)`, plus the near-extremal massive witness at `π = 5.38`.
pub(crate) fn thomas_and_improved(checker: &Checker, sample: &SampleSpec) -> BoundReport {
    let mut t = Tally::new("thomas_and_improved", checker.slop);
    if let Err(e) = sample.validate() {
        t.error("sample spec", &e, String::new);
        return t.finish();
    }
    for (k, p) in sample.draw() {
        t.sample();
        let ctx = || format!("K={k} P={p:e}");
        match checker.solve_finite(k, p) {
            Ok(sol) => {
                let f = gain_factor_unchecked(k as f64 * p, sol.lambda_star);
                t.le("f_ge_1", 1.0, f, ctx);
                t.lt("thomas_f_lt_2", f, 2.0, ctx);
                t.le("improved_f_le_1.5372", f, IMPROVED_BOUND, ctx);
            }
            Err(e) => t.error("solve", &e, ctx),
        }
    }

    t.sample();
    let ctx = || "K=inf pi=5.38".to_string();
    match checker.solve_massive(5.38) {
        Ok(sol) => {
            t.le("massive_witness_ge_1.53", 1.53, sol.gain_f, ctx);
            t.le("massive_witness_le_1.54", sol.gain_f, 1.54, ctx);
            t.lt("massive_witness_lt_2", sol.gain_f, 2.0, ctx);
        }
        Err(e) => t.error("solve", &e, ctx),
    }
    t.finish()
}

pub fn check_thomas_and_improved(sample: &SampleSpec, settings: &SolverSettings) -> BoundReport {
    thomas_and_improved(&Checker::new(*settings), sample)
}
