//! Root-finding for the power gain factor `λ*`.

use crate::channel::{ChannelConfig, Users};
use crate::error::{domain, GainError, Result};
use crate::formulas::{f_unchecked, gain_factor_unchecked, raw_residual};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Absolute bracket width at which bisection stops.
    pub lambda_tol: f64,
    /// Largest accepted |residual| at the returned root.
    pub residual_tol: f64,
    pub max_iter: u32,
    /// Coarse scan step used to bracket the peak of `F`.
    pub scan_step_db: f64,
    /// Golden-section termination width for the peak.
    pub peak_tol_db: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            lambda_tol: 1e-12,
            residual_tol: 1e-10,
            max_iter: 200,
            scan_step_db: 0.1,
            peak_tol_db: 1e-4,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda_tol", self.lambda_tol),
            ("residual_tol", self.residual_tol),
            ("scan_step_db", self.scan_step_db),
            ("peak_tol_db", self.peak_tol_db),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(
                    "solver settings",
                    format!("{name} must be positive, got {v}"),
                ));
            }
        }
        if self.max_iter == 0 {
            return Err(domain("solver settings", "max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// A solved operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSolution {
    pub config: ChannelConfig,
    pub lambda_star: f64,
    /// Residual at `lambda_star`: the raw dependence-balance residual for
    /// finite K, `λ − f(π, λ)` in the massive limit.
    pub residual: f64,
    pub iterations: u32,
    /// `ln(1 + π)` nats.
    pub capacity_nofb: f64,
    /// `ln(1 + π·λ*)` nats.
    pub capacity_fb: f64,
    pub gain_f: f64,
    /// Set when both bracket ends were already within `residual_tol` of zero
    /// (vanishing power); `lambda_star` is then 1.
    pub degenerate: bool,
}

impl GainSolution {
    fn new(config: ChannelConfig, root: Root) -> Self {
        let pi = config.total_power();
        GainSolution {
            config,
            lambda_star: root.x,
            residual: root.residual,
            iterations: root.iterations,
            capacity_nofb: pi.ln_1p(),
            capacity_fb: (pi * root.x).ln_1p(),
            gain_f: gain_factor_unchecked(pi, root.x),
            degenerate: root.degenerate,
        }
    }

    pub fn total_power(&self) -> f64 {
        self.config.total_power()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: u32,
    pub degenerate: bool,
}

/// Bisection on a bracket with residuals of sign (−, +), followed by a single
/// secant step through the final bracket. The secant point is kept only if it
/// stays inside the bracket and lowers |residual|.
pub(crate) fn bisect<G: Fn(f64) -> f64>(
    g: G,
    mut lo: f64,
    mut hi: f64,
    mut r_lo: f64,
    mut r_hi: f64,
    settings: &SolverSettings,
) -> Result<Root> {
    if !(r_lo < 0.0 && r_hi > 0.0) {
        return Err(GainError::Bracket { lo, hi, r_lo, r_hi });
    }
    let mut iterations = 0;
    while hi - lo > settings.lambda_tol && iterations < settings.max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let r = g(mid);
        if r == 0.0 {
            return Ok(Root {
                x: mid,
                residual: 0.0,
                iterations,
                degenerate: false,
            });
        }
        if r < 0.0 {
            lo = mid;
            r_lo = r;
        } else {
            hi = mid;
            r_hi = r;
        }
    }

    let (mut x, mut residual) = if -r_lo <= r_hi {
        (lo, r_lo)
    } else {
        (hi, r_hi)
    };
    let secant = lo - r_lo * (hi - lo) / (r_hi - r_lo);
    if secant > lo && secant < hi {
        let r = g(secant);
        if r.abs() < residual.abs() {
            x = secant;
            residual = r;
        }
    }

    if residual.abs() > settings.residual_tol {
        return Err(GainError::NotConverged {
            iterations,
            residual,
            tol: settings.residual_tol,
        });
    }
    Ok(Root {
        x,
        residual,
        iterations,
        degenerate: false,
    })
}

/// Finds `λ* ∈ [1, K]` where the dependence-balance bound holds with
/// equality, for `K` users at per-user power `P`.
pub fn solve_lambda_star(k: u64, p: f64, settings: &SolverSettings) -> Result<GainSolution> {
    solve_lambda_star_by(k, p, settings, raw_residual)
}

/// Same as [`solve_lambda_star`] with a caller-supplied residual
/// `(λ, K, P) ↦ r`. Used by the verification suite for fault injection.
pub(crate) fn solve_lambda_star_by<R>(
    k: u64,
    p: f64,
    settings: &SolverSettings,
    residual: R,
) -> Result<GainSolution>
where
    R: Fn(f64, f64, f64) -> f64,
{
    settings.validate()?;
    let config = ChannelConfig::finite_per_user(k, p)?;
    let kf = k as f64;
    let g = |lambda: f64| residual(lambda, kf, p);
    let (r_lo, r_hi) = (g(1.0), g(kf));
    if r_lo.abs() < settings.residual_tol && r_hi.abs() < settings.residual_tol {
        let root = Root {
            x: 1.0,
            residual: r_lo,
            iterations: 0,
            degenerate: true,
        };
        return Ok(GainSolution::new(config, root));
    }
    if r_lo == 0.0 {
        let root = Root {
            x: 1.0,
            residual: 0.0,
            iterations: 0,
            degenerate: false,
        };
        return Ok(GainSolution::new(config, root));
    }
    let root = bisect(g, 1.0, kf, r_lo, r_hi, settings)?;
    Ok(GainSolution::new(config, root))
}

/// Finds the unique `λ ≥ 1` with `λ = f(π, λ)`, the power gain factor in
/// the limit of many users at fixed total power `π`.
pub fn solve_lambda_massive(pi: f64, settings: &SolverSettings) -> Result<GainSolution> {
    settings.validate()?;
    let config = ChannelConfig::massive(pi)?;
    let g = |lambda: f64| lambda - f_unchecked(pi, lambda);

    let (mut lo, mut hi) = (1.0, 2.0);
    let (mut r_lo, mut r_hi) = (g(lo), g(hi));
    if r_lo >= 0.0 {
        // f(π, 1) rounds to 1 only when π is below machine resolution
        let root = Root {
            x: 1.0,
            residual: r_lo,
            iterations: 0,
            degenerate: true,
        };
        return Ok(GainSolution::new(config, root));
    }
    let mut doublings = 0;
    while r_hi <= 0.0 {
        if doublings >= settings.max_iter || !hi.is_finite() {
            return Err(GainError::BracketExpansion {
                pi,
                iterations: doublings,
            });
        }
        doublings += 1;
        lo = hi;
        r_lo = r_hi;
        hi *= 2.0;
        r_hi = g(hi);
    }
    let mut root = bisect(g, lo, hi, r_lo, r_hi, settings)?;
    root.iterations += doublings;
    Ok(GainSolution::new(config, root))
}

/// Solves the operating point described by `config`.
pub fn eval_point(config: &ChannelConfig, settings: &SolverSettings) -> Result<GainSolution> {
    match config.users() {
        Users::Finite(k) => {
            let p = config
                .per_user_power()
                .expect("finite K has a per-user power");
            let mut sol = solve_lambda_star(k, p, settings)?;
            sol.config = *config;
            Ok(sol)
        }
        Users::Massive => solve_lambda_massive(config.total_power(), settings),
    }
}
