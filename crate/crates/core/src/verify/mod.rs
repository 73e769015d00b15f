//! Executable checks of the bounds, limits and shape claims for `λ*` and
//! `F(π)`.
//!
//! Each check returns a [`BoundReport`] carrying the number of samples, the
//! number of violated inequalities and the worst slack seen, with the sample
//! that produced it. Slack is `(rhs − lhs) / max(1, |lhs|, |rhs|)` for an
//! inequality `lhs ≤ rhs`, so `≥ 0` means the inequality holds. A sample is a
//! violation when its slack falls below `−slop` (default `1e-9`). Solver
//! failures are recorded as violations with slack `−∞`.

mod checks;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, GainError, Result};
use crate::formulas::raw_residual;
use crate::solver::{solve_lambda_massive, solve_lambda_star_by, GainSolution, SolverSettings};

pub use checks::{
    check_derivative, check_monotone_unimodal, check_point_bounds, check_sampled_point_bounds,
    check_tail_bounds, check_thomas_and_improved, point_bounds_at, DERIVATIVE_GRID,
};

pub const DEFAULT_SLOP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub check_name: String,
    pub samples: usize,
    pub violations: usize,
    pub worst_slack: f64,
    pub witness: String,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} samples={} violations={} worst_slack={:.6e} witness=\"{}\"",
            if self.passed() { "PASS" } else { "FAIL" },
            self.check_name,
            self.samples,
            self.violations,
            self.worst_slack,
            self.witness
        )
    }
}

/// Seeded log-uniform sampling of `(K, P)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub seed: u64,
    pub n_samples: usize,
    pub k_range: (u64, u64),
    pub p_range: (f64, f64),
}

impl SampleSpec {
    pub fn new(seed: u64, n_samples: usize) -> Self {
        SampleSpec {
            seed,
            n_samples,
            k_range: (2, 10_000),
            p_range: (1e-3, 1e3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(domain("sample spec", "n_samples must be at least 1"));
        }
        let (k_lo, k_hi) = self.k_range;
        if k_lo < 2 || k_hi < k_lo {
            return Err(domain("sample spec", format!("bad K range {k_lo}..{k_hi}")));
        }
        let (p_lo, p_hi) = self.p_range;
        if !(p_lo > 0.0) || !(p_hi >= p_lo) || !p_hi.is_finite() {
            return Err(domain("sample spec", format!("bad P range {p_lo}..{p_hi}")));
        }
        Ok(())
    }

    /// Draws the `(K, P)` pairs. `ln K` and `ln P` are uniform on their
    /// ranges; K is rounded to the nearest integer.
    pub fn draw(&self) -> Vec<(u64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (k_lo, k_hi) = ((self.k_range.0 as f64).ln(), (self.k_range.1 as f64).ln());
        let (p_lo, p_hi) = (self.p_range.0.ln(), self.p_range.1.ln());
        (0..self.n_samples)
            .map(|_| {
                let k = uniform(&mut rng, k_lo, k_hi).exp().round() as u64;
                let p = uniform(&mut rng, p_lo, p_hi).exp();
                (
                    k.clamp(self.k_range.0, self.k_range.1),
                    p.clamp(self.p_range.0, self.p_range.1),
                )
            })
            .collect()
    }
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec::new(42, 10_000)
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Deliberate defects for negative-control runs of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign of the finite-K dependence-balance residual.
    NegateResidual,
}

/// Shared context for the checks: solver settings, fault mode and slop.
#[derive(Debug, Clone, Copy)]
pub struct Checker {
    pub settings: SolverSettings,
    pub fault: Fault,
    pub slop: f64,
}

impl Checker {
    pub fn new(settings: SolverSettings) -> Self {
        Checker {
            settings,
            fault: Fault::None,
            slop: DEFAULT_SLOP,
        }
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = fault;
        self
    }

    pub(crate) fn solve_finite(
        &self,
        k: u64,
        p: f64,
    ) -> std::result::Result<GainSolution, GainError> {
        match self.fault {
            Fault::None => solve_lambda_star_by(k, p, &self.settings, raw_residual),
            Fault::NegateResidual => {
                solve_lambda_star_by(k, p, &self.settings, |l, k, p| -raw_residual(l, k, p))
            }
        }
    }

    pub(crate) fn solve_massive(&self, pi: f64) -> std::result::Result<GainSolution, GainError> {
        solve_lambda_massive(pi, &self.settings)
    }
}

/// Accumulates slack evidence for one check.
pub(crate) struct Tally {
    name: String,
    slop: f64,
    samples: usize,
    violations: usize,
    worst: f64,
    witness: String,
}

impl Tally {
    pub fn new(name: impl Into<String>, slop: f64) -> Self {
        Tally {
            name: name.into(),
            slop,
            samples: 0,
            violations: 0,
            worst: f64::INFINITY,
            witness: String::new(),
        }
    }

    pub fn sample(&mut self) {
        self.samples += 1;
    }

    fn record(&mut self, slack: f64, violated: bool, ctx: impl FnOnce() -> String) {
        if violated {
            self.violations += 1;
        }
        // NaN slack is a violation and always becomes the witness
        if slack < self.worst || slack.is_nan() || self.witness.is_empty() {
            self.worst = if slack.is_nan() {
                f64::NEG_INFINITY
            } else {
                slack
            };
            self.witness = ctx();
        }
    }

    fn scaled(lhs: f64, rhs: f64) -> f64 {
        (rhs - lhs) / 1f64.max(lhs.abs()).max(rhs.abs())
    }

    /// `lhs ≤ rhs`
    pub fn le(&mut self, label: &str, lhs: f64, rhs: f64, ctx: impl FnOnce() -> String) {
        let slack = Self::scaled(lhs, rhs);
        let violated = !(slack >= -self.slop);
        self.record(slack, violated, || {
            format!("{label}: {lhs:.12e} <= {rhs:.12e} at {}", ctx())
        });
    }

    /// `lhs < rhs`; equality only occurs at analytic boundary cases, so this
    /// is tested as slack > −slop.
    pub fn lt(&mut self, label: &str, lhs: f64, rhs: f64, ctx: impl FnOnce() -> String) {
        let slack = Self::scaled(lhs, rhs);
        let violated = !(slack > -self.slop);
        self.record(slack, violated, || {
            format!("{label}: {lhs:.12e} < {rhs:.12e} at {}", ctx())
        });
    }

    /// A property without a natural slack: recorded as slack 0 or −1.
    pub fn flag(&mut self, label: &str, ok: bool, ctx: impl FnOnce() -> String) {
        let slack = if ok { 0.0 } else { -1.0 };
        self.record(slack, !ok, || format!("{label}: {}", ctx()));
    }

    pub fn error(&mut self, label: &str, err: &GainError, ctx: impl FnOnce() -> String) {
        self.violations += 1;
        if self.worst > f64::NEG_INFINITY || self.witness.is_empty() {
            self.worst = f64::NEG_INFINITY;
            self.witness = format!("{label}: {err} at {}", ctx());
        }
    }

    pub fn finish(self) -> BoundReport {
        BoundReport {
            check_name: self.name,
            samples: self.samples,
            violations: self.violations,
            worst_slack: if self.worst.is_finite() || self.violations > 0 {
                self.worst
            } else {
                0.0
            },
            witness: self.witness,
        }
    }
}

/// Runs every check with default grids and the given sample spec. The
/// aggregate passes iff every report has zero violations.
pub fn run_suite(sample: &SampleSpec, settings: &SolverSettings) -> Vec<BoundReport> {
    run_suite_with(sample, settings, Fault::None)
}

pub fn run_suite_with(
    sample: &SampleSpec,
    settings: &SolverSettings,
    fault: Fault,
) -> Vec<BoundReport> {
    let checker = Checker::new(*settings).with_fault(fault);
    let users = [
        crate::Users::Finite(2),
        crate::Users::Finite(3),
        crate::Users::Finite(10),
        crate::Users::Finite(100),
        crate::Users::Massive,
    ];
    let mut reports = vec![
        checks::point_bounds(&checker, 2, 1.0),
        checks::point_bounds(&checker, 100, 1.0),
        checks::sampled_point_bounds(&checker, sample),
        checks::large_k_sandwich(&checker),
        checks::tail_bounds(&checker),
        checks::derivative(&checker, &DERIVATIVE_GRID),
        checks::monotone_unimodal(&checker, &users, -10.0, 30.0, 0.1),
        checks::thomas_and_improved(&checker, sample),
    ];
    reports.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    reports
}

pub fn all_passed(reports: &[BoundReport]) -> bool {
    reports.iter().all(BoundReport::passed)
}
