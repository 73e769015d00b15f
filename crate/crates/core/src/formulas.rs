//! Scalar formulas: sum-rate capacities, the dependence-balance residual,
//! the function `f(π, λ)` and the massive-user curve.

use crate::error::{domain, Result};
use crate::special::ln1p_over_x;

/// Which algebraic form of the dependence-balance equality to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualForm {
    /// `(1/K)·ln(1+KPλ) − (1/(K−1))·ln(1+(K−λ)Pλ)`
    Raw,
    /// `K·ln(1 + Pλ²/(1+(K−λ)Pλ)) − ln(1+KPλ)`, equal to `K(K−1)` times
    /// the raw form.
    Balanced,
}

/// Sum-rate capacity without feedback, `ln(1 + π)` nats.
pub fn capacity_nofb(pi: f64) -> Result<f64> {
    if !(pi >= 0.0) {
        return Err(domain(
            "capacity_nofb",
            format!("total power must be >= 0, got {pi}"),
        ));
    }
    Ok(pi.ln_1p())
}

/// Sum-rate capacity with feedback, `ln(1 + π·λ)` nats.
pub fn capacity_fb(pi: f64, lambda: f64) -> Result<f64> {
    if !(pi >= 0.0) {
        return Err(domain(
            "capacity_fb",
            format!("total power must be >= 0, got {pi}"),
        ));
    }
    if !(lambda >= 1.0) {
        return Err(domain(
            "capacity_fb",
            format!("lambda must be >= 1, got {lambda}"),
        ));
    }
    Ok((pi * lambda).ln_1p())
}

/// Capacity gain factor `ln(1+πλ) / ln(1+π)`.
///
/// The `π → 0` limit (equal to 1) is left to the caller.
pub fn gain_factor(pi: f64, lambda: f64) -> Result<f64> {
    if !(pi > 0.0) {
        return Err(domain(
            "gain_factor",
            format!("total power must be > 0, got {pi}"),
        ));
    }
    if !(lambda >= 1.0) {
        return Err(domain(
            "gain_factor",
            format!("lambda must be >= 1, got {lambda}"),
        ));
    }
    Ok(gain_factor_unchecked(pi, lambda))
}

pub(crate) fn gain_factor_unchecked(pi: f64, lambda: f64) -> f64 {
    (pi * lambda).ln_1p() / pi.ln_1p()
}

/// Dependence-balance residual, LHS minus RHS. Negative below `λ*`,
/// positive above it, zero at `λ*`, in both forms.
pub fn db_residual(lambda: f64, k: u64, p: f64, form: ResidualForm) -> Result<f64> {
    if k < 2 {
        return Err(domain(
            "db_residual",
            format!("K must be at least 2, got {k}"),
        ));
    }
    if !(p > 0.0) {
        return Err(domain(
            "db_residual",
            format!("per-user power must be > 0, got {p}"),
        ));
    }
    let kf = k as f64;
    if !(1.0..=kf).contains(&lambda) {
        return Err(domain(
            "db_residual",
            format!("lambda must lie in [1, {k}], got {lambda}"),
        ));
    }
    Ok(match form {
        ResidualForm::Raw => raw_residual(lambda, kf, p),
        ResidualForm::Balanced => balanced_residual(lambda, kf, p),
    })
}

pub(crate) fn raw_residual(lambda: f64, k: f64, p: f64) -> f64 {
    (k * p * lambda).ln_1p() / k - ((k - lambda) * p * lambda).ln_1p() / (k - 1.0)
}

pub(crate) fn balanced_residual(lambda: f64, k: f64, p: f64) -> f64 {
    let inner = p * lambda * lambda / (1.0 + (k - lambda) * p * lambda);
    k * inner.ln_1p() - (k * p * lambda).ln_1p()
}

/// `f(π, λ) = (1 + 1/(πλ))·ln(1 + πλ)`.
pub fn f_of(pi: f64, lambda: f64) -> Result<f64> {
    if !(pi > 0.0) {
        return Err(domain("f_of", format!("total power must be > 0, got {pi}")));
    }
    if !(lambda >= 1.0) {
        return Err(domain("f_of", format!("lambda must be >= 1, got {lambda}")));
    }
    Ok(f_unchecked(pi, lambda))
}

pub(crate) fn f_unchecked(pi: f64, lambda: f64) -> f64 {
    let x = pi * lambda;
    (1.0 + x) * ln1p_over_x(x)
}

/// Slope `dλ/dπ` along the massive-user curve `λ = f(π, λ)`, from implicit
/// differentiation. Only meaningful for on-curve points.
pub fn dlambda_dpi_massive(pi: f64, lambda: f64) -> Result<f64> {
    if !(pi > 0.0) {
        return Err(domain(
            "dlambda_dpi_massive",
            format!("total power must be > 0, got {pi}"),
        ));
    }
    // (π−1)λ+1 written to keep the λ−1 cancellation explicit
    let num = pi * lambda - (lambda - 1.0);
    let den = pi * lambda * (lambda - 1.0) + 2.0 * lambda - 1.0;
    if !(den > 0.0) {
        return Err(domain(
            "dlambda_dpi_massive",
            format!("non-positive denominator {den:e} at (pi, lambda) = ({pi}, {lambda}); point is off the massive curve"),
        ));
    }
    Ok(lambda / pi * num / den)
}

/// Point on the massive-user curve parametrized by `t = πλ`:
/// `λ(t) = (1+t)·ln(1+t)/t`, `π(t) = t/λ(t)`. Returns `(π, λ)`.
pub fn massive_parametric(t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(
            "massive_parametric",
            format!("t must be positive and finite, got {t}"),
        ));
    }
    let lambda = (1.0 + t) * ln1p_over_x(t);
    Ok((t / lambda, lambda))
}
