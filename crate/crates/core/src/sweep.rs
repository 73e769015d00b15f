//! Curves of `λ` and `F` against total power in dB.

use rayon::prelude::*;

use crate::channel::{ChannelConfig, Users};
use crate::error::{domain, Result};
use crate::solver::{eval_point, SolverSettings};
use crate::special::from_db;

/// One sample of the `λ(π)` and `F(π)` curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub pi: f64,
    pub pi_db: f64,
    pub users: Users,
    pub lambda: f64,
    pub lambda_db: f64,
    pub gain_f: f64,
}

/// Grid `from_db, from_db + step_db, …` up to and including `to_db`.
///
/// Grid values are snapped to multiples of 1e-10 dB so decimal steps land on
/// the nearest double (0.1 · 3 gives 0.3, not 0.30000000000000004). A final
/// partial step is clamped to `to_db`.
pub fn db_grid(from_db: f64, to_db: f64, step_db: f64) -> Result<Vec<f64>> {
    if !from_db.is_finite() || !to_db.is_finite() {
        return Err(domain(
            "sweep range",
            format!("bounds must be finite, got [{from_db}, {to_db}]"),
        ));
    }
    if !(step_db > 0.0) || !step_db.is_finite() {
        return Err(domain(
            "sweep range",
            format!("step must be positive, got {step_db}"),
        ));
    }
    if from_db > to_db {
        return Err(domain(
            "sweep range",
            format!("empty range [{from_db}, {to_db}]"),
        ));
    }
    let span = to_db - from_db;
    let steps = (span / step_db + 1e-9).floor() as usize;
    let snap = |x: f64| (x * 1e10).round() / 1e10;
    let mut grid: Vec<f64> = (0..=steps)
        .map(|i| snap(from_db + i as f64 * step_db).min(to_db))
        .collect();
    let last = *grid.last().expect("grid has at least one point");
    if to_db - last > 1e-9 * step_db {
        grid.push(to_db);
    } else if let Some(l) = grid.last_mut() {
        *l = to_db;
    }
    Ok(grid)
}

pub(crate) fn curve_point(
    users: Users,
    pi_db: f64,
    settings: &SolverSettings,
) -> Result<CurvePoint> {
    let pi = from_db(pi_db);
    let config = match users {
        Users::Finite(k) => ChannelConfig::finite_total(k, pi)?,
        Users::Massive => ChannelConfig::massive(pi)?,
    };
    let sol = eval_point(&config, settings)?;
    Ok(CurvePoint {
        pi,
        pi_db,
        users,
        lambda: sol.lambda_star,
        lambda_db: 10.0 * sol.lambda_star.log10(),
        gain_f: sol.gain_f,
    })
}

/// Solves every point of the dB grid. Points are evaluated in parallel and
/// returned in ascending `pi_db` order; each point is independent, so the
/// output does not depend on the thread count.
pub fn sweep_curve(
    users: Users,
    from_db: f64,
    to_db: f64,
    step_db: f64,
    settings: &SolverSettings,
) -> Result<Vec<CurvePoint>> {
    users.validate()?;
    settings.validate()?;
    let grid = db_grid(from_db, to_db, step_db)?;
    grid.par_iter()
        .map(|&db| curve_point(users, db, settings))
        .collect()
}
