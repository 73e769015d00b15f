//! Search for the maximal capacity gain factor along a curve.

use crate::channel::Users;
use crate::error::{GainError, Result};
use crate::solver::SolverSettings;
use crate::sweep::{curve_point, sweep_curve};

/// `(π in dB, F)` sample from the coarse scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub pi_db: f64,
    pub gain_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakResult {
    pub users: Users,
    pub pi_star: f64,
    pub pi_star_db: f64,
    pub f_star: f64,
    pub lambda_at_peak: f64,
    /// Left edge, best scan point, right edge: `F` rises then falls.
    pub bracket: [ScanPoint; 3],
    pub iterations: u32,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol` or after `max_iter`
/// reductions. Returns `(x, f(x), iterations)` for the best point evaluated.
pub fn golden_section_max<F, E>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: u32,
) -> std::result::Result<(f64, f64, u32), E>
where
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < max_iter {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd {
        (c, fc, iterations)
    } else {
        (d, fd, iterations)
    })
}

/// Locates the maximum of `F(π)` for `users` within `[from_db, to_db]`.
///
/// A coarse scan at `settings.scan_step_db` picks the best grid point, which
/// must be interior; golden-section search on the two neighbouring grid cells
/// then refines it to `settings.peak_tol_db`.
pub fn find_peak(
    users: Users,
    from_db: f64,
    to_db: f64,
    settings: &SolverSettings,
) -> Result<PeakResult> {
    let scan = sweep_curve(users, from_db, to_db, settings.scan_step_db, settings)?;
    let best = scan.iter().enumerate().fold(0, |best, (i, p)| {
        if p.gain_f > scan[best].gain_f {
            i
        } else {
            best
        }
    });
    if best == 0 || best + 1 == scan.len() {
        return Err(GainError::NoInteriorPeak { from_db, to_db });
    }
    let at = |i: usize| ScanPoint {
        pi_db: scan[i].pi_db,
        gain_f: scan[i].gain_f,
    };
    let bracket = [at(best - 1), at(best), at(best + 1)];

    let (x, fx, iterations) = golden_section_max(
        |db| curve_point(users, db, settings).map(|p| p.gain_f),
        bracket[0].pi_db,
        bracket[2].pi_db,
        settings.peak_tol_db,
        settings.max_iter,
    )?;
    let pi_star_db = if fx >= bracket[1].gain_f {
        x
    } else {
        bracket[1].pi_db
    };
    let peak = curve_point(users, pi_star_db, settings)?;
    Ok(PeakResult {
        users,
        pi_star: peak.pi,
        pi_star_db,
        f_star: peak.gain_f,
        lambda_at_peak: peak.lambda,
        bracket,
        iterations,
    })
}
