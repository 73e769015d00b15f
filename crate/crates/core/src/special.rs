//! Decibel conversions and cancellation-safe logarithm kernels.

use crate::error::{domain, Result};

/// Below this magnitude `ln(1+x)/x` is evaluated by its Taylor series.
pub const LN1P_SERIES_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbDirection {
    ToDb,
    FromDb,
}

/// Converts between linear power and decibels (`10·log10`).
pub fn db_convert(value: f64, direction: DbDirection) -> Result<f64> {
    match direction {
        DbDirection::ToDb => to_db(value),
        DbDirection::FromDb => Ok(from_db(value)),
    }
}

pub fn to_db(value: f64) -> Result<f64> {
    if !(value > 0.0) {
        return Err(domain(
            "to_db",
            format!("requires a positive power, got {value}"),
        ));
    }
    Ok(10.0 * value.log10())
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `ln(1+x)/x`, continuous at `x = 0` where it equals 1.
///
/// Requires `x > -1`.
pub fn ln1p_over_x(x: f64) -> f64 {
    if x.abs() < LN1P_SERIES_CUTOFF {
        // 1 - x/2 + x^2/3 - x^3/4
        1.0 + x * (-0.5 + x * (1.0 / 3.0 - 0.25 * x))
    } else {
        x.ln_1p() / x
    }
}
