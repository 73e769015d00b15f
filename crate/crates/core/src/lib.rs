//! Feedback capacity gains for K-user Gaussian multiple-access channels.
//!
//! With symmetric per-user power `P` and total power `π = K·P`, the
//! feedback sum-rate capacity is `ln(1 + π·λ*)` where the power gain factor
//! `λ* ∈ [1, K]` is the unique point at which the dependence-balance
//! inequality holds with equality. The capacity gain factor
//! `F(π) = ln(1 + π·λ*) / ln(1 + π)` measures how much feedback helps.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`] and [`formulas`]: pure scalar formulas (capacities, the
//!   dependence-balance residual, the function `f`, the massive-user curve).
//! * [`solver`], [`sweep`] and [`peak`]: root-finding for `λ*`, curve sweeps
//!   over total power in dB, and the unimodal peak search for `F`.
//! * [`verify`]: executable checks of the bounds and shape properties, with
//!   slack reporting.
//!
//! All capacities are in nats.
//!
//! ```
//! use fbgain::{solve_lambda_massive, SolverSettings};
//!
//! let sol = solve_lambda_massive(1000.0, &SolverSettings::default()).unwrap();
//! assert!((sol.lambda_star - 9.119).abs() < 1e-3);
//! assert!((sol.gain_f - 1.320).abs() < 1e-3);
//! ```

// `!(x > 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod formulas;
pub mod peak;
pub mod solver;
pub mod special;
pub mod sweep;
pub mod verify;

pub use channel::{average_power, ChannelConfig, Power, PowerVector, Users};
pub use error::{GainError, Result};
pub use formulas::{
    capacity_fb, capacity_nofb, db_residual, dlambda_dpi_massive, f_of, gain_factor,
    massive_parametric, ResidualForm,
};
pub use peak::{find_peak, golden_section_max, PeakResult, ScanPoint};
pub use solver::{
    eval_point, solve_lambda_massive, solve_lambda_star, GainSolution, SolverSettings,
};
pub use special::{db_convert, from_db, ln1p_over_x, to_db, DbDirection};
pub use sweep::{db_grid, sweep_curve, CurvePoint};
pub use verify::{BoundReport, Fault, SampleSpec};
