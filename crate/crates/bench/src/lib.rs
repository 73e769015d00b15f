//! Shared inputs for the criterion benchmarks.

use fbgain::Users;

/// `(K, P)` pairs spanning small and large user counts and powers.
pub const FINITE_CASES: [(u64, f64); 4] = [(2, 1.0), (10, 0.1), (100, 1.0), (10_000, 1e-3)];

/// Total powers, linear, from -10 dB to 30 dB.
pub const MASSIVE_CASES: [f64; 3] = [0.1, 5.38, 1000.0];

/// The user counts plotted in the figures.
pub fn figure_users() -> Vec<Users> {
    vec![
        Users::Finite(2),
        Users::Finite(3),
        Users::Finite(10),
        Users::Finite(100),
        Users::Massive,
    ]
}
