//! Channel configurations: user count and power specification.

use std::fmt;

use crate::error::{domain, Result};

/// Number of transmitters, or the massive limit `K → ∞` at fixed total power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Users {
    Finite(u64),
    Massive,
}

impl Users {
    pub fn finite(k: u64) -> Result<Self> {
        if k < 2 {
            return Err(domain("users", format!("K must be at least 2, got {k}")));
        }
        Ok(Users::Finite(k))
    }

    pub fn count(&self) -> Option<u64> {
        match *self {
            Users::Finite(k) => Some(k),
            Users::Massive => None,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            Users::Finite(k) if k < 2 => {
                Err(domain("users", format!("K must be at least 2, got {k}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Users {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Users::Finite(k) => write!(f, "{k}"),
            Users::Massive => f.write_str("inf"),
        }
    }
}

/// Linear power, either per user (`P`) or in total (`π = K·P`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Power {
    PerUser(f64),
    Total(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    users: Users,
    power: Power,
}

impl ChannelConfig {
    pub fn new(users: Users, power: Power) -> Result<Self> {
        users.validate()?;
        let value = match power {
            Power::PerUser(p) => p,
            Power::Total(pi) => pi,
        };
        if !(value > 0.0) || !value.is_finite() {
            return Err(domain(
                "power",
                format!("must be positive and finite, got {value}"),
            ));
        }
        if users == Users::Massive && matches!(power, Power::PerUser(_)) {
            return Err(domain(
                "power",
                "the massive limit needs total power; per-user power vanishes",
            ));
        }
        Ok(ChannelConfig { users, power })
    }

    pub fn finite_per_user(k: u64, p: f64) -> Result<Self> {
        Self::new(Users::Finite(k), Power::PerUser(p))
    }

    pub fn finite_total(k: u64, pi: f64) -> Result<Self> {
        Self::new(Users::Finite(k), Power::Total(pi))
    }

    pub fn massive(pi: f64) -> Result<Self> {
        Self::new(Users::Massive, Power::Total(pi))
    }

    pub fn users(&self) -> Users {
        self.users
    }

    pub fn power(&self) -> Power {
        self.power
    }

    /// Total power `π`.
    pub fn total_power(&self) -> f64 {
        match (self.users, self.power) {
            (_, Power::Total(pi)) => pi,
            (Users::Finite(k), Power::PerUser(p)) => k as f64 * p,
            (Users::Massive, Power::PerUser(_)) => unreachable!("rejected by ChannelConfig::new"),
        }
    }

    /// Per-user power `P`; `None` in the massive limit.
    pub fn per_user_power(&self) -> Option<f64> {
        match (self.users, self.power) {
            (_, Power::PerUser(p)) => Some(p),
            (Users::Finite(k), Power::Total(pi)) => Some(pi / k as f64),
            (Users::Massive, Power::Total(_)) => None,
        }
    }
}

/// Per-user power constraints `P_1, …, P_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector {
    per_user: Vec<f64>,
}

impl PowerVector {
    pub fn new(per_user: Vec<f64>) -> Result<Self> {
        if per_user.len() < 2 {
            return Err(domain(
                "power vector",
                format!("needs at least 2 users, got {}", per_user.len()),
            ));
        }
        if let Some(bad) = per_user.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
            return Err(domain(
                "power vector",
                format!("entries must be positive, got {bad}"),
            ));
        }
        Ok(PowerVector { per_user })
    }

    pub fn len(&self) -> usize {
        self.per_user.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_user.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.per_user
    }

    pub fn average(&self) -> f64 {
        self.per_user.iter().sum::<f64>() / self.per_user.len() as f64
    }
}

/// Reduces general power constraints to the symmetric pair `(K, P)` with `P`
/// the arithmetic mean. Feedback sum-rate capacity under general constraints
/// is bounded by the symmetric case at the average power.
pub fn average_power(powers: &PowerVector) -> (u64, f64) {
    (powers.len() as u64, powers.average())
}
