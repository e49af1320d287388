//! Concave production technologies.
//!
//! Each family satisfies `f(0) = 0`, `f' > 0` and `f'' < 0` on `I >= 0`.
//! Callers multiply by TFP themselves; nothing here knows about `A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root;

/// A production function `f` of effort.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ProductionSpec {
    /// `f(I) = I^beta`, `0 < beta < 1`.
    Isoelastic { beta: f64 },
    /// `f(I) = ln(1 + I)`.
    Log,
    /// `f(I) = kappa * I / (1 + I)`, `kappa > 0`.
    Saturating { kappa: f64 },
}

/// A marginal product. `f'(0+)` is unbounded for the isoelastic family and
/// is kept out of arithmetic as its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    Finite(f64),
    Infinite,
}

impl Marginal {
    pub fn finite(self) -> Option<f64> {
        match self {
            Marginal::Finite(v) => Some(v),
            Marginal::Infinite => None,
        }
    }

    /// `scale * self > threshold`, with an infinite marginal always passing
    /// for positive scale.
    pub fn scaled_exceeds(self, scale: f64, threshold: f64) -> bool {
        match self {
            Marginal::Finite(v) => scale * v > threshold,
            Marginal::Infinite => scale > 0.0,
        }
    }
}

/// Result of checking `A f'(0) > 1` and `A f'(inf) < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport {
    pub a_times_marginal_at_zero: Marginal,
    /// `A f'(0+) > 1`.
    pub interior_at_zero: bool,
    /// `A f'(I) < 1` for some finite `I`.
    pub bounded_at_infinity: bool,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.interior_at_zero && self.bounded_at_infinity
    }
}

const BISECT_LO: f64 = 1e-12;
const BISECT_TOL: f64 = 1e-12;
const BISECT_MAX_ITER: usize = 200;

fn check_effort(effort: f64) -> Result<()> {
    if !effort.is_finite() || effort < 0.0 {
        return Err(Error::domain("effort", effort, "must be finite and >= 0"));
    }
    Ok(())
}

fn check_target(y: f64) -> Result<()> {
    if !y.is_finite() || y <= 0.0 {
        return Err(Error::domain("marginal", y, "must be finite and > 0"));
    }
    Ok(())
}

impl ProductionSpec {
    pub fn isoelastic(beta: f64) -> Self {
        ProductionSpec::Isoelastic { beta }
    }

    pub fn saturating(kappa: f64) -> Self {
        ProductionSpec::Saturating { kappa }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ProductionSpec::Isoelastic { beta } => {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::param("production.beta", "beta must lie in (0, 1)"));
                }
            }
            ProductionSpec::Log => {}
            ProductionSpec::Saturating { kappa } => {
                if !(kappa > 0.0 && kappa.is_finite()) {
                    return Err(Error::param("production.kappa", "kappa must be > 0"));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProductionSpec::Isoelastic { .. } => "isoelastic",
            ProductionSpec::Log => "log",
            ProductionSpec::Saturating { .. } => "saturating",
        }
    }

    /// `f(I)`.
    pub fn eval(&self, effort: f64) -> Result<f64> {
        check_effort(effort)?;
        Ok(self.eval_unchecked(effort))
    }

    pub(crate) fn eval_unchecked(&self, effort: f64) -> f64 {
        match *self {
            ProductionSpec::Isoelastic { beta } => {
                if effort == 0.0 {
                    0.0
                } else {
                    effort.powf(beta)
                }
            }
            ProductionSpec::Log => effort.ln_1p(),
            ProductionSpec::Saturating { kappa } => kappa * effort / (1.0 + effort),
        }
    }

    /// `f'(I)`; `Marginal::Infinite` only for the isoelastic family at zero.
    pub fn eval_prime(&self, effort: f64) -> Result<Marginal> {
        check_effort(effort)?;
        Ok(self.eval_prime_unchecked(effort))
    }

    fn eval_prime_unchecked(&self, effort: f64) -> Marginal {
        match *self {
            ProductionSpec::Isoelastic { beta } => {
                if effort == 0.0 {
                    Marginal::Infinite
                } else {
                    Marginal::Finite(beta * effort.powf(beta - 1.0))
                }
            }
            ProductionSpec::Log => Marginal::Finite(1.0 / (1.0 + effort)),
            ProductionSpec::Saturating { kappa } => {
                let d = 1.0 + effort;
                Marginal::Finite(kappa / (d * d))
            }
        }
    }

    /// `f'(0+)`.
    pub fn marginal_at_zero(&self) -> Marginal {
        self.eval_prime_unchecked(0.0)
    }

    fn is_corner(&self, y: f64) -> bool {
        match self.marginal_at_zero() {
            Marginal::Infinite => false,
            Marginal::Finite(m0) => y >= m0,
        }
    }

    /// Effort `I` with `f'(I) = y`, or 0 when `y >= f'(0+)`.
    pub fn invert_prime(&self, y: f64) -> Result<f64> {
        check_target(y)?;
        if self.is_corner(y) {
            return Ok(0.0);
        }
        let effort = match *self {
            ProductionSpec::Isoelastic { beta } => (y / beta).powf(1.0 / (beta - 1.0)),
            ProductionSpec::Log => 1.0 / y - 1.0,
            ProductionSpec::Saturating { kappa } => (kappa / y).sqrt() - 1.0,
        };
        Ok(effort.max(0.0))
    }

    /// Same contract as [`invert_prime`](Self::invert_prime), solved by
    /// monotone bisection instead of the closed form.
    pub fn invert_prime_bisection(&self, y: f64) -> Result<f64> {
        check_target(y)?;
        if self.is_corner(y) {
            return Ok(0.0);
        }
        let gap = |i: f64| match self.eval_prime_unchecked(i) {
            Marginal::Finite(m) => m - y,
            Marginal::Infinite => f64::INFINITY,
        };
        if gap(BISECT_LO) <= 0.0 {
            return Ok(BISECT_LO);
        }
        let mut hi = 1.0;
        while gap(hi) > 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::domain("marginal", y, "no finite effort attains it"));
            }
        }
        let r = root::bisect(gap, BISECT_LO, hi, BISECT_TOL, BISECT_MAX_ITER)
            .expect("bracket has a sign change");
        Ok(r.x)
    }

    /// Reports `A f'(0+) > 1` and `A f'(inf) < 1`; never fails.
    pub fn validate_assumptions(&self, tfp: f64) -> AssumptionReport {
        let m0 = self.marginal_at_zero();
        let a_m0 = match m0 {
            Marginal::Finite(v) => Marginal::Finite(tfp * v),
            Marginal::Infinite => Marginal::Infinite,
        };
        // f' -> 0 as I -> inf for every family here, so some finite I has
        // A f'(I) < 1; probe it rather than assume.
        let mut probe = 1.0;
        let mut bounded = false;
        for _ in 0..200 {
            if let Marginal::Finite(m) = self.eval_prime_unchecked(probe) {
                if tfp * m < 1.0 {
                    bounded = true;
                    break;
                }
            }
            probe *= 4.0;
        }
        AssumptionReport {
            a_times_marginal_at_zero: a_m0,
            interior_at_zero: m0.scaled_exceeds(tfp, 1.0),
            bounded_at_infinity: bounded,
        }
    }
}
