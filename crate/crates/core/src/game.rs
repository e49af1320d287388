//! The one-shot three-stage game.
//!
//! Stage one: the initial elite pick an elite size `E >= E0`. Stage two: every
//! agent picks effort. Stage three: an elite agent either expropriates the
//! disenfranchised (`Steal`) or turns their resources into a public good
//! (`Public`). The game is solved in closed form; see [`crate::oracle`] for
//! the brute-force cross-check.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::production::ProductionSpec;

/// Relative slack for the `E * G = 1` knife edge, where the stage-three
/// payoffs tie and the tie goes to `Public`.
pub const KNIFE_EDGE_TOL: f64 = 4.0 * f64::EPSILON;

/// Primitives of the one-shot game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Population.
    pub n: u32,
    /// Initial elite size; fractional agents are allowed.
    pub e0: f64,
    /// Raw materials per agent.
    pub m: f64,
    /// Total factor productivity.
    pub a: f64,
    /// Public-good productivity, in `(1/n, 1)`.
    pub g: f64,
    pub production: ProductionSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Institution {
    Public,
    Steal,
}

impl Institution {
    pub fn as_str(self) -> &'static str {
        match self {
            Institution::Public => "public",
            Institution::Steal => "steal",
        }
    }
}

impl fmt::Display for Institution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Investments {
    pub elite: f64,
    /// Disenfranchised effort when they anticipate `Public`.
    pub disenfranchised_public: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payoffs {
    pub elite: f64,
    pub disenfranchised: f64,
}

/// Solved equilibrium of the one-shot game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumOutcome {
    pub e_star: f64,
    pub v_star: Institution,
    pub i_e: f64,
    pub i_d: f64,
    pub pi_e: f64,
    pub pi_d: f64,
    pub y: f64,
    pub threshold_lhs: f64,
    /// Set iff `v_star == Public`.
    pub inclusive: bool,
    /// `E0 >= 1/G`: the initial elite already prefer `Public`.
    pub no_commitment_problem: bool,
}

impl EquilibriumOutcome {
    pub const COLUMNS: [&'static str; 9] = [
        "e_star",
        "v_star",
        "i_e",
        "i_d",
        "pi_e",
        "pi_d",
        "y",
        "threshold_lhs",
        "inclusive",
    ];
}

/// Whether an elite of size `e` weakly prefers `Public` when there is
/// something to take, i.e. `e >= 1/g` up to [`KNIFE_EDGE_TOL`].
pub fn commits_to_public(e: f64, g: f64) -> bool {
    e * g >= 1.0 - KNIFE_EDGE_TOL
}

impl GameParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", "n must be an integer >= 2"));
        }
        let n = self.n as f64;
        if !(self.e0 > 0.0 && self.e0 <= n) {
            return Err(Error::param("e0", "e0 must lie in (0, n]"));
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::param("m", "m must be > 0"));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::param("a", "a must be > 0"));
        }
        if !(self.g > 1.0 / n && self.g < 1.0) {
            return Err(Error::param("g", "g must lie in (1/n, 1)"));
        }
        self.production.validate()
    }

    pub fn n_f64(&self) -> f64 {
        self.n as f64
    }

    /// `E0 >= 1/G`.
    pub fn no_commitment_problem(&self) -> bool {
        commits_to_public(self.e0, self.g)
    }

    /// Resources `A f(I) + M` of an agent investing `effort`.
    pub fn resources(&self, effort: f64) -> Result<f64> {
        Ok(self.a * self.production.eval(effort)? + self.m)
    }

    pub fn with_a(self, a: f64) -> Self {
        GameParams { a, ..self }
    }

    pub fn with_e0(self, e0: f64) -> Self {
        GameParams { e0, ..self }
    }

    pub fn with_g(self, g: f64) -> Self {
        GameParams { g, ..self }
    }

    pub fn with_m(self, m: f64) -> Self {
        GameParams { m, ..self }
    }
}

/// Material-FOC efforts: elite solve `A f'(I) = 1`, disenfranchised facing
/// `Public` solve `G A f'(I) = 1`. Corners are 0.
pub fn optimal_investments(p: &GameParams) -> Result<Investments> {
    Ok(Investments {
        elite: p.production.invert_prime(1.0 / p.a)?,
        disenfranchised_public: p.production.invert_prime(1.0 / (p.g * p.a))?,
    })
}

/// Material payoffs of an elite and a disenfranchised agent.
pub fn material_payoffs(
    p: &GameParams,
    e: f64,
    i_e: f64,
    i_d: f64,
    v: Institution,
) -> Result<Payoffs> {
    let n = p.n_f64();
    if !(e >= p.e0 && e <= n) {
        return Err(Error::domain("elite size", e, "must lie in [e0, n]"));
    }
    let r_e = p.resources(i_e)?;
    let r_d = p.resources(i_d)?;
    let pool = (n - e) * r_d;
    Ok(match v {
        Institution::Public => Payoffs {
            elite: pool * p.g + r_e - i_e,
            disenfranchised: pool * p.g - i_d,
        },
        Institution::Steal => Payoffs {
            elite: pool / e + r_e - i_e,
            disenfranchised: -i_d,
        },
    })
}

/// Stage-three choice of an elite of size `e` facing disenfranchised
/// resources `r_d`. Ties go to `Public`.
pub fn stage3_choice(p: &GameParams, e: f64, r_d: f64) -> Result<Institution> {
    let n = p.n_f64();
    if !(e >= p.e0 && e <= n) {
        return Err(Error::domain("elite size", e, "must lie in [e0, n]"));
    }
    if !(r_d >= 0.0 && r_d.is_finite()) {
        return Err(Error::domain("r_d", r_d, "must be finite and >= 0"));
    }
    // (n - e) r_d G >= (n - e) r_d / e, divided through by the common
    // nonnegative factor.
    if r_d == 0.0 || e >= n || commits_to_public(e, p.g) {
        Ok(Institution::Public)
    } else {
        Ok(Institution::Steal)
    }
}

/// Left side of the extension threshold; the elite extend iff it is >= 1.
pub fn threshold_lhs(p: &GameParams) -> Result<f64> {
    if !(p.m > 0.0) {
        return Err(Error::domain("m", p.m, "must be > 0"));
    }
    let i_d = optimal_investments(p)?.disenfranchised_public;
    let af = p.a * p.production.eval(i_d)?;
    Ok(p.e0 * (p.g + (p.g - 1.0 / p.n_f64()) * af / p.m))
}

pub fn total_output(e: f64, pi_e: f64, pi_d: f64, n: u32) -> f64 {
    e * pi_e + (n as f64 - e) * pi_d
}

/// Unique subgame-perfect equilibrium of the one-shot game.
pub fn solve_equilibrium(p: &GameParams) -> Result<EquilibriumOutcome> {
    p.validate()?;
    let inv = optimal_investments(p)?;
    let lhs = threshold_lhs(p)?;
    let no_commitment_problem = p.no_commitment_problem();

    let (e_star, v_star, i_d) = if no_commitment_problem {
        (p.e0, Institution::Public, inv.disenfranchised_public)
    } else if lhs >= 1.0 {
        (1.0 / p.g, Institution::Public, inv.disenfranchised_public)
    } else {
        (p.e0, Institution::Steal, 0.0)
    };

    let pay = material_payoffs(p, e_star, inv.elite, i_d, v_star)?;
    Ok(EquilibriumOutcome {
        e_star,
        v_star,
        i_e: inv.elite,
        i_d,
        pi_e: pay.elite,
        pi_d: pay.disenfranchised,
        y: total_output(e_star, pay.elite, pay.disenfranchised, p.n),
        threshold_lhs: lhs,
        inclusive: v_star == Institution::Public,
        no_commitment_problem,
    })
}

/// Equilibrium elite size along a grid of public-good productivities.
pub fn comparative_static_elite_size(p: &GameParams, g_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    g_grid
        .iter()
        .map(|&g| solve_equilibrium(&p.with_g(g)).map(|o| (g, o.e_star)))
        .collect()
}
