//! Identity groups with in-group altruism.
//!
//! Every member of the initial elite belongs to one group `j`, which makes
//! up a share `p_tot` of the population. Agents weigh the average material
//! payoff of their own group by `alpha`:
//! `U = Pi_own + alpha * (q * Pi_e + (1 - q) * Pi_d)`, with `q` the fraction
//! of group `j` inside the elite. Efforts follow the material first-order
//! conditions of the base game.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{self, EquilibriumOutcome, GameParams, Institution};
use crate::production::ProductionSpec;
use crate::root;

/// Agreement required between the closed-form and bisection elite sizes
/// before the closed form is trusted.
pub const CLOSED_FORM_TOL: f64 = 1e-9;

const BISECT_TOL: f64 = 1e-13;
const BISECT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityParams {
    pub base: GameParams,
    /// In-group altruism weight; 0 recovers the base game.
    pub alpha: f64,
    /// Population share of the elite's group.
    pub p_tot: f64,
}

impl IdentityParams {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            return Err(Error::param("alpha", "alpha must lie in [0, 1)"));
        }
        if !(self.p_tot > 0.0 && self.p_tot <= 1.0) {
            return Err(Error::param("p_tot", "p_tot must lie in (0, 1]"));
        }
        if self.base.e0 > self.group_size() * (1.0 + 1e-12) {
            return Err(Error::param("p_tot", "p_tot * n must be >= e0"));
        }
        Ok(())
    }

    /// Head count of the elite's group.
    pub fn group_size(&self) -> f64 {
        self.p_tot * self.base.n_f64()
    }

    pub fn with_p_tot(self, p_tot: f64) -> Self {
        IdentityParams { p_tot, ..self }
    }
}

/// Fraction of the elite's group inside an elite of size `e`, clamped to
/// `[0, 1]`.
pub fn q_fraction(e: f64, p: &IdentityParams) -> f64 {
    (e / p.group_size()).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AltruisticUtilities {
    pub elite: f64,
    /// Disenfranchised members of the elite's group.
    pub disenfranchised_in_group: f64,
    /// Disenfranchised agents of groups with no elite members.
    pub disenfranchised_other: f64,
}

pub fn altruistic_utilities(
    p: &IdentityParams,
    e: f64,
    v: Institution,
    i_e: f64,
    i_d: f64,
) -> Result<AltruisticUtilities> {
    let pay = game::material_payoffs(&p.base, e, i_e, i_d, v)?;
    let q = q_fraction(e, p);
    let group_avg = q * pay.elite + (1.0 - q) * pay.disenfranchised;
    Ok(AltruisticUtilities {
        elite: pay.elite + p.alpha * group_avg,
        disenfranchised_in_group: pay.disenfranchised + p.alpha * group_avg,
        disenfranchised_other: pay.disenfranchised + p.alpha * pay.disenfranchised,
    })
}

/// `U_e(Public) - U_e(Steal)` for an elite of size `e` at the material-FOC
/// efforts.
pub fn commitment_gap(p: &IdentityParams, e: f64) -> Result<f64> {
    let inv = game::optimal_investments(&p.base)?;
    let (i_e, i_d) = (inv.elite, inv.disenfranchised_public);
    let public = altruistic_utilities(p, e, Institution::Public, i_e, i_d)?;
    let steal = altruistic_utilities(p, e, Institution::Steal, i_e, i_d)?;
    Ok(public.elite - steal.elite)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinCommitment {
    /// Smallest elite size at which the elite weakly prefer `Public`;
    /// `None` if no size in `[E0, N]` does.
    pub e_p: Option<f64>,
    pub method: Method,
}

/// Smallest `E` in `[E0, N]` with a nonnegative commitment gap, by bisection.
pub fn min_commitment_size_bisection(p: &IdentityParams) -> Result<Option<f64>> {
    p.validate()?;
    let (e0, n) = (p.base.e0, p.base.n_f64());
    if commitment_gap(p, e0)? >= 0.0 {
        return Ok(Some(e0));
    }
    // The gap is (N - E) R_d k(E) with k increasing, so it vanishes at N;
    // bracket strictly inside to find the first sign change of k.
    let hi = n - (n - e0) * 1e-9;
    if commitment_gap(p, hi)? < 0.0 {
        return Ok(None);
    }
    let e_p = root::bisect_predicate(
        |e| commitment_gap(p, e).map(|h| h >= 0.0).unwrap_or(false),
        e0,
        hi,
        BISECT_TOL,
        BISECT_MAX_ITER,
    );
    Ok(Some(e_p))
}

/// Closed-form minimal elite size.
///
/// While the elite's group is not fully enfranchised, `q = E / (p_tot N)`
/// and the gap changes sign at `1 / (G (1 + alpha) - alpha / (p_tot N))`.
/// If the group is too small to reach that point (`p_tot N < 1/G`), the
/// sign change happens with `q` clamped at 1, at `1/G`.
pub fn closed_form_commitment_size(p: &IdentityParams) -> Result<f64> {
    p.validate()?;
    let b = &p.base;
    let candidate = if p.group_size() >= 1.0 / b.g {
        1.0 / (b.g * (1.0 + p.alpha) - p.alpha / p.group_size())
    } else {
        1.0 / b.g
    };
    Ok(candidate.max(b.e0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfCheck {
    pub passed: bool,
    pub cases: usize,
    pub worst_gap: f64,
}

fn self_check_cases() -> Vec<IdentityParams> {
    let mut cases = Vec::new();
    let productions = [
        ProductionSpec::isoelastic(0.5),
        ProductionSpec::Log,
        ProductionSpec::saturating(2.0),
    ];
    for production in productions {
        for &(n, e0, g) in &[(10, 1.0, 0.5), (5, 0.5, 0.3), (20, 2.0, 0.2), (10, 3.0, 0.5)] {
            for &alpha in &[0.0, 0.25, 0.5, 0.9] {
                for &p_tot in &[0.35, 0.6, 1.0] {
                    let base = GameParams {
                        n,
                        e0,
                        m: 1.0,
                        a: 2.0,
                        g,
                        production,
                    };
                    let ip = IdentityParams { base, alpha, p_tot };
                    if ip.validate().is_ok() {
                        cases.push(ip);
                    }
                }
            }
        }
    }
    cases
}

/// One-time comparison of the closed form against bisection over a fixed
/// battery of cases. The closed form is used only if every case agrees.
pub fn closed_form_self_check() -> &'static SelfCheck {
    static CHECK: OnceLock<SelfCheck> = OnceLock::new();
    CHECK.get_or_init(|| {
        let cases = self_check_cases();
        let mut worst: f64 = 0.0;
        for ip in &cases {
            let gap = match (min_commitment_size_bisection(ip), closed_form_commitment_size(ip)) {
                (Ok(Some(b)), Ok(c)) => (b - c).abs(),
                _ => f64::INFINITY,
            };
            worst = worst.max(gap);
        }
        let passed = worst <= CLOSED_FORM_TOL;
        if !passed {
            eprintln!(
                "warning: closed-form commitment size disagrees with bisection by {worst:e}; \
                 falling back to bisection"
            );
        }
        SelfCheck {
            passed,
            cases: cases.len(),
            worst_gap: worst,
        }
    })
}

/// Smallest elite size at which the altruistic elite weakly prefer `Public`.
pub fn min_commitment_size(p: &IdentityParams) -> Result<MinCommitment> {
    if closed_form_self_check().passed {
        Ok(MinCommitment {
            e_p: Some(closed_form_commitment_size(p)?),
            method: Method::ClosedForm,
        })
    } else {
        Ok(MinCommitment {
            e_p: min_commitment_size_bisection(p)?,
            method: Method::Bisection,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityOutcome {
    pub outcome: EquilibriumOutcome,
    pub e_p: f64,
    /// Elite utility from extending to `e_p` and providing the public good.
    pub u_e_incl: f64,
    /// Elite utility from staying at `E0` and expropriating.
    pub u_e_extr: f64,
    pub utilities: AltruisticUtilities,
}

impl IdentityOutcome {
    pub fn decision(&self) -> Institution {
        self.outcome.v_star
    }
}

/// Equilibrium under in-group altruism. The elite extend to `E_P` iff that
/// weakly beats staying put and expropriating.
pub fn solve_equilibrium_identity(p: &IdentityParams) -> Result<IdentityOutcome> {
    p.validate()?;
    let b = &p.base;
    let inv = game::optimal_investments(b)?;
    let lhs = game::threshold_lhs(b)?;
    let e_p = min_commitment_size(p)?
        .e_p
        .ok_or_else(|| Error::param("alpha", "no elite size makes public provision credible"))?;

    let incl = altruistic_utilities(p, e_p, Institution::Public, inv.elite, inv.disenfranchised_public)?;
    let extr = altruistic_utilities(p, b.e0, Institution::Steal, inv.elite, 0.0)?;
    let no_commitment_problem = e_p <= b.e0;
    let public = no_commitment_problem || incl.elite >= extr.elite;

    let (e_star, v_star, i_d, utilities) = if public {
        (e_p, Institution::Public, inv.disenfranchised_public, incl)
    } else {
        (b.e0, Institution::Steal, 0.0, extr)
    };
    let pay = game::material_payoffs(b, e_star, inv.elite, i_d, v_star)?;
    Ok(IdentityOutcome {
        outcome: EquilibriumOutcome {
            e_star,
            v_star,
            i_e: inv.elite,
            i_d,
            pi_e: pay.elite,
            pi_d: pay.disenfranchised,
            y: game::total_output(e_star, pay.elite, pay.disenfranchised, b.n),
            threshold_lhs: lhs,
            inclusive: public,
            no_commitment_problem,
        },
        e_p,
        u_e_incl: incl.elite,
        u_e_extr: extr.elite,
        utilities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupSizeRow {
    pub p_tot: f64,
    pub alpha: f64,
    pub e_p: f64,
    pub decision: Institution,
    pub u_e_incl: f64,
    pub u_e_extr: f64,
    /// `p_tot * N == E0`: the whole group starts inside the elite.
    pub degenerate: bool,
}

impl GroupSizeRow {
    pub const COLUMNS: [&'static str; 6] = ["p_tot", "alpha", "e_p", "decision", "u_e_incl", "u_e_extr"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSizeSweep {
    pub rows: Vec<GroupSizeRow>,
    /// Grid points that could not be solved, with the reason.
    pub skipped: Vec<(f64, String)>,
}

/// Solves the game at each group share in `p_grid`; rows come out sorted by
/// `p_tot`.
pub fn sweep_group_size(p: &IdentityParams, p_grid: &[f64]) -> GroupSizeSweep {
    let mut grid = p_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for p_tot in grid {
        let ip = p.with_p_tot(p_tot);
        match solve_equilibrium_identity(&ip) {
            Ok(sol) => rows.push(GroupSizeRow {
                p_tot,
                alpha: p.alpha,
                e_p: sol.e_p,
                decision: sol.decision(),
                u_e_incl: sol.u_e_incl,
                u_e_extr: sol.u_e_extr,
                degenerate: (ip.group_size() - ip.base.e0).abs() <= 1e-12 * ip.base.e0,
            }),
            Err(e) => skipped.push((p_tot, e.to_string())),
        }
    }
    GroupSizeSweep { rows, skipped }
}
