//! Repeated play with learning-by-doing productivity.
//!
//! Each period is the one-shot game at the current TFP and elite size.
//! Productivity then moves by `A' = (1 - delta) A + a * I_bar`, where
//! `I_bar` is aggregate effort, and the period's final elite becomes the
//! next period's initial elite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{self, EquilibriumOutcome, GameParams, Institution};
use crate::root;

pub const DEFAULT_T_MAX: usize = 100_000;
pub const DEFAULT_CONV_TOL: f64 = 1e-10;
pub const DEFAULT_A_BLOWUP: f64 = 1e9;

/// Number of geometric scan points when bracketing fixed points.
const SCAN_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynParams {
    /// One-shot primitives; `base.a` is the initial TFP.
    pub base: GameParams,
    pub delta: f64,
    pub a_coef: f64,
    pub t_max: usize,
    pub conv_tol: f64,
    pub a_blowup: f64,
}

impl DynParams {
    pub fn new(base: GameParams, delta: f64, a_coef: f64) -> Self {
        DynParams {
            base,
            delta,
            a_coef,
            t_max: DEFAULT_T_MAX,
            conv_tol: DEFAULT_CONV_TOL,
            a_blowup: DEFAULT_A_BLOWUP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param("delta", "delta must lie in (0, 1)"));
        }
        if !(self.a_coef >= 0.0 && self.a_coef.is_finite()) {
            return Err(Error::param("a_coef", "a_coef must be >= 0"));
        }
        if self.t_max < 1 {
            return Err(Error::param("t_max", "t_max must be >= 1"));
        }
        if !(self.conv_tol > 0.0) {
            return Err(Error::param("conv_tol", "conv_tol must be > 0"));
        }
        if !(self.a_blowup > self.conv_tol) {
            return Err(Error::param("a_blowup", "a_blowup must exceed conv_tol"));
        }
        Ok(())
    }

    /// Next-period TFP.
    pub fn law_of_motion(&self, a_t: f64, i_bar: f64) -> f64 {
        (1.0 - self.delta) * a_t + self.a_coef * i_bar
    }
}

/// One period of play and the state it hands to the next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub outcome: EquilibriumOutcome,
    pub i_bar: f64,
    pub a_next: f64,
    pub e0_next: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodRecord {
    pub t: usize,
    pub a: f64,
    pub e0: f64,
    pub e: f64,
    pub v: Institution,
    pub i_e: f64,
    pub i_d: f64,
    pub i_bar: f64,
    pub y: f64,
    pub threshold_lhs: f64,
}

impl PeriodRecord {
    pub const COLUMNS: [&'static str; 9] = ["t", "a", "e0", "e", "v", "i_e", "i_d", "i_bar", "y"];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Terminal {
    Converged { a_final: f64 },
    MaxPeriods,
    Diverged,
    CollapsedToZero,
}

impl Terminal {
    pub fn as_str(&self) -> &'static str {
        match self {
            Terminal::Converged { .. } => "converged",
            Terminal::MaxPeriods => "max_periods",
            Terminal::Diverged => "diverged",
            Terminal::CollapsedToZero => "collapsed_to_zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub periods: Vec<PeriodRecord>,
    pub terminal: Terminal,
    /// First period with an inclusive outcome.
    pub transition_period: Option<usize>,
}

/// Plays one period at TFP `a_t` with initial elite `e0_t`.
pub fn step(p: &DynParams, a_t: f64, e0_t: f64) -> Result<Step> {
    if !(a_t > 0.0 && a_t.is_finite()) {
        return Err(Error::domain("A_t", a_t, "must be finite and > 0"));
    }
    let stage = p.base.with_a(a_t).with_e0(e0_t);
    let outcome = game::solve_equilibrium(&stage)?;
    let n = stage.n_f64();
    let i_bar = outcome.e_star * outcome.i_e + (n - outcome.e_star) * outcome.i_d;
    Ok(Step {
        outcome,
        i_bar,
        a_next: p.law_of_motion(a_t, i_bar),
        e0_next: outcome.e_star,
    })
}

/// Iterates [`step`] until TFP settles, blows up, collapses, or `t_max`
/// periods have been played.
///
/// Pure depreciation shrinks `A` by `delta * A` per period, so settling at a
/// level below `conv_tol / delta` is reported as a collapse rather than
/// convergence.
pub fn simulate(p: &DynParams) -> Result<Trajectory> {
    p.validate()?;
    let mut periods = Vec::new();
    let mut transition_period = None;
    let mut a = p.base.a;
    let mut e0 = p.base.e0;
    let collapse_level = p.conv_tol / p.delta;

    for t in 1..=p.t_max {
        let s = step(p, a, e0)?;
        let o = &s.outcome;
        periods.push(PeriodRecord {
            t,
            a,
            e0,
            e: o.e_star,
            v: o.v_star,
            i_e: o.i_e,
            i_d: o.i_d,
            i_bar: s.i_bar,
            y: o.y,
            threshold_lhs: o.threshold_lhs,
        });
        if transition_period.is_none() && o.inclusive {
            transition_period = Some(t);
        }

        let next = s.a_next;
        let terminal = if !next.is_finite() || next > p.a_blowup {
            Some(Terminal::Diverged)
        } else if next < p.conv_tol {
            Some(Terminal::CollapsedToZero)
        } else if (next - a).abs() < p.conv_tol {
            if next < collapse_level {
                Some(Terminal::CollapsedToZero)
            } else {
                Some(Terminal::Converged { a_final: next })
            }
        } else {
            None
        };
        if let Some(terminal) = terminal {
            return Ok(Trajectory {
                periods,
                terminal,
                transition_period,
            });
        }
        a = next;
        e0 = s.e0_next;
    }

    Ok(Trajectory {
        periods,
        terminal: Terminal::MaxPeriods,
        transition_period,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Low,
    High,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Low => "low",
            Regime::High => "high",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub a: f64,
    pub stability: Stability,
    pub residual: f64,
    /// Slope of the one-period TFP map at the fixed point.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyStateReport {
    pub regime: Regime,
    pub fixed_points: Vec<FixedPoint>,
    pub bracket: (f64, f64),
}

impl SteadyStateReport {
    pub fn stable(&self) -> impl Iterator<Item = &FixedPoint> {
        self.fixed_points
            .iter()
            .filter(|fp| fp.stability == Stability::Stable)
    }
}

/// Aggregate effort under a regime held fixed, as a function of TFP.
///
/// Low: only the initial elite invest. High: an elite of `1/G` and the
/// `N - 1/G` disenfranchised all invest.
pub fn regime_investment(p: &DynParams, regime: Regime, a: f64) -> Result<f64> {
    let f = &p.base.production;
    let own = f.invert_prime(1.0 / a)?;
    Ok(match regime {
        Regime::Low => p.base.e0 * own,
        Regime::High => {
            let elite = 1.0 / p.base.g;
            let public = f.invert_prime(1.0 / (p.base.g * a))?;
            elite * own + (p.base.n_f64() - elite) * public
        }
    })
}

/// `(a / delta) * aggregate(A) - A`; zero at a steady state.
fn steady_gap(p: &DynParams, regime: Regime, a: f64) -> f64 {
    match regime_investment(p, regime, a) {
        Ok(agg) => p.a_coef / p.delta * agg - a,
        Err(_) => f64::NAN,
    }
}

/// One-period TFP map with the regime held fixed.
pub fn regime_map(p: &DynParams, regime: Regime, a: f64) -> Result<f64> {
    Ok(p.law_of_motion(a, regime_investment(p, regime, a)?))
}

fn regime_map_slope(p: &DynParams, regime: Regime, a: f64) -> f64 {
    let h = 1e-6 * a.max(1.0);
    let map = |x: f64| regime_map(p, regime, x).unwrap_or(f64::NAN);
    if a - h > 0.0 {
        (map(a + h) - map(a - h)) / (2.0 * h)
    } else {
        (map(a + h) - map(a)) / h
    }
}

fn steady_states(p: &DynParams, regime: Regime) -> Result<SteadyStateReport> {
    p.validate()?;
    let bracket = (p.conv_tol, p.a_blowup);
    let grid = root::log_grid(bracket.0, bracket.1, SCAN_POINTS);
    let gap = |a: f64| steady_gap(p, regime, a);

    let mut fixed_points: Vec<FixedPoint> = Vec::new();
    let mut prev = (grid[0], gap(grid[0]));
    for &x in &grid[1..] {
        let cur = (x, gap(x));
        let crosses = prev.1 == 0.0 || prev.1.signum() != cur.1.signum();
        if crosses && prev.1.is_finite() && cur.1.is_finite() {
            if let Some(r) = root::bisect(gap, prev.0, cur.0, 0.0, 400) {
                let duplicate = fixed_points
                    .last()
                    .is_some_and(|fp| (fp.a - r.x).abs() <= 1e-12 * r.x.max(1.0));
                if !duplicate {
                    let slope = regime_map_slope(p, regime, r.x);
                    fixed_points.push(FixedPoint {
                        a: r.x,
                        stability: if slope.abs() < 1.0 {
                            Stability::Stable
                        } else {
                            Stability::Unstable
                        },
                        residual: r.residual,
                        slope,
                    });
                }
            }
        }
        prev = cur;
    }

    Ok(SteadyStateReport {
        regime,
        fixed_points,
        bracket,
    })
}

/// Fixed points of the TFP map when only the initial elite invest.
pub fn low_steady_states(p: &DynParams) -> Result<SteadyStateReport> {
    steady_states(p, Regime::Low)
}

/// Fixed points of the TFP map after extension to `1/G`, everyone investing.
pub fn high_steady_states(p: &DynParams) -> Result<SteadyStateReport> {
    steady_states(p, Regime::High)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LongRun {
    LowTrap,
    TransitionExpected,
    Indeterminate,
}

impl LongRun {
    pub fn as_str(self) -> &'static str {
        match self {
            LongRun::LowTrap => "low_trap",
            LongRun::TransitionExpected => "transition_expected",
            LongRun::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRunReport {
    pub classification: LongRun,
    /// Extension threshold evaluated at the stable low steady state.
    pub criterion: Option<f64>,
    pub a_ss_low: Option<f64>,
    pub terminal: Terminal,
    pub transition_period: Option<usize>,
    /// Whether the analytic classification matches the simulation. `None`
    /// when the classification is indeterminate.
    pub consistent: Option<bool>,
    pub diagnostics: Option<String>,
}

/// Where the low-regime map settles from the initial TFP, if anywhere.
fn low_regime_limit(p: &DynParams) -> Option<f64> {
    let mut a = p.base.a;
    for _ in 0..p.t_max {
        let next = regime_map(p, Regime::Low, a).ok()?;
        if !next.is_finite() || next > p.a_blowup || next < p.conv_tol {
            return None;
        }
        if (next - a).abs() < p.conv_tol {
            return Some(next);
        }
        a = next;
    }
    None
}

/// Evaluates the long-run extension criterion at the stable low steady state
/// reached from the initial TFP, and cross-checks it against a simulation.
pub fn classify_long_run(p: &DynParams) -> Result<LongRunReport> {
    let low = low_steady_states(p)?;
    let traj = simulate(p)?;

    let indeterminate = |msg: String| LongRunReport {
        classification: LongRun::Indeterminate,
        criterion: None,
        a_ss_low: None,
        terminal: traj.terminal,
        transition_period: traj.transition_period,
        consistent: None,
        diagnostics: Some(msg),
    };

    if low.stable().next().is_none() {
        return Ok(indeterminate(format!(
            "no stable low steady state in [{:e}, {:e}] ({} fixed points found)",
            low.bracket.0,
            low.bracket.1,
            low.fixed_points.len()
        )));
    }
    let Some(limit) = low_regime_limit(p) else {
        return Ok(indeterminate(format!(
            "low-regime dynamics from A = {} do not settle at a positive level",
            p.base.a
        )));
    };
    let a_ss = low
        .stable()
        .map(|fp| fp.a)
        .min_by(|x, y| (x - limit).abs().total_cmp(&(y - limit).abs()))
        .expect("at least one stable point");

    let criterion = game::threshold_lhs(&p.base.with_a(a_ss))?;
    let classification = if criterion < 1.0 {
        LongRun::LowTrap
    } else {
        LongRun::TransitionExpected
    };
    let consistent = (classification == LongRun::LowTrap) == traj.transition_period.is_none();
    Ok(LongRunReport {
        classification,
        criterion: Some(criterion),
        a_ss_low: Some(a_ss),
        terminal: traj.terminal,
        transition_period: traj.transition_period,
        consistent: Some(consistent),
        diagnostics: None,
    })
}
