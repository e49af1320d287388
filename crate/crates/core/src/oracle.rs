//! Brute-force backward induction over a discretized game tree.
//!
//! Elite size and efforts live on finite grids; stage three is decided by
//! comparing the two elite payoffs directly. Nothing here calls the
//! closed-form solver except to compare against it at the end.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{self, EquilibriumOutcome, GameParams, Institution};
use crate::production::ProductionSpec;

/// Discretization of the game tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Points on `[E0, N]`; `1/G` is injected on top of these.
    pub e_steps: usize,
    pub i_max: f64,
    /// Points on `[0, i_max]`.
    pub i_steps: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.e_steps < 2 {
            return Err(Error::param("e_steps", "e_steps must be >= 2"));
        }
        if self.i_steps < 2 {
            return Err(Error::param("i_steps", "i_steps must be >= 2"));
        }
        if !(self.i_max > 0.0 && self.i_max.is_finite()) {
            return Err(Error::param("i_max", "i_max must be > 0"));
        }
        Ok(())
    }

    /// Default effort bound: four times the interior elite FOC solution, or
    /// 1 at a corner.
    pub fn default_i_max(p: &GameParams) -> Result<f64> {
        let i_e = p.production.invert_prime(1.0 / p.a)?;
        Ok(if i_e > 0.0 { 4.0 * i_e } else { 1.0 })
    }

    /// Grid with the default effort bound and effort spacing at most
    /// `max_effort_step`.
    pub fn with_max_effort_step(p: &GameParams, e_steps: usize, max_effort_step: f64) -> Result<Self> {
        let i_max = Self::default_i_max(p)?;
        let i_steps = (i_max / max_effort_step).ceil() as usize + 1;
        Ok(GridSpec {
            e_steps,
            i_max,
            i_steps: i_steps.max(2),
        })
    }

    pub fn effort_step(&self) -> f64 {
        self.i_max / (self.i_steps - 1) as f64
    }

    pub fn elite_step(&self, p: &GameParams) -> f64 {
        (p.n_f64() - p.e0) / (self.e_steps - 1) as f64
    }

    /// Uniform grid on `[E0, N]` with `1/G` injected when it lies inside.
    pub fn elite_grid(&self, p: &GameParams) -> Vec<f64> {
        let n = p.n_f64();
        let mut grid: Vec<f64> = (0..self.e_steps)
            .map(|k| {
                if k == self.e_steps - 1 {
                    n
                } else {
                    p.e0 + (n - p.e0) * k as f64 / (self.e_steps - 1) as f64
                }
            })
            .collect();
        let knife = 1.0 / p.g;
        if knife >= p.e0 && knife <= n {
            grid.push(knife);
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }
}

/// Outcome of the brute-force solve and its comparison with the closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub e_star_grid: f64,
    pub v_star: Institution,
    pub i_e_grid: f64,
    pub i_d_grid: f64,
    pub pi_e_grid: f64,
    pub pi_d_grid: f64,
    pub agrees: bool,
    pub max_payoff_gap: f64,
    pub payoff_tolerance: f64,
    pub elite_step: f64,
    pub effort_step: f64,
    #[serde(skip)]
    pub analytic: EquilibriumOutcome,
    /// Elite payoff at every elite-size grid point, in grid order.
    #[serde(skip)]
    pub elite_payoff_curve: Vec<(f64, f64)>,
}

/// Effort grid with `f` tabulated once.
struct EffortTable {
    effort: Vec<f64>,
    output: Vec<f64>,
}

impl EffortTable {
    fn new(spec: &ProductionSpec, grid: &GridSpec) -> Self {
        let step = grid.effort_step();
        let effort: Vec<f64> = (0..grid.i_steps)
            .map(|k| if k == grid.i_steps - 1 { grid.i_max } else { k as f64 * step })
            .collect();
        let output = effort.iter().map(|&i| spec.eval_unchecked(i)).collect();
        EffortTable { effort, output }
    }

    /// First index maximizing `obj(effort, f(effort))`.
    fn argmax(&self, mut obj: impl FnMut(f64, f64) -> f64) -> usize {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (k, (&i, &fi)) in self.effort.iter().zip(&self.output).enumerate() {
            let v = obj(i, fi);
            if v > best_val {
                best_val = v;
                best = k;
            }
        }
        best
    }
}

/// Stage-three comparison on payoffs. Ties (to rounding) go to `Public`.
fn prefers_public(n: f64, e: f64, g: f64, r_d: f64) -> bool {
    let public = (n - e) * r_d * g;
    let steal = (n - e) * r_d / e;
    public >= steal - 8.0 * f64::EPSILON * public.abs().max(steal.abs())
}

struct Node {
    e: f64,
    v: Institution,
    i_e: f64,
    i_d: f64,
    pi_e: f64,
    pi_d: f64,
}

fn solve_node(p: &GameParams, table: &EffortTable, k_e: usize, e: f64) -> Node {
    let n = p.n_f64();
    let k_d = table.argmax(|i, fi| {
        let r_d = p.a * fi + p.m;
        if prefers_public(n, e, p.g, r_d) {
            p.g * p.a * fi - i
        } else {
            -i
        }
    });
    let (i_e, f_e) = (table.effort[k_e], table.output[k_e]);
    let (i_d, f_d) = (table.effort[k_d], table.output[k_d]);
    let r_e = p.a * f_e + p.m;
    let r_d = p.a * f_d + p.m;
    let v = if prefers_public(n, e, p.g, r_d) {
        Institution::Public
    } else {
        Institution::Steal
    };
    let (pi_e, pi_d) = match v {
        Institution::Public => ((n - e) * r_d * p.g + r_e - i_e, (n - e) * r_d * p.g - i_d),
        Institution::Steal => ((n - e) * r_d / e + r_e - i_e, -i_d),
    };
    Node { e, v, i_e, i_d, pi_e, pi_d }
}

fn elite_effort_index(p: &GameParams, table: &EffortTable) -> usize {
    table.argmax(|i, fi| p.a * fi - i)
}

/// Grid best responses in stage two for elite size `e`.
pub fn stage2_best_responses(p: &GameParams, e: f64, grid: &GridSpec) -> Result<(f64, f64)> {
    p.validate()?;
    grid.validate()?;
    let table = EffortTable::new(&p.production, grid);
    let k_e = elite_effort_index(p, &table);
    let node = solve_node(p, &table, k_e, e);
    Ok((node.i_e, node.i_d))
}

/// Largest change of `obj` from moving `x` by one step `h` either way.
fn one_step_change(obj: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let at = obj(x);
    let up = (obj(x + h) - at).abs();
    let down = (at - obj((x - h).max(0.0))).abs();
    up.max(down)
}

fn payoff_tolerance(p: &GameParams, analytic: &EquilibriumOutcome, h: f64) -> f64 {
    let f = |i: f64| p.production.eval_unchecked(i);
    let pool = (p.n_f64() - analytic.e_star) * p.g * p.a;
    let own_e = one_step_change(|i| p.a * f(i) - i, analytic.i_e, h);
    let pool_d = if analytic.v_star == Institution::Public {
        pool * one_step_change(f, analytic.i_d, h)
    } else {
        0.0
    };
    let bound = (own_e + pool_d).max(pool_d + h);
    2.0 * bound + 1e-12 * (1.0 + analytic.pi_e.abs())
}

/// Backward induction over the discretized game, compared with the closed
/// form. Elite-size ties resolve to the smallest size.
pub fn solve_by_backward_induction(p: &GameParams, grid: &GridSpec) -> Result<OracleReport> {
    p.validate()?;
    grid.validate()?;
    let table = EffortTable::new(&p.production, grid);
    let k_e = elite_effort_index(p, &table);

    let nodes: Vec<Node> = grid
        .elite_grid(p)
        .into_par_iter()
        .map(|e| solve_node(p, &table, k_e, e))
        .collect();

    let mut best = &nodes[0];
    for node in &nodes[1..] {
        if node.pi_e > best.pi_e {
            best = node;
        }
    }

    let analytic = game::solve_equilibrium(p)?;
    let elite_step = grid.elite_step(p);
    let effort_step = grid.effort_step();
    let max_payoff_gap = (best.pi_e - analytic.pi_e)
        .abs()
        .max((best.pi_d - analytic.pi_d).abs());
    let tol = payoff_tolerance(p, &analytic, effort_step);
    let agrees = best.v == analytic.v_star
        && (best.e - analytic.e_star).abs() <= elite_step
        && (best.pi_e - analytic.pi_e).abs() <= tol;

    Ok(OracleReport {
        e_star_grid: best.e,
        v_star: best.v,
        i_e_grid: best.i_e,
        i_d_grid: best.i_d,
        pi_e_grid: best.pi_e,
        pi_d_grid: best.pi_d,
        agrees,
        max_payoff_gap,
        payoff_tolerance: tol,
        elite_step,
        effort_step,
        analytic,
        elite_payoff_curve: nodes.iter().map(|n| (n.e, n.pi_e)).collect(),
    })
}

/// Draws a valid parameter set: `N` in 3..=20, `G` uniform on `(1/N, 1)`,
/// `E0` uniform on `(0, 1/G)`, `M` on `[0.1, 5]`, `A` on `[0.5, 5]`, and
/// one of the three production families.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> GameParams {
    let n: u32 = rng.gen_range(3..=20);
    let lo = 1.0 / n as f64;
    let g = loop {
        let g = rng.gen_range(lo..1.0);
        if g > lo {
            break g;
        }
    };
    let e0 = loop {
        let e0 = rng.gen_range(0.0..1.0 / g);
        if e0 > 0.0 && !game::commits_to_public(e0, g) {
            break e0;
        }
    };
    let production = match rng.gen_range(0..3) {
        0 => ProductionSpec::isoelastic(rng.gen_range(0.3..0.6)),
        1 => ProductionSpec::Log,
        _ => ProductionSpec::saturating(rng.gen_range(0.5..3.0)),
    };
    GameParams {
        n,
        e0,
        m: rng.gen_range(0.1..=5.0),
        a: rng.gen_range(0.5..=5.0),
        g,
        production,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(m: f64) -> GameParams {
        GameParams {
            n: 10,
            e0: 1.0,
            m,
            a: 2.0,
            g: 0.5,
            production: ProductionSpec::isoelastic(0.5),
        }
    }

    fn grid(p: &GameParams) -> GridSpec {
        GridSpec::with_max_effort_step(p, 500, 1e-3).unwrap()
    }

    #[test]
    fn grid_validation() {
        let g = GridSpec { e_steps: 1, i_max: 1.0, i_steps: 10 };
        assert!(g.validate().is_err());
        let g = GridSpec { e_steps: 10, i_max: 0.0, i_steps: 10 };
        assert!(g.validate().is_err());
    }

    #[test]
    fn knife_edge_is_injected() {
        let p = base(0.5).with_g(0.3);
        let g = GridSpec { e_steps: 5, i_max: 1.0, i_steps: 3 };
        let es = g.elite_grid(&p);
        assert!(es.contains(&(1.0 / 0.3)));
        assert_eq!(es.len(), 6);
        assert!(es.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn best_responses_follow_focs() {
        let p = base(0.5);
        let gs = grid(&p);
        let (i_e, i_d) = stage2_best_responses(&p, 2.0, &gs).unwrap();
        assert!((i_d - 0.25).abs() <= 1e-3);
        assert!((i_e - 1.0).abs() <= gs.effort_step());
        let (_, i_d) = stage2_best_responses(&p, 1.5, &gs).unwrap();
        assert_eq!(i_d, 0.0);
        for e in [1.0, 3.0, 9.5] {
            let (i_e, _) = stage2_best_responses(&p, e, &gs).unwrap();
            assert!((i_e - 1.0).abs() <= gs.effort_step());
        }
    }

    #[test]
    fn reproduces_inclusive_example() {
        let p = base(0.5);
        let r = solve_by_backward_induction(&p, &grid(&p)).unwrap();
        assert!(r.agrees, "{r:?}");
        assert_eq!(r.e_star_grid, 2.0);
        assert_eq!(r.v_star, Institution::Public);
    }

    #[test]
    fn reproduces_extractive_example() {
        let p = base(2.0);
        let r = solve_by_backward_induction(&p, &grid(&p)).unwrap();
        assert!(r.agrees);
        assert_eq!(r.e_star_grid, 1.0);
        assert_eq!(r.v_star, Institution::Steal);
    }

    #[test]
    fn no_commitment_problem_case() {
        let p = base(0.5).with_e0(3.0);
        let r = solve_by_backward_induction(&p, &grid(&p)).unwrap();
        assert!(r.agrees);
        assert_eq!(r.e_star_grid, 3.0);
        assert_eq!(r.v_star, Institution::Public);
    }

    #[test]
    fn random_params_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = random_params(&mut rng);
            p.validate().unwrap();
            assert!(!p.no_commitment_problem());
        }
    }
}
