mod common;

use common::*;
use franchise_core::oracle::{self, GridSpec};
use franchise_core::{GameParams, Institution, ProductionSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fine(p: &GameParams) -> GridSpec {
    GridSpec::with_max_effort_step(p, 500, 1e-3).unwrap()
}

#[test]
fn worked_extension() {
    let p = worked(0.5);
    let r = oracle::solve_by_backward_induction(&p, &fine(&p)).unwrap();
    assert!(r.agrees);
    assert_eq!(r.e_star_grid, 2.0);
    assert_eq!(r.v_star, Institution::Public);
    assert!((r.pi_e_grid - 7.5).abs() < 1e-3);
    assert!((r.i_d_grid - 0.25).abs() <= r.effort_step);
}

#[test]
fn worked_extraction() {
    let p = worked(2.0);
    let r = oracle::solve_by_backward_induction(&p, &fine(&p)).unwrap();
    assert!(r.agrees);
    assert_eq!((r.e_star_grid, r.v_star), (1.0, Institution::Steal));
    assert_eq!(r.i_d_grid, 0.0);
}

#[test]
fn no_commitment_problem() {
    let p = worked(2.0).with_e0(3.0);
    let r = oracle::solve_by_backward_induction(&p, &fine(&p)).unwrap();
    assert!(r.agrees);
    assert_eq!((r.e_star_grid, r.v_star), (3.0, Institution::Public));
}

#[test]
fn stage2_best_responses() {
    let p = worked(1.0);
    let grid = fine(&p);
    let (i_e, i_d) = oracle::stage2_best_responses(&p, 2.0, &grid).unwrap();
    assert!((i_d - 0.25).abs() <= 1e-3);
    assert!((i_e - 1.0).abs() <= grid.effort_step());
    let (i_e, i_d) = oracle::stage2_best_responses(&p, 1.5, &grid).unwrap();
    assert_eq!(i_d, 0.0);
    assert!((i_e - 1.0).abs() <= grid.effort_step());
}

#[test]
fn elite_grid_injects_knife_edge() {
    let p = GameParams { g: 0.3, ..worked(1.0) };
    let grid = GridSpec { e_steps: 11, i_max: 1.0, i_steps: 11 };
    let e = grid.elite_grid(&p);
    assert!(e.contains(&(1.0 / 0.3)));
    assert_eq!(e.first(), Some(&1.0));
    assert_eq!(e.last(), Some(&10.0));
    assert!(e.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn elite_payoff_is_maximized_at_reported_point() {
    let p = worked(0.5);
    let r = oracle::solve_by_backward_induction(&p, &fine(&p)).unwrap();
    let best = r.elite_payoff_curve.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(best, r.pi_e_grid);
}

#[test]
fn random_draws_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let p = oracle::random_params(&mut rng);
        let r = oracle::solve_by_backward_induction(&p, &GridSpec::with_max_effort_step(&p, 200, 2e-3).unwrap())
            .unwrap();
        assert!(r.agrees, "{p:?}: {r:?}");
    }
}

#[test]
fn random_draws_are_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = [false; 3];
    for _ in 0..2000 {
        let p = oracle::random_params(&mut rng);
        p.validate().unwrap();
        assert!((3..=20).contains(&p.n));
        assert!(p.e0 > 0.0 && p.e0 * p.g < 1.0);
        assert!((0.1..=5.0).contains(&p.m) && (0.5..=5.0).contains(&p.a));
        seen[match p.production {
            ProductionSpec::Isoelastic { .. } => 0,
            ProductionSpec::Log => 1,
            ProductionSpec::Saturating { .. } => 2,
        }] = true;
    }
    assert_eq!(seen, [true; 3]);
}

#[test]
fn bad_grid_rejected() {
    let p = worked(1.0);
    let grid = GridSpec { e_steps: 1, i_max: 1.0, i_steps: 10 };
    assert_eq!(
        oracle::solve_by_backward_induction(&p, &grid).unwrap_err().code(),
        "constraint_violation"
    );
}
