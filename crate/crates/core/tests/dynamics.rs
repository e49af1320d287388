mod common;

use common::*;
use franchise_core::dynamics::{
    self, classify_long_run, high_steady_states, low_steady_states, regime_map, simulate, DynParams, LongRun,
    Regime, Stability, Terminal,
};
use franchise_core::game::solve_equilibrium;
use franchise_core::{GameParams, Institution, ProductionSpec};

fn saturating(m: f64, a1: f64) -> DynParams {
    let base = GameParams {
        n: 10,
        e0: 2.0,
        m,
        a: a1,
        g: 0.25,
        production: ProductionSpec::saturating(1.0),
    };
    DynParams::new(base, 0.2, 0.5)
}

/// Low fixed points from `x^2 - 5x + 5 = 0` with `x = sqrt(A)`.
fn low_roots() -> (f64, f64) {
    let q = |x: f64| x * x - 5.0 * x + 5.0;
    let r1 = bisect(q, 1.0, 2.5, 1e-15);
    let r2 = bisect(q, 2.5, 5.0, 1e-15);
    (r1 * r1, r2 * r2)
}

#[test]
fn low_fixed_points_match_quadratic() {
    let (lo, hi) = low_roots();
    assert!((lo - 1.9098).abs() < 1e-4 && (hi - 13.0902).abs() < 1e-4);
    let report = low_steady_states(&saturating(50.0, 5.0)).unwrap();
    let fps = &report.fixed_points;
    assert_eq!(fps.len(), 2);
    assert!((fps[0].a - lo).abs() < 1e-9 && fps[0].stability == Stability::Unstable);
    assert!((fps[1].a - hi).abs() < 1e-9 && fps[1].stability == Stability::Stable);
    for fp in fps {
        assert!(fp.residual.abs() < 1e-8);
        let t = regime_map(&saturating(50.0, 5.0), Regime::Low, fp.a).unwrap();
        assert!((t - fp.a).abs() < 1e-8);
    }
    assert!((fps[0].slope - 1.0 - 0.5 / lo.sqrt() + 0.2).abs() < 1e-5);
    assert!((fps[1].slope - 1.0 - 0.5 / hi.sqrt() + 0.2).abs() < 1e-5);
}

#[test]
fn high_fixed_point_above_low() {
    let p = saturating(50.0, 5.0);
    let low = low_steady_states(&p).unwrap();
    let high = high_steady_states(&p).unwrap();
    let low_ss = low.stable().next().unwrap().a;
    let high_ss = high.stable().next().unwrap().a;
    assert!(high_ss > low_ss);
    for a in geomspace(0.5, 1e3, 50) {
        assert!(regime_map(&p, Regime::High, a).unwrap() >= regime_map(&p, Regime::Low, a).unwrap());
    }
}

#[test]
fn high_fixed_point_grows_with_population() {
    let stable_high = |n: u32| {
        let mut p = saturating(50.0, 5.0);
        p.base.n = n;
        p.base.g = 0.9;
        p.base.e0 = 1.0;
        high_steady_states(&p).unwrap().stable().next().unwrap().a
    };
    assert!(stable_high(20) > stable_high(10));
}

#[test]
fn stable_points_reattract() {
    let p = saturating(50.0, 5.0);
    for regime in [Regime::Low, Regime::High] {
        let report = match regime {
            Regime::Low => low_steady_states(&p),
            Regime::High => high_steady_states(&p),
        }
        .unwrap();
        for fp in report.stable() {
            for start in [0.95 * fp.a, 1.05 * fp.a] {
                let mut a = start;
                let mut hit = false;
                for _ in 0..p.t_max {
                    a = regime_map(&p, regime, a).unwrap();
                    if (a - fp.a).abs() < p.conv_tol {
                        hit = true;
                        break;
                    }
                }
                assert!(hit, "{regime:?} from {start} ended at {a}");
            }
        }
    }
}

#[test]
fn blocked_extension_settles_at_low_point() {
    let (_, hi) = low_roots();
    for a1 in [5.0, 20.0] {
        let traj = simulate(&saturating(50.0, a1)).unwrap();
        match traj.terminal {
            Terminal::Converged { a_final } => assert!((a_final - hi).abs() < 1e-6),
            t => panic!("{t:?}"),
        }
        assert_eq!(traj.transition_period, None);
        assert!(traj.periods.iter().all(|r| r.v == Institution::Steal && r.e == 2.0));
    }
}

#[test]
fn transition_is_first_period_over_threshold() {
    let traj = simulate(&saturating(1.0, 5.0)).unwrap();
    let t_star = traj.transition_period.unwrap();
    let rec = &traj.periods[t_star - 1];
    assert!(rec.threshold_lhs >= 1.0);
    assert!(t_star > 1 && traj.periods[t_star - 2].threshold_lhs < 1.0);
    assert_eq!(rec.e, 4.0);
    for r in &traj.periods[t_star - 1..] {
        assert_eq!(r.e, 4.0);
        assert_eq!(r.i_bar, r.e * r.i_e + (10.0 - r.e) * r.i_d);
        assert!(r.i_d > 0.0);
    }
    for r in &traj.periods[..t_star - 1] {
        assert_eq!(r.i_bar, 2.0 * r.i_e);
    }
}

#[test]
fn bookkeeping() {
    for (m, a1) in [(1.0, 5.0), (0.2, 2.0), (5.0, 10.0), (50.0, 20.0)] {
        let p = saturating(m, a1);
        let traj = simulate(&p).unwrap();
        for w in traj.periods.windows(2) {
            assert_eq!(w[1].a, p.law_of_motion(w[0].a, w[0].i_bar));
            assert!(w[1].e >= w[0].e);
            assert_eq!(w[1].e0, w[0].e);
        }
        for r in &traj.periods {
            let o = solve_equilibrium(&p.base.with_a(r.a).with_e0(r.e0)).unwrap();
            assert_eq!((r.e, r.v, r.i_e, r.i_d, r.y), (o.e_star, o.v_star, o.i_e, o.i_d, o.y));
            assert_eq!(r.threshold_lhs, o.threshold_lhs);
        }
        let mut a_rising = true;
        let mut seen_over = false;
        for w in traj.periods.windows(2) {
            a_rising &= w[1].a >= w[0].a;
            seen_over |= w[0].threshold_lhs >= 1.0 || w[0].v == Institution::Public;
            if a_rising && seen_over {
                assert_eq!(w[1].v, Institution::Public);
            }
        }
    }
}

#[test]
fn pure_decay_collapses() {
    let mut p = saturating(50.0, 5.0);
    p.a_coef = 0.0;
    let traj = simulate(&p).unwrap();
    assert_eq!(traj.terminal, Terminal::CollapsedToZero);
    assert_eq!(traj.transition_period, None);
    for w in traj.periods.windows(2) {
        assert_eq!(w[1].a, 0.8 * w[0].a);
    }
    assert!(low_steady_states(&p).unwrap().fixed_points.is_empty());
    assert!(high_steady_states(&p).unwrap().fixed_points.is_empty());
    assert_eq!(classify_long_run(&p).unwrap().classification, LongRun::Indeterminate);
}

#[test]
fn corner_regime_has_no_fixed_points() {
    let mut p = saturating(50.0, 0.5);
    p.base.production = ProductionSpec::saturating(1e-12);
    assert!(low_steady_states(&p).unwrap().fixed_points.is_empty());
}

#[test]
fn poverty_trap_grid() {
    for a1 in [5.0, 10.0] {
        let trap = classify_long_run(&saturating(5.0, a1)).unwrap();
        assert_eq!(trap.classification, LongRun::LowTrap);
        assert!(trap.criterion.unwrap() < 1.0);
        assert_eq!(trap.transition_period, None);
        assert_eq!(trap.consistent, Some(true));

        let go = classify_long_run(&saturating(1.0, a1)).unwrap();
        assert_eq!(go.classification, LongRun::TransitionExpected);
        assert!(go.criterion.unwrap() >= 1.0);
        assert!(go.transition_period.is_some());
        assert_eq!(go.consistent, Some(true));
    }
    let low_m = classify_long_run(&saturating(0.2, 5.0)).unwrap();
    assert_eq!(low_m.classification, LongRun::TransitionExpected);
}

#[test]
fn invalid_params() {
    let mut p = saturating(1.0, 5.0);
    p.delta = 1.0;
    assert_eq!(simulate(&p).unwrap_err().code(), "constraint_violation");
    assert_eq!(dynamics::step(&saturating(1.0, 5.0), -1.0, 2.0).unwrap_err().code(), "domain_error");
}
