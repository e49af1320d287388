#![allow(dead_code)]

use franchise_core::{GameParams, ProductionSpec};

/// Plain bisection for a sign change of `f` on `[lo, hi]`, kept separate from
/// the library's root finder so it can serve as an oracle.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    assert!(f_lo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `f` written out by hand, independent of the library.
pub fn f_ref(spec: &ProductionSpec, i: f64) -> f64 {
    match *spec {
        ProductionSpec::Isoelastic { beta } => i.powf(beta),
        ProductionSpec::Log => i.ln_1p(),
        ProductionSpec::Saturating { kappa } => kappa * i / (1.0 + i),
    }
}

pub fn f_prime_ref(spec: &ProductionSpec, i: f64) -> f64 {
    match *spec {
        ProductionSpec::Isoelastic { beta } => beta * i.powf(beta - 1.0),
        ProductionSpec::Log => 1.0 / (1.0 + i),
        ProductionSpec::Saturating { kappa } => kappa / ((1.0 + i) * (1.0 + i)),
    }
}

/// Effort solving `f'(I) = y` by bisection on the hand-written derivative.
pub fn invert_ref(spec: &ProductionSpec, y: f64) -> f64 {
    if !matches!(spec, ProductionSpec::Isoelastic { .. }) && y >= f_prime_ref(spec, 0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while f_prime_ref(spec, hi) >= y {
        hi *= 2.0;
    }
    bisect(|i| f_prime_ref(spec, i) - y, 0.0, hi, 1e-15 * hi.max(1.0))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// The worked example: N=10, E0=1, G=0.5, A=2, isoelastic with beta 0.5.
pub fn worked(m: f64) -> GameParams {
    GameParams {
        n: 10,
        e0: 1.0,
        m,
        a: 2.0,
        g: 0.5,
        production: ProductionSpec::isoelastic(0.5),
    }
}

pub fn families() -> Vec<ProductionSpec> {
    vec![
        ProductionSpec::isoelastic(0.3),
        ProductionSpec::isoelastic(0.5),
        ProductionSpec::isoelastic(0.8),
        ProductionSpec::Log,
        ProductionSpec::saturating(0.5),
        ProductionSpec::saturating(1.0),
        ProductionSpec::saturating(3.0),
    ]
}

/// Geometric grid of `n` points on `[lo, hi]`.
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}
