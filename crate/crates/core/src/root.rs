//! Bracketing root finders shared by the solvers.

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]`, which must bracket a sign change of `f`.
///
/// Stops when the bracket is narrower than `abs_tol`, when the residual is
/// exactly zero, or after `max_iter` halvings. Returns the endpoint with the
/// smaller residual. `None` when the bracket holds no sign change.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, abs_tol: f64, max_iter: usize) -> Option<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(Root { x: lo, residual: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Some(Root { x: hi, residual: 0.0, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }

    let mut iterations = 0;
    while iterations < max_iter && hi - lo > abs_tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            return Some(Root { x: mid, residual: 0.0, iterations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }

    let (x, residual) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    Some(Root { x, residual, iterations })
}

/// Bisection for the smallest point where a nondecreasing-sign predicate holds.
///
/// `pred(lo)` must be false and `pred(hi)` true; returns a point `x` with
/// `pred(x)` true and `x - abs_tol` (approximately) failing it.
pub fn bisect_predicate<P>(mut pred: P, lo: f64, hi: f64, abs_tol: f64, max_iter: usize) -> f64
where
    P: FnMut(f64) -> bool,
{
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..max_iter {
        if hi - lo <= abs_tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Geometric grid of `n` points on `[lo, hi]`, both endpoints included.
pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > lo && n >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn no_sign_change_is_none() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn exact_endpoint_root() {
        let r = bisect(|x| x - 1.0, 1.0, 3.0, 1e-12, 100).unwrap();
        assert_eq!(r.x, 1.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn predicate_boundary() {
        let x = bisect_predicate(|x| x >= 0.3, 0.0, 1.0, 1e-12, 200);
        assert!(x >= 0.3 && x - 0.3 < 1e-11);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 1e3, 7);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[6], 1e3);
        assert!((g[3] - 1.0).abs() < 1e-12);
    }
}
