//! Scalar root bracketing and quadrature for monotone catalog maps.

use super::AnalysisError;

/// Argument tolerance for every bisection.
pub const BISECTION_TOL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 500;
/// Bracket doublings tried before giving up.
pub const MAX_DOUBLINGS: usize = 200;
/// Absolute tolerance per integral.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Solves `f(x) = target` for strictly increasing `f` with range `R`.
///
/// The bracket starts at `[-1, 1]` and doubles outward until it straddles the
/// target; bisection then runs to `BISECTION_TOL` (relative above magnitude 1).
pub fn solve_increasing(f: impl Fn(f64) -> f64, target: f64) -> Result<f64, AnalysisError> {
    let g = |x: f64| f(x) - target;
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut doublings = 0;
    while g(lo) > 0.0 {
        if doublings == MAX_DOUBLINGS {
            return Err(AnalysisError::BracketFailure { target });
        }
        hi = lo;
        lo *= 2.0;
        doublings += 1;
    }
    while g(hi) < 0.0 {
        if doublings == MAX_DOUBLINGS {
            return Err(AnalysisError::BracketFailure { target });
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_TOL * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let v = g(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Adaptive Simpson integral of `f` over `[a, b]` (either orientation).
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
