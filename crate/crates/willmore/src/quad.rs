//! Adaptive Simpson quadrature for smooth one-dimensional profiles.
//!
//! Used wherever a generator or immersion has an analytic radial/angular
//! profile: integrating it in 1D is far more accurate than pushing the same
//! quantity through the 2D sampled pipeline, so these integrals double as
//! oracles for the grid measurements.

/// Integrates `f` over `[a, b]` by adaptive Simpson refinement until the
/// local Richardson error estimate drops below `tol` (distributed over the
/// subintervals). The interval is pre-split into 64 panels so moderately
/// localized features are seen before adaptivity takes over; integrands with
/// much narrower structure should be integrated piecewise between their
/// known breakpoints. Recursion is depth-capped, so a hostile integrand
/// degrades accuracy rather than the stack.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = 64;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == panels { b } else { lo + h };
        total += adaptive_panel(f, lo, hi, tol / panels as f64);
    }
    total
}

fn adaptive_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
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
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            return left + right + err / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    rec(f, a, b, fa, fm, fb, whole, tol, 42)
}
