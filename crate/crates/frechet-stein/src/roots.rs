//! Bracketed root isolation and refinement.
//!
//! `find_sign_changes` probes a grid, records every sign change, and
//! refines each bracket by bisection to 1e-13 relative width. Roots that
//! fall between adjacent probes without a sign change are missed; callers
//! control the probe density through `QuadratureConfig::probe_points`.

const REL_WIDTH: f64 = 1e-13;
const ABS_FLOOR: f64 = 1e-300;

/// Roots of a continuous function on (a, b), isolated by sign changes on a
/// probe grid. `b` may be infinite; positive ranges are probed
/// log-uniformly, everything else uniformly. Returned sorted ascending.
pub fn find_sign_changes<F: Fn(f64) -> f64>(s: F, a: f64, b: f64, probes: usize) -> Vec<f64> {
    let grid = probe_grid(a, b, probes.max(2));
    find_sign_changes_on_grid(&s, &grid)
}

/// Same isolation/refinement, but on a caller-supplied grid (the
/// discrepancy integrands probe quantile-spaced grids of the integrating
/// measure rather than x-uniform ones).
pub fn find_sign_changes_on_grid<F: Fn(f64) -> f64>(s: &F, grid: &[f64]) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let v = s(x);
        if !v.is_finite() {
            prev = None;
            continue;
        }
        if v == 0.0 {
            // an exact zero is a root only when approached from a nonzero
            // value; identically-zero stretches contribute nothing
            if prev.is_some() {
                roots.push(x);
            }
            prev = None;
            continue;
        }
        if let Some((px, pv)) = prev {
            if (pv < 0.0) != (v < 0.0) {
                roots.push(bisect(s, px, x, pv));
            }
        }
        prev = Some((x, v));
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

fn probe_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let lo = if a.is_finite() { a } else { -1e12 };
    if b.is_finite() && lo > 0.0 && b / lo < 1e3 {
        // narrow positive range: uniform is fine
        return (0..n)
            .map(|i| lo + (b - lo) * (i as f64 + 0.5) / n as f64)
            .collect();
    }
    if lo >= 0.0 {
        let log_lo = if lo > 0.0 { lo.ln() } else { (1e-12f64).ln() };
        let log_hi = if b.is_finite() { b.ln() } else { (1e12f64).ln() };
        return (0..n)
            .map(|i| (log_lo + (log_hi - log_lo) * (i as f64 + 0.5) / n as f64).exp())
            .collect();
    }
    let hi = if b.is_finite() { b } else { 1e12 };
    (0..n)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
        .collect()
}

/// Bisection refinement of a sign-change bracket to 1e-13 relative width.
fn bisect<F: Fn(f64) -> f64>(s: &F, mut lo: f64, mut hi: f64, v_lo: f64) -> f64 {
    let lo_negative = v_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= REL_WIDTH * mid.abs() + ABS_FLOOR {
            return mid;
        }
        let v = s(mid);
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Invert a strictly decreasing function: the x in [lo, hi] with
/// f(x) = target, to 1e-12 relative. Used for survival-function quantiles
/// and the numeric path of the scaling sequence. The bracket is grown
/// geometrically above `lo` when `hi` is not supplied.
pub fn invert_decreasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    lo: f64,
    hi: Option<f64>,
) -> crate::error::Result<f64> {
    let mut lo = lo;
    let mut hi = match hi {
        Some(h) => h,
        None => {
            let mut h = if lo > 0.0 { lo * 2.0 } else { lo + 1.0 };
            let mut tries = 0;
            while f(h) > target {
                lo = h;
                h = if h > 0.0 { h * 4.0 } else { h + 2.0_f64.powi(tries) };
                tries += 1;
                if tries > 2100 || !h.is_finite() {
                    return Err(crate::error::Error::Inversion(format!(
                        "bracketing failed: f stays above {target} out to {h}"
                    )));
                }
            }
            h
        }
    };
    if f(lo) < target {
        return Err(crate::error::Error::Inversion(format!(
            "bracketing failed: f({lo}) already below {target}"
        )));
    }
    for _ in 0..300 {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-13 * mid.abs() + ABS_FLOOR {
            return Ok(mid);
        }
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root_found() {
        let roots = find_sign_changes(|x| x - 1.0, 0.0, 2.0, 64);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_has_no_roots() {
        let roots = find_sign_changes(|_| 1.0, 0.0, 10.0, 64);
        assert!(roots.is_empty());
    }

    #[test]
    fn multiple_roots_sorted() {
        let pi = std::f64::consts::PI;
        let roots = find_sign_changes(|x| x.sin(), 0.5, 10.0, 256);
        assert_eq!(roots.len(), 3);
        for (r, expect) in roots.iter().zip([pi, 2.0 * pi, 3.0 * pi]) {
            assert!((r - expect).abs() < 1e-10 * expect, "{r} vs {expect}");
        }
    }

    #[test]
    fn roots_have_small_residual() {
        let s = |x: f64| (x.ln() + 0.3).tanh() - 0.2;
        for r in find_sign_changes(s, 0.0, f64::INFINITY, 256) {
            let scale = s(r * 1.01).abs().max(s(r * 0.99).abs()).max(1e-30);
            assert!(s(r).abs() <= 1e-9 * scale.max(1.0), "residual too large at {r}");
        }
    }

    #[test]
    fn invert_decreasing_survival_like() {
        // survival of a Pareto(2): x^{-2}
        let x = invert_decreasing(|x: f64| x.powi(-2), 1e-4, 1.0, None).unwrap();
        assert!((x - 100.0).abs() < 1e-9 * 100.0);
    }

    #[test]
    fn invert_decreasing_rejects_bad_bracket() {
        assert!(invert_decreasing(|x: f64| -x, 5.0, 1.0, Some(2.0)).is_err());
    }
}
