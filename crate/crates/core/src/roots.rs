//! Inversion of increasing functions.

/// Solves `f(x) = target` for increasing `f` on the bracket `[lo, hi]` by
/// Newton steps, falling back to bisection whenever a step leaves the bracket.
/// `f` returns `(value, derivative)`.
pub fn invert_increasing<F>(f: F, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo > target || fhi < target {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        let r = fx - target;
        if r.abs() <= tol {
            return Some(x);
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - r / dfx;
        x = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * x.abs().max(1.0) {
            return Some(x);
        }
    }
    let (fx, _) = f(x);
    ((fx - target).abs() <= tol * 1e3).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_cubic() {
        let f = |x: f64| (x * x * x + x, 3.0 * x * x + 1.0);
        let x = invert_increasing(f, 10.0, -10.0, 10.0, 1e-14).unwrap();
        assert!((x - 2.0).abs() < 1e-13);
    }

    #[test]
    fn bisection_fallback_on_flat_derivative() {
        // derivative vanishes at 0, Newton from the midpoint would blow up
        let f = |x: f64| (x * x * x, 3.0 * x * x);
        let x = invert_increasing(f, 1e-9, -1.0, 1.0, 1e-15).unwrap();
        assert!((x - 1e-3).abs() < 1e-9);
    }

    #[test]
    fn target_outside_bracket() {
        let f = |x: f64| (x, 1.0);
        assert!(invert_increasing(f, 5.0, 0.0, 1.0, 1e-12).is_none());
    }
}
