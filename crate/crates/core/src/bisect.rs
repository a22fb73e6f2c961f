use crate::error::{Error, Result};

/// Final bracket of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bracketed {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Bisection for a function that is positive left of its zero and negative
/// right of it on `[lo, hi]`. The endpoint signs are taken as given and
/// never evaluated.
pub(crate) fn bisect_sign_change<F>(
    what: &'static str,
    mut lo: f64,
    mut hi: f64,
    width_tol: f64,
    max_iters: usize,
    mut f: F,
) -> Result<Bracketed>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut iterations = 0;
    while hi - lo > width_tol {
        if iterations >= max_iters {
            return Err(Error::Budget {
                what,
                limit: max_iters,
                last_bound: hi - lo,
            });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(Bracketed {
                root: mid,
                lo: mid,
                hi: mid,
                iterations,
            });
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bracketed {
        root: 0.5 * (lo + hi),
        lo,
        hi,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let b = bisect_sign_change("t", 0.0, 2.0, 1e-14, 200, |x| Ok(2.0 - x * x)).unwrap();
        assert!((b.root - 2f64.sqrt()).abs() < 1e-14);
        assert!(b.lo <= b.root && b.root <= b.hi);
        assert!(b.iterations <= 48);
    }

    #[test]
    fn reports_iteration_budget() {
        let err = bisect_sign_change("t", 0.0, 1.0, 1e-14, 5, |x| Ok(0.3 - x)).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn propagates_errors() {
        let err = bisect_sign_change("t", 0.0, 1.0, 1e-3, 50, |_| Err(Error::domain("x")));
        assert!(matches!(err, Err(Error::Domain(_))));
    }
}
