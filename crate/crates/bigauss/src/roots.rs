//! Bracketed scalar root finding with Brent's method.
//!
//! Every root this crate needs lives on an interval where the target
//! function is continuous and changes sign, so a bracketing method gives
//! guaranteed convergence. Brent's method combines bisection with secant
//! and inverse-quadratic steps and never leaves the bracket; it reaches
//! 1e-12 accuracy in a few dozen evaluations for all the functions here.

/// Failure modes of [`find_root`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    /// The endpoint values do not straddle zero, so no root is guaranteed
    /// inside the interval.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    /// The function returned NaN or infinity inside the bracket.
    #[error("function value is not finite at x = {x}")]
    NonFinite { x: f64 },
    /// The iteration cap was reached before the bracket shrank to
    /// tolerance; `last` is the best estimate found.
    #[error("no convergence after {iterations} iterations, last x = {last}")]
    IterationLimit { iterations: usize, last: f64 },
}

const MAX_ITERATIONS: usize = 200;

/// Finds a root of `f` inside `[lo, hi]` to absolute accuracy about `tol`.
///
/// Requires `f(lo)` and `f(hi)` to have opposite signs (an endpoint value
/// of exactly zero is returned immediately). The returned point `x`
/// satisfies `|x - root| <= 2 * tol + 4 * eps * |x|` for some true root in
/// the interval.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
{
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(RootError::NonFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(RootError::NonFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt secant (two points) or inverse quadratic
            // interpolation (three points).
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let accept = 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min(e.abs() * q.abs());
            if accept {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else if xm > 0.0 {
            tol1
        } else {
            -tol1
        };
        fb = f(b);
        if !fb.is_finite() {
            return Err(RootError::NonFinite { x: b });
        }
    }
    Err(RootError::IterationLimit {
        iterations: MAX_ITERATIONS,
        last: b,
    })
}

#[cfg(test)]
mod tests {
    use super::{find_root, RootError};

    #[test]
    fn finds_simple_polynomial_roots() {
        let r = find_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2.0f64.sqrt()).abs() < 1e-13);

        let r = find_root(|x| x * x * x - x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r * r * r - r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn finds_transcendental_roots() {
        let r = find_root(|x| x.cos() - x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.7390851332151607).abs() < 1e-13);

        let r = find_root(|x| x.exp() - 3.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 3.0f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn handles_exact_endpoint_roots() {
        assert_eq!(find_root(|x| x, 0.0, 1.0, 1e-12).unwrap(), 0.0);
        assert_eq!(find_root(|x| x - 1.0, 0.0, 1.0, 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn rejects_unbracketed_intervals() {
        let err = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, RootError::NoBracket { .. }));
    }

    #[test]
    fn rejects_non_finite_values() {
        let err = find_root(|x| if x < 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, RootError::NonFinite { .. }));
    }

    #[test]
    fn survives_steep_and_flat_functions() {
        // Steep: tanh(50 (x - 0.3)).
        let r = find_root(|x| (50.0 * (x - 0.3)).tanh(), 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.3).abs() < 1e-12);

        // Flat near the root: (x - 0.4)^3.
        let r = find_root(|x| (x - 0.4) * (x - 0.4) * (x - 0.4), 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.4).abs() < 1e-4);
    }

    #[test]
    fn respects_the_bracket() {
        // A function with several roots outside the bracket: the returned
        // root must be the one inside.
        let f = |x: f64| (x * std::f64::consts::PI).sin();
        let r = find_root(f, 0.5, 1.5, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }
}
