//! Adaptive Simpson quadrature over finite intervals and boxes.
//!
//! Used as an independent cross-check on closed-form masses and perimeters:
//! the integrands are smooth (sums of Gaussians), so Simpson's rule with
//! the standard `(S_fine - S_coarse) / 15` error estimate converges fast
//! and the requested tolerance is reliable in practice.

const MAX_DEPTH: u32 = 50;

/// Integrates `f` over `[a, b]` with absolute error target `tol`.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Integrates `f(x, y)` over the box `[ax, bx] x [ay, by]` with absolute
/// error target roughly `tol`, as an iterated 1-D integral with a tighter
/// inner tolerance.
pub fn integrate_2d<F>(f: &F, ax: f64, bx: f64, ay: f64, by: f64, tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let width = (bx - ax).abs().max(1.0);
    let inner_tol = 0.1 * tol / width;
    integrate(
        &|x: f64| integrate(&|y: f64| f(x, y), ay, by, inner_tol),
        ax,
        bx,
        tol,
    )
}
