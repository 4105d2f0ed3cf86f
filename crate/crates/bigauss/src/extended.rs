//! Double-double arithmetic: unevaluated pairs of `f64` giving roughly 106
//! bits (about 32 decimal digits) of working precision.
//!
//! Finite-difference validation of third log-density derivatives divides
//! function values by `h^3` with `h = 1e-5`; plain `f64` evaluation leaves
//! noise of order 1e-16 that the division amplifies to 1e-1. Carrying the
//! function values in double-double pushes that noise floor below 1e-15
//! after division, so truncation error is all that remains.
//!
//! The error-free transformations (`two_sum`, `two_prod`) and the
//! add/mul/div/sqrt algorithms follow the standard double-double recipes of
//! Dekker and of Hida, Li, and Bailey. `exp` uses argument reduction by
//! `ln 2` plus a Taylor series; `ln` and `sqrt` refine an `f64` seed with one
//! Newton step carried out in double-double.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// `ln 2` to double-double precision.
pub const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};

/// `2 * pi` to double-double precision.
pub const TWO_PI: Dd = Dd {
    hi: std::f64::consts::TAU,
    lo: 2.4492935982947064e-16,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Builds a pair without renormalizing; `hi` and `lo` must already be a
    /// valid non-overlapping pair (as all constants in this module are).
    pub const fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Rounds back to a single `f64`.
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Square root via an `f64` seed and one Newton step of
    /// `y <- (y + x/y) / 2` in double-double.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        if self.hi < 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        let y = Dd::from_f64(self.hi.sqrt());
        (y + self / y) * Dd::from_f64(0.5)
    }

    /// Exponential. Arguments above 709 overflow to infinity; arguments
    /// below -709 underflow to zero (their true values are below 1e-307 and
    /// irrelevant at this precision).
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -709.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2 * Dd::from_f64(k);
        let mut term = r;
        let mut sum = Dd::ONE + r;
        let mut n = 1.0;
        while term.hi.abs() > 1e-35 && n < 40.0 {
            n += 1.0;
            term = term * r / Dd::from_f64(n);
            sum = sum + term;
        }
        let scale = 2.0f64.powi(k as i32);
        Dd {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }

    /// Natural logarithm via an `f64` seed and two Newton steps of
    /// `y <- y + x * exp(-y) - 1` in double-double.
    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e3) = quick_two_sum(q2, q3);
        let (hi, e2) = quick_two_sum(q1, s);
        let (hi, lo) = quick_two_sum(hi, e2 + e3);
        Dd { hi, lo }
    }
}
