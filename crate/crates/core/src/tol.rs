//! Numeric tolerances shared by every checker.
//!
//! Inequalities are decided with a relative tolerance of `1e-9`, falling back
//! to an absolute `1e-12` near zero.

pub const REL_TOL: f64 = 1e-9;
pub const ABS_TOL: f64 = 1e-12;

#[inline]
pub fn slack(a: f64, b: f64) -> f64 {
    (REL_TOL * a.abs().max(b.abs())).max(ABS_TOL)
}

/// `a ≤ b` up to tolerance.
#[inline]
pub fn leq(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a <= b;
    }
    a <= b + slack(a, b)
}

#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    leq(a, b) && leq(b, a)
}

#[inline]
pub fn is_zero(a: f64) -> bool {
    a.abs() <= ABS_TOL
}

#[inline]
pub fn is_positive(a: f64) -> bool {
    a > ABS_TOL
}
