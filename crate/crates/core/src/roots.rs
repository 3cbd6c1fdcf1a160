//! Bracketed scalar root finding and small integer-polynomial helpers.

use crate::error::{Error, Result};

pub const BISECTION_TOL: f64 = 1e-14;
pub const BISECTION_MAX_ITER: usize = 200;

/// Bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign.
///
/// Stops when the bracket is narrower than `tol` or after `max_iter` halvings.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoRootBracketed { lo, hi });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Horner evaluation; `coeffs[i]` multiplies `x^i`.
pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Product of two integer polynomials (ascending coefficients).
pub fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

/// Divides `p` by `(x - 1)`, returning the quotient and the remainder `p(1)`.
pub fn deflate_unit_root(p: &[i64]) -> (Vec<i64>, i64) {
    // synthetic division from the leading coefficient down
    let n = p.len();
    if n < 2 {
        return (Vec::new(), p.first().copied().unwrap_or(0));
    }
    let mut q = vec![0i64; n - 1];
    let mut carry = 0i64;
    for i in (1..n).rev() {
        carry += p[i];
        q[i - 1] = carry;
    }
    (q, carry + p[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_requires_sign_change() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100),
            Err(Error::NoRootBracketed { .. })
        ));
    }

    #[test]
    fn deflation_of_golden_cubic() {
        // -x^3 + 2x - 1 = (x - 1)(-x^2 - x + 1)
        let (q, rem) = deflate_unit_root(&[-1, 2, 0, -1]);
        assert_eq!(rem, 0);
        assert_eq!(q, vec![1, -1, -1]);
        assert_eq!(poly_mul(&q, &[-1, 1]), vec![-1, 2, 0, -1]);
    }
}
