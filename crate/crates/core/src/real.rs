//! Small helpers around `rug::Float` so the numeric modules can stay terse.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

/// `w^{−n}` for `n ≥ 0`, by repeated squaring.
pub fn cpow_neg(w: &Complex, n: i64) -> Complex {
    let prec = w.prec().0;
    let mut r = Complex::with_val(prec, 1);
    let mut b = w.clone();
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            r *= &b;
        }
        e >>= 1;
        if e > 0 {
            b.square_mut();
        }
    }
    r.recip()
}

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 128;

pub fn flt(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn int(prec: u32, v: i64) -> Float {
    Float::with_val(prec, v)
}

pub fn rat(prec: u32, num: i64, den: i64) -> Float {
    Float::with_val(prec, Rational::from((num, den)))
}

pub fn from_rational(prec: u32, q: &Rational) -> Float {
    Float::with_val(prec, q)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn sqrt_i(prec: u32, v: u32) -> Float {
    Float::with_val(prec, v).sqrt()
}

/// `x^e` for a real exponent, `x > 0`.
pub fn powf(x: &Float, e: &Float) -> Float {
    x.clone().pow(e)
}

/// `x^(-k/2)` for `x > 0`.
pub fn pow_neg_half(x: &Float, k: i64) -> Float {
    let e = Float::with_val(x.prec(), -k) / 2u32;
    x.clone().pow(&e)
}

pub fn min(a: Float, b: Float) -> Float {
    if a < b {
        a
    } else {
        b
    }
}

pub fn max(a: Float, b: Float) -> Float {
    if a > b {
        a
    } else {
        b
    }
}

/// Decimal string with as many significant digits as the precision carries.
pub fn to_dec(x: &Float) -> String {
    let digits = ((x.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize;
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Reduce `x` into `[0, m)`.
pub fn rem_pos(x: &Float, m: &Float) -> Float {
    let q = Float::with_val(x.prec(), x / m).floor();
    let r = Float::with_val(x.prec(), x - q * m);
    if r < 0 {
        r + m
    } else if &r >= m {
        r - m
    } else {
        r
    }
}

/// Largest value of `|cos|` on `[lo, hi]`.
pub fn max_abs_cos(lo: &Float, hi: &Float) -> Float {
    let prec = lo.prec();
    let p = pi(prec);
    let n = Float::with_val(prec, hi / &p).floor();
    if Float::with_val(prec, &n * &p) >= *lo {
        return int(prec, 1);
    }
    max(lo.clone().cos().abs(), hi.clone().cos().abs())
}

/// Smallest value of `|cos|` on `[lo, hi]`.
pub fn min_abs_cos(lo: &Float, hi: &Float) -> Float {
    let prec = lo.prec();
    let p = pi(prec);
    let half = Float::with_val(prec, 0.5);
    // first zero of cos at or above lo: (m + 1/2) pi
    let m = (Float::with_val(prec, lo / &p) - &half).ceil();
    let z = Float::with_val(prec, (m + &half) * &p);
    if z <= *hi {
        return int(prec, 0);
    }
    min(lo.clone().cos().abs(), hi.clone().cos().abs())
}

/// Range `(min, max)` of `cos` on `[lo, hi]`.
pub fn cos_range(lo: &Float, hi: &Float) -> (Float, Float) {
    let prec = lo.prec();
    let p = pi(prec);
    let a = lo.clone().cos();
    let b = hi.clone().cos();
    let (mut mn, mut mx) = if a < b { (a, b) } else { (b, a) };
    // first multiple of π at or above lo
    let m = Float::with_val(prec, lo / &p).ceil();
    let mut z = Float::with_val(prec, &m * &p);
    let mut even = m.to_integer().map(|n| n.is_even()).unwrap_or(true);
    while z <= *hi {
        if even {
            mx = int(prec, 1);
        } else {
            mn = int(prec, -1);
        }
        z += &p;
        even = !even;
    }
    (mn, mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_cos_extrema() {
        let p = pi(128);
        let lo = Float::with_val(128, &p * 0.9);
        let hi = Float::with_val(128, &p * 1.1);
        assert_eq!(max_abs_cos(&lo, &hi), 1);
        assert!(min_abs_cos(&lo, &hi) > 0.9);
        let lo = Float::with_val(128, &p * 0.4);
        let hi = Float::with_val(128, &p * 0.6);
        assert_eq!(min_abs_cos(&lo, &hi), 0);
        assert!(max_abs_cos(&lo, &hi) < 0.31);
    }

    #[test]
    fn remainder_is_nonnegative() {
        let m = pi(128);
        let x = flt(128, -7.0);
        let r = rem_pos(&x, &m);
        assert!(r >= 0 && r < m);
        let back = Float::with_val(128, &x - &r) / &m;
        assert!((back.clone() - back.round()).abs() < 1e-30);
    }

    #[test]
    fn cos_range_covers_extrema() {
        let p = pi(128);
        let (mn, mx) = cos_range(&Float::with_val(128, &p * -0.25), &Float::with_val(128, &p * 0.25));
        assert_eq!(mx, 1);
        assert!((mn.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        let (mn, mx) = cos_range(&Float::with_val(128, &p * 0.9), &Float::with_val(128, &p * 2.1));
        assert_eq!((mn.to_f64(), mx.to_f64()), (-1.0, 1.0));
        let (mn, mx) = cos_range(&Float::with_val(128, 0.1), &Float::with_val(128, 0.2));
        assert!(mn < mx && mx < 1);
    }
}
