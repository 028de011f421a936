//! Remainder bounds and certificates for zeros on the boundary arcs.
//!
//! On each arc the function is `2cos(kθ/2) + R(θ)`. Bounding `|R| < 2` on a range
//! places one zero in every interval between consecutive zeros of the cosine.
//! Near the seam this fails, and the lemma items and interval triples in
//! [`catalog`] cover those ranges with the head/tail algorithm in [`algorithm`].

pub mod algorithm;
pub mod arg_track;
pub mod catalog;
pub mod classify;
pub mod lemmas;
pub mod terms;
pub mod triples;

use rug::Float;
use serde::Serialize;

use crate::domain_geometry::{arc_range, check_p, ser_float, Arc};
use crate::error::Result;
use crate::real::{int, rat, sqrt_i};

/// Working precision of all certificate arithmetic.
pub const PREC: u32 = 128;

/// Strict inequalities pass only with margin above `2^SLACK_EXP` (about `10⁻²⁰`).
pub const SLACK_EXP: i32 = -66;

/// A head term: `X = 1` at the seam end of the arc.
#[derive(Debug, Clone, Serialize)]
pub struct HeadSpec {
    pub c: i64,
    pub d: i64,
    /// `X(θ₀ ∓ x) ≥ 1 + slope·x` near the seam.
    #[serde(serialize_with = "ser_float")]
    pub slope: Float,
}

pub fn heads(p: u32, arc: Arc) -> Result<Vec<HeadSpec>> {
    check_p(p)?;
    let r3 = sqrt_i(PREC, 3);
    let h = |c, d, slope| HeadSpec { c, d, slope };
    Ok(match (p, arc) {
        (5, Arc::A1) => vec![h(2, 1, int(PREC, 4))],
        (5, Arc::A2) => vec![h(1, -1, int(PREC, 1))],
        (7, Arc::A1) => vec![h(2, 1, r3.clone() * 2u32), h(3, 1, r3 * 3u32)],
        _ => vec![h(1, -1, r3.clone() / 2u32), h(3, -1, r3 * rat(PREC, 3, 2))],
    })
}

/// `X(θ₀ ∓ x) = 1 + a(1 − cos x) + b sin x`, with `θ₀` the seam end of the arc and
/// the sign chosen so that `x > 0` moves into the arc.
#[derive(Debug, Clone, Serialize)]
pub struct HeadGeometry {
    pub arc: Arc,
    #[serde(serialize_with = "ser_float")]
    pub theta0: Float,
    #[serde(serialize_with = "ser_float")]
    pub a: Float,
    #[serde(serialize_with = "ser_float")]
    pub b: Float,
}

/// Seam end of an arc: the upper end of A1, the lower end of A2.
pub fn seam_end(p: u32, arc: Arc) -> Result<Float> {
    let (lo, hi) = arc_range(p, arc, PREC)?;
    Ok(if arc == Arc::A1 { hi } else { lo })
}

/// `−1` on A1 (moving down from the seam), `+1` on A2.
pub fn direction(arc: Arc) -> i32 {
    if arc == Arc::A1 {
        -1
    } else {
        1
    }
}

pub fn head_geometry(p: u32, arc: Arc, c: i64, d: i64) -> HeadGeometry {
    let theta0 = seam_end(p, arc).expect("valid level");
    let e2 = if arc == Arc::A2 && (c * d) % 2 != 0 { 4 } else { 1 };
    let k = sqrt_i(PREC, p) * (2 * c * d) / e2;
    let (s, co) = theta0.clone().sin_cos(Float::new(PREC));
    let a = -Float::with_val(PREC, &k * &co);
    let b = Float::with_val(PREC, &k * &s) * if arc == Arc::A1 { 1 } else { -1 };
    HeadGeometry { arc, theta0, a, b }
}

impl HeadGeometry {
    /// Arc parameter at distance `x` from the seam.
    pub fn theta_at(&self, x: &Float) -> Float {
        match self.arc {
            Arc::A1 => Float::with_val(PREC, &self.theta0 - x),
            Arc::A2 => Float::with_val(PREC, &self.theta0 + x),
        }
    }

    /// `X ≥ 1 + u x` on `(0, xm]`, from `sin x ≥ x − x³/6` and `1 − cos x ≥ x²/2 − x⁴/24`.
    /// Needs `a ≥ 0`, `b ≥ u` and `a(1/2 − xm²/24) ≥ b xm/6`.
    pub fn lower_bound_holds(&self, u: &Float, xm: &Float) -> bool {
        if self.a < 0 || Float::with_val(PREC, &self.b + round_eps()) < *u {
            return false;
        }
        let xm2 = Float::with_val(PREC, xm.square_ref());
        let lhs = Float::with_val(PREC, &self.a * (rat(PREC, 1, 2) - xm2 / 24u32));
        let rhs = Float::with_val(PREC, &self.b * xm) / 6u32;
        lhs >= rhs
    }

    /// `X ≤ e^{v x}` on `(0, xm]`, from `1 − cos x ≤ x²/2`, `sin x ≤ x` and
    /// `e^{vx} ≥ 1 + vx + v²x²/2`: needs `v ≥ b` and `a ≤ v² + 2(v − b)/xm`.
    pub fn upper_bound_holds(&self, v: &Float, xm: &Float) -> bool {
        if Float::with_val(PREC, v + round_eps()) < self.b {
            return false;
        }
        let slack = Float::with_val(PREC, v - &self.b) * 2u32 / xm;
        self.a <= Float::with_val(PREC, v.square_ref()) + slack
    }

    /// Least `v` accepted by [`Self::upper_bound_holds`], nudged upward.
    pub fn upper_slope(&self, xm: &Float) -> Float {
        let r = Float::with_val(PREC, xm.recip_ref());
        let disc = Float::with_val(PREC, r.square_ref()) + Float::with_val(PREC, &self.b * 2u32) * &r + &self.a;
        let v = disc.sqrt() - r;
        let v = if v > self.b { v } else { self.b.clone() };
        v * (1.0 + 1e-25)
    }
}

/// Rounding allowance when a computed slope is compared with its closed form.
fn round_eps() -> Float {
    Float::with_val(PREC, Float::i_exp(1, -100))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::terms::x_value;

    #[test]
    fn head_slopes_match_geometry() {
        for (p, arc) in [(5, Arc::A1), (5, Arc::A2), (7, Arc::A1), (7, Arc::A2)] {
            for h in heads(p, arc).unwrap() {
                let g = head_geometry(p, arc, h.c, h.d);
                assert!(Float::with_val(PREC, &g.b - &h.slope).abs() < 1e-30, "{p} {arc:?} {}", h.c);
                let x1 = x_value(p, arc, h.c, h.d, &g.theta0);
                assert!(Float::with_val(PREC, x1 - 1u32).abs() < 1e-30);
                let x = Float::with_val(PREC, 0.05);
                let direct = x_value(p, arc, h.c, h.d, &g.theta_at(&x));
                let closed = int(PREC, 1) + Float::with_val(PREC, &g.a * (int(PREC, 1) - x.clone().cos()))
                    + Float::with_val(PREC, &g.b * x.clone().sin());
                assert!(Float::with_val(PREC, direct - closed).abs() < 1e-30);
                assert!(g.lower_bound_holds(&h.slope, &Float::with_val(PREC, 0.1)));
            }
        }
    }
}
