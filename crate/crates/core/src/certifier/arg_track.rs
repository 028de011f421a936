//! Argument tracking for the head terms.
//!
//! For a head `(c, d)` put `θ′ = 2 Arg(c e^{iθ/2} + √p d e^{−iθ/2})`. With
//! `tan(θ′/2) = κ tan(θ/2)`, `κ = (c − √p d)/(c + √p d)`, the phase `kθ′/2` of the
//! head term at `θ = θ₀ ∓ tπ/k` is
//!
//! `kθ′/2 = kθ′₀/2 + ν tπ/2`,
//!
//! where `|ν|` is the mean of `|dθ′/dθ|` over the step. It lies strictly between
//! the value `d` at the far end and the value `L` at the seam end.

use rug::Float;
use serde::Serialize;

use super::{head_geometry, heads, PREC};
use crate::domain_geometry::{ser_float, Arc};
use crate::error::{invalid, Result};
use crate::evaluator::split_base;
use crate::real::{int, pi, rem_pos, sqrt_i};

#[derive(Debug, Clone, Serialize)]
pub struct ArgTrack {
    pub k: i64,
    pub p: u32,
    pub arc: Arc,
    pub c: i64,
    pub d: i64,
    #[serde(serialize_with = "ser_float")]
    pub t: Float,
    /// `θ = θ₀ ∓ tπ/k`.
    #[serde(serialize_with = "ser_float")]
    pub theta: Float,
    #[serde(serialize_with = "ser_float")]
    pub theta_prime: Float,
    /// `θ′₀ − θ₀`, a multiple of `π/3`.
    #[serde(serialize_with = "ser_float")]
    pub offset: Float,
    /// `k(θ′₀ − θ₀)/2 (mod 2π)`.
    #[serde(serialize_with = "ser_float")]
    pub parity_offset: Float,
    /// `(θ′ − θ′₀)/(tπ/k)`, signed.
    #[serde(serialize_with = "ser_float")]
    pub nu: Float,
    /// `|dθ′/dθ|` at `θ`.
    #[serde(serialize_with = "ser_float")]
    pub d_const: Float,
    /// `|dθ′/dθ|` at `θ₀`, the `t → 0` limit of `d_const`.
    #[serde(serialize_with = "ser_float")]
    pub limit: Float,
    /// Closed-form upper bound on `d_const`.
    #[serde(serialize_with = "ser_float")]
    pub closed_cap: Float,
    /// `(lower, upper)` for `kθ′/2`.
    #[serde(serialize_with = "ser_pair")]
    pub bracketing: (Float, Float),
    /// `kθ′/2 (mod π)` in `[0, π)`.
    #[serde(serialize_with = "ser_float")]
    pub alpha_prime: Float,
    /// `lower < kθ′/2 < upper`.
    pub bracket_holds: bool,
    /// `d_const < closed_cap`.
    pub cap_holds: bool,
}

fn ser_pair<S: serde::Serializer>(x: &(Float, Float), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&crate::real::to_dec(&x.0))?;
    t.serialize_element(&crate::real::to_dec(&x.1))?;
    t.end()
}

/// `|dθ′/dθ| = |κ|/(cos²(θ/2) + κ² sin²(θ/2))`.
pub fn arg_speed(p: u32, c: i64, d: i64, theta: &Float) -> Float {
    let rp = sqrt_i(PREC, p) * d;
    let kappa = (Float::with_val(PREC, -&rp) + c) / (rp + c);
    let (s, co) = Float::with_val(PREC, theta / 2u32).sin_cos(Float::new(PREC));
    let den = co.square() + Float::with_val(PREC, kappa.square_ref()) * s.square();
    kappa.abs() / den
}

/// Closed-form cap on `d`, with `T = tan(tπ/(2k))`.
pub fn closed_cap(p: u32, arc: Arc, head: usize, k: i64, t: &Float) -> Float {
    let tt = (Float::with_val(PREC, t * pi(PREC)) / (2 * k)).tan();
    let r3 = sqrt_i(PREC, 3);
    let f = |num: u32, den: Float| int(PREC, num as i64) / den;
    match (p, arc, head) {
        (5, Arc::A1, _) => f(1, tt * 4u32 + 1u32),
        (5, _, _) => f(1, tt + 1u32),
        (7, Arc::A1, 0) => f(3, tt * r3 * 2u32 + 1u32),
        (7, Arc::A1, _) => f(2, tt * r3 + 1u32),
        (7, _, 0) => f(3, tt * r3 + 2u32),
        _ => f(1, tt * r3 * 3u32 + 2u32),
    }
}

/// Track the phase of head `head` (0-based, in [`heads`] order) at `θ = θ₀ ∓ tπ/k`.
pub fn arg_track(k: i64, p: u32, arc: Arc, head: usize, t: &Float) -> Result<ArgTrack> {
    if k < 4 || k % 2 != 0 {
        return invalid(format!("weight must be even and at least 4, got {k}"));
    }
    if *t <= 0 {
        return invalid("t must be positive");
    }
    let hs = heads(p, arc)?;
    let Some(h) = hs.get(head) else {
        return invalid(format!("head index {head} out of range for p={p} arc {}", arc.index()));
    };
    let (c, d) = (h.c, h.d);
    let g = head_geometry(p, arc, c, d);
    let pi_ = pi(PREC);
    let x = Float::with_val(PREC, t * &pi_) / k;
    let theta = g.theta_at(&x);
    let arg2 = |th: &Float| Float::with_val(PREC, split_base(p, arc, c, d, th).arg_ref()) * 2u32;
    let tp0 = arg2(&g.theta0);
    // θ′ on the branch continuous from θ′₀
    let w0 = split_base(p, arc, c, d, &g.theta0);
    let w = split_base(p, arc, c, d, &theta);
    let q = rug::Complex::with_val(PREC, &w * rug::Complex::with_val(PREC, w0.conj_ref()));
    let step = Float::with_val(PREC, q.arg_ref()) * 2u32;
    let theta_prime = Float::with_val(PREC, &tp0 + &step);
    let two_pi = Float::with_val(PREC, &pi_ * 2u32);
    // snap θ′₀ − θ₀ to a multiple of π/3 in (−2π, 2π)
    let raw = Float::with_val(PREC, &tp0 - &g.theta0);
    let sixths = (raw.to_f64() * 3.0 / std::f64::consts::PI).round() as i64;
    let offset = Float::with_val(PREC, &pi_ * sixths) / 3u32;
    let parity_offset = rem_pos(&(Float::with_val(PREC, &offset * k) / 2u32), &two_pi);
    let nu = Float::with_val(PREC, &step / &x);
    let d_const = arg_speed(p, c, d, &theta);
    let limit = arg_speed(p, c, d, &g.theta0);
    let cap = closed_cap(p, arc, head, k, t);
    let half_k = Float::with_val(PREC, k) / 2u32;
    let base = Float::with_val(PREC, &tp0 * &half_k);
    let ht = Float::with_val(PREC, t * &pi_) / 2u32;
    let sgn = if nu < 0 { -1 } else { 1 };
    let e1 = Float::with_val(PREC, &base + Float::with_val(PREC, &d_const * &ht) * sgn);
    let e2 = Float::with_val(PREC, &base + Float::with_val(PREC, &limit * &ht) * sgn);
    let bracketing = if e1 < e2 { (e1, e2) } else { (e2, e1) };
    let phase = Float::with_val(PREC, &theta_prime * &half_k);
    let bracket_holds = bracketing.0 < phase && phase < bracketing.1;
    let alpha_prime = rem_pos(&phase, &pi_);
    Ok(ArgTrack {
        k,
        p,
        arc,
        c,
        d,
        t: t.clone(),
        theta,
        theta_prime,
        offset,
        parity_offset,
        nu,
        cap_holds: d_const < cap,
        d_const,
        limit,
        closed_cap: cap,
        bracketing,
        alpha_prime,
        bracket_holds,
    })
}

/// All heads of all four arcs, as `(p, arc, head index)`.
pub fn all_heads() -> Vec<(u32, Arc, usize)> {
    let mut out = Vec::new();
    for (p, arc) in [(5, Arc::A1), (5, Arc::A2), (7, Arc::A1), (7, Arc::A2)] {
        let n = heads(p, arc).expect("valid level").len();
        out.extend((0..n).map(|i| (p, arc, i)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rat;

    #[test]
    fn limits() {
        let want = [1.0, 1.0, 3.0, 2.0, 1.5, 0.5];
        for ((p, arc, i), w) in all_heads().into_iter().zip(want) {
            let tr = arg_track(400, p, arc, i, &rat(PREC, 1, 1000)).unwrap();
            assert!((tr.limit.to_f64() - w).abs() < 1e-12, "p={p} {arc:?} {i}");
            assert!((tr.d_const.to_f64() - w).abs() < 1e-3);
        }
    }

    #[test]
    fn offsets() {
        // θ′₀ − θ₀: ∓π for p = 5, ∓4π/3 and ±2π/3 for p = 7
        for (p, arc, i) in all_heads() {
            let tr = arg_track(12, p, arc, i, &rat(PREC, 1, 4)).unwrap();
            let sixths = (tr.offset.to_f64() * 3.0 / std::f64::consts::PI).round() as i64;
            let m = if p == 5 { 3 } else { 1 };
            assert_eq!(sixths.rem_euclid(m), 0, "p={p} {arc:?} {i}");
            assert!(tr.bracket_holds && tr.cap_holds);
        }
    }
}
