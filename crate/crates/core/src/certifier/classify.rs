//! Case classification by the reduced angle `α_{p,k}`, and the signed-bound probe
//! for the remaining slivers.
//!
//! Each residue class of `k` is split into open sub-ranges of `α_{p,k}/π`, each
//! covered by lemma items or a triple group. The remaining sliver is
//! `(29/45, 13/20)` for `p = 5`, `k ≡ 2 (mod 4)`; `(266/375, 3217/4500)` for
//! `p = 7`, `k ≡ 2 (mod 6)`; `(217/360, 73/120)` for `p = 7`, `k ≡ 4 (mod 6)`.

use rug::{Float, Rational};
use serde::Serialize;

use super::arg_track::arg_track;
use super::{heads, seam_end, PREC};
use crate::domain_geometry::{alpha, angle_class, ser_float, Arc};
use crate::error::{invalid, Result};
use crate::evaluator::split_base;
use crate::real::{from_rational, int, pi, pow_neg_half, sqrt_i};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    AllOnArcProven,
    AllButOneProven,
    RemainingCase,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::AllOnArcProven => "all_on_arc_proven",
            Status::AllButOneProven => "all_but_one_proven",
            Status::RemainingCase => "remaining_case",
        }
    }
}

/// One open sub-range `(lo π, hi π)` of `α_{p,k}` and what covers it.
#[derive(Debug, Clone, Copy)]
pub struct SubCase {
    pub lo: (i64, i64),
    pub hi: (i64, i64),
    pub cover: &'static str,
    pub remaining: bool,
    /// The range follows from the neighbouring sub-cases but is not listed among them.
    pub unlisted: bool,
}

const fn sc(lo: (i64, i64), hi: (i64, i64), cover: &'static str) -> SubCase {
    SubCase { lo, hi, cover, remaining: false, unlisted: false }
}

const P5_R0: &[SubCase] = &[
    sc((0, 1), (1, 12), "L5-1 with head sign"),
    sc((1, 12), (3, 4), "L5-1, L5-3"),
    sc((3, 4), (1, 1), "L5-3 with head sign"),
];

const P5_R2: &[SubCase] = &[
    sc((0, 1), (1, 2), "L5-1, L5-4"),
    sc((1, 2), (7, 12), "L5-4"),
    sc((7, 12), (19, 30), "L5-5"),
    sc((19, 30), (29, 45), "p5-a2-r2"),
    SubCase { lo: (29, 45), hi: (13, 20), cover: "remaining", remaining: true, unlisted: false },
    sc((13, 20), (7, 10), "p5-a1-r2"),
    sc((7, 10), (3, 4), "L5-2"),
    sc((3, 4), (1, 1), "L5-1"),
];

const P7_R0: &[SubCase] = &[
    sc((0, 1), (1, 8), "L7-1 with head signs"),
    sc((1, 8), (1, 6), "L7-1, L7-4"),
    SubCase { lo: (1, 6), hi: (1, 4), cover: "L7-1, L7-4", remaining: false, unlisted: true },
    sc((1, 4), (5, 6), "L7-1, L7-4"),
    sc((5, 6), (1, 1), "L7-4 with head signs"),
];

const P7_R2: &[SubCase] = &[
    sc((0, 1), (2, 3), "L7-1, L7-4, L7-5"),
    sc((2, 3), (266, 375), "p7-a2-r2"),
    SubCase { lo: (266, 375), hi: (3217, 4500), cover: "remaining", remaining: true, unlisted: false },
    sc((3217, 4500), (3, 4), "p7-a1-r2"),
    sc((3, 4), (5, 6), "L7-2"),
    sc((5, 6), (1, 1), "L7-1"),
];

const P7_R4: &[SubCase] = &[
    sc((0, 1), (1, 6), "L7-1, L7-4"),
    sc((1, 6), (1, 4), "L7-4"),
    sc((1, 4), (1, 3), "L7-6"),
    sc((1, 3), (13, 36), "L7-7"),
    sc((13, 36), (5, 9), "p7-a2-r4"),
    sc((5, 9), (217, 360), "p7-a2-r4-signed"),
    SubCase { lo: (217, 360), hi: (73, 120), cover: "remaining", remaining: true, unlisted: false },
    sc((73, 120), (2, 3), "p7-a1-r4-signed"),
    sc((2, 3), (3, 4), "p7-a1-r4"),
    sc((3, 4), (29, 36), "L7-2"),
    sc((29, 36), (5, 6), "L7-3"),
    sc((5, 6), (1, 1), "L7-1"),
];

/// Sub-ranges for the residue class of `k`.
pub fn sub_cases(p: u32, residue: i64) -> Result<&'static [SubCase]> {
    Ok(match (p, residue) {
        (5, 0) => P5_R0,
        (5, 2) => P5_R2,
        (7, 0) => P7_R0,
        (7, 2) => P7_R2,
        (7, 4) => P7_R4,
        _ => return invalid(format!("no case table for p={p}, residue {residue}")),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseClassification {
    pub k: i64,
    pub p: u32,
    pub residue: i64,
    #[serde(serialize_with = "ser_float")]
    pub alpha_pk: Float,
    pub case_label: String,
    /// What covers the sub-range: lemma ids or a triple group.
    pub cover: String,
    pub unlisted: bool,
    pub status: Status,
}

fn frac_str(q: (i64, i64)) -> String {
    match q {
        (0, _) => "0".into(),
        (1, 1) => "pi".into(),
        (1, d) => format!("pi/{d}"),
        (n, d) => format!("{n}pi/{d}"),
    }
}

/// Sign of `α − qπ`, raising precision until it is decided. `None` only for an
/// exact coincidence, which cannot happen since `α_{p,k}/π` is irrational.
fn side(k: i64, p: u32, q: (i64, i64)) -> Result<Option<std::cmp::Ordering>> {
    for prec in [PREC, 512, 2048] {
        let a = angle_class(k, p, prec)?.alpha_pk;
        let t = from_rational(prec, &Rational::from(q)) * pi(prec);
        let diff = Float::with_val(prec, &a - &t);
        let tol = Float::with_val(prec, Float::i_exp(1, 24 - prec as i32)) * (k.unsigned_abs() + 1);
        if diff.clone().abs() > tol {
            return Ok(diff.partial_cmp(&0));
        }
    }
    Ok(None)
}

pub fn classify_case(k: i64, p: u32) -> Result<CaseClassification> {
    let ac = angle_class(k, p, PREC)?;
    let table = sub_cases(p, ac.residue)?;
    let mut hit = None;
    for s in table {
        use std::cmp::Ordering::*;
        let above = s.lo.0 == 0 || side(k, p, s.lo)? == Some(Greater);
        let below = s.hi == (1, 1) || side(k, p, s.hi)? == Some(Less);
        if above && below {
            hit = Some(s);
            break;
        }
    }
    let (label, cover, unlisted, status) = match hit {
        Some(s) => (
            format!("k={} mod {}, {} < alpha < {}", ac.residue, if p == 5 { 4 } else { 6 }, frac_str(s.lo), frac_str(s.hi)),
            s.cover.to_string(),
            s.unlisted,
            if s.remaining { Status::RemainingCase } else { Status::AllOnArcProven },
        ),
        // on a sub-range endpoint
        None => {
            let edge = table.iter().any(|s| s.remaining && [s.lo, s.hi].iter().any(|q| side(k, p, *q).ok() == Some(None)));
            let status = if edge { Status::AllButOneProven } else { Status::AllOnArcProven };
            ("boundary".to_string(), String::new(), false, status)
        }
    };
    Ok(CaseClassification { k, p, residue: ac.residue, alpha_pk: ac.alpha_pk, case_label: label, cover, unlisted, status })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ClassStats {
    pub p: u32,
    pub k_lo: i64,
    pub k_hi: i64,
    pub total: usize,
    pub all_on_arc_proven: usize,
    pub all_but_one_proven: usize,
    pub remaining_case: usize,
    pub remaining_fraction: f64,
}

/// Counts per status over even `k` in `[k_lo, k_hi]`.
pub fn class_stats(p: u32, k_lo: i64, k_hi: i64) -> Result<ClassStats> {
    let mut st = ClassStats { p, k_lo, k_hi, ..Default::default() };
    let start = k_lo.max(4) + k_lo.max(4) % 2;
    for k in (start..=k_hi).step_by(2) {
        st.total += 1;
        match classify_case(k, p)?.status {
            Status::AllOnArcProven => st.all_on_arc_proven += 1,
            Status::AllButOneProven => st.all_but_one_proven += 1,
            Status::RemainingCase => st.remaining_case += 1,
        }
    }
    st.remaining_fraction = if st.total == 0 { 0.0 } else { st.remaining_case as f64 / st.total as f64 };
    Ok(st)
}

/// Signed bounds near the seam for a remaining-case weight.
#[derive(Debug, Clone, Serialize)]
pub struct RemainingProbe {
    pub k: i64,
    pub p: u32,
    #[serde(serialize_with = "ser_float")]
    pub t: Float,
    #[serde(serialize_with = "ser_float")]
    pub alpha_pk: Float,
    /// `π − α₅`, `3π/2 − 2α₇` or `π − α₇`.
    #[serde(serialize_with = "ser_float")]
    pub threshold: Float,
    pub above_threshold: bool,
    /// Closed-form upper bound `A` on the A1 quantity (`None` where no closed form is given).
    pub upper: Option<f64>,
    /// Closed-form lower bound `B`.
    pub lower: Option<f64>,
    /// The A1 quantity `|cos(kθ/2)| ∓ |Re head_i|` evaluated exactly at `θ = θ₀ − tπ/k`.
    pub exact: Option<f64>,
    pub bounds_hold: Option<bool>,
    /// `B > 0` above the threshold, `A < 0` below it, at this `k`.
    pub sign_holds: Option<bool>,
    /// The same sign test on the `k → ∞` form of `A` and `B`.
    pub limit_sign_holds: Option<bool>,
    /// Order of the first non-vanishing `t`-derivative at `t = 0` (1 for `p = 5`, 2 for `p = 7`).
    pub order: Option<u32>,
    /// That derivative of `(A, B)` (normalised by the head cosine when the order is 1), numerically.
    pub derivative: Option<(f64, f64)>,
    /// The same with the `d`-constants frozen at their `t → 0` limits.
    pub derivative_frozen: Option<(f64, f64)>,
    /// Closed-form value of the derivative.
    pub derivative_closed_form: Option<(f64, f64)>,
    /// `(A, B)` at `t = 0`.
    pub at_zero: Option<(f64, f64)>,
    /// Arc expected to carry the extra zero for large `k`.
    pub predicted_arc: Arc,
}

/// `Re(w^{−k})` for head `(c, d)` on A1.
fn head_re(k: i64, p: u32, c: i64, d: i64, theta: &Float) -> Float {
    let w = split_base(p, Arc::A1, c, d, theta);
    let t = crate::real::cpow_neg(&w, k);
    Float::with_val(PREC, t.real())
}

#[derive(Clone, Copy, PartialEq)]
enum Form {
    Exact,
    /// `d`-constants at their limits.
    Frozen,
    /// `d` at the limits and `(1 + u tπ/k)^{−k/2}` replaced by `e^{−u tπ/2}`.
    Limit,
}

/// `(1 + u tπ/k)^{−k/2}`, or its limit.
fn head_floor(u: &Float, tp: &Float, k: i64, form: Form) -> Float {
    if form == Form::Limit {
        (-Float::with_val(PREC, u * tp) / 2u32).exp()
    } else {
        pow_neg_half(&(Float::with_val(PREC, u * tp) / k + 1u32), k)
    }
}

/// The closed-form bounds `(A, B)`, normalised for the order-1 case by the head cosines.
fn closed_bounds(k: i64, p: u32, residue: i64, al: &Float, t: &Float, form: Form) -> Result<Option<(Float, Float, Float, Float)>> {
    let pi_ = pi(PREC);
    let tp = Float::with_val(PREC, t * &pi_);
    let ht = Float::with_val(PREC, &tp / 2u32);
    let main = -Float::with_val(PREC, al - &ht).cos();
    let d = |h: usize, lim: i64, den: u32| -> Result<Float> {
        Ok(if form == Form::Exact { arg_track(k, p, Arc::A1, h, t)?.d_const } else { int(PREC, lim) / den })
    };
    Ok(match (p, residue) {
        (5, _) => {
            let d1 = d(0, 1, 1)?;
            let ph = Float::with_val(PREC, &pi_ + al);
            let ca = Float::with_val(PREC, &ph + Float::with_val(PREC, &d1 * &ht)).cos();
            let cb = Float::with_val(PREC, &ph + &ht).cos();
            let a = Float::with_val(PREC, &main) - Float::with_val(PREC, &ca * (Float::with_val(PREC, &tp * -2)).exp());
            let b = main - Float::with_val(PREC, &cb * head_floor(&int(PREC, 4), &tp, k, form));
            Some((a, b, ca, cb))
        }
        (7, 2) => {
            let (d11, d12) = (d(0, 3, 1)?, d(1, 2, 1)?);
            let r3 = sqrt_i(PREC, 3);
            let p1 = Float::with_val(PREC, &pi_ * 2u32) / 3u32 + al;
            let p2 = Float::with_val(PREC, &pi_ * 4u32) / 3u32 + al;
            let e1 = (-Float::with_val(PREC, &tp * &r3)).exp();
            let e2 = (-Float::with_val(PREC, &tp * &r3) * 3u32 / 2u32).exp();
            let a = Float::with_val(PREC, &main)
                - Float::with_val(PREC, &p1 + Float::with_val(PREC, &d11 * &ht)).cos()
                    * head_floor(&Float::with_val(PREC, &r3 * 2u32), &tp, k, form)
                - Float::with_val(PREC, &p2 - Float::with_val(PREC, &d12 * &ht)).cos() * e2;
            let b = main
                - Float::with_val(PREC, &p1 + Float::with_val(PREC, &ht * 3u32)).cos() * e1
                - Float::with_val(PREC, &p2 - &tp).cos() * head_floor(&Float::with_val(PREC, &r3 * 3u32), &tp, k, form);
            Some((a, b, int(PREC, 1), int(PREC, 1)))
        }
        _ => None,
    })
}

/// First non-vanishing `t`-derivative of the normalised `(A, B)` at `t = 0`, by a one-sided quotient.
fn derivative(k: i64, p: u32, residue: i64, al: &Float, form: Form, order: u32) -> Result<Option<(f64, f64)>> {
    let h = Float::with_val(PREC, Float::i_exp(1, -24));
    let Some((a, b, ca, cb)) = closed_bounds(k, p, residue, al, &h, form)? else {
        return Ok(None);
    };
    let q = |x: Float, c: Float| -> f64 {
        if order == 1 {
            (x / c / &h).to_f64()
        } else {
            (x * 2u32 / Float::with_val(PREC, h.square_ref())).to_f64()
        }
    };
    Ok(Some((q(a, ca), q(b, cb))))
}

pub fn remaining_case_probe(k: i64, p: u32, t: &Float) -> Result<RemainingProbe> {
    let cls = classify_case(k, p)?;
    if cls.status != Status::RemainingCase {
        return invalid(format!("k={k} is not a remaining case for p={p}"));
    }
    let pi_ = pi(PREC);
    let al = cls.alpha_pk.clone();
    let ap = alpha(p, PREC)?;
    let threshold = match (p, cls.residue) {
        (7, 2) => Float::with_val(PREC, &pi_ * 3u32) / 2u32 - Float::with_val(PREC, &ap * 2u32),
        _ => Float::with_val(PREC, &pi_ - &ap),
    };
    let above = al > threshold;
    let tp = Float::with_val(PREC, t * &pi_);
    let theta = seam_end(p, Arc::A1)? - Float::with_val(PREC, &tp / k);
    let cosk = (Float::with_val(PREC, &theta * k) / 2u32).cos().abs();
    let re: Vec<Float> = heads(p, Arc::A1)?.iter().map(|h| head_re(k, p, h.c, h.d, &theta).abs()).collect();
    let exact = match (p, cls.residue) {
        (5, _) => Some(cosk - &re[0]),
        (7, 2) => Some(cosk + &re[0] - &re[1]),
        _ => None,
    };
    let bounds = closed_bounds(k, p, cls.residue, &al, t, Form::Exact)?;
    let limit = closed_bounds(k, p, cls.residue, &al, t, Form::Limit)?;
    let sign = |ab: &(Float, Float, Float, Float)| if above { ab.1 > 0 } else { ab.0 < 0 };
    let order = match (p, cls.residue) {
        (5, _) => Some(1),
        (7, 2) => Some(2),
        _ => None,
    };
    let (mut dn, mut df, mut dp) = (None, None, None);
    if let Some(o) = order {
        dn = derivative(k, p, cls.residue, &al, Form::Exact, o)?;
        df = derivative(k, p, cls.residue, &al, Form::Frozen, o)?;
        let a = al.to_f64();
        let pp = std::f64::consts::PI.powi(2);
        dp = Some(if p == 5 {
            let v = std::f64::consts::PI * (a.tan() + 2.0);
            (v, v)
        } else {
            let r3 = 3f64.sqrt();
            let c = 2.5 * r3 * pp * (-a.cos()) * (a.tan() + 11.0 / (5.0 * r3));
            let kf = k as f64;
            let two_thirds = 2.0 * std::f64::consts::FRAC_PI_3;
            (c + 6.0 * pp * (-(two_thirds + a).cos()) / kf, c - 13.5 * pp * (2.0 * two_thirds + a).cos() / kf)
        });
    }
    Ok(RemainingProbe {
        k,
        p,
        t: t.clone(),
        threshold,
        above_threshold: above,
        upper: bounds.as_ref().map(|x| x.0.to_f64()),
        lower: bounds.as_ref().map(|x| x.1.to_f64()),
        bounds_hold: match (&bounds, &exact) {
            (Some(ab), Some(e)) => Some(ab.1 < *e && *e < ab.0),
            _ => None,
        },
        exact: exact.map(|e| e.to_f64()),
        sign_holds: bounds.as_ref().map(sign),
        limit_sign_holds: limit.as_ref().map(sign),
        order,
        derivative: dn,
        derivative_frozen: df,
        derivative_closed_form: dp,
        at_zero: closed_bounds(k, p, cls.residue, &al, &int(PREC, 0), Form::Frozen)?.map(|x| (x.0.to_f64(), x.1.to_f64())),
        predicted_arc: if above { Arc::A1 } else { Arc::A2 },
        alpha_pk: al,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_tile_the_circle() {
        for (p, r) in [(5, 0), (5, 2), (7, 0), (7, 2), (7, 4)] {
            let t = sub_cases(p, r).unwrap();
            assert_eq!(t[0].lo, (0, 1));
            assert_eq!(t.last().unwrap().hi, (1, 1));
            for w in t.windows(2) {
                assert_eq!(w[0].hi, w[1].lo);
                assert!(Rational::from(w[0].lo) < Rational::from(w[0].hi));
            }
            assert!(t.iter().filter(|s| s.remaining).count() <= 1);
        }
    }

    #[test]
    fn divisible_weights_are_proven() {
        for k in (4..200).step_by(4) {
            assert_eq!(classify_case(k, 5).unwrap().status, Status::AllOnArcProven);
        }
        for k in (6..200).step_by(6) {
            assert_eq!(classify_case(k, 7).unwrap().status, Status::AllOnArcProven);
        }
    }

    #[test]
    fn probe_p5() {
        let r = remaining_case_probe(330, 5, &crate::real::rat(PREC, 1, 100)).unwrap();
        assert!(r.above_threshold && r.predicted_arc == Arc::A1);
        assert_eq!((r.bounds_hold, r.sign_holds, r.limit_sign_holds), (Some(true), Some(true), Some(true)));
        let (a, b) = r.at_zero.unwrap();
        assert!(a.abs() < 1e-30 && b.abs() < 1e-30);
        let (da, db) = r.derivative.unwrap();
        let want = r.derivative_closed_form.unwrap().0;
        assert!((da - want).abs() < 1e-5 && (db - want).abs() < 1e-5);
        assert!(remaining_case_probe(332, 5, &crate::real::rat(PREC, 1, 100)).is_err());
    }
}
