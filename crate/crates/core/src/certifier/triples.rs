//! Interval triples: `|R| < 2c₀` at `θ = θ₀ ∓ tπ/k` for the weights of one residue
//! class whose reduced angle lies in `[x°, y°]`.
//!
//! Routes, tried in order:
//! - `algorithm`: head/tail algorithm with `c_i′ = max|cos|` of each head phase;
//! - `interval`: heads kept with their signs on a subdivided window;
//! - `signed`: second head moved to the main side (signed groups only).
//!
//! Weights below the certified `k₀` are checked one by one with the split sum.

use rayon::prelude::*;
use rug::{Complex, Float};
use serde::Serialize;

use super::algorithm::{run_with_search, AlgorithmInput, Allocation, Certificate, Check, HeadTerm};
use super::catalog::{triples, C0Rule, Triple};
use super::terms::envelope;
use super::{head_geometry, heads, HeadSpec, PREC};
use crate::domain_geometry::{angle_class, ser_float, Arc};
use crate::error::{Error, Result};
use crate::evaluator::{split_base, split_remainder};
use crate::real::{cos_range, int, pi, powf};

/// Candidate `k₀` values, in search order.
pub fn k0_schedule() -> impl Iterator<Item = i64> {
    (8..200).step_by(2).chain((200..1000).step_by(10)).chain((1000..=20000).step_by(250))
}

/// `A(θ₀) − θ₀/2 = r π/12` for a head: returns `r`.
pub fn head_twelfths(p: u32, arc: Arc, c: i64, d: i64) -> Result<i64> {
    let g = head_geometry(p, arc, c, d);
    let a = head_arg(p, arc, c, d, &g.theta0);
    let r = (a - Float::with_val(PREC, &g.theta0 / 2u32)) * 12u32 / pi(PREC);
    let n = r.to_f64().round();
    if (r - n).abs() > 1e-20 {
        return Err(Error::Internal(format!("head ({c}, {d}) phase is not a multiple of π/12")));
    }
    Ok(n as i64)
}

fn head_arg(p: u32, arc: Arc, c: i64, d: i64, theta: &Float) -> Float {
    let w = split_base(p, arc, c, d, theta);
    Float::with_val(PREC, w.arg_ref())
}

/// `g(x) = A(θ₀ ∓ x) − A(θ₀)` on the principal branch of the quotient.
pub fn head_arg_shift(p: u32, arc: Arc, c: i64, d: i64, x: &Float) -> Float {
    let g = head_geometry(p, arc, c, d);
    let w0 = split_base(p, arc, c, d, &g.theta0);
    let w = split_base(p, arc, c, d, &g.theta_at(x));
    let c0 = Complex::with_val(PREC, w0.conj_ref());
    let q = Complex::with_val(PREC, &w * &c0);
    Float::with_val(PREC, q.arg_ref())
}

/// Range of `δ = k g(tπ/k)` for `k ≥ k₀`: `tπ·g(x)/x` over `x ∈ (0, tπ/k₀]`,
/// from the `x → 0` limit, the endpoint and interior samples.
pub fn delta_range(p: u32, arc: Arc, c: i64, d: i64, t: &Float, k0: i64) -> (Float, Float) {
    let tp = Float::with_val(PREC, t * pi(PREC));
    let xmax = Float::with_val(PREC, &tp / k0);
    let mut vals = Vec::with_capacity(18);
    // g′(0) from tan A = κ tan(θ/2)
    let g = head_geometry(p, arc, c, d);
    let rp = crate::real::sqrt_i(PREC, p) * d;
    let kappa = (Float::with_val(PREC, &rp * -1) + c) / (rp + c);
    let phi = Float::with_val(PREC, &g.theta0 / 2u32);
    let (s, co) = phi.sin_cos(Float::new(PREC));
    let den = Float::with_val(PREC, co.square_ref()) + Float::with_val(PREC, kappa.square_ref()) * s.square();
    let dir = if arc == Arc::A1 { -1 } else { 1 };
    vals.push(kappa / den / 2u32 * dir);
    for j in 1..=16u32 {
        let x = Float::with_val(PREC, &xmax * j) / 16u32;
        vals.push(head_arg_shift(p, arc, c, d, &x) / x);
    }
    let lo = vals.iter().min_by(|a, b| a.partial_cmp(b).expect("finite")).expect("nonempty");
    let hi = vals.iter().max_by(|a, b| a.partial_cmp(b).expect("finite")).expect("nonempty");
    (Float::with_val(PREC, lo * &tp), Float::with_val(PREC, hi * &tp))
}

/// Shift from `α_{p,k}` to `kθ₀/2 (mod π)`: zero on A1, `π/2` on A2 for `p = 5`,
/// `(k mod 6)π/3` on A2 for `p = 7`.
pub fn anchor_shift(p: u32, arc: Arc, residue: u32) -> Float {
    match (arc, p) {
        (Arc::A1, _) => int(PREC, 0),
        (Arc::A2, 5) => pi(PREC) / 2u32,
        _ => pi(PREC) * residue / 3u32,
    }
}

/// Window of the main phase `kθ/2 (mod π)` at `θ = θ₀ ∓ tπ/k`.
pub fn main_window(tr: &Triple, lo_deg: &Float, hi_deg: &Float) -> (Float, Float) {
    let arc = tr.arc();
    let sh = anchor_shift(tr.p, arc, tr.residue);
    let ht = Float::with_val(PREC, &tr.t() * pi(PREC)) / 2u32;
    let sgn = if arc == Arc::A1 { -1 } else { 1 };
    let off = Float::with_val(PREC, &ht * sgn) - &sh;
    (Float::with_val(PREC, lo_deg + &off), Float::with_val(PREC, hi_deg + &off))
}

/// Window of a head phase `kA(θ)` for `α_{p,k} ∈ [lo, hi]`, on the same branch as [`main_window`].
pub fn head_window(tr: &Triple, h: &HeadSpec, k0: i64, lo: &Float, hi: &Float) -> Result<(Float, Float)> {
    let arc = tr.arc();
    let r12 = head_twelfths(tr.p, arc, h.c, h.d)?;
    if (tr.modulus() as i64 * r12).rem_euclid(24) != 0 {
        return Err(Error::Internal("head phase is not fixed by the residue class".into()));
    }
    let off = Float::with_val(PREC, pi(PREC) * (tr.residue as i64 * r12).rem_euclid(24)) / 12u32
        - anchor_shift(tr.p, arc, tr.residue);
    let (dl, dh) = delta_range(tr.p, arc, h.c, h.d, &tr.t(), k0);
    Ok((Float::with_val(PREC, lo + &off) + dl, Float::with_val(PREC, hi + &off) + dh))
}

fn abs_range(r: &(Float, Float)) -> (Float, Float) {
    let (mn, mx) = r;
    let amax = if Float::with_val(PREC, mn.abs_ref()) > Float::with_val(PREC, mx.abs_ref()) {
        Float::with_val(PREC, mn.abs_ref())
    } else {
        Float::with_val(PREC, mx.abs_ref())
    };
    let amin = if *mn <= 0 && *mx >= 0 { int(PREC, 0) } else { Float::with_val(PREC, mn.abs_ref()).min(&mx.clone().abs()) };
    (amin, amax)
}

/// The sign shared by `cos` on the whole range, if any.
fn sign_of(r: &(Float, Float)) -> Option<i32> {
    if r.0 > 0 {
        Some(1)
    } else if r.1 < 0 {
        Some(-1)
    } else {
        None
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointCheck {
    pub k: i64,
    #[serde(serialize_with = "ser_float")]
    pub alpha_pk: Float,
    /// `lhs < rhs` is the claim: `|R| + tail` against `2c₀`, or the signed analogue.
    pub lhs: f64,
    pub rhs: f64,
    pub nmax: u32,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleReport {
    pub id: String,
    pub group: String,
    pub p: u32,
    pub arc: Arc,
    pub residue: u32,
    pub x: String,
    pub y: String,
    pub t: String,
    /// `c₀` from the window, `min|cos|` of the main phase (plus the second head when signed).
    #[serde(serialize_with = "ser_float")]
    pub c0: Float,
    /// `c₀` from the stated relation, when the group has one.
    pub stated_c0: Option<f64>,
    /// The window value and the stated relation disagree beyond `10⁻²⁰`.
    pub editorial_ambiguity: bool,
    pub route: Option<String>,
    pub k0: Option<i64>,
    pub certificate: Option<Certificate>,
    pub checks: Vec<Check>,
    pub pointwise: Vec<PointCheck>,
    pub pass: bool,
}

/// Weights below `k0` in the class with `α_{p,k} ∈ [x°, y°]`.
pub fn small_weights(tr: &Triple, k0: i64) -> Result<Vec<(i64, Float)>> {
    let (lo, hi) = tr.window();
    let m = tr.modulus() as i64;
    let mut out = Vec::new();
    for k in (4..k0).filter(|k| k % 2 == 0 && k % m == tr.residue as i64) {
        let a = angle_class(k, tr.p, PREC)?.alpha_pk;
        if a >= lo && a <= hi {
            out.push((k, a));
        }
    }
    Ok(out)
}

/// Exact check at one weight.
fn point_check(tr: &Triple, k: i64, alpha_pk: Float, c0: &Float, signed: bool) -> Result<PointCheck> {
    let arc = tr.arc();
    let p = tr.p;
    let hs = heads(p, arc)?;
    let g = head_geometry(p, arc, hs[0].c, hs[0].d);
    let x = Float::with_val(PREC, &tr.t() * pi(PREC)) / k;
    let theta = g.theta_at(&x);
    let main = Float::with_val(PREC, &theta * k) / 2u32;
    let main = main.cos() * 2u32;
    let mut nmax = 30u32;
    loop {
        let (r, tail) = split_remainder(k, p, arc, &theta, nmax)?;
        let (lhs, rhs) = if signed {
            let h = &hs[1];
            let w = split_base(p, arc, h.c, h.d, &theta);
            let term = crate::real::cpow_neg(&w, k);
            let h2 = Float::with_val(PREC, term.real() * 2u32);
            (Float::with_val(PREC, &r - &h2).abs() + &tail, Float::with_val(PREC, &main + &h2).abs())
        } else {
            (r.abs() + &tail, Float::with_val(PREC, c0 * 2u32))
        };
        let small = tail < Float::with_val(PREC, Float::i_exp(1, -40));
        if lhs < rhs || small || nmax >= 480 {
            return Ok(PointCheck { k, alpha_pk, lhs: lhs.to_f64(), rhs: rhs.to_f64(), nmax, pass: lhs < rhs });
        }
        nmax *= 2;
    }
}

pub struct Attempt {
    pub route: &'static str,
    pub certificate: Option<Certificate>,
    pub checks: Vec<Check>,
}

impl Attempt {
    fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.certificate.as_ref().is_none_or(|c| c.pass)
    }
}

fn head_bound_checks(tr: &Triple, hs: &[HeadSpec], k0: i64, upper_too: bool) -> Vec<Check> {
    let xm = Float::with_val(PREC, &tr.t() * pi(PREC)) / k0;
    let mut out = Vec::new();
    for h in hs {
        let g = head_geometry(tr.p, tr.arc(), h.c, h.d);
        out.push(Check::flag(format!("X ({}, {}) >= 1 + u x", h.c, h.d), g.lower_bound_holds(&h.slope, &xm)));
        if upper_too {
            let v = g.upper_slope(&xm);
            out.push(Check::flag(format!("X ({}, {}) <= e^(v x)", h.c, h.d), g.upper_bound_holds(&v, &xm)));
        }
    }
    out
}

/// Head/tail algorithm with `c_i′ = max|cos φ_i|`.
fn try_algorithm(tr: &Triple, hs: &[HeadSpec], excl: &[(i64, i64)], c0: &Float, k0: i64, lo: &Float, hi: &Float) -> Result<Attempt> {
    let t = tr.t();
    let arc = tr.arc();
    let mut terms = Vec::new();
    for h in hs {
        let (a, b) = head_window(tr, h, k0, lo, hi)?;
        let cp = abs_range(&cos_range(&a, &b)).1;
        terms.push(HeadTerm { c: h.c, d: h.d, c_prime: cp, u: Float::with_val(PREC, &h.slope * &t) });
    }
    let n = terms.len();
    let inp = AlgorithmInput {
        heads: terms,
        envelope: envelope(tr.p, arc, k0, excl)?,
        t,
        k0,
        c0: c0.clone(),
        allocation: Allocation::even(vec![1.0 / n as f64; n]),
    };
    let cert = run_with_search(&inp)?;
    Ok(Attempt { route: "algorithm", certificate: Some(cert), checks: head_bound_checks(tr, hs, k0, false) })
}

/// Heads with their signs on 256 sub-windows: `2 max|Σ X_i^{−k/2} cos φ_i| + b s^{−k₀/2} < 2c₀`,
/// or for signed groups `2 max|h₁| + b s^{−k₀/2} < 2 min|cos φ₀ + h₂|`.
fn try_interval(tr: &Triple, hs: &[HeadSpec], c0: &Float, k0: i64, signed: bool) -> Result<Attempt> {
    const PIECES: u32 = 256;
    let arc = tr.arc();
    let t = tr.t();
    let excl: Vec<(i64, i64)> = hs.iter().map(|h| (h.c, h.d)).collect();
    let env = envelope(tr.p, arc, k0, &excl)?;
    let half = Float::with_val(PREC, k0) / 2u32;
    let rest = Float::with_val(PREC, &env.b / powf(&env.s, &half));
    let tp = Float::with_val(PREC, &t * pi(PREC));
    // X^{−k/2} ∈ [e^{−v tπ/2}, (1 + u tπ/k₀)^{−k₀/2}]
    let xm = Float::with_val(PREC, &tp / k0);
    let mods: Vec<(Float, Float)> = hs
        .iter()
        .map(|h| {
            let v = head_geometry(tr.p, arc, h.c, h.d).upper_slope(&xm);
            let lo = (-Float::with_val(PREC, &v * &tp) / 2u32).exp();
            let base = Float::with_val(PREC, &h.slope * &tp) / k0 + 1u32;
            (lo, crate::real::pow_neg_half(&base, k0))
        })
        .collect();
    let zero = int(PREC, 0);
    let shifts: Vec<(Float, Float)> = hs.iter().map(|h| head_window(tr, h, k0, &zero, &zero)).collect::<Result<_>>()?;
    let (wlo, whi) = tr.window();
    let step = Float::with_val(PREC, &whi - &wlo) / PIECES;
    let mut worst = Float::with_val(PREC, f64::INFINITY);
    let mut sign_ok = true;
    for j in 0..PIECES {
        let a = Float::with_val(PREC, &step * j) + &wlo;
        let b = Float::with_val(PREC, &step * (j + 1)) + &wlo;
        let (ma, mb) = main_window(tr, &a, &b);
        let main = cos_range(&ma, &mb);
        let mut sums = (int(PREC, 0), int(PREC, 0));
        let mut h2 = (int(PREC, 0), int(PREC, 0));
        for i in 0..hs.len() {
            let pa = Float::with_val(PREC, &a + &shifts[i].0);
            let pb = Float::with_val(PREC, &b + &shifts[i].1);
            let (cmn, cmx) = cos_range(&pa, &pb);
            let (l, u) = &mods[i];
            let prods = [
                Float::with_val(PREC, &cmn * l),
                Float::with_val(PREC, &cmn * u),
                Float::with_val(PREC, &cmx * l),
                Float::with_val(PREC, &cmx * u),
            ];
            let mn = prods.iter().min_by(|x, y| x.partial_cmp(y).expect("finite")).expect("4").clone();
            let mx = prods.iter().max_by(|x, y| x.partial_cmp(y).expect("finite")).expect("4").clone();
            if signed && i == 1 {
                h2 = (mn, mx);
            } else {
                sums.0 += mn;
                sums.1 += mx;
            }
        }
        let lhs = Float::with_val(PREC, abs_range(&sums).1 * 2u32) + &rest;
        let rhs = if signed {
            let comb = (Float::with_val(PREC, &main.0 + &h2.0), Float::with_val(PREC, &main.1 + &h2.1));
            if sign_of(&comb).is_none() || sign_of(&comb) != sign_of(&main) {
                sign_ok = false;
            }
            abs_range(&comb).0 * 2u32
        } else {
            Float::with_val(PREC, c0 * 2u32)
        };
        let m = rhs - lhs;
        if m < worst {
            worst = m;
        }
    }
    let mut checks = vec![Check::new("interval bound on every sub-window", worst)];
    checks.push(Check::flag("envelope tail monotone (rho s <= 1)", env.tail_monotone));
    if signed {
        checks.push(Check::flag("main and combined signs agree", sign_ok));
    }
    checks.extend(head_bound_checks(tr, hs, k0, true));
    Ok(Attempt { route: "interval", certificate: None, checks })
}

/// Window `c₀`, the signed `c₀`, and sign agreement for the signed groups.
struct Setup {
    c0_window: Float,
    c0_signed: Option<(Float, bool)>,
}

fn setup(tr: &Triple, hs: &[HeadSpec], k0: i64) -> Result<Setup> {
    let (x, y) = tr.window();
    let (lo, hi) = main_window(tr, &x, &y);
    let main = cos_range(&lo, &hi);
    let c0_window = abs_range(&main).0;
    let c0_signed = if tr.c0_rule == C0Rule::Signed {
        let h = &hs[1];
        let (a, b) = head_window(tr, h, k0, &x, &y)?;
        let r2 = cos_range(&a, &b);
        let agree = sign_of(&main).is_some() && sign_of(&main) == sign_of(&r2);
        let tp = Float::with_val(PREC, &tr.t() * pi(PREC));
        let v = head_geometry(tr.p, tr.arc(), h.c, h.d).upper_slope(&Float::with_val(PREC, &tp / k0));
        let damp = (-Float::with_val(PREC, &v * &tp) / 2u32).exp();
        Some((Float::with_val(PREC, &c0_window + abs_range(&r2).0 * damp), agree))
    } else {
        None
    };
    Ok(Setup { c0_window, c0_signed })
}

pub fn attempt_at(tr: &Triple, k0: i64, fallback: bool) -> Result<Attempt> {
    let arc = tr.arc();
    let hs = heads(tr.p, arc)?;
    let s = setup(tr, &hs, k0)?;
    let (x, y) = tr.window();
    let all: Vec<(i64, i64)> = hs.iter().map(|h| (h.c, h.d)).collect();
    match (&s.c0_signed, fallback) {
        (None, false) => try_algorithm(tr, &hs, &all, &s.c0_window, k0, &x, &y),
        (None, true) => try_interval(tr, &hs, &s.c0_window, k0, false),
        (Some((c0, agree)), false) => {
            let mut a = try_algorithm(tr, &hs[..1], &all, c0, k0, &x, &y)?;
            a.route = "signed";
            a.checks.push(Check::flag("main and second-head signs agree", *agree));
            a.checks.extend(head_bound_checks(tr, &hs[1..], k0, true));
            Ok(a)
        }
        (Some((c0, _)), true) => {
            let mut b = try_interval(tr, &hs, c0, k0, true)?;
            b.route = "signed-interval";
            Ok(b)
        }
    }
}

/// Certify one triple: `k₀` search, then the weights below `k₀`.
pub fn verify_triple(tr: &Triple) -> Result<TripleReport> {
    let arc = tr.arc();
    let hs = heads(tr.p, arc)?;
    let s0 = setup(tr, &hs, 8)?;
    let stated = tr.stated_c0();
    let ambiguity = stated.as_ref().is_some_and(|p| Float::with_val(PREC, p - &s0.c0_window).abs() > 1e-20);
    let mut found: Option<(i64, Attempt)> = None;
    'routes: for fallback in [false, true] {
        for k0 in k0_schedule() {
            let a = attempt_at(tr, k0, fallback)?;
            if a.pass() {
                found = Some((k0, a));
                break 'routes;
            }
        }
    }
    let signed = tr.c0_rule == C0Rule::Signed;
    let c0 = match (&s0.c0_signed, &found) {
        (Some(_), Some((k0, _))) => setup(tr, &hs, *k0)?.c0_signed.expect("signed").0,
        (Some((c, _)), None) => c.clone(),
        _ => s0.c0_window.clone(),
    };
    let mut report = TripleReport {
        id: tr.id.clone(),
        group: tr.group.clone(),
        p: tr.p,
        arc,
        residue: tr.residue,
        x: tr.x.clone(),
        y: tr.y.clone(),
        t: tr.t.clone(),
        c0: c0.clone(),
        stated_c0: stated.map(|p| p.to_f64()),
        editorial_ambiguity: ambiguity,
        route: None,
        k0: None,
        certificate: None,
        checks: Vec::new(),
        pointwise: Vec::new(),
        pass: false,
    };
    let Some((k0, att)) = found else {
        return Ok(report);
    };
    let pts: Vec<PointCheck> = small_weights(tr, k0)?
        .into_iter()
        .map(|(k, a)| point_check(tr, k, a, &s0.c0_window, signed))
        .collect::<Result<_>>()?;
    report.pass = att.pass() && pts.iter().all(|p| p.pass);
    report.route = Some(att.route.to_string());
    report.k0 = Some(k0);
    report.certificate = att.certificate;
    report.checks = att.checks;
    report.pointwise = pts;
    Ok(report)
}

/// All catalogued triples, optionally restricted to one group, in catalog order.
pub fn verify_interval_triples(group: Option<&str>) -> Result<Vec<TripleReport>> {
    let sel: Vec<&Triple> = triples().iter().filter(|t| group.is_none_or(|g| t.group == g)).collect();
    if sel.is_empty() {
        return crate::error::invalid(format!("no triples in group {}", group.unwrap_or("")));
    }
    sel.par_iter().map(|t| verify_triple(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn head_phases_are_twelfths() {
        for (p, arc) in [(5, Arc::A1), (5, Arc::A2), (7, Arc::A1), (7, Arc::A2)] {
            for h in heads(p, arc).unwrap() {
                head_twelfths(p, arc, h.c, h.d).unwrap();
            }
        }
    }

    #[test]
    fn delta_limit_matches_small_x() {
        let t = Float::with_val(PREC, 0.25);
        let (lo, hi) = delta_range(7, Arc::A1, 2, 1, &t, 100000);
        assert!(Float::with_val(PREC, &hi - &lo).abs() < 1e-4);
    }

    #[test]
    fn small_weights_in_window() {
        let tr = triples().iter().find(|t| t.group == "p5-a1-r2" && t.x == "120").unwrap();
        let w = small_weights(tr, 20).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].0, 18);
        let deg = w[0].1.to_f64().to_degrees();
        assert!((deg - 120.91).abs() < 0.01, "{deg}");
        let pc = point_check(tr, 18, w[0].1.clone(), &tr.stated_c0().unwrap(), false).unwrap();
        assert!(pc.pass);
    }
}
