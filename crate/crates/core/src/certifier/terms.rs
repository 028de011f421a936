//! Lattice term classes of the split sums, their suprema on arc ranges, and tail bounds.

use rug::Float;
use serde::Serialize;

use super::PREC;
use crate::domain_geometry::{arc_range, check_p, ser_float, Arc};
use crate::error::{invalid, Error, Result};
use crate::evaluator::{is_coprime, lattice_tail_sum};
use crate::real::{int, pi, powf, rat, sqrt_i};

/// One `±(c, d)` pair of the split sum, represented with `c ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TermClass {
    pub c: i64,
    pub d: i64,
    /// A2 term with `cd` odd, carrying the `2^k` factor.
    pub scaled: bool,
    /// `c² + d²`
    pub n: i64,
}

/// All coprime `(c, d)` with `c ≥ 1`, `p ∤ c` and `2 ≤ c² + d² ≤ n_cut`, sorted by `(N, c, d)`.
pub fn enumerate_terms(p: u32, arc: Arc, n_cut: i64) -> Result<Vec<TermClass>> {
    check_p(p)?;
    if n_cut < 2 {
        return invalid("n_cut must be at least 2");
    }
    let m = (n_cut as f64).sqrt().floor() as i64 + 1;
    let mut out = Vec::new();
    for c in 1..=m {
        if c % p as i64 == 0 {
            continue;
        }
        for d in -m..=m {
            let n = c * c + d * d;
            if n < 2 || n > n_cut || !is_coprime(c, d) {
                continue;
            }
            let scaled = arc == Arc::A2 && (c * d) % 2 != 0;
            out.push(TermClass { c, d, scaled, n });
        }
    }
    out.sort_by_key(|t| (t.n, t.c, t.d));
    Ok(out)
}

/// `X = |c e^{iθ/2} + √p d e^{−iθ/2}|² = c² + pd² + 2√p cd cos θ`, divided by 4 for scaled terms.
pub fn x_value(p: u32, arc: Arc, c: i64, d: i64, theta: &Float) -> Float {
    let prec = theta.prec();
    let base = Float::with_val(prec, c * c + p as i64 * d * d);
    let cross = sqrt_i(prec, p) * (2 * c * d) * theta.clone().cos();
    let q = base + cross;
    if arc == Arc::A2 && (c * d) % 2 != 0 {
        q / 4u32
    } else {
        q
    }
}

/// Least `X` of a term over `[lo, hi]`. `X` is monotone in `cos θ`, so the endpoints suffice.
pub fn term_sup(term: &TermClass, p: u32, arc: Arc, lo: &Float, hi: &Float) -> Result<Float> {
    let a = x_value(p, arc, term.c, term.d, lo);
    let b = x_value(p, arc, term.c, term.d, hi);
    let x = if a < b { a } else { b };
    if x <= 0 {
        return Err(Error::Internal(format!("degenerate term ({}, {})", term.c, term.d)));
    }
    Ok(x)
}

/// Coefficients of the closed-form tails `A/(den (k − 3)) · ρ^{k/2}` for `N ≥ N₀`.
#[derive(Debug, Clone, Serialize)]
pub struct TailSpec {
    pub n0: i64,
    #[serde(serialize_with = "ser_float")]
    pub a: Float,
    pub den: u32,
    #[serde(serialize_with = "ser_float")]
    pub rho: Float,
}

pub fn tail_spec(p: u32, arc: Arc) -> Result<TailSpec> {
    check_p(p)?;
    let prec = PREC;
    Ok(match (p, arc) {
        (5, Arc::A1) => TailSpec { n0: 25, a: sqrt_i(prec, 6) * 384u32, den: 1, rho: rat(prec, 1, 4) },
        (5, Arc::A2) => TailSpec { n0: 34, a: sqrt_i(prec, 33) * 2112u32, den: 1, rho: rat(prec, 8, 33) },
        (7, Arc::A1) => TailSpec { n0: 65, a: int(prec, 28160), den: 7, rho: rat(prec, 11, 64) },
        _ => TailSpec { n0: 97, a: sqrt_i(prec, 6) * 62464u32, den: 21, rho: rat(prec, 1, 8) },
    })
}

fn closed_tail(spec: &TailSpec, k: i64, scale: &Float) -> Float {
    let prec = PREC;
    let kk = Float::with_val(prec, k);
    let pw = powf(&spec.rho, &(kk.clone() / 2u32));
    Float::with_val(prec, &spec.a * scale) / (kk - 3u32) / spec.den * pw
}

/// The closed-form tail for `N ≥ N₀`, verbatim.
pub fn tail_bound(p: u32, arc: Arc, k: i64) -> Result<Float> {
    if k < 4 {
        return invalid("tail bound needs k ≥ 4");
    }
    Ok(closed_tail(&tail_spec(p, arc)?, k, &int(PREC, 1)))
}

/// Scale applied to the closed-form tail in certified sums: `1` on A1, `1/8` on A2.
pub fn tail_scale(arc: Arc) -> Float {
    match arc {
        Arc::A1 => int(PREC, 1),
        Arc::A2 => rat(PREC, 1, 8),
    }
}

/// Tail used by `r_bound` and the algorithm envelopes.
pub fn certified_tail(p: u32, arc: Arc, k: i64) -> Result<Float> {
    if k < 4 {
        return invalid("tail bound needs k ≥ 4");
    }
    Ok(closed_tail(&tail_spec(p, arc)?, k, &tail_scale(arc)))
}

/// Least eigenvalue of the binary form `X(c, d)` over the whole arc.
pub fn arc_form_floor(p: u32, arc: Arc) -> Result<Float> {
    let (lo, hi) = arc_range(p, arc, PREC)?;
    let a = crate::evaluator::form_floor(p, arc, &lo);
    let b = crate::evaluator::form_floor(p, arc, &hi);
    Ok(if a < b { a } else { b })
}

/// Integral-comparison tail over all lattice vectors with `c² + d² ≥ n_min`:
/// `λ^{−k/2} Σ_{|v|² ≥ n_min} |v|^{−k}`.
pub fn tail_bound_generic(p: u32, arc: Arc, k: i64, n_min: i64) -> Result<Float> {
    if k < 4 || n_min < 4 {
        return invalid("generic tail needs k ≥ 4 and n_min ≥ 4");
    }
    let lam = arc_form_floor(p, arc)?;
    let r = ((n_min - 1) as f64).sqrt();
    Ok(crate::real::pow_neg_half(&lam, k) * lattice_tail_sum(k, r, PREC))
}

/// Comparison of the certified tail with an explicit lattice bound.
#[derive(Debug, Clone, Serialize)]
pub struct TailCheck {
    pub p: u32,
    pub arc: Arc,
    /// Least ratio certified / explicit over the checked weights.
    #[serde(serialize_with = "ser_float")]
    pub min_ratio: Float,
    pub at_k: i64,
    /// Beyond this weight the ratio is increasing.
    pub checked_to: i64,
    pub pass: bool,
}

/// Explicit bound: exact shell counts `r₂(N)` for `N₀ ≤ N < n1`, each weighted by
/// `(λN)^{−k/2}`, plus the integral tail beyond `n1`.
pub fn tail_soundness(p: u32, arc: Arc, n1: i64) -> Result<TailCheck> {
    let spec = tail_spec(p, arc)?;
    if n1 <= spec.n0 + 1 {
        return invalid("n1 must exceed the tail threshold");
    }
    let prec = PREC;
    let lam = arc_form_floor(p, arc)?;
    let m = (n1 as f64).sqrt() as i64 + 1;
    let mut shells = std::collections::BTreeMap::<i64, u32>::new();
    for c in -m..=m {
        for d in -m..=m {
            let n = c * c + d * d;
            if n >= spec.n0 && n < n1 {
                *shells.entry(n).or_default() += 1;
            }
        }
    }
    let explicit = |k: i64| -> Float {
        let mut s = Float::new(prec);
        for (&n, &v) in &shells {
            let x = Float::with_val(prec, &lam * n);
            s += crate::real::pow_neg_half(&x, k) * v;
        }
        s + crate::real::pow_neg_half(&lam, k) * lattice_tail_sum(k, ((n1 - 1) as f64).sqrt(), prec)
    };
    // (k − 3) q^{k/2} decreases once k − 3 > 2 / log(1/q), q = 1/(ρ λ N₀)
    let q = Float::with_val(prec, &spec.rho * &lam) * spec.n0;
    if q <= 1 {
        return Err(Error::Internal("tail comparison needs ρλN₀ > 1".into()));
    }
    let kmax = (Float::with_val(prec, 2u32) / q.ln()).to_f64().ceil() as i64 + 8;
    let kmax = (kmax.max(60) + 1) / 2 * 2;
    let mut best: Option<(Float, i64)> = None;
    for k in (4..=kmax).step_by(2) {
        let r = certified_tail(p, arc, k)? / explicit(k);
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, k));
        }
    }
    let (min_ratio, at_k) = best.expect("nonempty range");
    let pass = min_ratio > 1;
    Ok(TailCheck { p, arc, min_ratio, at_k, checked_to: kmax, pass })
}

/// All term classes below the tail threshold, without the `N = 1` main term.
pub fn finite_classes(p: u32, arc: Arc) -> Result<Vec<TermClass>> {
    enumerate_terms(p, arc, tail_spec(p, arc)?.n0 - 1)
}

/// `Σ_{2 ≤ N < N₀} 2 X_min^{−k/2}` over `[lo, hi]` plus the certified tail: a bound on `|R|`.
pub fn r_bound(k: i64, p: u32, arc: Arc, lo: &Float, hi: &Float) -> Result<Float> {
    if k < 4 || k % 2 != 0 {
        return invalid(format!("weight must be even and at least 4, got {k}"));
    }
    let (alo, ahi) = arc_range(p, arc, PREC)?;
    let slack = Float::with_val(PREC, Float::i_exp(1, -100));
    if *lo < Float::with_val(PREC, &alo - &slack) || *hi > Float::with_val(PREC, &ahi + &slack) || lo > hi {
        return invalid("θ range must lie inside the arc");
    }
    let mut s = Float::new(PREC);
    for t in finite_classes(p, arc)? {
        let x = term_sup(&t, p, arc, lo, hi)?;
        s += crate::real::pow_neg_half(&x, k) * 2u32;
    }
    Ok(s + certified_tail(p, arc, k)?)
}

/// `r_bound` over the whole arc.
pub fn r_bound_arc(k: i64, p: u32, arc: Arc) -> Result<Float> {
    let (lo, hi) = arc_range(p, arc, PREC)?;
    r_bound(k, p, arc, &lo, &hi)
}

/// `2 − 288π²/((π² + 66)k²)`, the head bound on A2 (`p = 5`) for `θ ≥ α₅ + π/(2k)`.
pub fn refined_head_p5a2(k: i64) -> Float {
    let prec = PREC;
    let pi2 = Float::with_val(prec, pi(prec).square_ref());
    let c = Float::with_val(prec, &pi2 * 288u32) / (pi2 + 66u32);
    int(prec, 2) - c / Float::with_val(prec, k * k)
}

/// Bound on `|R|` on A2 (`p = 5`) for `θ ∈ [α₅ + π/(2k), π/2]`: the refined head plus
/// every other class over the whole arc plus the certified tail.
pub fn refined_r_bound_p5a2(k: i64) -> Result<Float> {
    if k < 12 || k % 2 != 0 {
        return invalid("the refined head bound needs even k ≥ 12");
    }
    let (lo, hi) = arc_range(5, Arc::A2, PREC)?;
    let mut s = refined_head_p5a2(k);
    for t in finite_classes(5, Arc::A2)? {
        if (t.c, t.d) == (1, -1) {
            continue;
        }
        let x = term_sup(&t, 5, Arc::A2, &lo, &hi)?;
        s += crate::real::pow_neg_half(&x, k) * 2u32;
    }
    Ok(s + certified_tail(5, Arc::A2, k)?)
}

/// A group of classes sharing the same least `X` over the arc: the bound carries `coef · X^{−k/2}`.
#[derive(Debug, Clone, Serialize)]
pub struct TermGroup {
    pub coef: u32,
    #[serde(serialize_with = "ser_float")]
    pub x: Float,
}

/// Classes grouped by least `X` over the whole arc, in increasing `X`.
pub fn grouped_terms(p: u32, arc: Arc) -> Result<Vec<TermGroup>> {
    let (lo, hi) = arc_range(p, arc, PREC)?;
    let mut groups: Vec<TermGroup> = Vec::new();
    let tol = Float::with_val(PREC, Float::i_exp(1, -90));
    for t in finite_classes(p, arc)? {
        let x = term_sup(&t, p, arc, &lo, &hi)?;
        match groups.iter_mut().find(|g| Float::with_val(PREC, &g.x - &x).abs() < tol) {
            Some(g) => g.coef += 2,
            None => groups.push(TermGroup { coef: 2, x }),
        }
    }
    groups.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite"));
    Ok(groups)
}

/// The displayed terms of the stated bound, as `(coef, X)` in display order:
/// head, the next two, and the last finite term.
pub fn displayed_terms(p: u32, arc: Arc) -> [(u32, i64, i64); 4] {
    // (coef, X numerator, X denominator)
    match (p, arc) {
        (5, Arc::A1) => [(2, 1, 1), (4, 2, 1), (2, 3, 1), (2, 81, 1)],
        (5, Arc::A2) => [(2, 1, 1), (2, 3, 2), (2, 2, 1), (2, 129, 1)],
        (7, Arc::A1) => [(4, 1, 1), (6, 3, 1), (4, 7, 1), (2, 352, 1)],
        _ => [(4, 1, 1), (2, 2, 1), (2, 3, 1), (2, 571, 1)],
    }
}

/// One displayed term compared against the enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct DisplayCheck {
    pub position: &'static str,
    pub stated: (u32, String),
    pub enumerated: (u32, String),
    pub matches: bool,
}

/// Compare the displayed head, leading and last terms with the enumerated groups.
pub fn check_displayed_terms(p: u32, arc: Arc) -> Result<Vec<DisplayCheck>> {
    let g = grouped_terms(p, arc)?;
    if g.len() < 4 {
        return Err(Error::Internal("too few term groups".into()));
    }
    let shown = displayed_terms(p, arc);
    let picks = [("head", &g[0]), ("second", &g[1]), ("third", &g[2]), ("last", &g[g.len() - 1])];
    let tol = Float::with_val(PREC, Float::i_exp(1, -90));
    Ok(picks
        .iter()
        .zip(shown.iter())
        .map(|((pos, grp), &(coef, num, den))| {
            let x = rat(PREC, num, den);
            let matches = grp.coef == coef && Float::with_val(PREC, &grp.x - &x).abs() < tol;
            DisplayCheck {
                position: pos,
                stated: (coef, format!("{num}/{den}")),
                enumerated: (grp.coef, format!("{:.6}", grp.x.to_f64())),
                matches,
            }
        })
        .collect())
}

/// Envelope `Σ_{non-head} 2X^{−k/2} ≤ b s^{−k/2}` valid for every `k ≥ k0`.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    #[serde(serialize_with = "ser_float")]
    pub b: Float,
    #[serde(serialize_with = "ser_float")]
    pub s: Float,
    /// `ρ s ≤ 1` makes the tail part non-increasing in `k` after normalisation.
    pub tail_monotone: bool,
}

pub fn envelope(p: u32, arc: Arc, k0: i64, exclude: &[(i64, i64)]) -> Result<Envelope> {
    if k0 < 4 {
        return invalid("k0 must be at least 4");
    }
    let (lo, hi) = arc_range(p, arc, PREC)?;
    let xs: Vec<Float> = finite_classes(p, arc)?
        .iter()
        .filter(|t| !exclude.contains(&(t.c, t.d)))
        .map(|t| term_sup(t, p, arc, &lo, &hi))
        .collect::<Result<_>>()?;
    let s = xs.iter().min_by(|a, b| a.partial_cmp(b).expect("finite")).cloned().ok_or_else(|| {
        Error::Internal("no non-head classes".into())
    })?;
    let half = Float::with_val(PREC, k0) / 2u32;
    let mut b = Float::new(PREC);
    for x in &xs {
        b += powf(&Float::with_val(PREC, &s / x), &half) * 2u32;
    }
    let spec = tail_spec(p, arc)?;
    let rs = Float::with_val(PREC, &spec.rho * &s);
    let tail = Float::with_val(PREC, &spec.a * tail_scale(arc)) / ((k0 - 3) as u32) / spec.den * powf(&rs, &half);
    Ok(Envelope { b: b + tail, s, tail_monotone: rs <= 1 })
}
