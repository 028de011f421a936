//! The head/tail certificate: given head terms with linear lower bounds
//! `X_i ≥ 1 + u_i(π/k)` and an envelope `b s^{−k/2}` for the rest, decide whether
//! `Σ c_i′ X_i^{−k/2}·2 + b s^{−k/2} < 2c₀` holds for every `k ≥ k₀`.

use rug::Float;
use serde::Serialize;

use super::terms::{envelope, x_value, Envelope};
use super::{head_geometry, heads, HeadSpec, PREC, SLACK_EXP};
use crate::domain_geometry::{ser_float, Arc};
use crate::error::{invalid, Result};
use crate::real::{int, pi, powf};

/// One head term of the algorithm.
#[derive(Debug, Clone, Serialize)]
pub struct HeadTerm {
    pub c: i64,
    pub d: i64,
    /// Weight of the term relative to `2X^{−k/2}`, e.g. a bound on `|cos|` of its phase.
    #[serde(serialize_with = "ser_float")]
    pub c_prime: Float,
    /// `X_i ≥ 1 + u_i π/k`.
    #[serde(serialize_with = "ser_float")]
    pub u: Float,
}

/// Split of `c₀` and `a₁` among the heads, as fractions.
#[derive(Debug, Clone, Serialize)]
pub struct Allocation {
    pub c0_frac: Vec<f64>,
    pub a1_frac: Vec<f64>,
}

impl Allocation {
    pub fn even(c0_frac: Vec<f64>) -> Allocation {
        Allocation { a1_frac: c0_frac.clone(), c0_frac }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmInput {
    pub heads: Vec<HeadTerm>,
    pub envelope: Envelope,
    #[serde(serialize_with = "ser_float")]
    pub t: Float,
    pub k0: i64,
    #[serde(serialize_with = "ser_float")]
    pub c0: Float,
    pub allocation: Allocation,
}

/// A named strict inequality `margin > 0`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "ser_float")]
    pub margin: Float,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, margin: Float) -> Check {
        let pass = margin > slack();
        Check { name: name.into(), margin, pass }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Check {
        let margin = int(PREC, if ok { 1 } else { -1 });
        Check { name: name.into(), margin, pass: ok }
    }
}

/// Pass threshold for strict inequalities.
pub fn slack() -> Float {
    Float::with_val(PREC, Float::i_exp(1, SLACK_EXP))
}

#[derive(Debug, Clone, Serialize)]
pub struct HeadResult {
    pub c: i64,
    pub d: i64,
    #[serde(serialize_with = "ser_float")]
    pub c0_i: Float,
    #[serde(serialize_with = "ser_float")]
    pub a1_i: Float,
    /// `c_i = c_i′/c₀,ᵢ`
    #[serde(serialize_with = "ser_float")]
    pub c_i: Float,
    /// `1 − c_i(a₁,ᵢ/c_i′)(tπ/k₀)²`
    #[serde(serialize_with = "ser_float")]
    pub guard: Float,
    #[serde(serialize_with = "ser_float")]
    pub a2: Float,
    #[serde(serialize_with = "ser_float")]
    pub a3: Float,
    #[serde(serialize_with = "ser_float")]
    pub a4: Float,
    #[serde(serialize_with = "ser_float")]
    pub y: Float,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub k0: i64,
    #[serde(serialize_with = "ser_float")]
    pub a1: Float,
    pub heads: Vec<HeadResult>,
    pub allocation: Allocation,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Certificate {
    pub fn min_y(&self) -> Float {
        self.heads
            .iter()
            .map(|h| h.y.clone())
            .min_by(|a, b| a.partial_cmp(b).expect("finite"))
            .unwrap_or_else(|| int(PREC, 0))
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

fn validate(inp: &AlgorithmInput) -> Result<()> {
    let n = inp.heads.len();
    if n == 0 {
        return invalid("at least one head term is required");
    }
    if inp.k0 < 4 || inp.k0 % 2 != 0 {
        return invalid("k0 must be even and at least 4");
    }
    if inp.t <= 0 || inp.c0 <= 0 {
        return invalid("t and c0 must be positive");
    }
    let a = &inp.allocation;
    if a.c0_frac.len() != n || a.a1_frac.len() != n {
        return invalid("allocation length must match the head count");
    }
    for v in [&a.c0_frac, &a.a1_frac] {
        if v.iter().any(|&f| f.is_nan() || f <= 0.0) || (v.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return invalid("allocation fractions must be positive and sum to 1");
        }
    }
    if inp.heads.iter().any(|h| h.c_prime <= 0) {
        return invalid("c_i′ must be positive");
    }
    Ok(())
}

/// Least admissible `a₁`: `b k₀²/(2 s^{k₀/2} t² π²)`, nudged upward.
fn a1_floor(env: &Envelope, k0: i64, t: &Float) -> Float {
    let half = Float::with_val(PREC, k0) / 2u32;
    let pi2 = Float::with_val(PREC, pi(PREC).square_ref());
    let den = powf(&env.s, &half) * Float::with_val(PREC, t.square_ref()) * pi2 * 2u32;
    Float::with_val(PREC, &env.b * (k0 * k0)) / den
}

struct Constants {
    a1: Float,
    heads: Vec<HeadResult>,
}

/// Steps 2 and 3 for a fixed `a₁` and `k₀`.
fn head_constants(inp: &AlgorithmInput, a1: &Float, k0: i64) -> Constants {
    let x0 = Float::with_val(PREC, &inp.t * pi(PREC)) / k0;
    let x02 = Float::with_val(PREC, x0.square_ref());
    let tpi2 = Float::with_val(PREC, &inp.t * pi(PREC)).square();
    let two_k = Float::with_val(PREC, 2) / k0;
    let heads = inp
        .heads
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let c0_i = Float::with_val(PREC, &inp.c0 * inp.allocation.c0_frac[i]);
            let a1_i = Float::with_val(PREC, a1 * inp.allocation.a1_frac[i]);
            let c_i = Float::with_val(PREC, &h.c_prime / &c0_i);
            let r = Float::with_val(PREC, &a1_i / &h.c_prime);
            let guard = int(PREC, 1) - Float::with_val(PREC, &c_i * &r) * &x02;
            let a2 = if guard > 0 {
                Float::with_val(PREC, c_i.square_ref()) * &r / &guard
            } else {
                Float::with_val(PREC, f64::INFINITY)
            };
            let a3 = powf(&c_i, &two_k);
            let a4 = Float::with_val(PREC, &a2 * 2u32) / (Float::with_val(PREC, &c_i * k0)) * &a3;
            // c^{2/k} ≤ max(1, c^{2/k₀}) for k ≥ k₀
            let cc = if a3 > 1 { a3.clone() } else { int(PREC, 1) };
            let l = Float::with_val(PREC, c_i.ln_ref());
            let mut y = Float::with_val(PREC, &h.u * pi(PREC)) - Float::with_val(PREC, &l * 2u32);
            y -= Float::with_val(PREC, l.square_ref()) * 2u32 * &cc / k0;
            y -= Float::with_val(PREC, &a2 * 2u32) * &tpi2 / &c_i * &cc / (k0 * k0);
            if guard <= 0 {
                y = Float::with_val(PREC, f64::NEG_INFINITY);
            }
            HeadResult { c: h.c, d: h.d, c0_i, a1_i, c_i, guard, a2, a3, a4, y }
        })
        .collect();
    Constants { a1: a1.clone(), heads }
}

/// Steps 1 to 3 with the given allocation.
pub fn run_algorithm(inp: &AlgorithmInput) -> Result<Certificate> {
    validate(inp)?;
    let env = &inp.envelope;
    let k0 = inp.k0;
    let floor = a1_floor(env, k0, &inp.t);
    let a1 = Float::with_val(PREC, &floor * (1.0 + 1e-9)) + Float::with_val(PREC, Float::i_exp(1, -60));
    let k = head_constants(inp, &a1, k0);

    let mut checks = Vec::new();
    let ln_s = Float::with_val(PREC, env.s.ln_ref());
    checks.push(Check::new("k0 log s > 4", Float::with_val(PREC, &ln_s * k0) - 4u32));
    checks.push(Check::flag("envelope tail monotone (rho s <= 1)", env.tail_monotone));
    checks.push(Check::new("a1 above its floor", Float::with_val(PREC, &a1 - &floor)));
    // f(k) = s^{k/2}/b − k²/(2a₁t²π²) ≥ 0 for k ≥ k₀ gives b s^{−k/2} ≤ 2a₁(tπ/k)²
    let half = Float::with_val(PREC, k0) / 2u32;
    let sk = powf(&env.s, &half);
    let q = Float::with_val(PREC, &a1 * Float::with_val(PREC, &inp.t * pi(PREC)).square());
    let f0 = Float::with_val(PREC, &sk / &env.b) - Float::with_val(PREC, k0 * k0) / (Float::with_val(PREC, &q * 2u32));
    let l2 = Float::with_val(PREC, &ln_s / 2u32);
    let f1 = Float::with_val(PREC, &sk * &l2) / &env.b - Float::with_val(PREC, k0) / &q;
    let f2 = Float::with_val(PREC, &sk * Float::with_val(PREC, l2.square_ref())) / &env.b - Float::with_val(PREC, 1) / &q;
    checks.push(Check::new("f(k0) > 0", f0));
    checks.push(Check::new("f'(k0) > 0", f1));
    checks.push(Check::new("f''(k0) > 0", f2));
    for h in &k.heads {
        checks.push(Check::new(format!("guard ({}, {})", h.c, h.d), h.guard.clone()));
        checks.push(Check::new(format!("Y ({}, {}) > 0", h.c, h.d), h.y.clone()));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Certificate { k0, a1: k.a1, heads: k.heads, allocation: inp.allocation.clone(), checks, pass })
}

/// Candidate allocations for two heads: proportional to `c_i′`, skewed, then the
/// maximin point of `min Y` on the line `c₀` fractions = `a₁` fractions.
fn candidate_allocations(inp: &AlgorithmInput) -> Vec<Allocation> {
    let n = inp.heads.len();
    if n == 1 {
        return vec![Allocation::even(vec![1.0])];
    }
    let w: Vec<f64> = inp.heads.iter().map(|h| h.c_prime.to_f64()).collect();
    let tot: f64 = w.iter().sum();
    let prop: Vec<f64> = w.iter().map(|x| x / tot).collect();
    let mut out = vec![Allocation::even(prop.clone())];
    for skew in [0.25, 0.5, 2.0, 4.0] {
        let mut c = w.clone();
        c[0] *= skew;
        let s: f64 = c.iter().sum();
        out.push(Allocation { c0_frac: c.iter().map(|x| x / s).collect(), a1_frac: prop.clone() });
    }
    out
}

fn min_y_at(inp: &AlgorithmInput, a1: &Float, f: f64) -> (Float, Float) {
    let mut trial = inp.clone();
    trial.allocation = Allocation::even(vec![f, 1.0 - f]);
    let h = head_constants(&trial, a1, inp.k0).heads;
    (h[0].y.clone(), h[1].y.clone())
}

/// Maximin split for two heads by bisection on the crossing of `Y₁` and `Y₂`.
fn maximin_fraction(inp: &AlgorithmInput) -> f64 {
    let a1 = a1_floor(&inp.envelope, inp.k0, &inp.t) * (1.0 + 1e-9);
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-6);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        let (y1, y2) = min_y_at(inp, &a1, m);
        if y1 < y2 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Run the algorithm over the candidate allocations and return the best certificate.
pub fn run_with_search(inp: &AlgorithmInput) -> Result<Certificate> {
    let mut cands = candidate_allocations(inp);
    if inp.heads.len() == 2 {
        cands.push(Allocation::even(vec![maximin_fraction(inp), 1.0 - maximin_fraction(inp)]));
    }
    let mut best: Option<Certificate> = None;
    for a in cands {
        let mut trial = inp.clone();
        trial.allocation = a;
        let cert = run_algorithm(&trial)?;
        let better = match &best {
            None => true,
            Some(b) => (cert.pass && !b.pass) || (cert.pass == b.pass && cert.min_y() > b.min_y()),
        };
        if better {
            best = Some(cert);
        }
    }
    Ok(best.expect("at least one allocation"))
}

/// Direct check at one weight `k`: constants from the algorithm with `k₀ = k`,
/// then `X_i(θ₀ ∓ tπ/k) − (a₃,ᵢ + a₄,ᵢ(tπ/k)²) > 0` with the exact `X_i`.
#[derive(Debug, Clone, Serialize)]
pub struct DirectCheck {
    pub k: i64,
    pub fraction: f64,
    pub margins: Vec<(i64, i64, f64)>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn direct_check(p: u32, arc: Arc, inp: &AlgorithmInput) -> Result<DirectCheck> {
    let k = inp.k0;
    let base = {
        let mut i = inp.clone();
        if i.heads.len() == 2 {
            i.allocation = Allocation::even(vec![0.5, 0.5]);
        }
        validate(&i)?;
        i
    };
    let a1 = a1_floor(&base.envelope, k, &base.t) * (1.0 + 1e-9);
    let x = Float::with_val(PREC, &base.t * pi(PREC)) / k;
    let x2 = Float::with_val(PREC, x.square_ref());
    let geo: Vec<(Float, Float)> = base
        .heads
        .iter()
        .map(|h| {
            let g = head_geometry(p, arc, h.c, h.d);
            let th = g.theta_at(&x);
            (x_value(p, arc, h.c, h.d, &th), th)
        })
        .collect();
    let margins_at = |f: f64| -> Vec<Float> {
        let mut trial = base.clone();
        if trial.heads.len() == 2 {
            trial.allocation = Allocation::even(vec![f, 1.0 - f]);
        }
        head_constants(&trial, &a1, k)
            .heads
            .iter()
            .zip(&geo)
            .map(|(h, (xv, _))| {
                if h.guard <= 0 {
                    return Float::with_val(PREC, f64::NEG_INFINITY);
                }
                Float::with_val(PREC, xv - &h.a3) - Float::with_val(PREC, &h.a4 * &x2)
            })
            .collect()
    };
    let min_of = |v: &[Float]| v.iter().min_by(|a, b| a.partial_cmp(b).expect("ordered")).cloned().expect("nonempty");
    let mut best = (0.5, margins_at(0.5));
    if base.heads.len() == 2 {
        for j in 1..1000 {
            let f = j as f64 / 1000.0;
            let m = margins_at(f);
            if min_of(&m) > min_of(&best.1) {
                best = (f, m);
            }
        }
    } else {
        best = (1.0, margins_at(1.0));
    }
    let env = &base.envelope;
    let half = Float::with_val(PREC, k) / 2u32;
    let lhs = Float::with_val(PREC, &env.b / powf(&env.s, &half));
    let rhs = Float::with_val(PREC, &a1 * &x2) * 2u32;
    let mut checks = vec![Check::new("b s^{-k/2} <= 2 a1 (t pi/k)^2", rhs - lhs)];
    for (h, m) in base.heads.iter().zip(&best.1) {
        checks.push(Check::new(format!("X - (a3 + a4 x^2) ({}, {})", h.c, h.d), m.clone()));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(DirectCheck {
        k,
        fraction: best.0,
        margins: base.heads.iter().zip(&best.1).map(|(h, m)| (h.c, h.d, m.to_f64())).collect(),
        checks,
        pass,
    })
}

/// Input for the catalog heads of `(p, arc)` with all `c_i′ = 1` and `u_i = slope_i t`.
pub fn standard_input(p: u32, arc: Arc, k0: i64, c0: Float, t: Float) -> Result<AlgorithmInput> {
    let hs: Vec<HeadSpec> = heads(p, arc)?;
    let excl: Vec<(i64, i64)> = hs.iter().map(|h| (h.c, h.d)).collect();
    let env = envelope(p, arc, k0, &excl)?;
    let heads = hs
        .iter()
        .map(|h| HeadTerm { c: h.c, d: h.d, c_prime: int(PREC, 1), u: Float::with_val(PREC, &h.slope * &t) })
        .collect::<Vec<_>>();
    let n = heads.len();
    Ok(AlgorithmInput {
        heads,
        envelope: env,
        t,
        k0,
        c0,
        allocation: Allocation::even(vec![1.0 / n as f64; n]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rat;

    fn cos_pi(num: i64, den: i64) -> Float {
        (rat(PREC, num, den) * pi(PREC)).cos()
    }

    #[test]
    fn first_item_passes_and_low_k0_fails() {
        let inp = standard_input(5, Arc::A1, 12, cos_pi(1, 3), rat(PREC, 1, 6)).unwrap();
        let c = run_with_search(&inp).unwrap();
        assert!(c.pass, "{:?}", c.failed_checks());
        let inp = standard_input(5, Arc::A1, 4, cos_pi(1, 3), rat(PREC, 1, 6)).unwrap();
        assert!(!run_with_search(&inp).unwrap().pass);
    }

    #[test]
    fn deterministic() {
        let inp = standard_input(7, Arc::A1, 10, cos_pi(1, 3), rat(PREC, 1, 3)).unwrap();
        let a = serde_json::to_string(&run_with_search(&inp).unwrap()).unwrap();
        let b = serde_json::to_string(&run_with_search(&inp).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_allocation() {
        let mut inp = standard_input(7, Arc::A1, 10, cos_pi(1, 3), rat(PREC, 1, 3)).unwrap();
        inp.allocation = Allocation::even(vec![0.7, 0.7]);
        assert!(run_algorithm(&inp).is_err());
    }
}
