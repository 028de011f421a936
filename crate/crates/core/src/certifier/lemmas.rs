//! Verification of the lemma items.

use rug::Float;
use serde::Serialize;

use super::algorithm::{direct_check, run_with_search, standard_input, Certificate, Check, DirectCheck};
use super::catalog::{lemma, lemmas, LemmaItem, Route};
use super::terms::{finite_classes, refined_head_p5a2, refined_r_bound_p5a2, tail_spec, term_sup};
use super::{head_geometry, heads, PREC};
use crate::domain_geometry::{arc_range, ser_float, Arc};
use crate::error::Result;
use crate::real::{int, pi, pow_neg_half, rat};

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub id: String,
    pub p: u32,
    pub arc: Arc,
    pub route: Route,
    pub k0: i64,
    /// `cos(c₀′π)`
    #[serde(serialize_with = "ser_float")]
    pub c0: Float,
    #[serde(serialize_with = "ser_float")]
    pub t: Float,
    pub certificate: Option<Certificate>,
    pub direct: Vec<DirectCheck>,
    /// Route-specific checks: head bounds, or the refined-bound chain.
    pub checks: Vec<Check>,
    /// Stated intermediate steps that are recorded but not needed for the verdict.
    pub notes: Vec<Check>,
    /// The refined bound at `k₀` (refined route only).
    pub bound_at_k0: Option<f64>,
    pub pass: bool,
}

fn head_checks(item: &LemmaItem, k_min: i64) -> Result<Vec<Check>> {
    let arc = item.arc();
    let xm = Float::with_val(PREC, &item.t() * pi(PREC)) / k_min;
    Ok(heads(item.p, arc)?
        .iter()
        .map(|h| {
            let g = head_geometry(item.p, arc, h.c, h.d);
            Check::flag(format!("X ({}, {}) >= 1 + u x", h.c, h.d), g.lower_bound_holds(&h.slope, &xm))
        })
        .collect())
}

/// The refined route on A2 (`p = 5`): for `k ≥ k₀`,
/// `|R| ≤ (2 − C/k²) + rest(k)` with `k² rest(k)` decreasing, so `bound(k₀) < 2` suffices.
fn refined_checks(k0: i64) -> Result<(Vec<Check>, Vec<Check>, Float)> {
    let mut checks = Vec::new();
    let bound = refined_r_bound_p5a2(k0)?;
    checks.push(Check::new("bound(k0) < 2", int(PREC, 2) - &bound));
    // smallest X among the non-head classes over the arc
    let (lo, hi) = arc_range(5, Arc::A2, PREC)?;
    let mut s: Option<Float> = None;
    for t in finite_classes(5, Arc::A2)? {
        if (t.c, t.d) == (1, -1) {
            continue;
        }
        let x = term_sup(&t, 5, Arc::A2, &lo, &hi)?;
        if s.as_ref().is_none_or(|s| x < *s) {
            s = Some(x);
        }
    }
    let s = s.expect("non-head classes exist");
    checks.push(Check::new("k0 log s > 4 (k^2 s^(-k/2) decreasing)", Float::with_val(PREC, s.ln_ref()) * k0 - 4u32));
    // d/dk log(k² A ρ^{k/2}/(k − 3)) = 2/k − 1/(k − 3) + log ρ/2 < 2/k + log ρ/2
    let rho = tail_spec(5, Arc::A2)?.rho;
    let d = Float::with_val(PREC, 2) / k0 + Float::with_val(PREC, rho.ln_ref()) / 2u32;
    checks.push(Check::new("k^2 tail(k) decreasing", -d));
    // X = 1 + (1 − cos x)/2 + sin x ≥ 1 + (16/11)x² on (0, π/24]: sin x ≥ x(1 − x²/6) ≥ (16/11)x²
    let x = pi(PREC) / 24u32;
    let lhs = int(PREC, 1) - Float::with_val(PREC, x.square_ref()) / 6u32;
    let rhs = Float::with_val(PREC, &x * rat(PREC, 16, 11));
    checks.push(Check::new("X >= 1 + (16/11) x^2 on (0, pi/24]", lhs - rhs));
    // as stated; false, since 1 − cos x ≤ x²/2
    let stated = int(PREC, 1) - x.clone().cos() - Float::with_val(PREC, x.square_ref()) * rat(PREC, 32, 33);
    let notes = vec![Check::new("stated: 1 - cos x >= (32/33) x^2 at pi/24", stated)];
    // head inequality: exact at k₀..=200, uniform bound beyond
    let g = head_geometry(5, Arc::A2, 1, -1);
    let mut worst: Option<Float> = None;
    for k in (k0..=200).step_by(2) {
        let th = g.theta_at(&(pi(PREC) / (2 * k)));
        let xv = super::terms::x_value(5, Arc::A2, 1, -1, &th);
        let m = refined_head_p5a2(k) - pow_neg_half(&xv, k) * 2u32;
        if worst.as_ref().is_none_or(|w| m < *w) {
            worst = Some(m);
        }
    }
    checks.push(Check::new("2 X^(-k/2) <= 2 - C/k^2 for k0 <= k <= 200", worst.expect("range nonempty")));
    // a ≥ 0 and sin x ≥ 2x/π give X ≥ 1 + 1/k, and (1 + 1/k)^{−k/2} ≤ 2^{−1/2}
    let uniform = refined_head_p5a2(k0) - int(PREC, 2).sqrt();
    checks.push(Check::flag("head coefficient a >= 0", g.a >= 0));
    checks.push(Check::new("2^(1/2) < 2 - C/k0^2", uniform));
    Ok((checks, notes, bound))
}

pub fn verify_item(item: &LemmaItem) -> Result<LemmaReport> {
    let arc = item.arc();
    let mut report = LemmaReport {
        id: item.id.clone(),
        p: item.p,
        arc,
        route: item.route,
        k0: item.k0,
        c0: item.c0(),
        t: item.t(),
        certificate: None,
        direct: Vec::new(),
        checks: Vec::new(),
        notes: Vec::new(),
        bound_at_k0: None,
        pass: false,
    };
    match item.route {
        Route::Refined => {
            let (checks, notes, bound) = refined_checks(item.k0)?;
            report.checks = checks;
            report.notes = notes;
            report.bound_at_k0 = Some(bound.to_f64());
            report.pass = report.checks.iter().all(|c| c.pass);
        }
        Route::Algorithm => {
            let inp = standard_input(item.p, arc, item.k0, item.c0(), item.t())?;
            let cert = run_with_search(&inp)?;
            let k_min = item.direct_k.iter().copied().chain([item.k0]).min().expect("nonempty");
            report.checks = head_checks(item, k_min)?;
            for &k in &item.direct_k {
                let inp = standard_input(item.p, arc, k, item.c0(), item.t())?;
                report.direct.push(direct_check(item.p, arc, &inp)?);
            }
            report.pass = cert.pass && report.checks.iter().all(|c| c.pass) && report.direct.iter().all(|d| d.pass);
            report.certificate = Some(cert);
        }
    }
    Ok(report)
}

pub fn verify_lemma(id: &str) -> Result<LemmaReport> {
    verify_item(lemma(id)?)
}

pub fn verify_all_lemmas() -> Result<Vec<LemmaReport>> {
    lemmas().iter().map(verify_item).collect()
}
