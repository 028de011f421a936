//! Sign-change scanning of the glued arc function and bookkeeping against the
//! valence formula.
//!
//! The glued parameter runs over `[π/2, π]` for `p = 5` and `[π/2, 7π/6]` for
//! `p = 7`; A1 occupies the part up to the seam, A2 the rest (shifted by the glue
//! offset). Corners with forced vanishing are cut out with a radius equal to the
//! bisection tolerance, so the scan only sees interior zeros.

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::domain_geometry::{self, check_p, ser_float, Arc, ArcPoint, Corner};
use crate::error::{invalid, Error, Result};
use crate::evaluator::{EvalConfig, Evaluator};
use crate::real::{self, pi};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub samples_per_integer_interval: u32,
    pub bisection_tolerance: f64,
    pub max_bisections: u32,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { samples_per_integer_interval: 16, bisection_tolerance: 1e-10, max_bisections: 60 }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_integer_interval < 8 {
            return invalid("samples_per_integer_interval must be at least 8");
        }
        if !(self.bisection_tolerance > 0.0 && self.bisection_tolerance.is_finite()) {
            return invalid("bisection_tolerance must be positive");
        }
        if self.max_bisections == 0 {
            return invalid("max_bisections must be positive");
        }
        Ok(())
    }

    pub fn with_samples(&self, n: u32) -> ScanConfig {
        ScanConfig { samples_per_integer_interval: n, ..self.clone() }
    }
}

fn check_weight(k: i64) -> Result<()> {
    if k < 4 || k % 2 != 0 {
        return invalid(format!("weight must be even and at least 4, got {k}"));
    }
    Ok(())
}

/// Forced vanishing orders: `s_k` at the order-2 corners, and `t_k` at `ρ₇,₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerOrders {
    pub s: u32,
    pub t: Option<u32>,
}

/// `2s_k ≡ k (mod 4)`, and for `p = 7` also `−2t_k ≡ k (mod 6)`.
pub fn corner_orders(k: i64, p: u32) -> Result<CornerOrders> {
    check_weight(k)?;
    check_p(p)?;
    let s = if k % 4 == 0 { 0 } else { 1 };
    let t = (p == 7).then(|| match k.rem_euclid(6) {
        0 => 0,
        4 => 1,
        _ => 2,
    });
    Ok(CornerOrders { s, t })
}

/// Order and valence weight of each corner.
pub fn corner_table(k: i64, p: u32) -> Result<Vec<(Corner, u32, Rational)>> {
    let o = corner_orders(k, p)?;
    let half = Rational::from((1, 2));
    Ok(match o.t {
        None => Corner::ALL.iter().map(|&c| (c, o.s, half.clone())).collect(),
        Some(t) => vec![
            (Corner::ISqrtP, o.s, half.clone()),
            (Corner::Rho1, o.s, half),
            (Corner::Rho2, t, Rational::from((1, 3))),
        ],
    })
}

/// `k/4` for `p = 5`, `k/3` for `p = 7`.
pub fn valence_budget(k: i64, p: u32) -> Result<Rational> {
    check_weight(k)?;
    check_p(p)?;
    Ok(Rational::from((k, if p == 5 { 4 } else { 3 })))
}

/// Glued parameter range.
pub fn glued_range(p: u32, prec: u32) -> Result<(Float, Float)> {
    check_p(p)?;
    let lo = pi(prec) / 2u32;
    let hi = if p == 5 { pi(prec) } else { pi(prec) * 7u32 / 6u32 };
    Ok((lo, hi))
}

/// Glued parameter to arc coordinates.
pub fn unglue(p: u32, theta: &Float) -> Result<ArcPoint> {
    let prec = theta.prec();
    let seam = domain_geometry::seam(p, prec)?.0;
    Ok(if *theta <= seam {
        ArcPoint { arc: Arc::A1, theta: theta.clone() }
    } else {
        ArcPoint { arc: Arc::A2, theta: Float::with_val(prec, theta - domain_geometry::glue_offset(p, prec)?) }
    })
}

/// A sign-change bracket in the glued parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bracket {
    #[serde(serialize_with = "ser_float")]
    pub lo: Float,
    #[serde(serialize_with = "ser_float")]
    pub hi: Float,
}

/// A refined zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcZero {
    pub point: ArcPoint,
    #[serde(serialize_with = "ser_float")]
    pub glued_theta: Float,
    #[serde(serialize_with = "ser_float")]
    pub width: Float,
}

/// One row of a sample table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub glued_theta: f64,
    pub arc: Arc,
    pub arc_theta: f64,
    pub value: f64,
}

/// Scan segments: the glued range cut at corners with positive order.
fn segments(k: i64, p: u32, cfg: &ScanConfig, prec: u32) -> Result<Vec<(Float, Float)>> {
    let (lo, hi) = glued_range(p, prec)?;
    let seam = domain_geometry::seam(p, prec)?.0;
    let r = real::flt(prec, cfg.bisection_tolerance);
    let mut cuts = Vec::new();
    for (corner, order, _) in corner_table(k, p)? {
        if order == 0 {
            continue;
        }
        cuts.push(match corner {
            Corner::ISqrtP => lo.clone(),
            Corner::Rho1 => hi.clone(),
            Corner::Rho2 => seam.clone(),
        });
    }
    let mut edges = vec![lo.clone()];
    for c in &cuts {
        if *c != lo && *c != hi {
            edges.push(c.clone());
        }
    }
    edges.push(hi.clone());
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let a = if cuts.contains(&w[0]) { Float::with_val(prec, &w[0] + &r) } else { w[0].clone() };
        let b = if cuts.contains(&w[1]) { Float::with_val(prec, &w[1] - &r) } else { w[1].clone() };
        if a < b {
            out.push((a, b));
        }
    }
    Ok(out)
}

fn sample_grid(k: i64, p: u32, cfg: &ScanConfig, prec: u32) -> Result<Vec<Vec<Float>>> {
    let step = pi(prec) * 2u32 / (k as u64 * cfg.samples_per_integer_interval as u64);
    segments(k, p, cfg, prec)?
        .into_iter()
        .map(|(a, b)| {
            let len = Float::with_val(prec, &b - &a);
            let n = Float::with_val(prec, &len / &step).ceil().to_f64().max(1.0) as usize;
            let h = len / n as u64;
            Ok((0..=n).map(|i| if i == n { b.clone() } else { Float::with_val(prec, &h * i as u64) + &a }).collect())
        })
        .collect()
}

/// Sign-change brackets of the glued function, sorted by angle. A sample that is
/// exactly zero yields a bracket of width zero.
pub fn scan_zeros(ev: &Evaluator, cfg: &ScanConfig) -> Result<Vec<Bracket>> {
    cfg.validate()?;
    let prec = ev.config().precision_bits;
    let mut out = Vec::new();
    for grid in sample_grid(ev.k(), ev.p(), cfg, prec)? {
        let vals: Vec<Float> = grid.par_iter().map(|t| ev.glued(t).map(|v| v.value)).collect::<Result<_>>()?;
        for i in 0..grid.len() {
            if vals[i] == 0 {
                out.push(Bracket { lo: grid[i].clone(), hi: grid[i].clone() });
                continue;
            }
            if i + 1 < grid.len() && vals[i + 1] != 0 && (vals[i] < 0) != (vals[i + 1] < 0) {
                out.push(Bracket { lo: grid[i].clone(), hi: grid[i + 1].clone() });
            }
        }
    }
    Ok(out)
}

/// Bisect a bracket until its width is at most the tolerance.
pub fn refine(ev: &Evaluator, bracket: &Bracket, cfg: &ScanConfig) -> Result<ArcZero> {
    cfg.validate()?;
    let prec = ev.config().precision_bits;
    let tol = real::flt(prec, cfg.bisection_tolerance);
    let (mut lo, mut hi) = (bracket.lo.clone(), bracket.hi.clone());
    let lost = |lo: &Float, hi: &Float| Error::InconsistentBracket { lo: lo.to_f64(), hi: hi.to_f64() };
    if lo != hi {
        let flo = ev.glued(&lo)?.value;
        let fhi = ev.glued(&hi)?.value;
        if flo == 0 {
            hi = lo.clone();
        } else if fhi == 0 {
            lo = hi.clone();
        } else if (flo < 0) == (fhi < 0) {
            return Err(lost(&lo, &hi));
        }
        let neg_lo = flo < 0;
        let mut it = 0;
        while Float::with_val(prec, &hi - &lo) > tol && it < cfg.max_bisections {
            let mid = Float::with_val(prec, &lo + &hi) / 2u32;
            let fm = ev.glued(&mid)?.value;
            if fm == 0 {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if (fm < 0) == neg_lo {
                lo = mid;
            } else {
                hi = mid;
            }
            it += 1;
        }
    }
    let width = Float::with_val(prec, &hi - &lo);
    let mid = Float::with_val(prec, &lo + &hi) / 2u32;
    Ok(ArcZero { point: unglue(ev.p(), &mid)?, glued_theta: mid, width })
}

/// Outcome of the budget identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    AllOnArc,
    /// `budget − accounted > 0`: zeros not found on the boundary.
    Deficit(Rational),
    /// `accounted > budget`, which the valence formula forbids; a numerical failure.
    Excess(Rational),
}

impl Verdict {
    pub fn is_all_on_arc(&self) -> bool {
        matches!(self, Verdict::AllOnArc)
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::AllOnArc => "all_on_arc".into(),
            Verdict::Deficit(d) => format!("deficit({d})"),
            Verdict::Excess(d) => format!("excess({d})"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerEntry {
    pub corner: Corner,
    pub order: u32,
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    pub k: i64,
    pub p: u32,
    pub arc_zeros: Vec<ArcZero>,
    pub zeros_a1: usize,
    pub zeros_a2: usize,
    pub corner_orders: Vec<CornerEntry>,
    pub v_inf: u32,
    #[serde(serialize_with = "ser_rational")]
    pub budget: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub accounted: Rational,
    pub verdict: Verdict,
    /// A zero lies within ten tolerances of the seam, so its arc is not decided.
    pub seam_ambiguous: bool,
    /// Integer points (`cos(kθ/2) = ±1`) within ten tolerances of a refined zero.
    pub coincidences: Vec<ArcPoint>,
    pub samples_per_integer_interval: u32,
}

fn report(ev: &Evaluator, cfg: &ScanConfig) -> Result<ZeroReport> {
    let (k, p) = (ev.k(), ev.p());
    let prec = ev.config().precision_bits;
    let brackets = scan_zeros(ev, cfg)?;
    let zeros: Vec<ArcZero> = brackets.par_iter().map(|b| refine(ev, b, cfg)).collect::<Result<_>>()?;
    let corners: Vec<CornerEntry> =
        corner_table(k, p)?.into_iter().map(|(corner, order, weight)| CornerEntry { corner, order, weight }).collect();
    let budget = valence_budget(k, p)?;
    let mut accounted = Rational::from(zeros.len());
    for c in &corners {
        accounted += Rational::from(c.order) * &c.weight;
    }
    let verdict = match accounted.cmp(&budget) {
        std::cmp::Ordering::Equal => Verdict::AllOnArc,
        std::cmp::Ordering::Less => Verdict::Deficit(Rational::from(&budget - &accounted)),
        std::cmp::Ordering::Greater => Verdict::Excess(Rational::from(&accounted - &budget)),
    };
    let seam = domain_geometry::seam(p, prec)?.0;
    let near = real::flt(prec, 10.0 * cfg.bisection_tolerance);
    let seam_ambiguous = zeros.iter().any(|z| Float::with_val(prec, &z.glued_theta - &seam).abs() <= near);
    let coincidences: Vec<ArcPoint> = domain_geometry::integer_points(k, p, prec)?
        .into_iter()
        .filter(|q| {
            zeros.iter().any(|z| z.point.arc == q.arc && Float::with_val(prec, &z.point.theta - &q.theta).abs() <= near)
        })
        .collect();
    let zeros_a1 = zeros.iter().filter(|z| z.point.arc == Arc::A1).count();
    Ok(ZeroReport {
        k,
        p,
        zeros_a2: zeros.len() - zeros_a1,
        zeros_a1,
        arc_zeros: zeros,
        corner_orders: corners,
        v_inf: 0,
        budget,
        accounted,
        verdict,
        seam_ambiguous,
        coincidences,
        samples_per_integer_interval: cfg.samples_per_integer_interval,
    })
}

/// Count zeros and compare with the budget. A deficit triggers rescans at twice and
/// four times the sampling density; the last report is returned.
pub fn conjecture_check_with(ev: &Evaluator, cfg: &ScanConfig) -> Result<ZeroReport> {
    let mut r = report(ev, cfg)?;
    for f in [2, 4] {
        if !matches!(r.verdict, Verdict::Deficit(_)) {
            break;
        }
        r = report(ev, &cfg.with_samples(cfg.samples_per_integer_interval * f))?;
    }
    Ok(r)
}

pub fn conjecture_check(k: i64, p: u32, cfg: &ScanConfig, eval: &EvalConfig) -> Result<ZeroReport> {
    conjecture_check_with(&Evaluator::new(k, p, eval)?, cfg)
}

/// Reports for a list of `(k, p)` jobs, in input order.
pub fn batch(jobs: &[(i64, u32)], cfg: &ScanConfig, eval: &EvalConfig) -> Result<Vec<ZeroReport>> {
    jobs.par_iter().map(|&(k, p)| conjecture_check(k, p, cfg, eval)).collect()
}

/// One row of a low-weight zero table: corner orders and simple arc zeros.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTableRow {
    pub k: i64,
    pub p: u32,
    pub v_inf: u32,
    pub v_i_sqrt_p: u32,
    pub v_rho1: u32,
    pub v_rho2: u32,
    pub zeros_a1: usize,
    pub zeros_a2: usize,
    pub verdict: Verdict,
}

pub fn zero_table(p: u32, ks: &[i64], cfg: &ScanConfig, eval: &EvalConfig) -> Result<Vec<ZeroTableRow>> {
    let jobs: Vec<(i64, u32)> = ks.iter().map(|&k| (k, p)).collect();
    batch(&jobs, cfg, eval)?
        .into_iter()
        .map(|r| {
            let order = |c: Corner| r.corner_orders.iter().find(|e| e.corner == c).map_or(0, |e| e.order);
            Ok(ZeroTableRow {
                k: r.k,
                p: r.p,
                v_inf: r.v_inf,
                v_i_sqrt_p: order(Corner::ISqrtP),
                v_rho1: order(Corner::Rho1),
                v_rho2: order(Corner::Rho2),
                zeros_a1: r.zeros_a1,
                zeros_a2: r.zeros_a2,
                verdict: r.verdict,
            })
        })
        .collect()
}

/// `(θ, F(θ))` over the scan grid, for plotting.
pub fn sample_table(ev: &Evaluator, cfg: &ScanConfig) -> Result<Vec<Sample>> {
    cfg.validate()?;
    let prec = ev.config().precision_bits;
    let grid: Vec<Float> = sample_grid(ev.k(), ev.p(), cfg, prec)?.into_iter().flatten().collect();
    grid.par_iter()
        .map(|t| {
            let pt = unglue(ev.p(), t)?;
            Ok(Sample {
                glued_theta: t.to_f64(),
                arc: pt.arc,
                arc_theta: pt.theta.to_f64(),
                value: ev.glued(t)?.value.to_f64(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(k: i64, p: u32) -> ZeroReport {
        conjecture_check(k, p, &ScanConfig::default(), &EvalConfig::default()).unwrap()
    }

    #[test]
    fn orders_and_budget() {
        assert_eq!(corner_orders(6, 5).unwrap(), CornerOrders { s: 1, t: None });
        assert_eq!(corner_orders(4, 7).unwrap(), CornerOrders { s: 0, t: Some(1) });
        assert_eq!(corner_orders(12, 7).unwrap(), CornerOrders { s: 0, t: Some(0) });
        assert_eq!(corner_orders(8, 7).unwrap(), CornerOrders { s: 0, t: Some(2) });
        assert_eq!(valence_budget(6, 5).unwrap(), Rational::from((3, 2)));
        assert_eq!(valence_budget(12, 7).unwrap(), 4);
    }

    #[test]
    fn small_weights() {
        let r = check(4, 5);
        assert_eq!((r.zeros_a1, r.zeros_a2), (1, 0));
        let r = check(6, 5);
        assert_eq!(r.arc_zeros.len(), 0);
        assert!(r.verdict.is_all_on_arc());
        let r = check(8, 5);
        assert_eq!((r.zeros_a1, r.zeros_a2), (1, 1));
        let r = check(10, 5);
        assert_eq!((r.zeros_a1, r.zeros_a2), (1, 0));
        let r = check(4, 7);
        assert_eq!(r.arc_zeros.len(), 1);
        assert!(r.verdict.is_all_on_arc());
        let r = check(12, 7);
        assert_eq!(r.arc_zeros.len(), 4);
        assert!(r.verdict.is_all_on_arc());
    }

    #[test]
    fn lost_bracket() {
        let ev = Evaluator::new(4, 5, &EvalConfig::default()).unwrap();
        let b = Bracket { lo: real::flt(128, 1.6), hi: real::flt(128, 1.65) };
        assert!(matches!(refine(&ev, &b, &ScanConfig::default()), Err(Error::InconsistentBracket { .. })));
    }
}
