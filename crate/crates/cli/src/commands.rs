//! One function per subcommand. Each returns a [`Report`] and whether everything passed.

use std::fmt::Write as _;

use fricke_core::certifier::arg_track::{all_heads, arg_track};
use fricke_core::certifier::catalog::{lemmas, triple_groups};
use fricke_core::certifier::classify::{class_stats, classify_case, remaining_case_probe, Status};
use fricke_core::certifier::lemmas::{verify_all_lemmas, verify_lemma, LemmaReport};
use fricke_core::certifier::triples::{verify_interval_triples, TripleReport};
use fricke_core::core_series::{named_form, rational_string};
use fricke_core::domain_geometry::{Arc, Corner};
use fricke_core::evaluator::{Evaluator, HPoint};
use fricke_core::real::to_dec;
use fricke_core::zero_locator::{batch, sample_table, zero_table, ZeroReport, ZeroTableRow};
use fricke_core::Error;
use rug::Float;
use serde_json::json;

use crate::config::Settings;
use crate::output::{self, Report};

pub enum CmdError {
    /// Bad input: exit code 2.
    Usage(String),
    /// Computation failed: exit code 1.
    Failure(String),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> CmdError {
        match e {
            Error::InvalidArgument(_) => CmdError::Usage(e.to_string()),
            _ => CmdError::Failure(e.to_string()),
        }
    }
}

pub type Outcome = Result<(Report, bool), CmdError>;

fn usage<T>(msg: impl Into<String>) -> Result<T, CmdError> {
    Err(CmdError::Usage(msg.into()))
}

fn pass_str(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn corner_name(c: Corner) -> &'static str {
    match c {
        Corner::ISqrtP => "i/sqrt(p)",
        Corner::Rho1 => "rho1",
        Corner::Rho2 => "rho2",
    }
}

fn parse_float(s: &str, prec: u32, what: &str) -> Result<Float, CmdError> {
    match Float::parse(s) {
        Ok(v) => Ok(Float::with_val(prec, v)),
        Err(_) => usage(format!("{what}: not a number: {s}")),
    }
}

pub fn qexp(form: &str, ks: &[i64], ps: &[u32], m: usize) -> Outcome {
    let jobs: Vec<(i64, u32)> = match form {
        "estar" => ks.iter().flat_map(|&k| ps.iter().map(move |&p| (k, p))).collect(),
        "eisenstein" => ks.iter().map(|&k| (k, 1)).collect(),
        _ => vec![(0, 0)],
    };
    if jobs.is_empty() {
        return usage(format!("form {form} needs a weight (-k)"));
    }
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut text = String::new();
    for (k, p) in jobs {
        let s = named_form(form, k, p.max(5), m)?;
        let coeffs: Vec<String> = s.coeffs().iter().map(rational_string).collect();
        let shown: Vec<String> = s.coeffs().iter().map(|c| c.to_string()).collect();
        let label = match form {
            "estar" => format!("E*_{{{k},{p}}}"),
            "eisenstein" => format!("E_{k}"),
            _ => form.to_string(),
        };
        let _ = writeln!(text, "{label}  weight {}  level {}", s.weight(), s.level().as_int());
        for (n, c) in coeffs.iter().enumerate() {
            let _ = writeln!(text, "  q^{n:<4} {}", shown[n]);
            rows.push(vec![form.to_string(), s.weight().to_string(), s.level().as_int().to_string(), n.to_string(), c.clone()]);
        }
        items.push(json!({ "form": form, "series": output::json(&s) }));
    }
    Ok((Report::new(json!(items), &["form", "weight", "level", "n", "coeff"], rows, text), true))
}

pub struct EvalPoint {
    pub re: Option<String>,
    pub im: Option<String>,
    pub theta: Option<String>,
    pub arc: Option<String>,
    pub remainder: bool,
}

pub fn eval(k: i64, p: u32, pt: &EvalPoint, st: &Settings) -> Outcome {
    let prec = st.eval.precision_bits;
    let ev = Evaluator::new(k, p, &st.eval)?;
    let method = serde_json::to_value(st.eval.method).expect("method serializes");
    match (&pt.re, &pt.im, &pt.theta) {
        (Some(re), Some(im), None) => {
            let z = HPoint::new(parse_float(re, prec, "--re")?, parse_float(im, prec, "--im")?)?;
            let v = ev.e_star(&z)?;
            let re_s = to_dec(v.value.real());
            let im_s = to_dec(v.value.imag());
            let tail = to_dec(&v.tail_bound);
            let text = format!("E*_{{{k},{p}}}({re} + {im} i) = {re_s} + {im_s} i\n  tail bound {tail}\n");
            let j = json!({ "k": k, "p": p, "method": method, "z": output::json(&z), "value": output::json(&v) });
            Ok((Report::new(j, &["k", "p", "re", "im", "value_re", "value_im", "tail"], vec![vec![k.to_string(), p.to_string(), re.clone(), im.clone(), re_s, im_s, tail]], text), true))
        }
        (None, None, Some(th)) => {
            let theta = parse_float(th, prec, "--theta")?;
            let which = pt.arc.as_deref().unwrap_or("glued");
            let v = match (which, pt.remainder) {
                ("glued", false) => ev.glued(&theta)?,
                ("1", false) => ev.f1(&theta)?,
                ("2", false) => ev.f2(&theta)?,
                ("1", true) => ev.remainder(Arc::A1, &theta)?,
                ("2", true) => ev.remainder(Arc::A2, &theta)?,
                ("glued", true) => return usage("--remainder needs --arc 1 or 2"),
                _ => return usage(format!("--arc must be 1, 2 or glued, got {which}")),
            };
            let name = if pt.remainder { "R" } else { "F" };
            let val = to_dec(&v.value);
            let tail = to_dec(&v.tail_bound);
            let resid = to_dec(&v.imag_residual);
            let text = format!("{name}_{which}(theta = {th}) = {val}\n  tail bound {tail}\n  imaginary residual {resid}\n");
            let j = json!({ "k": k, "p": p, "method": method, "arc": which, "theta": th, "quantity": name, "value": output::json(&v) });
            let row = vec![k.to_string(), p.to_string(), which.to_string(), th.clone(), name.to_string(), val, tail, resid];
            Ok((Report::new(j, &["k", "p", "arc", "theta", "quantity", "value", "tail", "imag_residual"], vec![row], text), true))
        }
        _ => usage("give either --re and --im, or --theta"),
    }
}

fn zero_text(r: &ZeroReport, text: &mut String) {
    let _ = writeln!(text, "k={} p={}: {}", r.k, r.p, r.verdict.label());
    let _ = writeln!(text, "  arc zeros: {} on A1, {} on A2", r.zeros_a1, r.zeros_a2);
    for z in &r.arc_zeros {
        let _ = writeln!(
            text,
            "    {:?} theta = {:.12} ({:.6} deg)",
            z.point.arc,
            z.point.theta.to_f64(),
            z.point.theta.to_f64().to_degrees()
        );
    }
    let corners: Vec<String> = r.corner_orders.iter().map(|c| format!("{} {} (weight {})", corner_name(c.corner), c.order, c.weight)).collect();
    let _ = writeln!(text, "  corners: {}", corners.join(", "));
    let _ = writeln!(text, "  v_inf {}  budget {}  accounted {}", r.v_inf, r.budget, r.accounted);
    if r.seam_ambiguous {
        let _ = writeln!(text, "  zero close to the seam corner");
    }
    for c in &r.coincidences {
        let _ = writeln!(text, "  zero at an integer point: {:?} theta = {:.12}", c.arc, c.theta.to_f64());
    }
}

fn zero_rows(reports: &[ZeroReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            let order = |c: Corner| r.corner_orders.iter().find(|e| e.corner == c).map_or(0, |e| e.order).to_string();
            vec![
                r.k.to_string(),
                r.p.to_string(),
                r.v_inf.to_string(),
                order(Corner::ISqrtP),
                order(Corner::Rho1),
                order(Corner::Rho2),
                r.zeros_a1.to_string(),
                r.zeros_a2.to_string(),
                r.budget.to_string(),
                r.verdict.label(),
            ]
        })
        .collect()
}

const ZERO_HEADER: [&str; 10] = ["k", "p", "v_inf", "v_i_sqrt_p", "v_rho1", "v_rho2", "zeros_a1", "zeros_a2", "budget", "verdict"];

pub fn zeros(ks: &[i64], ps: &[u32], plot: bool, st: &Settings) -> Outcome {
    if plot {
        let mut rows = Vec::new();
        let mut samples = Vec::new();
        for &k in ks {
            for &p in ps {
                let ev = Evaluator::new(k, p, &st.eval)?;
                for s in sample_table(&ev, &st.scan)? {
                    rows.push(vec![
                        k.to_string(),
                        p.to_string(),
                        format!("{:e}", s.glued_theta),
                        format!("{:?}", s.arc),
                        format!("{:e}", s.arc_theta),
                        format!("{:e}", s.value),
                    ]);
                    samples.push(json!({ "k": k, "p": p, "sample": output::json(&s) }));
                }
            }
        }
        let text = rows.iter().map(|r| r.join(" ") + "\n").collect();
        return Ok((Report::new(json!(samples), &["k", "p", "glued_theta", "arc", "arc_theta", "value"], rows, text), true));
    }
    let jobs: Vec<(i64, u32)> = ks.iter().flat_map(|&k| ps.iter().map(move |&p| (k, p))).collect();
    let reports = batch(&jobs, &st.scan, &st.eval)?;
    let mut text = String::new();
    for r in &reports {
        zero_text(r, &mut text);
    }
    let ok = reports.iter().all(|r| r.verdict.is_all_on_arc());
    Ok((Report::new(output::json(&reports), &ZERO_HEADER, zero_rows(&reports), text), ok))
}

pub fn scan_range(ks: &[i64], ps: &[u32], st: &Settings) -> Outcome {
    let jobs: Vec<(i64, u32)> = ks.iter().flat_map(|&k| ps.iter().map(move |&p| (k, p))).collect();
    let reports = batch(&jobs, &st.scan, &st.eval)?;
    let bad: Vec<&ZeroReport> = reports.iter().filter(|r| !r.verdict.is_all_on_arc()).collect();
    let mut text = String::new();
    for &p in ps {
        let n = reports.iter().filter(|r| r.p == p).count();
        let good = reports.iter().filter(|r| r.p == p && r.verdict.is_all_on_arc()).count();
        let _ = writeln!(text, "p={p}: {good}/{n} weights all_on_arc");
    }
    for r in &bad {
        let _ = writeln!(text, "  k={} p={}: {}", r.k, r.p, r.verdict.label());
    }
    let summary: Vec<_> = reports
        .iter()
        .map(|r| json!({ "k": r.k, "p": r.p, "zeros_a1": r.zeros_a1, "zeros_a2": r.zeros_a2, "verdict": r.verdict.label() }))
        .collect();
    Ok((Report::new(json!(summary), &ZERO_HEADER, zero_rows(&reports), text), bad.is_empty()))
}

fn table_text(rows: &[ZeroTableRow]) -> String {
    let mut t = String::new();
    let p = rows.first().map_or(0, |r| r.p);
    if p == 5 {
        let _ = writeln!(t, "p=5\n   k  v_inf  v_i/sqrt5  v_rho1  v_rho2  V1  V2");
        for r in rows {
            let _ = writeln!(t, "{:>4}  {:>5}  {:>9}  {:>6}  {:>6}  {:>2}  {:>2}", r.k, r.v_inf, r.v_i_sqrt_p, r.v_rho1, r.v_rho2, r.zeros_a1, r.zeros_a2);
        }
    } else {
        let _ = writeln!(t, "p=7\n   k  v_inf  v_i/sqrt7  v_rho1  v_rho2   V");
        for r in rows {
            let _ = writeln!(t, "{:>4}  {:>5}  {:>9}  {:>6}  {:>6}  {:>2}", r.k, r.v_inf, r.v_i_sqrt_p, r.v_rho1, r.v_rho2, r.zeros_a1 + r.zeros_a2);
        }
    }
    t
}

/// The two low-weight zero tables.
pub fn tables(st: &Settings) -> Outcome {
    let t5 = zero_table(5, &[4, 6, 8, 10], &st.scan, &st.eval)?;
    let t7 = zero_table(7, &[4, 6, 12], &st.scan, &st.eval)?;
    let ok = t5.iter().chain(&t7).all(|r| r.verdict.is_all_on_arc());
    let text = format!("{}\n{}", table_text(&t5), table_text(&t7));
    let rows = t5
        .iter()
        .chain(&t7)
        .map(|r| {
            [r.k as u64, r.p as u64, r.v_inf as u64, r.v_i_sqrt_p as u64, r.v_rho1 as u64, r.v_rho2 as u64, r.zeros_a1 as u64, r.zeros_a2 as u64]
                .iter()
                .map(|v| v.to_string())
                .chain([r.verdict.label()])
                .collect()
        })
        .collect();
    let header = ["k", "p", "v_inf", "v_i_sqrt_p", "v_rho1", "v_rho2", "zeros_a1", "zeros_a2", "verdict"];
    Ok((Report::new(json!({ "p5": output::json(&t5), "p7": output::json(&t7) }), &header, rows, text), ok))
}

pub enum Scope {
    All,
    Lemma(String),
    Triples(Option<String>),
}

fn lemma_row(r: &LemmaReport) -> Vec<String> {
    let route = serde_json::to_value(r.route).expect("route serializes").as_str().unwrap_or("").to_string();
    let direct: Vec<String> = r.direct.iter().map(|d| format!("k={}:{}", d.k, pass_str(d.pass))).collect();
    let margin = r.certificate.as_ref().map(|c| to_dec(&c.min_y())).or(r.bound_at_k0.map(|b| b.to_string())).unwrap_or_default();
    vec![
        r.id.clone(),
        r.p.to_string(),
        r.arc.index().to_string(),
        route,
        r.k0.to_string(),
        to_dec(&r.c0),
        margin,
        direct.join(" "),
        pass_str(r.pass).to_string(),
    ]
}

fn triple_row(r: &TripleReport) -> Vec<String> {
    let small: Vec<String> = r.pointwise.iter().map(|p| format!("k={}:{}", p.k, pass_str(p.pass))).collect();
    vec![
        r.id.clone(),
        r.p.to_string(),
        r.arc.index().to_string(),
        r.route.clone().unwrap_or_else(|| "none".into()),
        r.k0.map_or("none".into(), |k| k.to_string()),
        to_dec(&r.c0),
        format!("[{}, {}] t={}", r.x, r.y, r.t),
        small.join(" "),
        pass_str(r.pass).to_string(),
    ]
}

pub fn certify(scope: &Scope) -> Outcome {
    let (lem, tri) = match scope {
        Scope::All => (verify_all_lemmas()?, verify_interval_triples(None)?),
        Scope::Lemma(id) => {
            if !lemmas().iter().any(|l| &l.id == id) {
                let ids: Vec<&str> = lemmas().iter().map(|l| l.id.as_str()).collect();
                return usage(format!("unknown lemma id {id}; known: {}", ids.join(", ")));
            }
            (vec![verify_lemma(id)?], Vec::new())
        }
        Scope::Triples(g) => {
            if let Some(g) = g {
                if !triple_groups().contains(&g.as_str()) {
                    return usage(format!("unknown triple group {g}; known: {}", triple_groups().join(", ")));
                }
            }
            (Vec::new(), verify_interval_triples(g.as_deref())?)
        }
    };
    let header = ["id", "p", "arc", "route", "k0", "c0", "detail", "small_weights", "verdict"];
    let mut rows: Vec<Vec<String>> = lem.iter().map(lemma_row).collect();
    rows.extend(tri.iter().map(triple_row));
    let mut text = String::new();
    if !lem.is_empty() {
        let _ = writeln!(text, "{:<7} {:<2} {:<3} {:<10} {:>4}  {:<10} verdict", "lemma", "p", "arc", "route", "k0", "c0");
        for r in &lem {
            let _ = writeln!(text, "{:<7} {:<2} A{:<2} {:<10} {:>4}  {:<10.6} {}", r.id, r.p, r.arc.index(), lemma_row(r)[3], r.k0, r.c0.to_f64(), pass_str(r.pass));
            for d in &r.direct {
                let _ = writeln!(text, "        direct check k={} {}", d.k, pass_str(d.pass));
            }
            if let Some(b) = r.bound_at_k0 {
                let _ = writeln!(text, "        bound at k0 {b:.6}");
            }
            for n in &r.notes {
                let _ = writeln!(text, "        note: {} ({})", n.name, if n.pass { "holds" } else { "does not hold" });
            }
            if let Some(c) = &r.certificate {
                for f in c.failed_checks() {
                    let _ = writeln!(text, "        failed: {f}");
                }
            }
        }
    }
    if !tri.is_empty() {
        if !lem.is_empty() {
            text.push('\n');
        }
        let _ = writeln!(text, "{:<22} {:<16} {:>5}  {:<10} verdict", "triple", "route", "k0", "c0");
        for r in &tri {
            let _ = writeln!(
                text,
                "{:<22} {:<16} {:>5}  {:<10.6} {}{}",
                r.id,
                r.route.as_deref().unwrap_or("none"),
                r.k0.map_or("-".into(), |k| k.to_string()),
                r.c0.to_f64(),
                pass_str(r.pass),
                if r.editorial_ambiguity { "  (stated c0 differs)" } else { "" }
            );
        }
    }
    let (lp, tp) = (lem.iter().filter(|r| r.pass).count(), tri.iter().filter(|r| r.pass).count());
    let _ = writeln!(text, "\n{lp}/{} lemma items pass, {tp}/{} triples pass", lem.len(), tri.len());
    let ok = lp == lem.len() && tp == tri.len();
    Ok((Report::new(json!({ "lemmas": output::json(&lem), "triples": output::json(&tri), "pass": ok }), &header, rows, text), ok))
}

pub fn classify(ks: &[i64], ps: &[u32], probe: Option<&str>) -> Outcome {
    let t = match probe {
        Some(s) => {
            let t = parse_float(s, 128, "--probe")?;
            if t <= 0 {
                return usage("--probe t must be positive");
            }
            Some(t)
        }
        None => None,
    };
    let mut rows = Vec::new();
    let mut items = Vec::new();
    let mut stats = Vec::new();
    let mut probes = Vec::new();
    let mut text = String::new();
    let (lo, hi) = (*ks.first().expect("nonempty"), *ks.last().expect("nonempty"));
    for &p in ps {
        for &k in ks {
            let c = classify_case(k, p)?;
            rows.push(vec![
                k.to_string(),
                p.to_string(),
                c.residue.to_string(),
                to_dec(&c.alpha_pk),
                c.case_label.clone(),
                c.cover.clone(),
                c.status.as_str().to_string(),
            ]);
            if c.status != Status::AllOnArcProven || ks.len() <= 40 {
                let _ = writeln!(
                    text,
                    "k={k:<5} p={p} alpha/pi={:.8}  {}  [{}]{}  {}",
                    c.alpha_pk.to_f64() / std::f64::consts::PI,
                    c.case_label,
                    c.cover,
                    if c.unlisted { " (range not listed separately)" } else { "" },
                    c.status.as_str()
                );
            }
            if let (Some(t), Status::RemainingCase) = (&t, c.status) {
                let r = remaining_case_probe(k, p, t)?;
                let num = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
                let yes = |x: Option<bool>| match x {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "n/a",
                };
                let _ = writeln!(
                    text,
                    "    probe t={}: threshold side {}, extra zero predicted on {:?}; A={} B={} exact={}; bounds hold {}, sign at this k {}, limit sign {}",
                    t.to_f64(),
                    if r.above_threshold { "above" } else { "below" },
                    r.predicted_arc,
                    num(r.upper),
                    num(r.lower),
                    num(r.exact),
                    yes(r.bounds_hold),
                    yes(r.sign_holds),
                    yes(r.limit_sign_holds)
                );
                probes.push(output::json(&r));
            }
            items.push(output::json(&c));
        }
        let s = class_stats(p, lo, hi)?;
        let _ = writeln!(
            text,
            "p={p}, k in [{lo}, {hi}]: {} weights, {} all_on_arc_proven, {} all_but_one_proven, {} remaining_case ({:.3}%)",
            s.total,
            s.all_on_arc_proven,
            s.all_but_one_proven,
            s.remaining_case,
            100.0 * s.remaining_fraction
        );
        stats.push(output::json(&s));
    }
    let j = json!({ "cases": items, "stats": stats, "probes": probes });
    Ok((Report::new(j, &["k", "p", "residue", "alpha_pk", "case", "cover", "status"], rows, text), true))
}

pub fn arg_tracks(ks: &[i64], ps: &[u32], t: &str) -> Outcome {
    let t = parse_float(t, 128, "--t")?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    for (p, arc, h) in all_heads().into_iter().filter(|(p, _, _)| ps.contains(p)) {
        for &k in ks {
            let r = arg_track(k, p, arc, h, &t)?;
            ok &= r.bracket_holds;
            let _ = writeln!(
                text,
                "k={k:<5} p={p} {arc:?} head ({}, {}): nu={:.10} d={:.10} L={} cap={:.10} bracket {}",
                r.c,
                r.d,
                r.nu.to_f64(),
                r.d_const.to_f64(),
                r.limit.to_f64(),
                r.closed_cap.to_f64(),
                if r.bracket_holds { "holds" } else { "FAILS" }
            );
            rows.push(vec![
                k.to_string(),
                p.to_string(),
                arc.index().to_string(),
                r.c.to_string(),
                r.d.to_string(),
                to_dec(&r.nu),
                to_dec(&r.d_const),
                to_dec(&r.limit),
                to_dec(&r.closed_cap),
                r.bracket_holds.to_string(),
            ]);
            items.push(output::json(&r));
        }
    }
    let header = ["k", "p", "arc", "c", "d", "nu", "d_const", "limit", "closed_cap", "bracket_holds"];
    Ok((Report::new(json!(items), &header, rows, text), ok))
}
