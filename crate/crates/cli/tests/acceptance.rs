//! Acceptance run: one PASS/FAIL line per criterion, with timings.
//!
//! Criteria 1, 3, 4 and 7 go through the `fricke` binary; the rest call the library.

use std::process::Command;
use std::time::{Duration, Instant};

use fricke_core::certifier::arg_track::{all_heads, arg_track};
use fricke_core::certifier::classify::{classify_case, remaining_case_probe, Status};
use fricke_core::certifier::terms::refined_r_bound_p5a2;
use fricke_core::core_series::{default_order, eta_product_q, eta_product_q_direct, verify_decomposition};
use fricke_core::domain_geometry::{arc_range, Arc, Corner};
use fricke_core::evaluator::{EvalConfig, Evaluator, HPoint, Method};
use fricke_core::real::{rat, sqrt_i};
use fricke_core::zero_locator::corner_orders;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float};
use serde_json::Value;

const P: u32 = 128;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fricke(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_fricke"))
        .args(args)
        .args(["--format", "json"])
        .output()
        .expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

fn u(v: &Value, key: &str) -> u64 {
    v[key].as_u64().unwrap_or(u64::MAX)
}

fn zero_tables() -> Outcome {
    // (k, v_inf, v_i/sqrt p, v_rho1, v_rho2, V1, V2); for p = 7 only V1 + V2 is tabulated
    let p5 = [(4, 0, 0, 0, 0, 1, 0), (6, 0, 1, 1, 1, 0, 0), (8, 0, 0, 0, 0, 1, 1), (10, 0, 1, 1, 1, 1, 0)];
    let p7 = [(4, 0, 0, 0, 1, 1), (6, 0, 1, 1, 0, 1), (12, 0, 0, 0, 0, 4)];
    let (code, v) = fricke(&["tables"]);
    let mut bad = Vec::new();
    let rows5 = v["p5"].as_array().cloned().unwrap_or_default();
    let rows7 = v["p7"].as_array().cloned().unwrap_or_default();
    for (r, w) in rows5.iter().zip(p5) {
        let got = (u(r, "k"), u(r, "v_inf"), u(r, "v_i_sqrt_p"), u(r, "v_rho1"), u(r, "v_rho2"), u(r, "zeros_a1"), u(r, "zeros_a2"));
        if got != (w.0, w.1, w.2, w.3, w.4, w.5, w.6) {
            bad.push(format!("p=5 k={}", w.0));
        }
    }
    for (r, w) in rows7.iter().zip(p7) {
        let got = (u(r, "k"), u(r, "v_inf"), u(r, "v_i_sqrt_p"), u(r, "v_rho1"), u(r, "v_rho2"), u(r, "zeros_a1") + u(r, "zeros_a2"));
        if got != w {
            bad.push(format!("p=7 k={}", w.0));
        }
    }
    let pass = code == 0 && rows5.len() == 4 && rows7.len() == 3 && bad.is_empty();
    ok(pass, if bad.is_empty() { "7 rows match".to_string() } else { format!("mismatch at {}", bad.join(", ")) })
}

fn r_bound_at_12() -> Outcome {
    let b = refined_r_bound_p5a2(12).map(|b| b.to_f64()).unwrap_or(f64::NAN);
    ok((1.97..=1.9822).contains(&b), format!("bound {b:.10}"))
}

fn certificates() -> Outcome {
    let (code, v) = fricke(&["certify", "--all"]);
    let count = |key: &str| {
        let a = v[key].as_array().cloned().unwrap_or_default();
        (a.iter().filter(|r| r["pass"] == Value::Bool(true)).count(), a.len())
    };
    let (lp, ln) = count("lemmas");
    let (tp, tn) = count("triples");
    ok(code == 0 && (lp, ln) == (12, 12) && (tp, tn) == (39, 39), format!("{lp}/{ln} lemma items, {tp}/{tn} triples"))
}

fn desk_scan() -> Outcome {
    let (code, v) = fricke(&["scan-range", "-k", "4..100"]);
    let rows = v.as_array().cloned().unwrap_or_default();
    let good = rows.iter().filter(|r| r["verdict"] == "all_on_arc").count();
    ok(code == 0 && rows.len() == 98 && good == 98, format!("{good}/{} weights all_on_arc", rows.len()))
}

fn dual_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut used = 0.0f64;
    let mut n = 0;
    let mut fails = 0;
    for p in [5, 7] {
        for k in (4..=12).step_by(2) {
            let cfg = EvalConfig::default();
            let qs = Evaluator::new(k, p, &cfg.with_method(Method::QSeries)).unwrap();
            let lat = Evaluator::new(k, p, &cfg.with_method(Method::Lattice)).unwrap();
            for _ in 0..20 {
                let z = HPoint::from_f64(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..1.2), P).unwrap();
                let a = qs.e_star(&z).unwrap();
                let b = lat.e_star(&z).unwrap();
                let diff = Float::with_val(P, Complex::with_val(P, &a.value - &b.value).abs_ref());
                let scale = Float::with_val(P, a.value.abs_ref());
                let allowed = Float::with_val(P, &scale * 1e-9) + &a.tail_bound + &b.tail_bound;
                worst = worst.max((diff.clone() / &scale).to_f64());
                used = used.max((diff.clone() / &allowed).to_f64());
                n += 1;
                if diff > allowed {
                    fails += 1;
                }
            }
        }
    }
    ok(fails == 0, format!("{n} points, worst relative difference {worst:.2e}, largest share of the allowance {used:.2e}"))
}

/// The property suites, then the remaining-case probe at k ≤ 400.
fn properties() -> Outcome {
    let mut failed: Vec<String> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = EvalConfig::default();
    // realness of the arc functions
    for p in [5, 7] {
        for k in [4, 10, 18, 32] {
            let ev = Evaluator::new(k, p, &cfg).unwrap();
            for arc in [Arc::A1, Arc::A2] {
                let (lo, hi) = arc_range(p, arc, P).unwrap();
                for _ in 0..6 {
                    let th = Float::with_val(P, &hi - &lo) * rng.gen::<f64>() + &lo;
                    if ev.arc(arc, &th).unwrap().imag_residual >= 1e-25 {
                        failed.push(format!("realness p={p} k={k}"));
                    }
                }
            }
        }
    }
    // Fricke covariance E*(−1/(pz)) = (√p z)^k E*(z)
    for p in [5, 7] {
        for k in [4, 8, 12, 20] {
            let ev = Evaluator::new(k, p, &cfg).unwrap();
            for _ in 0..4 {
                let z = HPoint::from_f64(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..1.2), P).unwrap();
                let zc = z.to_complex();
                let w = Complex::with_val(P, Complex::with_val(P, &zc * p).recip()) * -1i32;
                let lhs = ev.e_star(&HPoint::from_complex(w).unwrap()).unwrap().value;
                let f = Complex::with_val(P, &zc * sqrt_i(P, p));
                let rhs = Complex::with_val(P, rug::ops::Pow::pow(f, k as i32)) * ev.e_star(&z).unwrap().value;
                let d = Float::with_val(P, Complex::with_val(P, &lhs - &rhs).abs_ref());
                if d >= Float::with_val(P, rhs.abs_ref()) * 1e-20 + 1e-20f64 {
                    failed.push(format!("covariance p={p} k={k}"));
                }
            }
        }
    }
    // forced corner zeros by parity class
    for p in [5, 7] {
        for k in (4..=24).step_by(2) {
            let o = corner_orders(k, p).unwrap();
            let ev = Evaluator::new(k, p, &cfg).unwrap();
            for c in Corner::ALL {
                let order = match (c, o.t) {
                    (Corner::Rho2, Some(t)) => t,
                    _ => o.s,
                };
                let a = Float::with_val(P, ev.e_star(&c.point(p, P).unwrap()).unwrap().value.abs_ref());
                if (order > 0) != (a < 1e-25) {
                    failed.push(format!("corner p={p} k={k} {c:?}"));
                }
            }
        }
    }
    // arg_track bracketing, all six heads
    let mut tracks = 0;
    for (p, arc, h) in all_heads() {
        for _ in 0..50 {
            let k = 2 * rng.gen_range(2..=200);
            let t = rat(P, rng.gen_range(1..=500), 1000);
            let tr = arg_track(k, p, arc, h, &t).unwrap();
            tracks += 1;
            if !tr.bracket_holds {
                failed.push(format!("bracket p={p} {arc:?} head {h} k={k}"));
            }
        }
    }
    // eta products: product formula against the pentagonal route
    for exps in [vec![(1, 4), (5, 4)], vec![(1, 6), (7, 6)], vec![(1, -1), (5, 5)], vec![(1, 24)]] {
        let a = eta_product_q(&exps, 80).unwrap();
        let b = eta_product_q_direct(&exps, 80).unwrap();
        if a.coeffs() != b.coeffs() {
            failed.push(format!("eta {exps:?}"));
        }
    }
    // decompositions
    for p in [5, 7] {
        for k in (0..=24).step_by(2) {
            if !verify_decomposition(k, p, default_order(k)).map(|r| r.ok).unwrap_or(false) {
                failed.push(format!("decomposition p={p} k={k}"));
            }
        }
    }
    // remaining-case probe
    let mut finite = Vec::new();
    let mut probes = 0;
    for p in [5, 7] {
        for k in (4..=400).step_by(2) {
            if classify_case(k, p).unwrap().status != Status::RemainingCase {
                continue;
            }
            for den in [100, 1000, 10000] {
                let r = remaining_case_probe(k, p, &rat(P, 1, den)).unwrap();
                probes += 1;
                if r.upper.is_none() {
                    continue;
                }
                let (a0, b0) = r.at_zero.unwrap();
                let (fa, fb) = r.derivative_frozen.unwrap();
                let (pa, pb) = r.derivative_closed_form.unwrap();
                let deriv_ok = (fa - pa).abs() < 1e-4 * pa.abs().max(1.0) && (fb - pb).abs() < 1e-4 * pb.abs().max(1.0);
                if !(a0.abs() < 1e-30 && b0.abs() < 1e-30) {
                    failed.push(format!("probe p={p} k={k}: A, B nonzero at t=0"));
                }
                if r.bounds_hold != Some(true) {
                    failed.push(format!("probe p={p} k={k}: bounds do not bracket"));
                }
                if !deriv_ok {
                    failed.push(format!("probe p={p} k={k}: derivative"));
                }
                if r.limit_sign_holds != Some(true) {
                    failed.push(format!("probe p={p} k={k}: large-k sign"));
                }
                if r.sign_holds != Some(true) {
                    finite.push(format!("p={p} k={k} t=1/{den}"));
                }
            }
        }
    }
    finite.dedup_by(|a, b| a.split(" t=").next() == b.split(" t=").next());
    let note = if finite.is_empty() {
        "signs hold at every probed k".to_string()
    } else {
        format!("finite-k sign not reached at {} (large-k sign holds)", finite.iter().map(|s| s.split(" t=").next().unwrap_or("")).collect::<Vec<_>>().join(", "))
    };
    let detail = if failed.is_empty() {
        format!("suites ok, {tracks} tracks, {probes} probes; {note}")
    } else {
        format!("{} failures, first: {}; {note}", failed.len(), failed[0])
    };
    ok(failed.is_empty(), detail)
}

fn stats() -> Outcome {
    let (code, v) = fricke(&["classify", "-k", "4..2000"]);
    let st = v["stats"].as_array().cloned().unwrap_or_default();
    let fr: Vec<f64> = st.iter().map(|s| s["remaining_fraction"].as_f64().unwrap_or(1.0)).collect();
    let pass = code == 0 && fr.len() == 2 && fr.iter().all(|f| *f < 0.02);
    let d = st
        .iter()
        .map(|s| format!("p={} {}/{} = {:.3}%", s["p"], s["remaining_case"], s["total"], 100.0 * s["remaining_fraction"].as_f64().unwrap_or(1.0)))
        .collect::<Vec<_>>()
        .join(", ");
    ok(pass, d)
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("zero tables", Duration::from_secs(30), zero_tables),
        ("r_bound at k=12", Duration::from_secs(5), r_bound_at_12),
        ("lemma and triple certificates", Duration::from_secs(60), certificates),
        ("all zeros on the arcs, k <= 100", Duration::from_secs(600), desk_scan),
        ("q-series vs lattice sum", Duration::from_secs(60), dual_oracle),
        ("property suites and probe", Duration::from_secs(600), properties),
        ("remaining-case fraction", Duration::from_secs(600), stats),
    ];
    let mut all = true;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = f();
        let dt = t0.elapsed();
        let pass = o.pass && dt <= *limit;
        all &= pass;
        let time = if dt <= *limit { format!("{:.2}s", dt.as_secs_f64()) } else { format!("{:.2}s, over {}s", dt.as_secs_f64(), limit.as_secs()) };
        println!("{} {}. {name}: {} ({time})", if pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
