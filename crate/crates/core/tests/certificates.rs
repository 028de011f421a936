//! Certificates checked against the evaluator, plus determinism and perturbation.

use fricke_core::certifier::algorithm::{run_algorithm, run_with_search, standard_input};
use fricke_core::certifier::catalog::{lemma, lemmas, triples, C0Rule, Route};
use fricke_core::certifier::lemmas::{verify_item, verify_lemma};
use fricke_core::certifier::terms::{r_bound_arc, refined_r_bound_p5a2, tail_soundness};
use fricke_core::certifier::triples::verify_interval_triples;
use fricke_core::domain_geometry::{angle_class, seam, Arc};
use fricke_core::evaluator::{EvalConfig, Evaluator, Method};
use fricke_core::real::pi;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

const PREC: u32 = 128;

fn evaluator(k: i64, p: u32) -> Evaluator {
    let cfg = EvalConfig::default();
    let cfg = if k < 40 { cfg } else { EvalConfig { nmax: 40, ..cfg.with_method(Method::Lattice) } };
    Evaluator::new(k, p, &cfg).unwrap()
}

/// `|R| + tail` at `θ`.
fn abs_remainder(ev: &Evaluator, arc: Arc, theta: &Float) -> f64 {
    let v = ev.remainder(arc, theta).unwrap();
    v.value.to_f64().abs() + v.tail_bound.to_f64()
}

/// The range `θ₀ ∓ tπ/k` to the far end of the arc.
fn certified_range(p: u32, arc: Arc, k: i64, t: &Float) -> (f64, f64) {
    let (s1, s2) = seam(p, PREC).unwrap();
    let x = Float::with_val(PREC, t * pi(PREC)) / k;
    let half = std::f64::consts::FRAC_PI_2;
    match arc {
        Arc::A1 => (half, (s1 - x).to_f64()),
        Arc::A2 => ((s2 + x).to_f64(), half),
    }
}

#[test]
fn lemma_claims_hold_at_sampled_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for item in lemmas() {
        let arc = item.arc();
        let two_c0 = item.c0().to_f64() * 2.0;
        let t = item.t();
        let mut ks: Vec<i64> = item.direct_k.clone();
        while ks.len() < 10 {
            ks.push(item.k0 + 2 * rng.gen_range(0..150));
        }
        for k in ks {
            let ev = evaluator(k, item.p);
            let (lo, hi) = certified_range(item.p, arc, k, &t);
            for _ in 0..5 {
                let th = Float::with_val(PREC, rng.gen_range(lo..=hi));
                let r = abs_remainder(&ev, arc, &th);
                assert!(r < two_c0, "{} k={k} θ={} |R|={r} 2c0={two_c0}", item.id, th.to_f64());
            }
        }
    }
}

#[test]
fn triple_claims_hold_in_their_windows() {
    let mut checked = 0;
    for tr in triples() {
        if tr.c0_rule == C0Rule::Signed {
            continue;
        }
        let (x, y) = tr.window();
        let m = tr.modulus() as i64;
        let arc = tr.arc();
        let c0 = tr.stated_c0().unwrap().to_f64().min(1.0);
        let mut hits = 0;
        let mut k = tr.residue as i64;
        while hits < 3 && k <= 6000 {
            if k >= 4 {
                let a = angle_class(k, tr.p, PREC).unwrap().alpha_pk;
                if a >= x && a <= y {
                    let (lo, hi) = certified_range(tr.p, arc, k, &tr.t());
                    let th = Float::with_val(PREC, if arc == Arc::A1 { hi } else { lo });
                    let r = abs_remainder(&evaluator(k, tr.p), arc, &th);
                    assert!(r < 2.0 * c0 + 1e-12, "{} k={k} |R|={r} 2c0={}", tr.id, 2.0 * c0);
                    hits += 1;
                    checked += 1;
                }
            }
            k += m;
        }
    }
    assert!(checked > 30, "only {checked} weights fell in the windows");
}

#[test]
fn all_lemmas_and_triples_pass() {
    for id in ["L5-1", "L5-2", "L5-3", "L5-4", "L5-5", "L7-1", "L7-2", "L7-3", "L7-4", "L7-5", "L7-6", "L7-7"] {
        let r = verify_lemma(id).unwrap();
        assert!(r.pass, "{id}");
    }
    let reps = verify_interval_triples(None).unwrap();
    assert_eq!(reps.len(), 39);
    for r in &reps {
        assert!(r.pass, "{}", r.id);
        assert!(r.pointwise.iter().all(|p| p.lhs < p.rhs));
    }
}

#[test]
fn refined_bound_window() {
    let item = lemma("L5-3").unwrap();
    assert_eq!(item.route, Route::Refined);
    let b = refined_r_bound_p5a2(item.k0).unwrap().to_f64();
    assert!((1.97..=1.9822).contains(&b), "{b}");
    // 2 − C/k² + rest(k) creeps up to 2 but stays below it
    for k in (item.k0..item.k0 + 400).step_by(2) {
        assert!(refined_r_bound_p5a2(k).unwrap() < 2, "k={k}");
    }
}

#[test]
fn r_bound_decreases_with_weight() {
    for (p, arc) in [(5, Arc::A1), (5, Arc::A2), (7, Arc::A1), (7, Arc::A2)] {
        let mut prev = r_bound_arc(12, p, arc).unwrap();
        for k in (14..=200).step_by(2) {
            let b = r_bound_arc(k, p, arc).unwrap();
            assert!(b <= prev, "p={p} {arc:?} k={k}");
            prev = b;
        }
    }
}

#[test]
fn certified_tails_dominate_explicit_sums() {
    for (p, arc) in [(5, Arc::A1), (5, Arc::A2), (7, Arc::A1), (7, Arc::A2)] {
        let c = tail_soundness(p, arc, 400).unwrap();
        assert!(c.pass, "p={p} {arc:?} ratio {}", c.min_ratio.to_f64());
    }
}

#[test]
fn certificates_are_deterministic() {
    let a = serde_json::to_string(&verify_lemma("L7-4").unwrap()).unwrap();
    let b = serde_json::to_string(&verify_lemma("L7-4").unwrap()).unwrap();
    assert_eq!(a, b);
    let a = serde_json::to_string(&verify_interval_triples(Some("p5-a1-r2")).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_interval_triples(Some("p5-a1-r2")).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lowering_k0_breaks_the_certificate() {
    let item = lemma("L5-1").unwrap();
    let inp = standard_input(5, item.arc(), 4, item.c0(), item.t()).unwrap();
    let cert = run_algorithm(&inp).unwrap();
    assert!(!cert.pass);
    assert!(!cert.failed_checks().is_empty());
    assert!(!run_with_search(&inp).unwrap().pass);
    // the catalogued k₀ passes
    assert!(verify_item(item).unwrap().pass);
}

#[test]
fn direct_weights_are_checked() {
    for item in lemmas().iter().filter(|i| !i.direct_k.is_empty()) {
        let r = verify_item(item).unwrap();
        assert_eq!(r.direct.len(), item.direct_k.len(), "{}", item.id);
        assert!(r.direct.iter().all(|d| d.pass), "{}", item.id);
    }
}
