//! Independent evaluation routes against each other, and the symmetries of `E*`.

use fricke_core::core_series::{default_order, eta_product_q, eta_product_q_direct, verify_decomposition};
use fricke_core::domain_geometry::{Arc, Corner};
use fricke_core::evaluator::{EvalConfig, Evaluator, HPoint, Method};
use fricke_core::real::{flt, int, pi, sqrt_i};
use fricke_core::zero_locator::corner_orders;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float};

const P: u32 = 128;

fn random_point(rng: &mut ChaCha8Rng) -> HPoint {
    HPoint::from_f64(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..1.2), P).unwrap()
}

#[test]
fn qseries_and_lattice_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in [5, 7] {
        for k in (4..=12).step_by(2) {
            let cfg = EvalConfig::default();
            let qs = Evaluator::new(k, p, &cfg.with_method(Method::QSeries)).unwrap();
            let lat = Evaluator::new(k, p, &cfg.with_method(Method::Lattice)).unwrap();
            for _ in 0..20 {
                let z = random_point(&mut rng);
                let a = qs.e_star(&z).unwrap();
                let b = lat.e_star(&z).unwrap();
                let diff = Float::with_val(P, Complex::with_val(P, &a.value - &b.value).abs_ref());
                let scale = Float::with_val(P, a.value.abs_ref());
                let allowed = scale * 1e-9 + &a.tail_bound + &b.tail_bound;
                assert!(diff <= allowed, "p={p} k={k} z=({}, {}) diff {}", z.re.to_f64(), z.im.to_f64(), diff.to_f64());
            }
        }
    }
}

#[test]
fn fricke_covariance() {
    // E*(−1/(pz)) = (√p z)^k E*(z)
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [5, 7] {
        for k in [4, 6, 10, 16] {
            let ev = Evaluator::new(k, p, &EvalConfig::default()).unwrap();
            for _ in 0..5 {
                let z = random_point(&mut rng);
                let zc = z.to_complex();
                let w = Complex::with_val(P, Complex::with_val(P, &zc * p).recip()) * -1i32;
                let lhs = ev.e_star(&HPoint::from_complex(w).unwrap()).unwrap().value;
                let f = Complex::with_val(P, &zc * sqrt_i(P, p));
                let rhs = Complex::with_val(P, rug::ops::Pow::pow(f, k as i32)) * ev.e_star(&z).unwrap().value;
                let d = Float::with_val(P, Complex::with_val(P, &lhs - &rhs).abs_ref());
                let s = Float::with_val(P, rhs.abs_ref());
                assert!(d < s * 1e-20 + 1e-20f64, "p={p} k={k}");
            }
        }
    }
}

#[test]
fn arc_functions_are_real() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [5, 7] {
        for k in [4, 8, 14, 30] {
            let ev = Evaluator::new(k, p, &EvalConfig::default()).unwrap();
            for arc in [Arc::A1, Arc::A2] {
                let (lo, hi) = fricke_core::domain_geometry::arc_range(p, arc, P).unwrap();
                for _ in 0..8 {
                    let u: f64 = rng.gen();
                    let th = Float::with_val(P, &hi - &lo) * u + &lo;
                    let v = ev.arc(arc, &th).unwrap();
                    assert!(v.imag_residual < 1e-25, "p={p} k={k} {arc:?}");
                }
            }
        }
    }
}

#[test]
fn forced_corner_zeros() {
    for p in [5, 7] {
        for k in (4..=24).step_by(2) {
            let o = corner_orders(k, p).unwrap();
            let ev = Evaluator::new(k, p, &EvalConfig::default()).unwrap();
            for c in Corner::ALL {
                let order = match (c, o.t) {
                    (Corner::Rho2, Some(t)) => t,
                    _ => o.s,
                };
                let v = ev.e_star(&c.point(p, P).unwrap()).unwrap();
                let a = Float::with_val(P, v.value.abs_ref());
                if order > 0 {
                    assert!(a < 1e-25, "p={p} k={k} {c:?} {}", a.to_f64());
                } else {
                    assert!(a > 1e-6, "p={p} k={k} {c:?} vanishes unexpectedly");
                }
            }
        }
    }
}

#[test]
fn eta_products_two_ways() {
    for exps in [vec![(1, 4), (5, 4)], vec![(1, 6), (7, 6)], vec![(1, -1), (5, 5)], vec![(1, 24)]] {
        let a = eta_product_q(&exps, 60).unwrap();
        let b = eta_product_q_direct(&exps, 60).unwrap();
        assert_eq!(a.coeffs(), b.coeffs(), "{exps:?}");
    }
}

#[test]
fn decompositions_up_to_24() {
    for p in [5, 7] {
        for k in (0..=24).step_by(2) {
            let r = verify_decomposition(k, p, default_order(k)).unwrap();
            assert!(r.ok, "p={p} k={k}");
        }
    }
}

#[test]
fn half_turn_values() {
    // E*(i/√p) is real, and the glued function is continuous at the seam
    for p in [5, 7] {
        let ev = Evaluator::new(8, p, &EvalConfig::default()).unwrap();
        let z = Corner::ISqrtP.point(p, P).unwrap();
        let v = ev.e_star(&z).unwrap().value;
        assert!(Float::with_val(P, v.imag().abs_ref()) < 1e-30);
        let (_, seam) = fricke_core::domain_geometry::arc_range(p, Arc::A1, P).unwrap();
        let eps = flt(P, 1e-12);
        let l = ev.glued(&Float::with_val(P, &seam - &eps)).unwrap().value;
        let r = ev.glued(&Float::with_val(P, &seam + &eps)).unwrap().value;
        assert!(Float::with_val(P, &l - &r).abs() < 1e-8);
    }
    assert!(pi(P) > int(P, 3));
}
