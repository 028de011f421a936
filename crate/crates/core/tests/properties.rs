//! Randomised properties.

use fricke_core::certifier::catalog::parse_exact;
use fricke_core::certifier::classify::{classify_case, Status};
use fricke_core::core_series::{Level, QSeries};
use fricke_core::domain_geometry::{arc_range, Arc};
use fricke_core::evaluator::{EvalConfig, Evaluator};
use fricke_core::real::{flt, rem_pos};
use proptest::prelude::*;
use rug::{Float, Rational};

const M: usize = 12;

fn series() -> impl Strategy<Value = QSeries> {
    prop::collection::vec(-20i64..=20, M).prop_map(|c| QSeries::from_ints(&c, 0, Level::from_int(5).unwrap()).unwrap())
}

fn unit_series() -> impl Strategy<Value = QSeries> {
    (prop::sample::select(vec![-2i64, -1, 1, 3]), prop::collection::vec(-9i64..=9, M - 1)).prop_map(|(c0, rest)| {
        let mut c = vec![c0];
        c.extend(rest);
        QSeries::from_ints(&c, 0, Level::from_int(7).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_laws(a in series(), b in series(), c in series()) {
        let back = a.add(&b).unwrap().sub(&b).unwrap();
        prop_assert_eq!(back.coeffs(), a.coeffs());
        let (ab, ba) = (a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(ab.coeffs(), ba.coeffs());
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l.coeffs(), r.coeffs());
    }

    #[test]
    fn series_inverse_and_powers(u in unit_series(), n in 0i64..5) {
        let one = QSeries::one(u.level(), u.truncation_order());
        let id = u.mul(&u.invert().unwrap()).unwrap();
        prop_assert_eq!(id.coeffs(), one.coeffs());
        let mut acc = one.clone();
        for _ in 0..n {
            acc = acc.mul(&u).unwrap();
        }
        let pw = u.pow(n).unwrap();
        prop_assert_eq!(pw.coeffs(), acc.coeffs());
        let id = u.pow(-n).unwrap().mul(&acc).unwrap();
        prop_assert_eq!(id.coeffs(), one.coeffs());
    }

    #[test]
    fn rem_pos_range(x in -1e6f64..1e6, m in 0.01f64..100.0) {
        let (x, m) = (flt(128, x), flt(128, m));
        let r = rem_pos(&x, &m);
        prop_assert!(r >= 0 && r < m);
        let q = Float::with_val(128, &x - &r) / &m;
        let n = q.clone().round();
        prop_assert!(Float::with_val(128, &q - &n).abs() < 1e-20);
    }

    #[test]
    fn parse_exact_roundtrip(n in -100000i64..100000, d in 1i64..5000, frac in 0u32..4) {
        prop_assert_eq!(parse_exact(&format!("{n}/{d}")).unwrap(), Rational::from((n, d)));
        let scale = 10i64.pow(frac);
        let (w, f) = (n.abs() / scale, n.abs() % scale);
        let s = if frac == 0 { format!("{w}") } else { format!("{w}.{f:0width$}", width = frac as usize) };
        prop_assert_eq!(parse_exact(&s).unwrap(), Rational::from((n.abs(), scale)));
    }

    #[test]
    fn classification_is_total(k in 2i64..1500, p in prop::sample::select(vec![5u32, 7])) {
        let k = 2 * k;
        let c = classify_case(k, p).unwrap();
        prop_assert_eq!(c.residue, k % if p == 5 { 4 } else { 6 });
        if (p == 5 && k % 4 == 0) || (p == 7 && k % 6 == 0) {
            prop_assert_eq!(c.status, Status::AllOnArcProven);
        }
        prop_assert!(classify_case(k + 1, p).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn arc_functions_real(k in 2i64..13, p in prop::sample::select(vec![5u32, 7]), a2 in any::<bool>(), s in 0.0f64..1.0) {
        let (k, arc) = (2 * k, if a2 { Arc::A2 } else { Arc::A1 });
        let (lo, hi) = arc_range(p, arc, 128).unwrap();
        let th = Float::with_val(128, &lo + (hi - &lo) * s);
        let ev = Evaluator::new(k, p, &EvalConfig::default()).unwrap();
        let v = ev.arc(arc, &th).unwrap();
        let scale = v.value.to_f64().abs().max(1.0);
        prop_assert!(v.imag_residual.to_f64() < 1e-25 * scale, "{}", v.imag_residual.to_f64());
    }
}
