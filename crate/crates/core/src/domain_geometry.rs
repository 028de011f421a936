//! Boundary arcs, corners and angle bookkeeping for the fundamental domain of
//! the Fricke group of level 5 or 7.
//!
//! The lower boundary of the domain consists of two arcs:
//! `A1: z = e^{iθ}/√p` for `θ ∈ [π/2, π/2 + α_p]` and
//! `A2: z = e^{iθ}/(2√p) − 1/2` for `θ ∈ [α₅, π/2]` (`p = 5`) or
//! `θ ∈ [α₇ − π/6, π/2]` (`p = 7`). They meet at the corner `ρ_{p,2}`.

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evaluator::HPoint;
use crate::real::{self, int, pi, rat, sqrt_i};

/// Which boundary arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arc {
    A1,
    A2,
}

impl Arc {
    pub fn index(self) -> u8 {
        match self {
            Arc::A1 => 1,
            Arc::A2 => 2,
        }
    }

    pub fn from_index(n: u8) -> Result<Arc> {
        match n {
            1 => Ok(Arc::A1),
            2 => Ok(Arc::A2),
            _ => invalid(format!("arc must be 1 or 2, got {n}")),
        }
    }
}

/// A point on a boundary arc, given by its own angle parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPoint {
    pub arc: Arc,
    pub theta: Float,
}

impl Serialize for ArcPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ArcPoint", 2)?;
        st.serialize_field("arc", &self.arc)?;
        st.serialize_field("theta", &real::to_dec(&self.theta))?;
        st.end()
    }
}

pub(crate) fn check_p(p: u32) -> Result<()> {
    if p == 5 || p == 7 {
        Ok(())
    } else {
        invalid(format!("level must be 5 or 7, got {p}"))
    }
}

/// `α₅ = arctan 2`, `α₇ = arctan(5/√3)`.
pub fn alpha(p: u32, prec: u32) -> Result<Float> {
    check_p(p)?;
    Ok(if p == 5 {
        int(prec, 2).atan()
    } else {
        (int(prec, 5) / sqrt_i(prec, 3)).atan()
    })
}

/// Parameter interval `[lo, hi]` of an arc.
pub fn arc_range(p: u32, arc: Arc, prec: u32) -> Result<(Float, Float)> {
    let a = alpha(p, prec)?;
    let half_pi = pi(prec) / 2u32;
    Ok(match arc {
        Arc::A1 => (half_pi.clone(), half_pi + a),
        Arc::A2 => {
            let lo = if p == 5 { a } else { a - pi(prec) / 6u32 };
            (lo, half_pi)
        }
    })
}

/// Parameter of the seam corner `ρ_{p,2}` on each arc: `(θ on A1, θ on A2)`.
pub fn seam(p: u32, prec: u32) -> Result<(Float, Float)> {
    Ok((arc_range(p, Arc::A1, prec)?.1, arc_range(p, Arc::A2, prec)?.0))
}

/// Offset between the glued parameter and the A2 parameter: π/2 for `p = 5`, 2π/3 for `p = 7`.
pub fn glue_offset(p: u32, prec: u32) -> Result<Float> {
    check_p(p)?;
    Ok(if p == 5 { pi(prec) / 2u32 } else { pi(prec) * 2u32 / 3u32 })
}

fn in_range(theta: &Float, lo: &Float, hi: &Float) -> bool {
    let slack = Float::with_val(theta.prec(), Float::i_exp(1, -(theta.prec() as i32) + 8));
    *theta >= Float::with_val(theta.prec(), lo - &slack) && *theta <= Float::with_val(theta.prec(), hi + &slack)
}

/// `A1 ↦ e^{iθ}/√p`, `A2 ↦ e^{iθ}/(2√p) − 1/2`.
pub fn arc_to_halfplane(pt: &ArcPoint, p: u32) -> Result<HPoint> {
    let prec = pt.theta.prec();
    let (lo, hi) = arc_range(p, pt.arc, prec)?;
    if !in_range(&pt.theta, &lo, &hi) {
        return invalid(format!("θ = {} outside the parameter range of {:?}", pt.theta.to_f64(), pt.arc));
    }
    Ok(arc_param_to_halfplane(pt.arc, &pt.theta, p))
}

/// Same map without the range check.
pub fn arc_param_to_halfplane(arc: Arc, theta: &Float, p: u32) -> HPoint {
    let prec = theta.prec();
    let r = sqrt_i(prec, p);
    let (s, c) = theta.clone().sin_cos(Float::new(prec));
    match arc {
        Arc::A1 => HPoint::new_unchecked(c / &r, s / r),
        Arc::A2 => {
            let r2 = r * 2u32;
            HPoint::new_unchecked(c / &r2 - rat(prec, 1, 2), s / r2)
        }
    }
}

/// The three corners of the lower boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corner {
    /// `i/√p`
    ISqrtP,
    /// `−1/2 + i/(2√p)`
    Rho1,
    /// `−2/5 + i/5` for `p = 5`, `−5/14 + √3 i/14` for `p = 7`
    Rho2,
}

impl Corner {
    pub const ALL: [Corner; 3] = [Corner::ISqrtP, Corner::Rho1, Corner::Rho2];

    /// Exact coordinates realised at `prec` bits.
    pub fn point(self, p: u32, prec: u32) -> Result<HPoint> {
        check_p(p)?;
        let r = sqrt_i(prec, p);
        Ok(match self {
            Corner::ISqrtP => HPoint::new_unchecked(int(prec, 0), int(prec, 1) / r),
            Corner::Rho1 => HPoint::new_unchecked(rat(prec, -1, 2), int(prec, 1) / (r * 2u32)),
            Corner::Rho2 if p == 5 => HPoint::new_unchecked(rat(prec, -2, 5), rat(prec, 1, 5)),
            Corner::Rho2 => HPoint::new_unchecked(rat(prec, -5, 14), sqrt_i(prec, 3) / 14u32),
        })
    }

    /// Where the corner sits in arc parameters; `ρ_{p,2}` is reported on A1.
    pub fn arc_point(self, p: u32, prec: u32) -> Result<ArcPoint> {
        let half_pi = pi(prec) / 2u32;
        Ok(match self {
            Corner::ISqrtP => ArcPoint { arc: Arc::A1, theta: half_pi },
            Corner::Rho1 => ArcPoint { arc: Arc::A2, theta: half_pi },
            Corner::Rho2 => ArcPoint { arc: Arc::A1, theta: seam(p, prec)?.0 },
        })
    }
}

/// Membership in the fundamental domain: the closed left half
/// `−1/2 ≤ Re z ≤ 0, |z| ≥ 1/√p, |z + 1/2| ≥ 1/(2√p)` together with the open right half
/// `0 < Re z < 1/2, |z| > 1/√p, |z − 1/2| > 1/(2√p)`.
pub fn in_fundamental_domain(z: &HPoint, p: u32) -> Result<bool> {
    check_p(p)?;
    let prec = z.re.prec();
    let x = &z.re;
    let y2 = Float::with_val(prec, z.im.square_ref());
    let r2 = Float::with_val(prec, x.square_ref()) + &y2;
    let inv_p = rat(prec, 1, p as i64);
    let inv_4p = rat(prec, 1, 4 * p as i64);
    let half = rat(prec, 1, 2);
    let shifted = |s: &Float| Float::with_val(prec, x + s).square() + &y2;
    if *x >= -half.clone() && *x <= 0 {
        Ok(r2 >= inv_p && shifted(&half) >= inv_4p)
    } else if *x > 0 && *x < half {
        Ok(r2 > inv_p && shifted(&-half.clone()) > inv_4p)
    } else {
        Ok(false)
    }
}

/// Generators used for reduction: `T`, `T⁻¹`, `W_p` and the pair of level-`p`
/// Atkin-Lehner elements attached to the small circles, as integer matrices.
pub fn generators(p: u32) -> Result<Vec<[i64; 4]>> {
    check_p(p)?;
    let p = p as i64;
    let b = if p == 5 { 2 } else { 3 };
    Ok(vec![
        [1, 1, 0, 1],
        [1, -1, 0, 1],
        [0, -1, p, 0],
        [p, b, 2 * p, p],
        [-p, b, 2 * p, -p],
    ])
}

/// Möbius action of an integer matrix.
pub fn act(m: &[i64; 4], z: &HPoint) -> HPoint {
    let prec = z.re.prec();
    let zc = z.to_complex();
    let num = Complex::with_val(prec, &zc * m[0]) + m[1];
    let den = Complex::with_val(prec, &zc * m[2]) + m[3];
    let w = Complex::with_val(prec, num / den);
    let (re, im) = w.into_real_imag();
    HPoint::new_unchecked(re, im)
}

/// Move `z` into the fundamental domain. Each non-translation step strictly
/// raises the imaginary part, so the loop terminates; returns the image and the
/// number of steps taken.
pub fn reduce_to_domain(z: &HPoint, p: u32) -> Result<(HPoint, usize)> {
    let g = generators(p)?;
    let prec = z.re.prec();
    let half = rat(prec, 1, 2);
    let mut w = z.clone();
    for step in 0..10_000 {
        let shift = Float::with_val(prec, &w.re + &half).floor();
        if shift != 0 {
            w = HPoint::new_unchecked(Float::with_val(prec, &w.re - &shift), w.im.clone());
        }
        let x = &w.re;
        let y2 = Float::with_val(prec, w.im.square_ref());
        let r2 = Float::with_val(prec, x.square_ref()) + &y2;
        let left = Float::with_val(prec, x + &half).square() + &y2;
        let right = Float::with_val(prec, x - &half).square() + &y2;
        let next = if r2 < rat(prec, 1, p as i64) {
            Some(&g[2])
        } else if left < rat(prec, 1, 4 * p as i64) {
            Some(&g[3])
        } else if right < rat(prec, 1, 4 * p as i64) {
            Some(&g[4])
        } else {
            None
        };
        match next {
            Some(m) => w = act(m, &w),
            None => {
                // the right edge Re = 1/2 belongs to the left copy
                if w.re == half {
                    w = HPoint::new_unchecked(-half, w.im.clone());
                }
                return Ok((w, step));
            }
        }
    }
    Err(crate::Error::Internal("reduction did not terminate".into()))
}

/// All images of `z` under words of length at most `depth` in the generators.
pub fn word_ball(z: &HPoint, p: u32, depth: usize) -> Result<Vec<HPoint>> {
    let g = generators(p)?;
    let mut layer = vec![z.clone()];
    let mut all = vec![z.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &layer {
            for m in &g {
                next.push(act(m, w));
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    Ok(all)
}

/// Arc points with `kθ/2 ≡ 0 (mod π)`, sorted by arc and angle. A point at the
/// seam is listed once, on A1.
pub fn integer_points(k: i64, p: u32, prec: u32) -> Result<Vec<ArcPoint>> {
    check_p(p)?;
    if k < 4 || k % 2 != 0 {
        return invalid(format!("weight must be even and at least 4, got {k}"));
    }
    let step = pi(prec) * 2u32 / (k as u32);
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 16));
    let mut out = Vec::new();
    for arc in [Arc::A1, Arc::A2] {
        let (lo, hi) = arc_range(p, arc, prec)?;
        let m0 = (Float::with_val(prec, &lo / &step) - &tol).ceil();
        let mut m = m0;
        loop {
            let theta = Float::with_val(prec, &m * &step);
            if theta > Float::with_val(prec, &hi + &tol) {
                break;
            }
            out.push(ArcPoint { arc, theta });
            m += 1;
        }
    }
    let (s1, s2) = seam(p, prec)?;
    let has_seam_a1 = out.iter().any(|q| q.arc == Arc::A1 && Float::with_val(prec, &q.theta - &s1).abs() < tol);
    if has_seam_a1 {
        out.retain(|q| !(q.arc == Arc::A2 && Float::with_val(prec, &q.theta - &s2).abs() < tol));
    }
    Ok(out)
}

/// Reduced angles attached to a weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleClass {
    pub k: i64,
    pub p: u32,
    /// `α_{p,k} ≡ k(π/2 + α_p)/2 (mod π)` in `[0, π)`.
    #[serde(serialize_with = "ser_float")]
    pub alpha_pk: Float,
    /// `β_{5,k} ≡ kα₅/2`, `β_{7,k} ≡ k(α₇ − π/6)/2 (mod π)` in `[0, π)`.
    #[serde(serialize_with = "ser_float")]
    pub beta_pk: Float,
    /// `k mod 4` for `p = 5`, `k mod 6` for `p = 7`.
    pub residue: i64,
}

pub(crate) fn ser_float<S: serde::Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&real::to_dec(x))
}

pub fn angle_class(k: i64, p: u32, prec: u32) -> Result<AngleClass> {
    check_p(p)?;
    if k < 4 || k % 2 != 0 {
        return invalid(format!("weight must be even and at least 4, got {k}"));
    }
    let pi_ = pi(prec);
    let a1 = arc_range(p, Arc::A1, prec)?.1;
    let a2 = arc_range(p, Arc::A2, prec)?.0;
    let half_k = Float::with_val(prec, k) / 2u32;
    let alpha_pk = real::rem_pos(&(Float::with_val(prec, &half_k * &a1)), &pi_);
    let beta_pk = real::rem_pos(&(half_k * &a2), &pi_);
    let residue = k % if p == 5 { 4 } else { 6 };
    Ok(AngleClass { k, p, alpha_pk, beta_pk, residue })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn close(a: &Float, b: &Float) -> bool {
        Float::with_val(P, a - b).abs() < 1e-35
    }

    #[test]
    fn alpha_values() {
        assert!((alpha(5, P).unwrap().to_f64() - 1.1071487177940904).abs() < 1e-15);
        assert!((alpha(7, P).unwrap().to_f64() - 1.2373231545430645).abs() < 1e-15);
        assert!(close(&alpha(5, P).unwrap().tan(), &int(P, 2)));
        assert!(alpha(3, P).is_err());
    }

    #[test]
    fn arc_images() {
        let half_pi = pi(P) / 2u32;
        let z = arc_to_halfplane(&ArcPoint { arc: Arc::A1, theta: half_pi.clone() }, 5).unwrap();
        let c = Corner::ISqrtP.point(5, P).unwrap();
        assert!(close(&z.re, &c.re) && close(&z.im, &c.im));
        let z = arc_to_halfplane(&ArcPoint { arc: Arc::A2, theta: half_pi }, 5).unwrap();
        let c = Corner::Rho1.point(5, P).unwrap();
        assert!(close(&z.re, &c.re) && close(&z.im, &c.im));
        for p in [5, 7] {
            let (s1, s2) = seam(p, P).unwrap();
            let c = Corner::Rho2.point(p, P).unwrap();
            for (arc, th) in [(Arc::A1, s1), (Arc::A2, s2)] {
                let z = arc_to_halfplane(&ArcPoint { arc, theta: th }, p).unwrap();
                assert!(close(&z.re, &c.re) && close(&z.im, &c.im), "p={p} {arc:?}");
            }
        }
        assert!(arc_to_halfplane(&ArcPoint { arc: Arc::A1, theta: int(P, 3) }, 5).is_err());
    }

    #[test]
    fn domain_membership() {
        let z = HPoint::new_unchecked(int(P, 0), int(P, 1));
        assert!(in_fundamental_domain(&z, 5).unwrap());
        let z = HPoint::new_unchecked(int(P, 0), int(P, 1) / (sqrt_i(P, 5) * 3u32));
        assert!(!in_fundamental_domain(&z, 5).unwrap());
        let rho = Corner::Rho1.point(5, P).unwrap();
        assert!(in_fundamental_domain(&rho, 5).unwrap());
        let right = HPoint::new_unchecked(rat(P, 1, 2), rho.im.clone());
        assert!(!in_fundamental_domain(&right, 5).unwrap());
    }

    #[test]
    fn integer_point_counts() {
        let pts = integer_points(4, 5, P).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!((pts[0].arc, pts[1].arc), (Arc::A1, Arc::A2));
        assert_eq!(integer_points(8, 5, P).unwrap().len(), 3);
        for k in (4..=80).step_by(4) {
            assert_eq!(integer_points(k, 5, P).unwrap().len() as i64, k / 4 + 1, "k={k}");
        }
    }

    #[test]
    fn angle_classes() {
        assert_eq!(angle_class(6, 7, P).unwrap().residue, 0);
        let pi_ = pi(P);
        let a = angle_class(8, 5, P).unwrap().alpha_pk;
        let b = angle_class(12, 5, P).unwrap().alpha_pk;
        let step = real::rem_pos(&(Float::with_val(P, &b - &a)), &pi_);
        let expect = real::rem_pos(&(arc_range(5, Arc::A1, P).unwrap().1 * 2u32), &pi_);
        assert!(close(&step, &expect));
    }
}
