//! Numerical evaluation of `E_k`, `E*_{k,p}` and the real arc functions.
//!
//! Three routes are available:
//! - [`Method::QSeries`] sums the exact q-expansion of `E*_{k,p}` directly;
//! - [`Method::Lattice`] sums `(cz + d)^{−k}` over coprime pairs with an
//!   integral-comparison tail bound;
//! - [`Method::Reduced`] (default) moves each argument into the standard domain
//!   of SL₂(ℤ), where `|q| ≤ e^{−π√3}`, and sums the q-expansion of `E_k` with a
//!   rigorous coefficient tail bound.
//!
//! The split sums over `p ∤ c` ([`split_remainder`]) give an independent route to
//! the arc functions.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::core_series::{self, QSeries};
use crate::domain_geometry::{self, arc_param_to_halfplane, check_p, Arc};
use crate::error::{invalid, Error, Result};
use crate::real::{self, int, pi, rat, sqrt_i};

/// Point of the upper half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    pub re: Float,
    pub im: Float,
}

impl HPoint {
    pub fn new(re: Float, im: Float) -> Result<HPoint> {
        if im <= 0 {
            return invalid("point must lie in the upper half-plane (Im z > 0)");
        }
        Ok(HPoint { re, im })
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Result<HPoint> {
        HPoint::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub(crate) fn new_unchecked(re: Float, im: Float) -> HPoint {
        HPoint { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn to_complex(&self) -> Complex {
        Complex::with_val(self.prec(), (&self.re, &self.im))
    }

    pub fn from_complex(z: Complex) -> Result<HPoint> {
        let (re, im) = z.into_real_imag();
        HPoint::new(re, im)
    }
}

impl Serialize for HPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HPoint", 2)?;
        st.serialize_field("re", &real::to_dec(&self.re))?;
        st.serialize_field("im", &real::to_dec(&self.im))?;
        st.end()
    }
}

/// Evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    QSeries,
    Lattice,
    Reduced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub precision_bits: u32,
    /// Lattice radius: pairs with `c² + d² ≤ nmax²` are summed.
    pub nmax: u32,
    /// Truncation order for the q-series route.
    pub q_order: usize,
    /// Largest acceptable `|q|^{q_order}` for the q-series route.
    pub tail_tolerance: f64,
    pub method: Method,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            precision_bits: real::DEFAULT_PREC,
            nmax: 100,
            q_order: 150,
            tail_tolerance: 1e-30,
            method: Method::Reduced,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < 53 {
            return invalid("precision_bits must be at least 53");
        }
        if self.nmax < 2 {
            return invalid("nmax must be at least 2");
        }
        if self.q_order < 1 {
            return invalid("q_order must be at least 1");
        }
        if self.tail_tolerance.is_nan() || self.tail_tolerance <= 0.0 {
            return invalid("tail_tolerance must be positive");
        }
        Ok(())
    }

    pub fn with_method(&self, method: Method) -> EvalConfig {
        EvalConfig { method, ..self.clone() }
    }
}

/// A value together with a bound on its truncation and rounding error.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: Complex,
    pub tail_bound: Float,
}

impl Serialize for EvalResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EvalResult", 3)?;
        st.serialize_field("re", &real::to_dec(self.value.real()))?;
        st.serialize_field("im", &real::to_dec(self.value.imag()))?;
        st.serialize_field("tail", &real::to_dec(&self.tail_bound))?;
        st.end()
    }
}

/// Rounding allowance for a sum whose terms have absolute values summing to `mass`.
fn rounding(mass: &Float) -> Float {
    let prec = mass.prec();
    Float::with_val(prec, mass * Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 8)))
}

fn nome(z: &HPoint) -> Complex {
    let prec = z.prec();
    let two_pi_i = Complex::with_val(prec, (0, pi(prec) * 2u32));
    Complex::with_val(prec, two_pi_i * z.to_complex()).exp()
}

/// Horner evaluation of a stored q-series at `q = e^{2πiz}`.
///
/// The tail estimate is `C|q|^{M+1}/(1 − |q|)` with `C` the largest of the last ten
/// stored coefficients in absolute value.
pub fn eval_qseries(s: &QSeries, z: &HPoint, cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    let prec = cfg.precision_bits;
    if z.im < 0.05 {
        return invalid("q-series evaluation needs Im z ≥ 0.05");
    }
    let z = HPoint::new_unchecked(Float::with_val(prec, &z.re), Float::with_val(prec, &z.im));
    let m = s.truncation_order().min(cfg.q_order);
    let r = Float::with_val(prec, &z.im * pi(prec) * -2i32).exp();
    let log_r = Float::with_val(prec, r.ln_ref()).to_f64();
    if m > 0 && (m as f64) * log_r >= cfg.tail_tolerance.ln() {
        let required = (cfg.tail_tolerance.ln() / log_r).ceil() as usize;
        return Err(Error::NeedsMoreTerms { required });
    }
    let q = nome(&z);
    let mut acc = Complex::new(prec);
    let mut mass = Float::new(prec);
    let mut rpow = int(prec, 1);
    for n in (0..=m).rev() {
        let a = real::from_rational(prec, s.coeff(n));
        acc = Complex::with_val(prec, acc * &q) + &a;
        mass = Float::with_val(prec, &mass * &r) + a.abs();
        rpow *= &r;
    }
    // a constant series carries no tail
    let c = (m.saturating_sub(9).max(1)..=m)
        .map(|n| real::from_rational(prec, s.coeff(n)).abs())
        .fold(Float::new(prec), real::max);
    let one = int(prec, 1);
    let tail = c * Float::with_val(prec, &rpow) / (one - &r);
    Ok(EvalResult { value: acc, tail_bound: tail + rounding(&mass) })
}

fn check_weight(k: i64) -> Result<()> {
    if k < 4 || k % 2 != 0 {
        return invalid(format!("weight must be even and at least 4, got {k}"));
    }
    Ok(())
}

/// `min |cos φ + z sin φ|`, the least singular value of `(c, d) ↦ cz + d`.
pub fn delta(z: &HPoint) -> Float {
    let prec = z.prec();
    let r2 = Float::with_val(prec, z.re.square_ref()) + Float::with_val(prec, z.im.square_ref());
    let tr = r2 + 1u32;
    let y2 = Float::with_val(prec, z.im.square_ref());
    let disc = (Float::with_val(prec, tr.square_ref()) - y2 * 4u32).sqrt();
    let lam = (tr - disc) / 2u32;
    lam.sqrt()
}

/// `Σ_{|v| > N} |v|^{−k}` over all nonzero integer vectors, by comparison with
/// `∫_{|w| ≥ N−√2} (|w| − 1/√2)^{−k}`.
pub fn lattice_tail_sum(k: i64, n: f64, prec: u32) -> Float {
    let s = Float::with_val(prec, n) - sqrt_i(prec, 2);
    let kk = Float::with_val(prec, k);
    let a = Float::with_val(prec, s.clone().pow(2 - k)) / (kk.clone() - 2u32);
    let b = Float::with_val(prec, s.pow(1 - k)) / ((kk - 1u32) * sqrt_i(prec, 2));
    (a + b) * pi(prec) * 2u32
}

fn coprime(a: i64, b: i64) -> bool {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    if a == 0 {
        return b == 1;
    }
    if b == 0 {
        return a == 1;
    }
    let shift = (a | b).trailing_zeros();
    if shift > 0 {
        return false;
    }
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a == 1;
        }
    }
}

pub(crate) fn is_coprime(a: i64, b: i64) -> bool {
    coprime(a, b)
}

/// `E_k(z) = ½ Σ_{(c,d)=1} (cz + d)^{−k}` over `c² + d² ≤ N_max²`.
pub fn eval_e_lattice(k: i64, z: &HPoint, cfg: &EvalConfig) -> Result<EvalResult> {
    check_weight(k)?;
    cfg.validate()?;
    let prec = cfg.precision_bits;
    let zc = Complex::with_val(prec, z.to_complex());
    let n = cfg.nmax as i64;
    // one representative of each ±(c, d): c > 0, plus (0, 1)
    let mut acc = Complex::with_val(prec, 1);
    let mut mass = int(prec, 1);
    for c in 1..=n {
        let cz = Complex::with_val(prec, &zc * c);
        let dmax = ((n * n - c * c) as f64).sqrt().floor() as i64;
        for d in -dmax..=dmax {
            if !coprime(c, d) {
                continue;
            }
            let w = Complex::with_val(prec, &cz + d);
            let t = real::cpow_neg(&w, k);
            mass += Float::with_val(prec, t.abs_ref());
            acc += t;
        }
    }
    let dl = delta(z);
    let tail = Float::with_val(prec, dl.pow(-k)) * lattice_tail_sum(k, n as f64, prec) / 2u32;
    Ok(EvalResult { value: acc, tail_bound: tail + rounding(&mass) })
}

/// Coefficient table of `E_k` for the reduced route.
#[derive(Debug, Clone)]
struct EisensteinTable {
    k: i64,
    prec: u32,
    coeffs: Vec<Float>,
    /// `|2k/B_k| · ζ(3)` bounds `|a_n| / n^{k−1}`.
    growth: Float,
}

impl EisensteinTable {
    fn new(k: i64, prec: u32) -> Result<EisensteinTable> {
        let b = core_series::bernoulli(k)?;
        let factor = Float::with_val(prec, -rug::Rational::from(2 * k) / b);
        let growth = Float::with_val(prec, factor.abs_ref()) * rat(prec, 121, 100);
        // r_max = e^{−π√3} at the bottom of the standard domain
        let r = (pi(prec) * sqrt_i(prec, 3) * -1i32).exp();
        let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 8));
        let mut coeffs = vec![int(prec, 1)];
        let mut m = 1usize;
        loop {
            let sig = core_series::sigma(m as i64, (k - 1) as u32)?;
            coeffs.push(Float::with_val(prec, &factor * sig));
            if Self::tail(&growth, k, m, &r) .map(|t| t < eps).unwrap_or(false) {
                break;
            }
            m += 1;
            if m > 100_000 {
                return Err(Error::Internal("Eisenstein table did not converge".into()));
            }
        }
        Ok(EisensteinTable { k, prec, coeffs, growth })
    }

    /// Bound on `Σ_{n>m} |a_n| r^n`, or `None` if the ratio test fails at `m`.
    fn tail(growth: &Float, k: i64, m: usize, r: &Float) -> Option<Float> {
        let prec = r.prec();
        let m1 = Float::with_val(prec, m + 1);
        let ratio = Float::with_val(prec, (m + 2) as f64 / (m + 1) as f64).pow(k - 1) * r;
        if ratio >= 0.5 {
            return None;
        }
        let lead = Float::with_val(prec, m1.pow(k - 1)) * Float::with_val(prec, r.pow((m + 1) as i64));
        Some(lead * growth / (int(prec, 1) - ratio))
    }

    /// `E_k(z)` after reduction to the standard domain.
    fn eval(&self, z: &HPoint) -> Result<EvalResult> {
        let prec = self.prec;
        let (w, c, d) = reduce_sl2(z, prec)?;
        let q = nome(&w);
        let r = Float::with_val(prec, q.abs_ref());
        let m = self.coeffs.len() - 1;
        let mut acc = Complex::new(prec);
        let mut mass = Float::new(prec);
        for a in self.coeffs.iter().rev() {
            acc = Complex::with_val(prec, acc * &q) + a;
            mass = Float::with_val(prec, &mass * &r) + Float::with_val(prec, a.abs_ref());
        }
        let tail = Self::tail(&self.growth, self.k, m, &r)
            .ok_or_else(|| Error::Internal("reduced point outside the standard domain".into()))?;
        let err = tail + rounding(&mass);
        let zc = Complex::with_val(prec, z.to_complex());
        let j = Complex::with_val(prec, zc * c) + d;
        let jk = real::cpow_neg(&j, self.k);
        let scale = Float::with_val(prec, jk.abs_ref());
        let value = Complex::with_val(prec, acc * &jk);
        let err = err * &scale + rounding(&Float::with_val(prec, value.abs_ref()));
        Ok(EvalResult { value, tail_bound: err })
    }
}

/// Reduce `z` to `|Re w| ≤ 1/2, |w| ≥ 1` with `w = γz`; returns `w` and the bottom row `(c, d)` of `γ`.
fn reduce_sl2(z: &HPoint, prec: u32) -> Result<(HPoint, i64, i64)> {
    let mut w = Complex::with_val(prec, z.to_complex());
    let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
    let half = rat(prec, 1, 2);
    for _ in 0..10_000 {
        let n = Float::with_val(prec, w.real() + &half).floor();
        let ni = n.to_integer().and_then(|x| x.to_i64()).ok_or_else(|| Error::Internal("translation overflow".into()))?;
        if ni != 0 {
            w -= &n;
            a -= ni * c;
            b -= ni * d;
        }
        let norm = Float::with_val(prec, w.norm_ref());
        if norm >= 1 {
            if w.imag() <= &0 {
                return invalid("point must lie in the upper half-plane");
            }
            return Ok((HPoint::new_unchecked(w.real().clone(), w.imag().clone()), c, d));
        }
        w = Complex::with_val(prec, -w.recip());
        let (na, nb) = (-c, -d);
        c = a;
        d = b;
        a = na;
        b = nb;
    }
    Err(Error::Internal("SL2 reduction did not terminate".into()))
}

/// `E_k(z)` by the reduced route.
pub fn eval_e_reduced(k: i64, z: &HPoint, cfg: &EvalConfig) -> Result<EvalResult> {
    check_weight(k)?;
    cfg.validate()?;
    EisensteinTable::new(k, cfg.precision_bits)?.eval(z)
}

enum Backend {
    Series(QSeries),
    Lattice,
    Reduced(EisensteinTable),
}

/// Evaluator for `E*_{k,p}` and its arc functions at fixed `(k, p)`.
///
/// Holds the coefficient table of the chosen route; evaluation is pure.
pub struct Evaluator {
    k: i64,
    p: u32,
    cfg: EvalConfig,
    backend: Backend,
}

/// Real value of an arc function with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcValue {
    pub value: Float,
    /// `|Im|` of `e^{ikθ/2} E*(z)`; zero in exact arithmetic.
    pub imag_residual: Float,
    pub tail_bound: Float,
}

impl Serialize for ArcValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ArcValue", 3)?;
        st.serialize_field("value", &real::to_dec(&self.value))?;
        st.serialize_field("imag_residual", &real::to_dec(&self.imag_residual))?;
        st.serialize_field("tail", &real::to_dec(&self.tail_bound))?;
        st.end()
    }
}

impl Evaluator {
    pub fn new(k: i64, p: u32, cfg: &EvalConfig) -> Result<Evaluator> {
        check_weight(k)?;
        check_p(p)?;
        cfg.validate()?;
        let backend = match cfg.method {
            Method::QSeries => Backend::Series(core_series::fricke_eisenstein_q(k, p, cfg.q_order)?),
            Method::Lattice => Backend::Lattice,
            Method::Reduced => Backend::Reduced(EisensteinTable::new(k, cfg.precision_bits)?),
        };
        Ok(Evaluator { k, p, cfg: cfg.clone(), backend })
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    fn e_k(&self, z: &HPoint) -> Result<EvalResult> {
        match &self.backend {
            Backend::Reduced(t) => t.eval(z),
            _ => eval_e_lattice(self.k, z, &self.cfg),
        }
    }

    /// `E*_{k,p}(z)`.
    pub fn e_star(&self, z: &HPoint) -> Result<EvalResult> {
        let prec = self.cfg.precision_bits;
        if let Backend::Series(s) = &self.backend {
            return eval_qseries(s, z, &self.cfg);
        }
        let pz = HPoint::new_unchecked(Float::with_val(prec, &z.re * self.p), Float::with_val(prec, &z.im * self.p));
        let a = self.e_k(&pz)?;
        let b = self.e_k(z)?;
        let pk = Float::with_val(prec, self.p).pow(self.k / 2);
        let den = Float::with_val(prec, &pk + 1u32);
        let value = (Complex::with_val(prec, &a.value * &pk) + &b.value) / &den;
        let tail = (a.tail_bound * &pk + b.tail_bound) / &den;
        Ok(EvalResult { value, tail_bound: tail })
    }

    /// `e^{ikθ/2} E*(z(θ))` on the given arc.
    pub fn arc(&self, arc: Arc, theta: &Float) -> Result<ArcValue> {
        let prec = self.cfg.precision_bits;
        let theta = Float::with_val(prec, theta);
        if theta < 0 || theta > pi(prec) {
            return invalid(format!("θ = {} outside [0, π]", theta.to_f64()));
        }
        let z = arc_param_to_halfplane(arc, &theta, self.p);
        if z.im <= 0 {
            return invalid("θ maps to the real axis");
        }
        let e = self.e_star(&z)?;
        let ph = Float::with_val(prec, &theta * self.k) / 2u32;
        let phase = Complex::with_val(prec, (ph.clone().cos(), ph.sin()));
        let f = Complex::with_val(prec, phase * &e.value);
        let (re, im) = f.into_real_imag();
        Ok(ArcValue { value: re, imag_residual: im.abs(), tail_bound: e.tail_bound })
    }

    pub fn f1(&self, theta: &Float) -> Result<ArcValue> {
        self.arc(Arc::A1, theta)
    }

    pub fn f2(&self, theta: &Float) -> Result<ArcValue> {
        self.arc(Arc::A2, theta)
    }

    /// Glued function on `[π/2, π]` (`p = 5`) or `[π/2, 7π/6]` (`p = 7`).
    pub fn glued(&self, theta: &Float) -> Result<ArcValue> {
        let prec = self.cfg.precision_bits;
        let theta = Float::with_val(prec, theta);
        let (lo, seam) = domain_geometry::arc_range(self.p, Arc::A1, prec)?;
        let top = if self.p == 5 { pi(prec) } else { pi(prec) * 7u32 / 6u32 };
        if theta < lo || theta > top {
            return invalid(format!("θ = {} outside the glued range", theta.to_f64()));
        }
        if theta <= seam {
            return self.f1(&theta);
        }
        let t2 = theta - domain_geometry::glue_offset(self.p, prec)?;
        let mut v = self.f2(&t2)?;
        if glue_factor(self.k, self.p) < 0 {
            v.value = -v.value;
        }
        Ok(v)
    }

    /// `F_n(θ) − 2cos(kθ/2)`.
    pub fn remainder(&self, arc: Arc, theta: &Float) -> Result<ArcValue> {
        let prec = self.cfg.precision_bits;
        let mut v = self.arc(arc, theta)?;
        let c = (Float::with_val(prec, theta * self.k) / 2u32).cos() * 2u32;
        v.value -= c;
        Ok(v)
    }
}

/// Sign applied to the A2 piece in the glued function so that it is continuous at the
/// seam: `(−1)^{k/4}` for `p = 5`, `4 | k`; otherwise `1`.
pub fn glue_factor(k: i64, p: u32) -> i32 {
    if p == 5 && k % 4 == 0 && (k / 4) % 2 == 1 {
        -1
    } else {
        1
    }
}

/// `E*_{k,p}(z)` by the route chosen in `cfg`.
pub fn eval_e_star(k: i64, p: u32, z: &HPoint, cfg: &EvalConfig) -> Result<EvalResult> {
    Evaluator::new(k, p, cfg)?.e_star(z)
}

pub fn f1(k: i64, p: u32, theta: &Float, cfg: &EvalConfig) -> Result<ArcValue> {
    Evaluator::new(k, p, cfg)?.f1(theta)
}

pub fn f2(k: i64, p: u32, theta: &Float, cfg: &EvalConfig) -> Result<ArcValue> {
    Evaluator::new(k, p, cfg)?.f2(theta)
}

pub fn f_glued(k: i64, p: u32, theta: &Float, cfg: &EvalConfig) -> Result<ArcValue> {
    Evaluator::new(k, p, cfg)?.glued(theta)
}

pub fn remainder(k: i64, p: u32, arc: Arc, theta: &Float, cfg: &EvalConfig) -> Result<ArcValue> {
    Evaluator::new(k, p, cfg)?.remainder(arc, theta)
}

/// Least eigenvalue of `c² + p d² + 2√p cd cos θ` as a form in `(c, d)`, divided by 4 on A2.
pub fn form_floor(p: u32, arc: Arc, theta: &Float) -> Float {
    let prec = theta.prec();
    let s2 = Float::with_val(prec, theta.clone().sin().square());
    let tr = int(prec, 1 + p as i64);
    let disc = (Float::with_val(prec, tr.square_ref()) - s2 * (4 * p)).sqrt();
    let lam = (tr - disc) / 2u32;
    match arc {
        Arc::A1 => lam,
        Arc::A2 => lam / 4u32,
    }
}

/// One term of the split sum: `c e^{iθ/2} + √p d e^{−iθ/2}`, scaled by 1/2 on A2 when `cd` is odd.
pub fn split_base(p: u32, arc: Arc, c: i64, d: i64, theta: &Float) -> Complex {
    let prec = theta.prec();
    let h = Float::with_val(prec, theta / 2u32);
    let (s, co) = h.sin_cos(Float::new(prec));
    let rp = sqrt_i(prec, p);
    let re = Float::with_val(prec, &co * c) + Float::with_val(prec, &rp * d) * &co;
    let im = Float::with_val(prec, &s * c) - Float::with_val(prec, &rp * d) * &s;
    let w = Complex::with_val(prec, (re, im));
    if arc == Arc::A2 && (c * d) % 2 != 0 {
        w / 2u32
    } else {
        w
    }
}

/// Split-sum remainder `R(θ) = Σ 2 Re(w^{−k})` over coprime `(c, d)` with `c ≥ 1`,
/// `p ∤ c`, `c² + d² ≤ nmax²`, excluding the `(1, 0)` term, together with a bound on
/// the omitted terms and rounding.
pub fn split_remainder(k: i64, p: u32, arc: Arc, theta: &Float, nmax: u32) -> Result<(Float, Float)> {
    check_weight(k)?;
    check_p(p)?;
    if nmax < 3 {
        return invalid("nmax must be at least 3 for the split sum");
    }
    let prec = theta.prec();
    let n = nmax as i64;
    let mut acc = Float::new(prec);
    let mut mass = Float::new(prec);
    for c in 1..=n {
        if c % p as i64 == 0 {
            continue;
        }
        let dmax = ((n * n - c * c) as f64).sqrt().floor() as i64;
        for d in -dmax..=dmax {
            if (c, d) == (1, 0) || !coprime(c, d) {
                continue;
            }
            let w = split_base(p, arc, c, d, theta);
            let t = real::cpow_neg(&w, k);
            mass += Float::with_val(prec, t.abs_ref()) * 2u32;
            acc += Float::with_val(prec, t.real() * 2u32);
        }
    }
    let lam = form_floor(p, arc, theta);
    let tail = real::pow_neg_half(&lam, k) * lattice_tail_sum(k, n as f64, prec);
    Ok((acc, tail + rounding(&mass)))
}

/// Arc function from the split sum: `2cos(kθ/2) + R(θ)`.
pub fn f_split(k: i64, p: u32, arc: Arc, theta: &Float, nmax: u32) -> Result<ArcValue> {
    let prec = theta.prec();
    let (r, tail) = split_remainder(k, p, arc, theta, nmax)?;
    let c = (Float::with_val(prec, theta * k) / 2u32).cos() * 2u32;
    Ok(ArcValue { value: c + r, imag_residual: Float::new(prec), tail_bound: tail })
}
