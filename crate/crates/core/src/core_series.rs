//! Exact q-expansions over the rationals.
//!
//! Every series is truncated at a fixed order `M` and carries its weight and a
//! level tag. Sums and products need equal levels; a level-1 series is lifted to
//! level 5 or 7 with [`QSeries::promote`] or [`substitute_q_power`].

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde::Deserialize;

use crate::error::{invalid, Error, Result};

/// Level tag of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    One,
    Five,
    Seven,
}

impl Level {
    pub fn from_int(n: u32) -> Result<Level> {
        match n {
            1 => Ok(Level::One),
            5 => Ok(Level::Five),
            7 => Ok(Level::Seven),
            _ => invalid(format!("level must be 1, 5 or 7, got {n}")),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Level::One => 1,
            Level::Five => 5,
            Level::Seven => 7,
        }
    }
}

/// Truncated q-expansion `Σ_{n ≤ M} a_n qⁿ` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    coeffs: Vec<Rational>,
    weight: i64,
    level: Level,
    /// Set for E₂ and anything built from it that is not known to be modular.
    quasi: bool,
}

/// Position of the first nonzero coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vanishing {
    Order(usize),
    AllZero,
}

impl Vanishing {
    pub fn order(self) -> Option<usize> {
        match self {
            Vanishing::Order(n) => Some(n),
            Vanishing::AllZero => None,
        }
    }
}

impl QSeries {
    pub fn new(coeffs: Vec<Rational>, weight: i64, level: Level) -> Result<QSeries> {
        if coeffs.is_empty() {
            return invalid("a series needs at least the constant coefficient");
        }
        if weight % 2 != 0 {
            return invalid(format!("weight must be even, got {weight}"));
        }
        Ok(QSeries { coeffs, weight, level, quasi: false })
    }

    pub fn from_ints(coeffs: &[i64], weight: i64, level: Level) -> Result<QSeries> {
        QSeries::new(coeffs.iter().map(|&c| Rational::from(c)).collect(), weight, level)
    }

    /// The constant series 1 of weight 0.
    pub fn one(level: Level, m: usize) -> QSeries {
        let mut coeffs = vec![Rational::new(); m + 1];
        coeffs[0] = Rational::from(1);
        QSeries { coeffs, weight: 0, level, quasi: false }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn is_quasi(&self) -> bool {
        self.quasi
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Drop coefficients beyond order `m`.
    pub fn truncate(&self, m: usize) -> QSeries {
        let mut out = self.clone();
        out.coeffs.truncate(m + 1);
        out
    }

    pub fn with_weight(mut self, weight: i64) -> QSeries {
        self.weight = weight;
        self
    }

    /// Lift a level-1 series to level `p` without changing its coefficients.
    pub fn promote(&self, level: Level) -> Result<QSeries> {
        if self.level == level {
            return Ok(self.clone());
        }
        if self.level != Level::One {
            return invalid("only level-1 series can be promoted");
        }
        let mut out = self.clone();
        out.level = level;
        Ok(out)
    }

    pub fn v_infinity(&self) -> Vanishing {
        match self.coeffs.iter().position(|c| *c != 0) {
            Some(n) => Vanishing::Order(n),
            None => Vanishing::AllZero,
        }
    }

    fn check_compatible(&self, other: &QSeries) -> Result<()> {
        if self.level != other.level {
            return invalid(format!(
                "level mismatch: {} vs {}",
                self.level.as_int(),
                other.level.as_int()
            ));
        }
        Ok(())
    }

    fn check_same_weight(&self, other: &QSeries) -> Result<()> {
        if self.weight != other.weight {
            return invalid(format!("weight mismatch: {} vs {}", self.weight, other.weight));
        }
        Ok(())
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries> {
        self.check_compatible(other)?;
        self.check_same_weight(other)?;
        let m = self.truncation_order().min(other.truncation_order());
        let coeffs = (0..=m)
            .map(|n| Rational::from(&self.coeffs[n] + &other.coeffs[n]))
            .collect();
        Ok(QSeries { coeffs, weight: self.weight, level: self.level, quasi: self.quasi || other.quasi })
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries> {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, c: &Rational) -> QSeries {
        let coeffs = self.coeffs.iter().map(|a| Rational::from(a * c)).collect();
        QSeries { coeffs, weight: self.weight, level: self.level, quasi: self.quasi }
    }

    pub fn mul(&self, other: &QSeries) -> Result<QSeries> {
        self.check_compatible(other)?;
        let m = self.truncation_order().min(other.truncation_order());
        let mut coeffs = vec![Rational::new(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(m + 1 - i) {
                if *b != 0 {
                    coeffs[i + j] += Rational::from(a * b);
                }
            }
        }
        Ok(QSeries {
            coeffs,
            weight: self.weight + other.weight,
            level: self.level,
            quasi: self.quasi || other.quasi,
        })
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn invert(&self) -> Result<QSeries> {
        if self.coeffs[0] == 0 {
            return invalid("cannot invert a series with zero constant term");
        }
        let m = self.truncation_order();
        let inv0 = Rational::from(self.coeffs[0].recip_ref());
        let mut out = vec![Rational::new(); m + 1];
        out[0] = inv0.clone();
        for n in 1..=m {
            let mut acc = Rational::new();
            for j in 1..=n {
                if self.coeffs[j] != 0 {
                    acc += Rational::from(&self.coeffs[j] * &out[n - j]);
                }
            }
            out[n] = -acc * &inv0;
        }
        Ok(QSeries { coeffs: out, weight: -self.weight, level: self.level, quasi: self.quasi })
    }

    /// Integer power by repeated squaring; negative exponents go through [`QSeries::invert`].
    pub fn pow(&self, n: i64) -> Result<QSeries> {
        let m = self.truncation_order();
        if n == 0 {
            return Ok(QSeries::one(self.level, m));
        }
        let (mut base, mut e) = if n < 0 { (self.invert()?, n.unsigned_abs()) } else { (self.clone(), n as u64) };
        let mut acc = QSeries::one(self.level, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        acc.quasi = self.quasi;
        Ok(acc)
    }

    /// Exact quotient `self / other`. Both are shifted down by `v_∞(other)`, so the
    /// result is known to order `min(M₁, M₂) − v_∞(other)`.
    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        self.check_compatible(other)?;
        let v2 = match other.v_infinity() {
            Vanishing::Order(v) => v,
            Vanishing::AllZero => return invalid("division by the zero series"),
        };
        match self.v_infinity() {
            Vanishing::Order(v1) if v1 < v2 => {
                return invalid(format!("divisor vanishes to order {v2} but dividend only to order {v1}"))
            }
            _ => {}
        }
        let m = self.truncation_order().min(other.truncation_order());
        if m < v2 {
            return invalid("truncation order too small for this division");
        }
        let shift = |s: &QSeries| QSeries {
            coeffs: s.coeffs[v2..=m].to_vec(),
            weight: s.weight,
            level: s.level,
            quasi: s.quasi,
        };
        let num = shift(self);
        let den = shift(other).invert()?;
        let mut out = num.mul(&den)?;
        out.weight = self.weight - other.weight;
        Ok(out)
    }
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<String> = self.coeffs.iter().map(rational_string).collect();
        let mut st = serializer.serialize_struct("QSeries", 3)?;
        st.serialize_field("weight", &self.weight)?;
        st.serialize_field("level", &self.level.as_int())?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct QSeriesWire {
    weight: i64,
    level: u32,
    coeffs: Vec<String>,
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = QSeriesWire::deserialize(d)?;
        let coeffs = w
            .coeffs
            .iter()
            .map(|s| Rational::from_str_radix(s, 10).map_err(|e| D::Error::custom(format!("{s}: {e}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let level = Level::from_int(w.level).map_err(D::Error::custom)?;
        QSeries::new(coeffs, w.weight, level).map_err(D::Error::custom)
    }
}

/// `num/den` with the denominator always written out.
pub fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Bernoulli number `Bₙ` for even `n` (with `B₁ = −1/2` implicit in the recurrence).
pub fn bernoulli(n: i64) -> Result<Rational> {
    if n < 0 || n % 2 != 0 {
        return invalid(format!("bernoulli needs an even nonnegative index, got {n}"));
    }
    let n = n as usize;
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from(1));
    for m in 1..=n {
        // Σ_{j<m} C(m+1, j) B_j + (m+1) B_m = 0
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (j, bj) in b.iter().enumerate() {
            if *bj != 0 {
                acc += Rational::from(bj * &binom);
            }
            binom = binom * (m + 1 - j) as u64 / (j + 1) as u64;
        }
        b.push(-acc / Rational::from(m as u64 + 1));
    }
    Ok(b.pop().unwrap())
}

/// Divisor power sum `σ_r(n) = Σ_{d | n} d^r`.
pub fn sigma(n: i64, r: u32) -> Result<Integer> {
    if n <= 0 {
        return invalid(format!("sigma needs n ≥ 1, got {n}"));
    }
    let mut acc = Integer::new();
    let mut d = 1i64;
    while d * d <= n {
        if n % d == 0 {
            acc += Integer::from(d).pow(r);
            let e = n / d;
            if e != d {
                acc += Integer::from(e).pow(r);
            }
        }
        d += 1;
    }
    Ok(acc)
}

/// `E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ` at level 1. `k = 2` gives the quasi-modular E₂.
pub fn eisenstein_q(k: i64, m: usize) -> Result<QSeries> {
    if k < 2 || k % 2 != 0 {
        return invalid(format!("Eisenstein weight must be even and at least 2, got {k}"));
    }
    let factor = -Rational::from(2 * k) / bernoulli(k)?;
    let mut coeffs = Vec::with_capacity(m + 1);
    coeffs.push(Rational::from(1));
    for n in 1..=m {
        coeffs.push(Rational::from(&factor * sigma(n as i64, (k - 1) as u32)?));
    }
    Ok(QSeries { coeffs, weight: k, level: Level::One, quasi: k == 2 })
}

/// `f(z) ↦ f(pz)`, i.e. `qⁿ ↦ q^{pn}`, truncated at `m`; the result is tagged level `p`.
pub fn substitute_q_power(s: &QSeries, p: u32, m: usize) -> Result<QSeries> {
    if p == 0 {
        return invalid("substitution power must be at least 1");
    }
    let level = if p == 1 { s.level } else { Level::from_int(p)? };
    let mut coeffs = vec![Rational::new(); m + 1];
    for (n, a) in s.coeffs.iter().enumerate() {
        let idx = n * p as usize;
        if idx > m {
            break;
        }
        coeffs[idx] = a.clone();
    }
    if (s.truncation_order() + 1) * (p as usize) <= m {
        return invalid(format!(
            "input known only to order {}, cannot substitute up to order {m}",
            s.truncation_order()
        ));
    }
    Ok(QSeries { coeffs, weight: s.weight, level, quasi: s.quasi })
}

fn check_p(p: u32) -> Result<Level> {
    match p {
        5 => Ok(Level::Five),
        7 => Ok(Level::Seven),
        _ => invalid(format!("level must be 5 or 7, got {p}")),
    }
}

/// `E*_{k,p} = (p^{k/2} E_k(pz) + E_k(z)) / (p^{k/2} + 1)`.
pub fn fricke_eisenstein_q(k: i64, p: u32, m: usize) -> Result<QSeries> {
    let level = check_p(p)?;
    if k < 4 || k % 2 != 0 {
        return invalid(format!("weight must be even and at least 4, got {k}"));
    }
    let e = eisenstein_q(k, m)?;
    let ep = substitute_q_power(&e, p, m)?;
    let pk = Rational::from(Integer::from(p).pow((k / 2) as u32));
    let denom = Rational::from(&pk + 1u32);
    let sum = ep.scale(&pk).add(&e.promote(level)?)?;
    Ok(sum.scale(&denom.recip()))
}

/// Euler's function `Π_{n≥1} (1 − qⁿ)` from the pentagonal number theorem.
pub fn euler_pentagonal(m: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); m + 1];
    out[0] = Integer::from(1);
    let mut j: i64 = 1;
    loop {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let a = (j * (3 * j - 1) / 2) as usize;
        let b = (j * (3 * j + 1) / 2) as usize;
        if a > m {
            break;
        }
        out[a] += sign;
        if b <= m {
            out[b] += sign;
        }
        j += 1;
    }
    out
}

/// Euler's function by multiplying out `(1 − qⁿ)` one factor at a time.
pub fn euler_product_direct(m: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); m + 1];
    out[0] = Integer::from(1);
    for n in 1..=m {
        for i in (n..=m).rev() {
            let t = out[i - n].clone();
            out[i] -= t;
        }
    }
    out
}

fn eta_level(exps: &[(u32, i64)]) -> Result<Level> {
    let mut level = Level::One;
    for &(scale, _) in exps {
        match scale {
            1 => {}
            5 | 7 => {
                let l = Level::from_int(scale)?;
                if level != Level::One && level != l {
                    return invalid("eta product mixes levels 5 and 7");
                }
                level = l;
            }
            _ => return invalid(format!("eta scale must be 1, 5 or 7, got {scale}")),
        }
    }
    Ok(level)
}

fn eta_product_with(
    exps: &[(u32, i64)],
    m: usize,
    euler: impl Fn(usize) -> Vec<Integer>,
) -> Result<QSeries> {
    let level = eta_level(exps)?;
    let lead24: i64 = exps.iter().map(|&(s, e)| s as i64 * e).sum();
    if lead24 < 0 || lead24 % 24 != 0 {
        return invalid(format!("leading exponent {lead24}/24 is not a nonnegative integer"));
    }
    let wsum: i64 = exps.iter().map(|&(_, e)| e).sum();
    if wsum % 4 != 0 {
        return invalid(format!("eta product weight {wsum}/2 is not an even integer"));
    }
    let lead = (lead24 / 24) as usize;
    let mut coeffs = vec![Rational::new(); m + 1];
    if lead <= m {
        let body_order = m - lead;
        let base: Vec<Rational> = euler(body_order).into_iter().map(Rational::from).collect();
        let base = QSeries { coeffs: base, weight: 0, level: Level::One, quasi: false };
        let mut body = QSeries::one(level, body_order);
        for &(scale, e) in exps {
            let f = substitute_q_power(&base, scale, body_order)?.promote(level)?;
            body = body.mul(&f.pow(e)?)?;
        }
        for (n, c) in body.coeffs.into_iter().enumerate() {
            coeffs[n + lead] = c;
        }
    }
    let mut acc = QSeries { coeffs, weight: 0, level, quasi: false };
    acc.weight = wsum / 2;
    Ok(acc)
}

/// `q^{Σ m e/24} Π_n Π_{(m,e)} (1 − q^{mn})^e`, each entry given as `(m, e)`.
pub fn eta_product_q(exps: &[(u32, i64)], m: usize) -> Result<QSeries> {
    eta_product_with(exps, m, euler_pentagonal)
}

/// Same product with Euler's function multiplied out factor by factor.
pub fn eta_product_q_direct(exps: &[(u32, i64)], m: usize) -> Result<QSeries> {
    eta_product_with(exps, m, euler_product_direct)
}

/// `Δ₅ = η⁴(z) η⁴(5z)`.
pub fn delta5_q(m: usize) -> Result<QSeries> {
    eta_product_q(&[(1, 4), (5, 4)], m)
}

/// `Δ₇ = η⁶(z) η⁶(7z)`.
pub fn delta7_q(m: usize) -> Result<QSeries> {
    eta_product_q(&[(1, 6), (7, 6)], m)
}

/// `E′_{2,7} = (7 E₂(7z) − E₂(z)) / 6`.
pub fn e2_prime_7_q(m: usize) -> Result<QSeries> {
    let e2 = eisenstein_q(2, m)?;
    let e2_7 = substitute_q_power(&e2, 7, m)?;
    let mut out = e2_7
        .scale(&Rational::from(7))
        .sub(&e2.promote(Level::Seven)?)?
        .scale(&Rational::from((1, 6)));
    out.quasi = false;
    Ok(out)
}

/// `Δ_{7,4} = (5/16)(E′_{2,7}² − E*_{4,7})`.
pub fn delta_7_4_q(m: usize) -> Result<QSeries> {
    let ep = e2_prime_7_q(m)?;
    let e4 = fricke_eisenstein_q(4, 7, m)?;
    Ok(ep.mul(&ep)?.sub(&e4)?.scale(&Rational::from((5, 16))))
}

/// `Δ⁰_{7,10} = (559/690)((41065/137592)(E*₄E*₆ − E*₁₀) − E*₆ Δ_{7,4})`.
pub fn delta_7_10_q(m: usize) -> Result<QSeries> {
    let e4 = fricke_eisenstein_q(4, 7, m)?;
    let e6 = fricke_eisenstein_q(6, 7, m)?;
    let e10 = fricke_eisenstein_q(10, 7, m)?;
    let d74 = delta_7_4_q(m)?;
    let inner = e4.mul(&e6)?.sub(&e10)?.scale(&Rational::from((41065, 137592)));
    Ok(inner.sub(&e6.mul(&d74)?)?.scale(&Rational::from((559, 690))))
}

/// The weight-6 cusp form `Δ⁰_{7,10} / Δ_{7,4}`, known to order `m − 1`.
pub fn delta_7_6_q(m: usize) -> Result<QSeries> {
    delta_7_10_q(m + 1)?.div(&delta_7_4_q(m + 1)?)
}

/// Result of checking a space decomposition with exact linear algebra.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DecompositionReport {
    pub k: i64,
    pub p: u32,
    pub order: usize,
    /// Names of the spanning monomials, e.g. `E4^2*D5`.
    pub basis: Vec<String>,
    /// Rank of the spanning set, i.e. the dimension it spans.
    pub dim: usize,
    /// Dimension implied by the valence budget after the forced corner zeros.
    pub expected_dim: usize,
    pub independent: bool,
    /// Every element named as a cusp form has zero constant term.
    pub cusp_forms_ok: bool,
    pub checks: Vec<SpanCheck>,
    pub ok: bool,
}

/// One form expressed in the basis.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SpanCheck {
    pub form: String,
    /// Coefficients in basis order, as `num/den`.
    pub coefficients: Vec<String>,
    /// Number of nonzero entries in `form − Σ cᵢ bᵢ` up to the truncation order.
    pub residual_nonzero: usize,
}

#[derive(Clone)]
struct Named {
    name: String,
    s: QSeries,
    cusp: bool,
}

fn named(name: impl Into<String>, s: QSeries, cusp: bool) -> Named {
    Named { name: name.into(), s, cusp }
}

fn product(a: &Named, b: &Named) -> Result<Named> {
    let name = match (a.name.as_str(), b.name.as_str()) {
        ("1", n) | (n, "1") => n.to_string(),
        (x, y) => format!("{x}*{y}"),
    };
    Ok(named(name, a.s.mul(&b.s)?, a.cusp || b.cusp))
}

struct Forms {
    m: usize,
    level: Level,
    e: std::collections::BTreeMap<i64, QSeries>,
}

impl Forms {
    fn new(p: u32, m: usize) -> Result<Forms> {
        Ok(Forms { m, level: check_p(p)?, e: Default::default() })
    }

    fn e(&mut self, k: i64) -> Result<QSeries> {
        if !self.e.contains_key(&k) {
            let p = self.level.as_int();
            self.e.insert(k, fricke_eisenstein_q(k, p, self.m)?);
        }
        Ok(self.e[&k].clone())
    }
}

fn basis5(f: &mut Forms, k: i64) -> Result<Vec<Named>> {
    if k == 0 {
        return Ok(vec![named("1", QSeries::one(f.level, f.m), false)]);
    }
    if k < 4 || k % 2 != 0 {
        return Ok(vec![]);
    }
    if k % 4 == 2 {
        let e6 = named("E6", f.e(6)?, false);
        return basis5(f, k - 6)?.iter().map(|b| product(&e6, b)).collect();
    }
    let n = k / 4;
    let e4 = f.e(4)?;
    let d5 = delta5_q(f.m)?;
    (0..=n)
        .map(|j| {
            let s = e4.pow(n - j)?.mul(&d5.pow(j)?)?;
            let name = match (n - j, j) {
                (a, 0) => format!("E4^{a}"),
                (0, b) => format!("D5^{b}"),
                (a, b) => format!("E4^{a}*D5^{b}"),
            };
            Ok(named(name, s, j > 0))
        })
        .collect()
}

fn cusp7(f: &mut Forms, k: i64) -> Result<Vec<Named>> {
    let m = f.m;
    let d74 = || -> Result<Named> { Ok(named("D74", delta_7_4_q(m)?, true)) };
    let d76 = || -> Result<Named> { Ok(named("D76", delta_7_6_q(m)?, true)) };
    let d710 = || -> Result<Named> { Ok(named("D710", delta_7_10_q(m)?, true)) };
    let e4 = named("E4", f.e(4)?, false);
    let e6 = named("E6", f.e(6)?, false);
    let pw = |a: &Named, n: i64| -> Result<Named> { Ok(named(format!("{}^{n}", a.name), a.s.pow(n)?, a.cusp)) };
    Ok(match k {
        4 => vec![d74()?],
        6 => vec![d76()?],
        8 => vec![pw(&d74()?, 2)?, product(&e4, &d74()?)?],
        10 => vec![d710()?, product(&e6, &d74()?)?],
        12 => vec![
            named("D7^2", delta7_q(m)?.pow(2)?, true),
            pw(&d74()?, 3)?,
            product(&e4, &pw(&d74()?, 2)?)?,
            product(&pw(&e4, 2)?, &d74()?)?,
        ],
        14 => vec![
            product(&d74()?, &d710()?)?,
            product(&e6, &pw(&d74()?, 2)?)?,
            product(&product(&e4, &e6)?, &d74()?)?,
        ],
        k if k >= 16 && k % 2 == 0 => {
            let top = cusp7(f, 12)?;
            let rest = full7(f, k - 12)?;
            let mut out = Vec::new();
            for a in &top {
                for b in &rest {
                    out.push(product(a, b)?);
                }
            }
            out
        }
        _ => vec![],
    })
}

fn full7(f: &mut Forms, k: i64) -> Result<Vec<Named>> {
    if k == 0 {
        return Ok(vec![named("1", QSeries::one(f.level, f.m), false)]);
    }
    if k < 4 || k % 2 != 0 {
        return Ok(vec![]);
    }
    let mut out = vec![named(format!("E{k}"), f.e(k)?, false)];
    out.extend(cusp7(f, k)?);
    Ok(out)
}

/// Forms of weight `k` that must lie in the span: `E*_k`, products `E*_a E*_b`,
/// and for `p = 7` the products with `E′_{2,7}²`.
fn test_forms(f: &mut Forms, k: i64) -> Result<Vec<Named>> {
    let mut out = Vec::new();
    if k >= 4 {
        out.push(named(format!("E{k}"), f.e(k)?, false));
    }
    let mut a = 4;
    while 2 * a <= k {
        let b = k - a;
        if b >= 4 {
            out.push(named(format!("E{a}*E{b}"), f.e(a)?.mul(&f.e(b)?)?, false));
        }
        a += 2;
    }
    if f.level == Level::Seven && k >= 4 {
        let ep2 = e2_prime_7_q(f.m)?.pow(2)?;
        if k == 4 {
            out.push(named("Ep^2", ep2, false));
        } else if k >= 8 {
            out.push(named(format!("Ep^2*E{}", k - 4), ep2.mul(&f.e(k - 4)?)?, false));
        }
    }
    Ok(out)
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(mat: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(pr) = (row..mat.len()).find(|&r| mat[r][col] != 0) else { continue };
        mat.swap(row, pr);
        let inv = Rational::from(mat[row][col].recip_ref());
        for x in mat[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = mat[row].clone();
        for (r, other) in mat.iter_mut().enumerate() {
            if r == row || other[col] == 0 {
                continue;
            }
            let f = other[col].clone();
            for (x, y) in other.iter_mut().zip(pivot_row.iter()) {
                if *y != 0 {
                    *x -= Rational::from(&f * y);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == mat.len() {
            break;
        }
    }
    pivots
}

/// Express `target` in `basis` over the first `order + 1` coefficients.
fn solve_in_span(basis: &[QSeries], target: &QSeries, order: usize) -> (Vec<Rational>, usize) {
    let n = basis.len();
    let mut mat: Vec<Vec<Rational>> = (0..=order)
        .map(|r| {
            let mut row: Vec<Rational> = basis.iter().map(|b| b.coeffs[r].clone()).collect();
            row.push(target.coeffs[r].clone());
            row
        })
        .collect();
    let pivots = rref(&mut mat, n);
    let mut x = vec![Rational::new(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = mat[r][n].clone();
    }
    let residual = (0..=order)
        .filter(|&r| {
            let mut acc = target.coeffs[r].clone();
            for (b, xi) in basis.iter().zip(x.iter()) {
                if *xi != 0 {
                    acc -= Rational::from(&b.coeffs[r] * xi);
                }
            }
            acc != 0
        })
        .count();
    (x, residual)
}

fn rank_of(basis: &[QSeries], order: usize) -> usize {
    let mut mat: Vec<Vec<Rational>> =
        (0..=order).map(|r| basis.iter().map(|b| b.coeffs[r].clone()).collect()).collect();
    rref(&mut mat, basis.len()).len()
}

/// `dim M*_{k,p}`: one plus the number of free zeros left by the valence budget
/// (`k/4` or `k/3`) once the forced corner zeros are removed.
pub fn expected_dimension(k: i64, p: u32) -> Result<usize> {
    check_p(p)?;
    if k < 0 || k % 2 != 0 {
        return invalid(format!("weight must be even and nonnegative, got {k}"));
    }
    let s = if k % 4 == 0 { 0 } else { 1 };
    // three free-zero counts in units of 1/12
    let free12 = if p == 5 {
        3 * k - 18 * s
    } else {
        let t = match k.rem_euclid(6) {
            0 => 0,
            4 => 1,
            _ => 2,
        };
        4 * k - 12 * s - 4 * t
    };
    if free12 < -12 {
        return Ok(0);
    }
    debug_assert_eq!(free12 % 12, 0);
    Ok((free12 / 12 + 1) as usize)
}

/// Default truncation order for a weight-`k` computation.
pub fn default_order(k: i64) -> usize {
    50usize.max((k / 2 + 10).max(0) as usize)
}

/// Build the spanning set named by the decomposition for `(k, p)`, check
/// its rank and cusp-form claims, and express `E*_{k,p}` and the other test forms in
/// it with exact zero residual.
pub fn verify_decomposition(k: i64, p: u32, m: usize) -> Result<DecompositionReport> {
    if k < 0 || k % 2 != 0 {
        return invalid(format!("weight must be even and nonnegative, got {k}"));
    }
    let mut f = Forms::new(p, m)?;
    let basis = if p == 5 { basis5(&mut f, k)? } else { full7(&mut f, k)? };
    let series: Vec<QSeries> = basis.iter().map(|b| b.s.clone()).collect();
    let dim = rank_of(&series, m);
    let cusp_forms_ok = basis.iter().filter(|b| b.cusp).all(|b| b.s.coeffs[0] == 0);
    let mut checks = Vec::new();
    for t in test_forms(&mut f, k)? {
        let (x, residual_nonzero) = solve_in_span(&series, &t.s, m);
        checks.push(SpanCheck {
            form: t.name,
            coefficients: x.iter().map(rational_string).collect(),
            residual_nonzero,
        });
    }
    if k == 0 {
        let one = QSeries::one(f.level, m);
        let (x, residual_nonzero) = solve_in_span(&series, &one, m);
        checks.push(SpanCheck {
            form: "1".into(),
            coefficients: x.iter().map(rational_string).collect(),
            residual_nonzero,
        });
    }
    let independent = dim == basis.len();
    let expected_dim = expected_dimension(k, p)?;
    let ok = dim == expected_dim && cusp_forms_ok && checks.iter().all(|c| c.residual_nonzero == 0);
    Ok(DecompositionReport {
        k,
        p,
        order: m,
        basis: basis.into_iter().map(|b| b.name).collect(),
        dim,
        expected_dim,
        independent,
        cusp_forms_ok,
        checks,
        ok,
    })
}

/// Series selectable by name from the command line.
pub fn named_form(name: &str, k: i64, p: u32, m: usize) -> Result<QSeries> {
    match name {
        "estar" => fricke_eisenstein_q(k, p, m),
        "eisenstein" => eisenstein_q(k, m),
        "delta5" => delta5_q(m),
        "delta7" => delta7_q(m),
        "e2prime7" => e2_prime_7_q(m),
        "delta74" => delta_7_4_q(m),
        "delta710" => delta_7_10_q(m),
        "delta76" => delta_7_6_q(m),
        _ => Err(Error::InvalidArgument(format!("unknown form {name}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0).unwrap(), 1);
        assert_eq!(bernoulli(2).unwrap(), q(1, 6));
        assert_eq!(bernoulli(4).unwrap(), q(-1, 30));
        assert_eq!(bernoulli(12).unwrap(), q(-691, 2730));
        assert!(bernoulli(3).is_err());
        assert!(bernoulli(-2).is_err());
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 3).unwrap(), 1);
        assert_eq!(sigma(2, 3).unwrap(), 9);
        assert_eq!(sigma(6, 1).unwrap(), 12);
        assert_eq!(sigma(36, 0).unwrap(), 9);
        assert!(sigma(0, 1).is_err());
    }

    #[test]
    fn eisenstein_coefficients() {
        let e4 = eisenstein_q(4, 2).unwrap();
        assert_eq!(e4.coeffs(), &[q(1, 1), q(240, 1), q(2160, 1)]);
        let e2 = eisenstein_q(2, 1).unwrap();
        assert_eq!(e2.coeffs(), &[q(1, 1), q(-24, 1)]);
        assert!(e2.is_quasi());
        assert_eq!(eisenstein_q(6, 0).unwrap().coeffs(), &[q(1, 1)]);
        assert!(eisenstein_q(5, 3).is_err());
    }

    #[test]
    fn substitution() {
        let s = QSeries::from_ints(&[1, 240], 4, Level::One).unwrap();
        let t = substitute_q_power(&s, 5, 5).unwrap();
        assert_eq!(t.coeffs(), QSeries::from_ints(&[1, 0, 0, 0, 0, 240], 4, Level::One).unwrap().coeffs());
        assert_eq!(t.level(), Level::Five);
        let c = QSeries::from_ints(&[1], 0, Level::One).unwrap();
        assert_eq!(substitute_q_power(&c, 7, 0).unwrap().coeffs(), &[q(1, 1)]);
        let x = QSeries::from_ints(&[0, 1], 0, Level::One).unwrap();
        assert_eq!(*substitute_q_power(&x, 5, 5).unwrap().coeff(5), 1);
    }

    #[test]
    fn fricke_eisenstein_low_coefficients() {
        assert_eq!(*fricke_eisenstein_q(4, 5, 0).unwrap().coeff(0), 1);
        assert_eq!(*fricke_eisenstein_q(4, 5, 1).unwrap().coeff(1), q(120, 13));
        assert_eq!(*fricke_eisenstein_q(4, 7, 1).unwrap().coeff(1), q(24, 5));
        assert!(fricke_eisenstein_q(4, 3, 1).is_err());
    }

    #[test]
    fn eta_products() {
        let d5 = delta5_q(20).unwrap();
        assert_eq!(d5.v_infinity(), Vanishing::Order(1));
        assert_eq!(d5.weight(), 4);
        let d7 = delta7_q(20).unwrap();
        assert_eq!(d7.v_infinity(), Vanishing::Order(2));
        assert_eq!(d7.pow(2).unwrap().v_infinity(), Vanishing::Order(4));
        let empty = eta_product_q(&[], 5).unwrap();
        assert_eq!(empty.coeffs()[0], 1);
        assert!(empty.coeffs()[1..].iter().all(|c| *c == 0));
        assert!(eta_product_q(&[(1, 1)], 5).is_err());
    }

    #[test]
    fn level_seven_forms() {
        let ep = e2_prime_7_q(7).unwrap();
        assert_eq!(*ep.coeff(0), 1);
        assert_eq!(*ep.coeff(1), 4);
        assert_eq!(*ep.coeff(7), 4);
        let d74 = delta_7_4_q(30).unwrap();
        assert_eq!(d74.v_infinity(), Vanishing::Order(1));
        let d710 = delta_7_10_q(30).unwrap();
        assert_eq!(d710.v_infinity(), Vanishing::Order(2));
        let d76 = delta_7_6_q(30).unwrap();
        assert_eq!(d76.v_infinity(), Vanishing::Order(1));
        assert_eq!(d76.weight(), 6);
    }

    #[test]
    fn arithmetic_examples() {
        let a = QSeries::from_ints(&[1, 1, 0], 0, Level::One).unwrap();
        let b = QSeries::from_ints(&[1, -1, 0], 0, Level::One).unwrap();
        assert_eq!(a.mul(&b).unwrap().coeffs(), &[q(1, 1), q(0, 1), q(-1, 1)]);
        assert_eq!(a.pow(0).unwrap().coeffs(), &[q(1, 1), q(0, 1), q(0, 1)]);
        let c = a.promote(Level::Five).unwrap();
        assert!(a.add(&c).is_err());
        assert!(c.promote(Level::Seven).is_err());
        let x = QSeries::from_ints(&[0, 0, 1, 3], 0, Level::One).unwrap();
        let y = QSeries::from_ints(&[0, 0, 0, 1], 0, Level::One).unwrap();
        assert!(x.div(&y).is_err());
        assert_eq!(QSeries::from_ints(&[0, 0], 0, Level::One).unwrap().v_infinity(), Vanishing::AllZero);
    }

    #[test]
    fn decomposition_small_weights() {
        let r = verify_decomposition(8, 5, 40).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.dim, 3);
        let r = verify_decomposition(6, 5, 40).unwrap();
        assert!(r.ok);
        assert_eq!(r.dim, 1);
        let r = verify_decomposition(0, 5, 10).unwrap();
        assert!(r.ok);
        assert_eq!(r.dim, 1);
        let r = verify_decomposition(12, 7, 50).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.dim, 5);
    }

    #[test]
    fn json_round_trip() {
        let s = fricke_eisenstein_q(4, 5, 3).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"120/13\""));
        let back: QSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
