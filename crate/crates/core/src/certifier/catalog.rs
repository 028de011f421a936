//! The lemma items and interval triples, loaded from the embedded catalog.
//!
//! A lemma item bounds `|R| < 2cos(c₀′π)` on the part of an arc at distance at
//! least `tπ/k` from the seam, for all `k ≥ k₀` (plus listed single weights).
//! A triple `(x, y, t)` covers the weights whose reduced angle lies in
//! `[x°, y°]` within one residue class.

use std::sync::OnceLock;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::PREC;
use crate::domain_geometry::Arc;
use crate::error::{invalid, Result};
use crate::real::{from_rational, pi};

const CATALOG_JSON: &str = include_str!("../../data/catalog.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Head/tail algorithm, with direct checks at `direct_k`.
    Algorithm,
    /// Closed-form head bound plus `r_bound` on the remaining classes.
    Refined,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaItem {
    pub id: String,
    pub p: u32,
    pub arc: u8,
    pub c0_prime: [i64; 2],
    pub t: [i64; 2],
    pub k0: i64,
    pub direct_k: Vec<i64>,
    pub route: Route,
}

/// How the stated bound `c₀` is written for a triple group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum C0Rule {
    /// `cos(c₀′π) = −cos(x° − tπ/2)`
    NegX,
    /// `cos(y° − π/2 + tπ/2)`
    Y90Plus,
    /// `cos(y° − 2π/3 − tπ/2)`
    Y120Minus,
    /// `cos(y° − π/3 + tπ/2)`
    Y60Plus,
    /// Second head enters with its sign instead of its modulus.
    Signed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Triple {
    pub id: String,
    pub group: String,
    pub p: u32,
    pub arc: u8,
    /// `k mod 4` for `p = 5`, `k mod 6` for `p = 7`.
    pub residue: u32,
    pub x: String,
    pub y: String,
    pub t: String,
    pub c0_rule: C0Rule,
}

#[derive(Debug, Deserialize)]
struct Catalog {
    lemmas: Vec<LemmaItem>,
    triples: Vec<Triple>,
}

fn catalog() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| serde_json::from_str(CATALOG_JSON).expect("embedded catalog parses"))
}

pub fn lemmas() -> &'static [LemmaItem] {
    &catalog().lemmas
}

pub fn triples() -> &'static [Triple] {
    &catalog().triples
}

pub fn lemma(id: &str) -> Result<&'static LemmaItem> {
    match lemmas().iter().find(|l| l.id.eq_ignore_ascii_case(id)) {
        Some(l) => Ok(l),
        None => invalid(format!("unknown lemma id {id}")),
    }
}

/// Distinct triple groups in catalog order.
pub fn triple_groups() -> Vec<&'static str> {
    let mut out: Vec<&str> = Vec::new();
    for t in triples() {
        if !out.contains(&t.group.as_str()) {
            out.push(&t.group);
        }
    }
    out
}

/// Parse `"117.45"`, `"3/20"` or `"121"` exactly.
pub fn parse_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (n, d) = (a.trim().parse::<i64>(), b.trim().parse::<i64>());
        return match (n, d) {
            (Ok(n), Ok(d)) if d != 0 => Ok(Rational::from((n, d))),
            _ => invalid(format!("bad rational {s}")),
        };
    }
    let (int_part, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits = format!("{int_part}{frac}");
    match digits.parse::<i64>() {
        Ok(n) => Ok(Rational::from((n, 10i64.pow(frac.len() as u32)))),
        Err(_) => invalid(format!("bad decimal {s}")),
    }
}

impl LemmaItem {
    pub fn arc(&self) -> Arc {
        Arc::from_index(self.arc).expect("catalog arcs are 1 or 2")
    }

    pub fn t(&self) -> Float {
        from_rational(PREC, &Rational::from((self.t[0], self.t[1])))
    }

    /// `cos(c₀′π)`
    pub fn c0(&self) -> Float {
        (from_rational(PREC, &Rational::from((self.c0_prime[0], self.c0_prime[1]))) * pi(PREC)).cos()
    }
}

impl Triple {
    pub fn arc(&self) -> Arc {
        Arc::from_index(self.arc).expect("catalog arcs are 1 or 2")
    }

    pub fn t(&self) -> Float {
        from_rational(PREC, &parse_exact(&self.t).expect("catalog t parses"))
    }

    /// Window endpoints in radians.
    pub fn window(&self) -> (Float, Float) {
        let deg = |s: &str| from_rational(PREC, &parse_exact(s).expect("catalog angle parses")) * pi(PREC) / 180u32;
        (deg(&self.x), deg(&self.y))
    }

    /// Modulus of the residue class.
    pub fn modulus(&self) -> u32 {
        if self.p == 5 {
            4
        } else {
            6
        }
    }

    /// The stated value of `c₀` (`None` for signed groups).
    pub fn stated_c0(&self) -> Option<Float> {
        let (x, y) = self.window();
        let p = pi(PREC);
        let ht = Float::with_val(PREC, &self.t() * &p) / 2u32;
        Some(match self.c0_rule {
            C0Rule::NegX => -(x - ht).cos(),
            C0Rule::Y90Plus => (y - Float::with_val(PREC, &p / 2u32) + ht).cos(),
            C0Rule::Y120Minus => (y - Float::with_val(PREC, &p * 2u32) / 3u32 - ht).cos(),
            C0Rule::Y60Plus => (y - Float::with_val(PREC, &p / 3u32) + ht).cos(),
            C0Rule::Signed => return None,
        })
    }
}
