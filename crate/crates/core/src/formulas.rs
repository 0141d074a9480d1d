//! Closed-form counts as exact polynomial data, evaluated over big rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::orbits::{stratum_size_formula, CycleType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("no registered formula {0:?}")]
    Unknown(String),
}

/// Dense polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigInt) -> BigRational {
        let x = BigRational::from_integer(x.clone());
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * &x + c)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Polynomial::new(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, k: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("q")?,
                _ => write!(f, "q^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// One polynomial per residue class of the argument modulo `period`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolynomial {
    pub period: u64,
    pub branches: Vec<Polynomial>,
}

impl QuasiPolynomial {
    pub fn new(branches: Vec<Polynomial>) -> Self {
        assert!(!branches.is_empty());
        QuasiPolynomial { period: branches.len() as u64, branches }
    }

    pub fn evaluate(&self, x: &BigInt) -> BigRational {
        let m = BigInt::from(self.period);
        let r = ((x % &m) + &m) % &m;
        let i: usize = r.try_into().expect("residue fits");
        self.branches[i].eval(x)
    }
}

/// A scaled product of integer polynomials, kept in factored form for display.
#[derive(Clone, Copy, Debug)]
pub struct Formula {
    pub scale: (i64, i64),
    pub factors: &'static [&'static [i64]],
}

impl Formula {
    pub fn scale(&self) -> BigRational {
        BigRational::new(self.scale.0.into(), self.scale.1.into())
    }

    pub fn eval(&self, q: &BigInt) -> BigRational {
        self.factors.iter().fold(self.scale(), |acc, f| acc * Polynomial::from_ints(f).eval(q))
    }

    pub fn expand(&self) -> Polynomial {
        self.factors
            .iter()
            .fold(Polynomial::new(vec![self.scale()]), |acc, f| acc.mul(&Polynomial::from_ints(f)))
    }

    pub fn expression(&self) -> String {
        let mut parts = Vec::new();
        let (n, d) = self.scale;
        if self.factors.is_empty() || (n, d) != (1, 1) {
            parts.push(if d == 1 { format!("{n}") } else { format!("({n}/{d})") });
        }
        for f in self.factors {
            parts.push(format!("({})", Polynomial::from_ints(f)));
        }
        parts.join("*")
    }
}

/// How a registered value relates to the raw (unordered) count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// value = raw / |PGL(3,q)|
    PerPgl,
    /// value = raw
    Raw,
    /// value = k · raw / |PGL(3,q)|
    PerPglTimesSymmetry(u64),
}

impl Normalization {
    pub fn describe(&self) -> String {
        match self {
            Normalization::PerPgl => "raw/|PGL|".into(),
            Normalization::Raw => "raw".into(),
            Normalization::PerPglTimesSymmetry(k) => format!("{k}*raw/|PGL|"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FormulaEntry {
    pub key: &'static str,
    pub lambda: &'static str,
    pub formula: Formula,
    pub normalization: Normalization,
    /// Multiplier that turns the per-|PGL| value into an ordered count.
    pub symmetry: u64,
    pub anchor: &'static str,
}

impl FormulaEntry {
    pub fn value(&self, q: u64) -> BigRational {
        self.formula.eval(&BigInt::from(q))
    }

    /// The raw count this entry predicts.
    pub fn expected_raw(&self, q: u64) -> BigRational {
        let v = self.value(q);
        let pgl = BigRational::from_integer(pgl3_order(q));
        match self.normalization {
            Normalization::PerPgl => v * pgl,
            Normalization::Raw => v,
            Normalization::PerPglTimesSymmetry(k) => v * pgl / BigRational::from_integer(k.into()),
        }
    }

    pub fn matches(&self, q: u64, raw: u64) -> bool {
        self.expected_raw(q) == BigRational::from_integer(raw.into())
    }

    pub fn cycle_type(&self) -> CycleType {
        self.lambda.parse().expect("registry partitions are valid")
    }
}

const PGL: &[&[i64]] = &[&[1, 1, 1], &[0, 1, 1], &[0, 0, 1], &[1, -2, 1]];
const Q2Q1: &[i64] = &[1, 1, 1];
const Q4MQ: &[i64] = &[0, -1, 0, 0, 1];

use Normalization::*;

macro_rules! entry {
    ($key:expr, $lambda:expr, ($n:expr, $d:expr), [$($f:expr),*], $norm:expr, $sym:expr, $anchor:expr) => {
        FormulaEntry {
            key: $key,
            lambda: $lambda,
            formula: Formula { scale: ($n, $d), factors: &[$($f),*] },
            normalization: $norm,
            symmetry: $sym,
            anchor: $anchor,
        }
    };
}

pub static REGISTRY: &[FormulaEntry] = &[
    entry!("arcs/e", "e", (1, 5040), [&[7440, -11004, 6462, -1952, 323, -28, 1]], PerPgl, 5040,
        "7-arcs with trivial Frobenius action"),
    entry!("arcs/2+2+1+1+1", "2+2+1+1+1", (1, 48), [&[0, -12, -6, 16, -1, -4, 1]], PerPgl, 48,
        "7-arcs of cycle type (12)(34)"),
    entry!("arcs/3+3+1", "3+3+1", (1, 18), [&[12, 6, 9, -8, -1, -1, 1]], PerPgl, 18,
        "7-arcs of cycle type (123)(456)"),
    entry!("arcs/4+2+1", "4+2+1", (1, 8), [&[0, 0, 0, 0, -3, 0, 1]], PerPgl, 8,
        "7-arcs of cycle type (1234)(56)"),
    entry!("arcs/7", "7", (1, 7), [&[-1, 0, 1, 1, 1, 0, 1]], PerPgl, 7,
        "7-arcs of cycle type (1234567)"),
    entry!("delta/4+2+1/U", "4+2+1", (1, 1), [Q2Q1, Q4MQ], PerPglTimesSymmetry(8), 8,
        "candidates whose degree-4 orbit is a 4-arc"),
    entry!("delta/4+2+1/D1", "4+2+1", (2, 1), [Q2Q1], PerPglTimesSymmetry(8), 8,
        "degree-2 orbit meets <a,Fa>"),
    entry!("delta/4+2+1/D2", "4+2+1", (2, 1), [&[0, 0, 1], Q2Q1], PerPglTimesSymmetry(8), 8,
        "degree-2 orbit meets <a,F^2a>"),
    entry!("delta/4+2+1/D3", "4+2+1", (1, 1), [Q4MQ], PerPglTimesSymmetry(8), 8,
        "rational point on <a,F^2a>"),
    entry!("delta/4+2+1/D4", "4+2+1", (1, 1), [Q4MQ, &[1, 1]], PerPglTimesSymmetry(8), 8,
        "rational point on <b,Fb>"),
    entry!("delta/4+2+1/D1&D2", "4+2+1", (0, 1), [], PerPglTimesSymmetry(8), 8,
        "D1 and D2 are disjoint"),
    entry!("delta/4+2+1/D1&D3", "4+2+1", (2, 1), [], PerPglTimesSymmetry(8), 8,
        "intersection of D1 and D3"),
    entry!("delta/4+2+1/D1&D4", "4+2+1", (2, 1), [&[1, 1]], PerPglTimesSymmetry(8), 8,
        "intersection of D1 and D4"),
    entry!("delta/4+2+1/D2&D3", "4+2+1", (2, 1), [&[0, 0, 1]], PerPglTimesSymmetry(8), 8,
        "intersection of D2 and D3"),
    entry!("delta/4+2+1/D2&D4", "4+2+1", (2, 1), [&[0, 0, 1], &[1, 1]], PerPglTimesSymmetry(8), 8,
        "intersection of D2 and D4"),
    entry!("delta/4+2+1/D3&D4", "4+2+1", (1, 1), [&[1, 1], &[0, -1, 1]], PerPglTimesSymmetry(8), 8,
        "intersection of D3 and D4"),
    entry!("delta/4+2+1/D1&D3&D4", "4+2+1", (2, 1), [], PerPglTimesSymmetry(8), 8,
        "triple intersection; each member is a Fano plane"),
    entry!("delta/4+2+1/D2&D3&D4", "4+2+1", (0, 1), [], PerPglTimesSymmetry(8), 8,
        "empty triple intersection"),
    entry!("delta/3+3+1/U", "3+3+1", (1, 18), [&[0, -1, -1, 1, 0, 0, 1]], PerPgl, 18,
        "candidates where one degree-3 orbit plus the rational point is a 4-arc"),
    entry!("delta/3+3+1/Delta", "3+3+1", (1, 18), [&[-21, -7, -10, 9, 1, 1]], PerPgl, 18,
        "candidates in U with three collinear points"),
    entry!("delta/2+2+1+1+1/U", "2+2+1+1+1", (1, 48), [Q2Q1, &[0, 1, 1], &[-1, 1, 1]], PerPgl, 48,
        "candidates whose two degree-2 orbits form a 4-arc"),
    entry!("delta/2+2+1+1+1/Delta", "2+2+1+1+1", (1, 48), [&[-6, 11, 5, -15, 4, 7]], PerPgl, 48,
        "candidates in U with three collinear points"),
    entry!("delta/7/D1", "7", (1, 7), [Q2Q1, &[0, -1, 0, 0, 0, 0, 0, 1]], Raw, 7,
        "degree-7 orbits on a rational line"),
    entry!("delta/7/D2", "7", (2, 7), [PGL[0], PGL[1], PGL[2], PGL[3]], Raw, 7,
        "degree-7 orbits forming a Fano plane"),
    entry!("fano/e", "e", (1, 168), [], PerPgl, 5040,
        "rational Fano subplanes"),
    entry!("fano/2+2+1+1+1", "2+2+1+1+1", (1, 8), [], PerPgl, 48,
        "Fano planes of type (12)(34), one per 4-arc of type (12)(34)"),
    entry!("fano/3+3+1", "3+3+1", (1, 3), [], PerPgl, 18,
        "Fano planes of type (123)(456), one per 4-arc of type (123)"),
    entry!("fano/4+2+1", "4+2+1", (1, 4), [], PerPgl, 8,
        "Fano planes of type (1234)(56), one per 4-arc of type (1234)"),
    entry!("fano/7", "7", (2, 7), [], PerPgl, 7,
        "Fano planes of type (1234567)"),
    entry!("fano/6+1", "6+1", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/5+2", "5+2", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/5+1+1", "5+1+1", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/4+3", "4+3", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/4+1+1+1", "4+1+1+1", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/3+2+2", "3+2+2", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/3+2+1+1", "3+2+1+1", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/3+1+1+1+1", "3+1+1+1+1", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/2+2+2+1", "2+2+2+1", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
    entry!("fano/2+1+1+1+1+1", "2+1+1+1+1+1", (0, 1), [], PerPgl, 1,
        "no Fano plane has this cycle type"),
];

pub fn lookup(key: &str) -> Option<&'static FormulaEntry> {
    REGISTRY.iter().find(|e| e.key == key)
}

pub fn registry_json() -> serde_json::Value {
    REGISTRY
        .iter()
        .map(|e| {
            json!({
                "key": e.key,
                "lambda": e.lambda,
                "expression": e.formula.expression(),
                "expanded": e.formula.expand().to_string(),
                "normalization": e.normalization.describe(),
                "symmetry": e.symmetry,
                "anchor": e.anchor,
            })
        })
        .collect()
}

pub fn pgl3_order(q: u64) -> BigInt {
    let q = BigInt::from(q);
    let one = BigInt::one();
    (&q * &q + &q + &one) * (&q * &q + &q) * (&q * &q) * ((&q - &one) * (&q - &one))
}

/// Table value (unordered 7-arcs per |PGL|) for one of the five listed types.
pub fn table1_value(lambda: &CycleType, q: u64) -> Result<BigRational, FormulaError> {
    let key = format!("arcs/{}", registry_lambda(lambda));
    lookup(&key).map(|e| e.value(q)).ok_or(FormulaError::Unknown(key))
}

pub fn registry_lambda(lambda: &CycleType) -> String {
    if lambda.is_identity() && lambda.n() == 7 {
        "e".to_string()
    } else {
        lambda.to_string()
    }
}

/// The bracketed factor of the count of 7-arcs with trivial action.
pub fn glynn_bracket(q: &BigInt, a_q: u32) -> BigInt {
    let p = Polynomial::from_ints(&[15, -8, 1]).mul(&Polynomial::from_ints(&[498, -468, 148, -20, 1]));
    let v = p.eval(q) - BigRational::from_integer(BigInt::from(30 * a_q));
    v.to_integer()
}

/// Ordered 7-arcs with trivial action, with a(q) supplied by the caller.
pub fn glynn_b7e(q: u64, a_q: u32) -> BigInt {
    pgl3_order(q) * glynn_bracket(&BigInt::from(q), a_q)
}

/// The same count as a period-2 quasipolynomial in q, with a(q) fixed per parity.
pub fn glynn_quasipolynomial(a_even: u32, a_odd: u32) -> QuasiPolynomial {
    let pgl = PGL.iter().fold(Polynomial::from_ints(&[1]), |acc, f| acc.mul(&Polynomial::from_ints(f)));
    let base = Polynomial::from_ints(&[15, -8, 1]).mul(&Polynomial::from_ints(&[498, -468, 148, -20, 1]));
    let branch = |a: u32| pgl.mul(&base.sub(&Polynomial::from_ints(&[30 * a as i64])));
    QuasiPolynomial::new(vec![branch(a_even), branch(a_odd)])
}

pub fn delta_formula(lambda: &CycleType, key: &str, q: u64) -> Result<BigRational, FormulaError> {
    let full = format!("delta/{}/{}", registry_lambda(lambda), key);
    lookup(&full).map(|e| e.value(q)).ok_or(FormulaError::Unknown(full))
}

pub fn stratum_size(q: u64, n: u32) -> BigInt {
    stratum_size_formula(q, n).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    #[test]
    fn pgl_orders() {
        assert_eq!(pgl3_order(2), 168.into());
        assert_eq!(pgl3_order(4), 60480.into());
        assert_eq!(pgl3_order(8), 16482816.into());
    }

    #[test]
    fn table_values() {
        assert_eq!(table1_value(&ct("e"), 2).unwrap(), r(0, 1));
        assert_eq!(table1_value(&ct("7"), 2).unwrap(), r(13, 1));
        assert_eq!(table1_value(&ct("4+2+1"), 2).unwrap(), r(2, 1));
        assert_eq!(table1_value(&ct("3+3+1"), 2).unwrap(), r(2, 3));
        assert_eq!(table1_value(&ct("2+2+1+1+1"), 4).unwrap(), r(13, 1));
        assert_eq!(table1_value(&ct("e"), 8).unwrap(), r(1200, 5040));
        assert!(table1_value(&ct("6+1"), 2).is_err());
    }

    #[test]
    fn glynn_values() {
        assert_eq!(glynn_b7e(8, 1), BigInt::from(19_779_379_200u64));
        assert_eq!(glynn_b7e(8, 0), BigInt::from(16482816u64 * 1230));
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta_formula(&ct("4+2+1"), "D1", 2).unwrap(), r(14, 1));
        assert_eq!(delta_formula(&ct("4+2+1"), "U", 2).unwrap(), r(98, 1));
        assert_eq!(delta_formula(&ct("7"), "D1", 2).unwrap(), r(126, 1));
        assert_eq!(delta_formula(&ct("7"), "D2", 2).unwrap(), r(48, 1));
        assert_eq!(lookup("delta/4+2+1/U").unwrap().expected_raw(2), r(2058, 1));
        assert!(delta_formula(&ct("4+2+1"), "D9", 2).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial::from_ints(&[-1, 0, 1, 1, 1, 0, 1]).to_string(), "q^6 + q^4 + q^3 + q^2 - 1");
        assert_eq!(Polynomial::from_ints(&[]).to_string(), "0");
        assert_eq!(lookup("delta/4+2+1/D2").unwrap().formula.expression(), "2*(q^2)*(q^2 + q + 1)");
        assert_eq!(lookup("fano/7").unwrap().formula.expression(), "(2/7)");
    }

    #[test]
    fn quasipolynomial_branches() {
        let g = glynn_quasipolynomial(1, 0);
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let a = if q % 2 == 0 { 1 } else { 0 };
            assert_eq!(g.evaluate(&q.into()), BigRational::from_integer(glynn_b7e(q, a)));
        }
        assert_eq!(g.evaluate(&BigInt::from(-3)), g.branches[1].eval(&BigInt::from(-3)));
    }
}
