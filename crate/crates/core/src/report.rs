//! Census results with exact rationals serialized as "num/den".

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::formulas::{pgl3_order, FormulaEntry};
use crate::orbits::CycleType;

pub const CODE_VERSION: &str = concat!("sevenarc-", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (n, d) = s.split_once('/').ok_or_else(|| format!("not a fraction: {s:?}"))?;
        let n: BigInt = n.trim().parse().map_err(|e| format!("{e}"))?;
        let d: BigInt = d.trim().parse().map_err(|e| format!("{e}"))?;
        if d == BigInt::from(0) {
            return Err("zero denominator".into());
        }
        Ok(Rational(BigRational::new(n, d)))
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub q: u64,
    pub p: u32,
    pub s: u32,
    pub lambda: String,
    pub operation: String,
    pub raw_count: u64,
    pub per_pgl: Rational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ordered_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formula_key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formula_value: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub convention: Option<String>,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none", default)]
    pub matches: Option<bool>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub details: BTreeMap<String, String>,
    pub elapsed_ms: u64,
    pub shard_count: usize,
    pub code_version: String,
}

impl CountReport {
    pub fn new(q: u64, lambda: &CycleType, operation: &str, raw_count: u64) -> Self {
        let s = q.trailing_zeros();
        CountReport {
            q,
            p: 2,
            s,
            lambda: lambda.to_string(),
            operation: operation.to_string(),
            raw_count,
            per_pgl: Rational(BigRational::new(raw_count.into(), pgl3_order(q))),
            ordered_count: None,
            formula_key: None,
            formula_value: None,
            convention: None,
            matches: None,
            details: BTreeMap::new(),
            elapsed_ms: 0,
            shard_count: 0,
            code_version: CODE_VERSION.to_string(),
        }
    }

    /// Attaches a registered formula and records whether the raw count agrees.
    pub fn compare(mut self, entry: &FormulaEntry) -> Self {
        self.formula_key = Some(entry.key.to_string());
        self.formula_value = Some(Rational(entry.value(self.q)));
        self.convention = Some(entry.normalization.describe());
        self.matches = Some(entry.matches(self.q, self.raw_count));
        self
    }

    pub fn detail(mut self, key: &str, value: impl ToString) -> Self {
        self.details.insert(key.to_string(), value.to_string());
        self
    }

    pub fn cycle_type(&self) -> CycleType {
        self.lambda.parse().expect("report partitions are valid")
    }

    /// Row order: q, then cycle type, then operation.
    pub fn sort_key(&self) -> (u64, CycleType, String) {
        (self.q, self.cycle_type(), self.operation.clone())
    }
}

pub fn sort_reports(reports: &mut [CountReport]) {
    reports.sort_by_key(|r| r.sort_key());
}

pub const CSV_HEADER: &str = "q,lambda,operation,raw_count,per_pgl,formula_value,match,elapsed_ms";

pub fn csv_row(r: &CountReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.q,
        r.lambda,
        r.operation,
        r.raw_count,
        r.per_pgl,
        r.formula_value.as_ref().map(|v| v.to_string()).unwrap_or_default(),
        r.matches.map(|m| m.to_string()).unwrap_or_default(),
        r.elapsed_ms
    )
}
