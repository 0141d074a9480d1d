//! Human, JSON and CSV renderings of reports and of the table.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::formulas::registry_lambda;
use crate::orbits::CycleType;
use crate::report::{csv_row, CountReport, Rational, CSV_HEADER};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Human,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(Format::Human),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?} (expected human, json or csv)")),
        }
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

/// Left-aligned columns separated by two spaces.
fn columns(rows: &[Vec<String>]) -> String {
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut w = vec![0; width];
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.chars().count());
        }
    }
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(i, c)| format!("{c:<0$}", w[i])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn render_reports(reports: &[CountReport], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in reports {
                s.push_str(&csv_row(r));
                s.push('\n');
            }
            s
        }
        Format::Human => {
            let mut rows = vec![["q", "lambda", "operation", "raw_count", "per_pgl", "formula", "match", "elapsed_ms"]
                .map(String::from)
                .to_vec()];
            for r in reports {
                rows.push(vec![
                    r.q.to_string(),
                    registry_lambda(&r.cycle_type()),
                    r.operation.clone(),
                    r.raw_count.to_string(),
                    r.per_pgl.to_string(),
                    opt(&r.formula_value),
                    opt(&r.matches),
                    r.elapsed_ms.to_string(),
                ]);
            }
            let mut out = columns(&rows);
            for r in reports.iter().filter(|r| !r.details.is_empty() || r.convention.is_some()) {
                let _ = writeln!(out, "\nq={} {} {}:", r.q, registry_lambda(&r.cycle_type()), r.operation);
                if let (Some(k), Some(c)) = (&r.formula_key, &r.convention) {
                    let _ = writeln!(out, "  formula {k} compared as {c}");
                }
                if let Some(o) = r.ordered_count {
                    let _ = writeln!(out, "  ordered_count = {o}");
                }
                for (k, v) in &r.details {
                    let _ = writeln!(out, "  {k} = {v}");
                }
            }
            out
        }
    }
}

/// One row of the five-row table: formula and, when run, enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub q: u64,
    pub lambda: String,
    pub formula_per_pgl: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<CountReport>,
    /// Why the enumeration column is empty.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl TableRow {
    pub fn cycle_type(&self) -> CycleType {
        self.lambda.parse().expect("table partitions are valid")
    }
}

pub fn render_table(rows: &[TableRow], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in rows {
                match &r.enumeration {
                    Some(rep) => s.push_str(&csv_row(rep)),
                    None => {
                        let _ = write!(s, "{},{},count_arcs,,,{},,", r.q, r.lambda, r.formula_per_pgl);
                    }
                }
                s.push('\n');
            }
            s
        }
        Format::Human => {
            let mut out = vec![["q", "lambda", "cycle", "formula per |PGL|", "enumerated per |PGL|", "raw_count", "match"]
                .map(String::from)
                .to_vec()];
            for r in rows {
                let ct = r.cycle_type();
                let (enumerated, raw, m) = match (&r.enumeration, &r.skipped) {
                    (Some(rep), _) => (rep.per_pgl.to_string(), rep.raw_count.to_string(), opt(&rep.matches)),
                    (None, Some(why)) => (format!("skipped ({why})"), "-".into(), "-".into()),
                    (None, None) => ("-".into(), "-".into(), "-".into()),
                };
                out.push(vec![
                    r.q.to_string(),
                    registry_lambda(&ct),
                    ct.cycle_notation(),
                    r.formula_per_pgl.to_string(),
                    enumerated,
                    raw,
                    m,
                ]);
            }
            columns(&out)
        }
    }
}
