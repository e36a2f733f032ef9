use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::binding::{check_pair, eq5_bounds};
use super::montecarlo::monte_carlo;
use super::stats::Estimate;
use crate::adversary::{alice_epr_attack_no_checking, AliceStrategy, BobStrategy};
use crate::error::{Error, Result};
use crate::protocol::{Fraction, Modulation, ProtocolConfig};

/// Version of every record layout this crate writes. Bumped whenever a
/// field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// How many standard errors the empirical and analytic `P_B` may differ by.
pub const AGREEMENT_SIGMAS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassFlags {
    pub eq5_lower: bool,
    pub eq5_upper: bool,
    /// Empirical `P_B` within [`AGREEMENT_SIGMAS`] of the analytic value.
    pub p_b_agreement: bool,
}

/// Both parties' cheating probabilities for one configuration, with the
/// binding sandwich they must satisfy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub schema_version: u32,
    pub n: usize,
    pub grid: usize,
    pub lambda: Fraction,
    pub modulation: Modulation,
    pub seed: u64,
    /// `‖ρ₀ − ρ₁‖₁` of Bob's states with no check.
    pub trace_distance: f64,
    pub p_b_analytic: f64,
    pub p_b_empirical: Estimate,
    /// Acceptance probability of Alice's Uhlmann flip with no check.
    pub p_a: f64,
    pub eq5_lower: f64,
    pub eq5_upper: f64,
    pub pass_flags: PassFlags,
}

/// Runs the no-checking entanglement attack for `cfg` and `trials` sessions
/// of Bob's in-protocol Helstrom measurement, and assembles the report.
pub fn security_report(cfg: &ProtocolConfig, trials: u64) -> Result<SecurityReport> {
    let attack = alice_epr_attack_no_checking(cfg)?;
    let unchecked = ProtocolConfig {
        fraction_check: false,
        eq8_check: false,
        ..cfg.clone()
    };
    let mc = monte_carlo(
        &unchecked,
        AliceStrategy::Honest,
        BobStrategy::HelstromMeasure,
        trials,
    )?;
    let p_b_empirical = mc.guess.expect("the Helstrom strategy guesses");
    let (eq5_lower, eq5_upper) = eq5_bounds(attack.p_b);
    let check = check_pair(attack.p_b, attack.p_a);
    Ok(SecurityReport {
        schema_version: SCHEMA_VERSION,
        n: cfg.n,
        grid: cfg.grid,
        lambda: cfg.lambda,
        modulation: cfg.modulation,
        seed: cfg.seed,
        trace_distance: attack.trace_distance,
        p_b_analytic: attack.p_b,
        p_b_empirical,
        p_a: attack.p_a,
        eq5_lower,
        eq5_upper,
        pass_flags: PassFlags {
            eq5_lower: check.lower_ok,
            eq5_upper: check.upper_ok,
            p_b_agreement: p_b_empirical.agrees_with(attack.p_b, AGREEMENT_SIGMAS),
        },
    })
}

/// Output encodings for tables of records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Comma-separated, one header line; nested fields become `outer.inner`
    /// columns.
    #[default]
    Csv,
    /// One JSON object per line.
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (expected csv or jsonl)"
            ))),
        }
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Null => out.push((prefix.to_owned(), String::new())),
        Value::String(s) => out.push((prefix.to_owned(), s.clone())),
        Value::Array(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            out.push((prefix.to_owned(), parts.join(" ")));
        }
        other => out.push((prefix.to_owned(), other.to_string())),
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("writing output: {e}"))
}

/// Writes `rows` in `format`. For CSV every row must flatten to the same
/// columns, which holds for rows of one struct type without optional
/// nested structs.
pub fn write_table<T: Serialize, W: Write>(rows: &[T], format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Jsonl => {
            for r in rows {
                serde_json::to_writer(&mut out, r).map_err(io)?;
                out.write_all(b"\n").map_err(io)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header: Option<Vec<String>> = None;
            for r in rows {
                let mut cells = Vec::new();
                flatten("", &serde_json::to_value(r).map_err(io)?, &mut cells);
                let names: Vec<String> = cells.iter().map(|c| c.0.clone()).collect();
                match &header {
                    None => {
                        w.write_record(&names).map_err(io)?;
                        header = Some(names);
                    }
                    Some(h) if *h != names => {
                        return Err(Error::Config(
                            "rows of one table must share their columns".into(),
                        ))
                    }
                    Some(_) => {}
                }
                w.write_record(cells.iter().map(|c| &c.1)).map_err(io)?;
            }
            w.flush().map_err(io)?;
        }
    }
    Ok(())
}

/// [`write_table`] into a string.
pub fn render_table<T: Serialize>(rows: &[T], format: Format) -> Result<String> {
    let mut buf = Vec::new();
    write_table(rows, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("writers emit UTF-8"))
}

/// Parses line-delimited records written with [`Format::Jsonl`].
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            let v: Value = serde_json::from_str(l)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
            check_schema(&v, i + 1)?;
            serde_json::from_value(v).map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

fn check_schema(v: &Value, line: usize) -> Result<()> {
    match v
        .as_object()
        .and_then(|m: &Map<String, Value>| m.get("schema_version"))
    {
        Some(Value::Number(n)) if n.as_u64() != Some(SCHEMA_VERSION as u64) => Err(Error::Config(
            format!("line {line}: schema version {n}, this build reads {SCHEMA_VERSION}"),
        )),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: u32,
        inner: Inner,
        tag: Option<f64>,
    }

    #[derive(Serialize)]
    struct Inner {
        x: f64,
        ok: bool,
    }

    #[test]
    fn csv_flattens_nested_fields() {
        let rows = [
            Row {
                a: 1,
                inner: Inner { x: 0.5, ok: true },
                tag: None,
            },
            Row {
                a: 2,
                inner: Inner { x: 0.25, ok: false },
                tag: Some(1.0),
            },
        ];
        let text = render_table(&rows, Format::Csv).unwrap();
        assert_eq!(
            text,
            "a,inner.x,inner.ok,tag\n1,0.5,true,\n2,0.25,false,1.0\n"
        );
    }

    #[test]
    fn report_round_trips() {
        let cfg = ProtocolConfig {
            seed: 4,
            ..ProtocolConfig::with_n(3)
        };
        let r = security_report(&cfg, 200).unwrap();
        let text = render_table(std::slice::from_ref(&r), Format::Jsonl).unwrap();
        let back: Vec<SecurityReport> = read_jsonl(&text).unwrap();
        assert_eq!(back, vec![r.clone()]);
        assert!(r.eq5_lower <= r.eq5_upper);
        assert!(r.pass_flags.eq5_lower && r.pass_flags.eq5_upper);
    }

    #[test]
    fn foreign_schema_is_rejected() {
        let err = read_jsonl::<Value>("{\"schema_version\": 99}\n").unwrap_err();
        assert!(err.to_string().contains("schema version"));
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("jsonl".parse::<Format>().unwrap(), Format::Jsonl);
        assert!("xml".parse::<Format>().is_err());
    }
}
