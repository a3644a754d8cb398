//! Output plumbing: CSV with a single header row, JSON documents that
//! round-trip, and exact decimal rendering of rationals.

use std::io::{self, Write};

use koch_core::Rational;
use num_bigint::BigInt;
use serde_json::{json, Value};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One dataset: fixed columns, rows of JSON scalars, and per-run metadata.
/// CSV appends the metadata as constant trailing columns so the file stays a
/// single flat table with one header row.
pub struct Table {
    pub command: &'static str,
    pub meta: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn write(&self, format: Format, w: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let mut header: Vec<&str> = self.columns.clone();
        for (k, _) in &self.meta {
            header.push(k);
        }
        writeln!(w, "{}", header.join(","))?;
        for row in &self.rows {
            let mut fields: Vec<String> = row.iter().map(csv_field).collect();
            for (_, v) in &self.meta {
                fields.push(csv_field(v));
            }
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, w: &mut dyn Write) -> io::Result<()> {
        let meta: serde_json::Map<String, Value> =
            self.meta.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let doc = json!({
            "command": self.command,
            "meta": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)
    }
}

/// Scalars only; none of the emitted values need RFC 4180 quoting.
fn csv_field(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

pub fn num(v: f64) -> Value {
    Value::from(v)
}

/// Decimal expansion of a rational in [0, 1] to `sig` significant digits,
/// correctly rounded, trailing zeros stripped.
pub fn rational_decimal(x: &Rational, sig: usize) -> String {
    let sig = sig.max(1);
    let ten = BigInt::from(10);
    let den = x.denom().clone();
    let mut int_part = x.numer() / &den;
    let mut rem = x.numer() % &den;
    let mut digits: Vec<u8> = Vec::new();
    let mut significant = int_part > BigInt::from(0);
    let mut count = 0usize;
    let mut round_up = false;
    while rem != BigInt::from(0) {
        if count >= sig {
            // one digit past the target decides the rounding
            rem = &rem * &ten;
            let d = (&rem / &den).to_string().parse::<u8>().unwrap();
            round_up = d >= 5;
            break;
        }
        rem = &rem * &ten;
        let d: BigInt = &rem / &den;
        rem = &rem % &den;
        let d = d.to_string().parse::<u8>().unwrap();
        digits.push(d);
        if d != 0 {
            significant = true;
        }
        if significant {
            count += 1;
        }
    }
    if round_up {
        let mut i = digits.len();
        loop {
            if i == 0 {
                int_part += 1;
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    while digits.last() == Some(&0) {
        digits.pop();
    }
    if digits.is_empty() {
        return int_part.to_string();
    }
    let frac: String = digits.iter().map(|d| (b'0' + d) as char).collect();
    format!("{int_part}.{frac}")
}
