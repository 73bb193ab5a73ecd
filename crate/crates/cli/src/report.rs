//! Tabular command output as CSV or JSON lines.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Real(f64),
    Int(u64),
    Text(String),
}

impl Field {
    fn to_csv(&self) -> String {
        match self {
            Field::Real(x) => format_real(*x),
            Field::Int(n) => n.to_string(),
            Field::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Field::Real(x) => real_json(*x),
            Field::Int(n) => json!(n),
            Field::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Real(x)
    }
}

impl From<u64> for Field {
    fn from(n: u64) -> Self {
        Field::Int(n)
    }
}

impl From<usize> for Field {
    fn from(n: usize) -> Self {
        Field::Int(n as u64)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_owned())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

pub struct Row {
    pub params: Vec<(&'static str, Field)>,
    pub value: f64,
    pub std_error: Option<f64>,
}

impl Row {
    pub fn new(params: Vec<(&'static str, Field)>, value: f64) -> Self {
        Self {
            params,
            value,
            std_error: None,
        }
    }
}

/// Rows of one command. Every row carries the same parameter names.
pub struct Report {
    pub command: &'static str,
    /// CSV column name of the value.
    pub value_name: &'static str,
    /// Master seed of randomized commands.
    pub seed: Option<u64>,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(command: &'static str, value_name: &'static str, seed: Option<u64>) -> Self {
        Self {
            command,
            value_name,
            seed,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Jsonl => self.write_jsonl(out),
        }
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let with_se = self.rows.iter().any(|r| r.std_error.is_some());
        let mut header: Vec<&str> = self
            .rows
            .first()
            .map(|r| r.params.iter().map(|(k, _)| *k).collect())
            .unwrap_or_default();
        header.push(self.value_name);
        if with_se {
            header.push("std_error");
        }
        if self.seed.is_some() {
            header.push("seed");
        }
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.params.iter().map(|(_, f)| f.to_csv()).collect();
            rec.push(format_real(r.value));
            if with_se {
                rec.push(r.std_error.map(format_real).unwrap_or_default());
            }
            if let Some(seed) = self.seed {
                rec.push(seed.to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.rows {
            let params: Map<String, Value> = r
                .params
                .iter()
                .map(|(k, f)| (k.to_string(), f.to_json()))
                .collect();
            let mut rec = Map::new();
            rec.insert("command".into(), json!(self.command));
            rec.insert("params".into(), Value::Object(params));
            rec.insert("value".into(), real_json(r.value));
            if let Some(se) = r.std_error {
                rec.insert("std_error".into(), real_json(se));
            }
            rec.insert("seed".into(), json!(self.seed));
            serde_json::to_writer(&mut out, &Value::Object(rec))?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

fn real_json(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| json!(format_real(x)))
}

/// Formats a real with 17 significant digits, dropping trailing zeros;
/// fixed notation for decimal exponents in [−5, 17), scientific otherwise.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}
