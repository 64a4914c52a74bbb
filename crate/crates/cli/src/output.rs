//! Byte-stable tabular output: CSV with `#` provenance comments, or JSON.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::error::CliError;

/// Significant digits in every printed number.
const SIG_DIGITS: usize = 9;

/// Fixed-format number: 9 significant digits, scientific below 1e-4.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    if x.abs() < 1e-4 {
        return format!("{:.*e}", SIG_DIGITS - 1, x);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (SIG_DIGITS as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.999999999 → 10.0000000).
    if decimals > 0 && s.trim_start_matches('-').parse::<f64>().is_ok_and(|r| r >= 10f64.powi(magnitude as i32 + 1)) {
        return format!("{:.*}", decimals - 1, x);
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => {
                // Round-trip through the fixed format so JSON and CSV agree.
                let rounded: f64 = fmt_num(*x).parse().unwrap_or(*x);
                serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
            }
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// A result table plus the resolved inputs that produced it.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: Vec<String>) -> Self {
        Self { title: title.into(), columns, ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn write_table<W: Write>(table: &Table, format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(table, out),
        Format::Json => write_json(table, out),
    }
}

fn write_csv<W: Write>(table: &Table, mut out: W) -> Result<(), CliError> {
    writeln!(out, "# {}", table.title)?;
    for (k, v) in &table.meta {
        writeln!(out, "# {k} = {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<W: Write>(table: &Table, mut out: W) -> Result<(), CliError> {
    let meta: Map<String, Value> =
        table.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    let rows: Vec<Value> = table.rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_json).collect())).collect();
    let doc = json!({
        "title": table.title,
        "config": meta,
        "columns": table.columns,
        "rows": rows,
    });
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1.00000000");
        assert_eq!(fmt_num(33.2), "33.2000000");
        assert_eq!(fmt_num(-0.152003093), "-0.152003093");
        assert_eq!(fmt_num(123456789.4), "123456789");
        assert_eq!(fmt_num(5e-5), "5.00000000e-5");
        assert_eq!(fmt_num(1e-4), "0.000100000000");
        assert_eq!(fmt_num(9.9999999999), "10.0000000");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", vec!["x".into(), "error".into()]);
        t.meta.push(("V".into(), "15 (default)".into()));
        t.push(vec![1.5.into(), "bad, really".into()]);
        let mut buf = Vec::new();
        write_table(&t, Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# demo\n# V = 15 (default)\nx,error\n1.50000000,\"bad, really\"\n");
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new("demo", vec!["x".into()]);
        t.push(vec![f64::NAN.into()]);
        t.push(vec![0.1234567891234.into()]);
        let mut buf = Vec::new();
        write_table(&t, Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0][0], Value::Null);
        assert_eq!(v["rows"][1][0], json!(0.123456789));
    }
}
