//! Deterministic CSV/JSON rendering.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Flag(bool),
    Empty,
}

/// A header plus rows of cells, rendered with a fixed number of significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, precision: usize) -> String {
        match format {
            Format::Csv => self.csv(precision),
            Format::Json => {
                let rows: Vec<Value> = self.rows.iter().map(|r| Value::Object(self.object(r, precision))).collect();
                let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("values are finite or null");
                s.push('\n');
                s
            }
        }
    }

    fn csv(&self, precision: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| cell_text(c, precision)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn object(&self, row: &[Cell], precision: usize) -> Map<String, Value> {
        self.columns.iter().zip(row).map(|(k, c)| (k.to_string(), cell_json(c, precision))).collect()
    }
}

fn cell_text(cell: &Cell, precision: usize) -> String {
    match cell {
        Cell::Num(x) => format_significant(*x, precision),
        Cell::Int(i) => i.to_string(),
        Cell::Flag(b) => u8::from(*b).to_string(),
        Cell::Empty => String::new(),
    }
}

fn cell_json(cell: &Cell, precision: usize) -> Value {
    match cell {
        Cell::Num(x) => format_significant(*x, precision)
            .parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Cell::Int(i) => Value::from(*i),
        Cell::Flag(b) => Value::Bool(*b),
        Cell::Empty => Value::Null,
    }
}

/// `%g`-style formatting with `digits` significant digits and trailing zeros removed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.8302941, 6), "0.830294");
        assert_eq!(format_significant(3.0, 6), "3");
        assert_eq!(format_significant(9.9999996, 6), "10");
        assert_eq!(format_significant(1.234567e-7, 3), "1.23e-7");
        assert_eq!(format_significant(-2.5e8, 6), "-2.5e8");
        assert_eq!(format_significant(123456.7, 6), "123457");
        assert_eq!(format_significant(1234567.0, 6), "1.23457e6");
        assert_eq!(format_significant(0.0, 6), "0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![Cell::Num(0.5), Cell::Flag(true), Cell::Empty]);
        assert_eq!(t.render(Format::Csv, 6), "a,b,c\n0.5,1,\n");
    }

    #[test]
    fn json_keeps_column_order() {
        let mut t = Table::new(&["z", "a"]);
        t.push(vec![Cell::Int(3), Cell::Num(1.0 / 3.0)]);
        let s = t.render(Format::Json, 4);
        assert!(s.find("\"z\"").unwrap() < s.find("\"a\"").unwrap());
        assert!(s.contains("0.3333"));
    }
}
