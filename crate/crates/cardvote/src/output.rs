//! Report rendering: JSON documents and CSV tables with a config header.

use cardvote_core::Rational;
use num_traits::ToPrimitive;
use serde_json::Value;

use crate::error::{Error, Result};

/// `x` to 12 significant digits.
pub fn decimal(x: &Rational) -> String {
    float_decimal(x.to_f64().unwrap_or(f64::NAN))
}

pub fn float_decimal(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-5..12).contains(&magnitude) {
        let places = (11 - magnitude).max(0) as usize;
        let s = format!("{x:.places$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV text preceded by `# config: ...`.
    pub fn render(&self, config: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let body = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        let body = String::from_utf8(body).map_err(|e| Error::Format(e.to_string()))?;
        Ok(format!("# config: {config}\n{body}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A command result in both renderings.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub table: Table,
}

impl Report {
    pub fn render(&self, format: Format, config: &str) -> Result<String> {
        match format {
            Format::Csv => self.table.render(config),
            Format::Json => {
                let mut doc = self.json.clone();
                match &mut doc {
                    Value::Object(map) => {
                        map.insert("config".into(), Value::String(config.into()));
                    }
                    other => {
                        doc = serde_json::json!({"config": config, "result": other.take()});
                    }
                }
                Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cardvote_core::rational::rat;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(decimal(&rat(1, 3)), "0.333333333333");
        assert_eq!(decimal(&rat(2, 3)), "0.666666666667");
        assert_eq!(decimal(&rat(1, 1)), "1");
        assert_eq!(decimal(&rat(-5, 2)), "-2.5");
        assert_eq!(decimal(&rat(1, 1_000_000_000)), "1.00000000000e-9");
        assert_eq!(decimal(&rat(0, 1)), "0");
        assert_eq!(float_decimal(123456.7890123456), "123456.789012");
    }

    #[test]
    fn csv_has_config_line() {
        let mut t = Table::new(["m", "ratio"]);
        t.push(vec!["8".into(), "1/2".into()]);
        assert_eq!(t.render("x").unwrap(), "# config: x\nm,ratio\n8,1/2\n");
    }
}
