//! Line-oriented result rendering.
//!
//! Structured output is one `key=value` pair per line with exact rationals as
//! `num/den`. Human output is an aligned table in which every exact value is
//! followed by a decimal approximation explicitly marked with `≈`. The
//! approximations are never parsed back or compared.

use std::fmt::{self, Display};

use crate::exact::ExactScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Text(String),
    Exact(ExactScalar),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Structured,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.entries.push((key.into(), Value::Text(value.to_string())));
        self
    }

    pub fn push_exact(&mut self, key: impl Into<String>, value: &ExactScalar) -> &mut Self {
        self.entries.push((key.into(), Value::Exact(value.clone())));
        self
    }

    pub fn extend(&mut self, prefix: &str, other: &Report) -> &mut Self {
        for (k, v) in &other.entries {
            let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            self.entries.push((key, v.clone()));
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => self.to_structured(),
            Format::Human => self.to_human(),
        }
    }

    pub fn to_structured(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let v = match v {
                Value::Text(t) => t.clone(),
                Value::Exact(x) => x.to_string(),
            };
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    pub fn to_human(&self) -> String {
        let width = self.entries.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.entries {
            let v = match v {
                Value::Text(t) => t.clone(),
                Value::Exact(x) => format!("{x}  (≈ {})", approx(x)),
            };
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        out
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_structured())
    }
}

/// Decimal approximation for display only.
pub fn approx(x: &ExactScalar) -> String {
    let f = x.to_f64();
    if f == 0.0 || (1e-4..1e6).contains(&f.abs()) {
        format!("{f:.6}")
    } else {
        format!("{f:.6e}")
    }
}

/// Parses one structured line into its key and raw value.
pub fn parse_line(line: &str) -> Option<(&str, &str)> {
    line.split_once('=')
}
