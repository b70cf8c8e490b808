use std::fmt::Write as _;

use nacap_core::field::{format_rational, OrderedField, PrecisionConfig, Rational};
use serde::Serialize;
use serde_json::{json, Value};

/// Lowest guarantee exponent seen while building a report.
#[derive(Debug, Default)]
pub struct Audit {
    min: Option<Rational>,
    pub elements: usize,
}

impl Audit {
    pub fn see<F: OrderedField>(&mut self, x: &F) {
        self.elements += 1;
        if let Some(g) = x.guarantee() {
            if self.min.as_ref().is_none_or(|m| &g < m) {
                self.min = Some(g);
            }
        }
    }

    /// `{"value": literal, "guarantee": exponent or null}`.
    pub fn num<F: OrderedField>(&mut self, x: &F) -> Value {
        self.see(x);
        json!({
            "value": x.to_literal(),
            "guarantee": x.guarantee().map(|g| format_rational(&g)),
        })
    }

    pub fn min_guarantee(&self) -> Option<&Rational> {
        self.min.as_ref()
    }
}

#[derive(Debug, Serialize)]
pub struct PrecisionAudit {
    pub window: String,
    pub max_terms: usize,
    pub depth: usize,
    /// Lowest guarantee exponent among reported elements; null when all are
    /// exact.
    pub min_guarantee: Option<String>,
    pub threshold: Option<String>,
    pub elements: usize,
}

impl PrecisionAudit {
    pub fn new(cfg: &PrecisionConfig, audit: &Audit, threshold: Option<&Rational>) -> Self {
        Self {
            window: format_rational(&cfg.window),
            max_terms: cfg.max_terms,
            depth: cfg.geometric_series_depth,
            min_guarantee: audit.min_guarantee().map(format_rational),
            threshold: threshold.map(format_rational),
            elements: audit.elements,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub precision: PrecisionAudit,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.command).unwrap();
        render(&mut out, "", &self.outputs);
        let p = &self.precision;
        writeln!(
            out,
            "precision: window {}, max terms {}, lowest guarantee {}",
            p.window,
            p.max_terms,
            p.min_guarantee.as_deref().unwrap_or("exact")
        )
        .unwrap();
        out
    }
}

fn is_num(v: &Value) -> bool {
    matches!(v, Value::Object(m) if m.len() == 2 && m.contains_key("value") && m.contains_key("guarantee"))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        _ if is_num(v) => {
            let value = v["value"].as_str().unwrap_or_default();
            match v["guarantee"].as_str() {
                Some(g) => format!("{value} + O(e^({g}))"),
                None => value.to_string(),
            }
        }
        other => other.to_string(),
    }
}

fn flat_row(prefix: &str, v: &Value, row: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !is_num(v) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flat_row(&key, x, row);
            }
        }
        _ => row.push((prefix.to_string(), scalar(v))),
    }
}

fn table(out: &mut String, rows: &[Value]) {
    let flat: Vec<Vec<(String, String)>> = rows
        .iter()
        .map(|r| {
            let mut row = Vec::new();
            flat_row("", r, &mut row);
            row
        })
        .collect();
    let mut columns: Vec<String> = Vec::new();
    for row in &flat {
        for (k, _) in row {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let cell = |row: &Vec<(String, String)>, c: &String| {
        row.iter().find(|(k, _)| k == c).map(|(_, v)| v.clone()).unwrap_or_default()
    };
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| flat.iter().map(|r| cell(r, c).chars().count()).max().unwrap_or(0).max(c.chars().count()))
        .collect();
    let line = |cells: Vec<String>| {
        cells.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    writeln!(out, "  {}", line(columns.clone())).unwrap();
    for row in &flat {
        writeln!(out, "  {}", line(columns.iter().map(|c| cell(row, c)).collect())).unwrap();
    }
}

fn render(out: &mut String, prefix: &str, v: &Value) {
    let Value::Object(map) = v else {
        writeln!(out, "{prefix}: {}", scalar(v)).unwrap();
        return;
    };
    let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
    for (k, x) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match x {
            Value::Array(rows) if rows.iter().any(|r| r.is_object() && !is_num(r)) => {
                writeln!(out, "{key}:").unwrap();
                table(out, rows);
            }
            Value::Array(items) => {
                let items: Vec<String> = items.iter().map(scalar).collect();
                writeln!(out, "{key:<width$}  [{}]", items.join(", ")).unwrap();
            }
            Value::Object(_) if !is_num(x) => render(out, &key, x),
            _ => writeln!(out, "{key:<width$}  {}", scalar(x)).unwrap(),
        }
    }
}
