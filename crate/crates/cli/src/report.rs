use std::fmt::Write as _;

use jetcalc_core::{CDiffOperator, PolyExpr, Residual, VectorOperator};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub label: String,
    pub value: String,
    #[serde(skip)]
    pub latex: String,
    pub data: Value,
}

impl Entry {
    pub fn plain(label: &str, value: impl Into<String>) -> Self {
        let value = value.into();
        Self {
            label: label.into(),
            latex: format!("\\text{{{}}}", escape(&value)),
            data: Value::String(value.clone()),
            value,
        }
    }

    pub fn with_data(label: &str, value: impl Into<String>, data: Value) -> Self {
        Self {
            data,
            ..Self::plain(label, value)
        }
    }

    pub fn expr(label: &str, e: &PolyExpr) -> Self {
        Self {
            label: label.into(),
            value: e.to_string(),
            latex: e.to_latex(),
            data: json!(e.to_json()),
        }
    }

    pub fn vector(label: &str, v: &VectorOperator) -> Self {
        Self {
            label: label.into(),
            value: v.to_string(),
            latex: v.to_latex(),
            data: json!(v.to_json()),
        }
    }

    pub fn operator(label: &str, op: &CDiffOperator) -> Self {
        Self {
            label: label.into(),
            value: op.to_string(),
            latex: op.to_latex(),
            data: json!(op.to_json()),
        }
    }

    pub fn residual(label: &str, r: &Residual) -> Self {
        Self {
            label: label.into(),
            value: r.value.to_string(),
            latex: r.value.to_latex(),
            data: r.to_json(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub ok: bool,
    pub results: Vec<Entry>,
    pub notes: Vec<String>,
    /// Printed verbatim in text format.
    #[serde(skip)]
    pub raw: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            ok: true,
            results: Vec::new(),
            notes: Vec::new(),
            raw: None,
        }
    }

    pub fn push(&mut self, e: Entry) {
        self.results.push(e);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("plain data");
                s.push('\n');
                s
            }
            Format::Latex => self.latex(),
        }
    }

    fn text(&self) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut out = String::new();
        for e in &self.results {
            writeln!(out, "{}: {}", e.label, e.value).unwrap();
        }
        for n in &self.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        out
    }

    fn latex(&self) -> String {
        let mut out = String::from("\\begin{align*}\n");
        for e in &self.results {
            writeln!(out, "  \\text{{{}}} &: {} \\\\", escape(&e.label), e.latex).unwrap();
        }
        out.push_str("\\end{align*}\n");
        for n in &self.notes {
            writeln!(out, "% note: {n}").unwrap();
        }
        out
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '_' | '{' | '}' | '#' | '%' | '&' | '$' => {
                out.push('\\');
                out.push(c);
            }
            '^' => out.push_str("\\^{}"),
            '\\' => out.push_str("\\textbackslash{}"),
            _ => out.push(c),
        }
    }
    out
}
