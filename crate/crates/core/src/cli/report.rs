//! Report assembly and rendering. Every scalar is an exact string.

use serde_json::{Map, Value};

use crate::quadform::QuadraticForm;
use crate::rings::{Field, Matrix};

/// Outcome classes, in increasing severity. They map to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Inconclusive,
    Invalid,
    Falsified,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Inconclusive => 1,
            Status::Invalid => 2,
            Status::Falsified => 3,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Inconclusive => "inconclusive",
            Status::Invalid => "invalid-input",
            Status::Falsified => "falsified",
        }
    }
}

/// An ordered section of a report.
#[derive(Debug, Clone, Default)]
pub struct Section(Map<String, Value>);

impl Section {
    pub fn new() -> Self {
        Section(Map::new())
    }
    pub fn str(&mut self, key: &str, v: impl Into<String>) -> &mut Self {
        self.0.insert(key.into(), Value::String(v.into()));
        self
    }
    pub fn num(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.str(key, v.to_string())
    }
    pub fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.0.insert(key.into(), Value::Bool(v));
        self
    }
    pub fn opt(&mut self, key: &str, v: Option<impl Into<String>>) -> &mut Self {
        self.0.insert(key.into(), v.map_or(Value::Null, |s| Value::String(s.into())));
        self
    }
    pub fn list(&mut self, key: &str, v: Vec<String>) -> &mut Self {
        self.0
            .insert(key.into(), Value::Array(v.into_iter().map(Value::String).collect()));
        self
    }
    pub fn grid(&mut self, key: &str, rows: Vec<Vec<String>>) -> &mut Self {
        let rows = rows
            .into_iter()
            .map(|r| Value::Array(r.into_iter().map(Value::String).collect()))
            .collect();
        self.0.insert(key.into(), Value::Array(rows));
        self
    }
    pub fn section(&mut self, key: &str, s: Section) -> &mut Self {
        self.0.insert(key.into(), Value::Object(s.0));
        self
    }
    pub fn sections(&mut self, key: &str, v: Vec<Section>) -> &mut Self {
        self.0
            .insert(key.into(), Value::Array(v.into_iter().map(|s| Value::Object(s.0)).collect()));
        self
    }
    pub fn raw(&mut self, key: &str, v: Value) -> &mut Self {
        self.0.insert(key.into(), v);
        self
    }
    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

pub fn vector<K: Field>(k: &K, v: &[K::Elem]) -> Vec<String> {
    v.iter().map(|x| k.format(x)).collect()
}

pub fn matrix<K: Field>(k: &K, m: &Matrix<K::Elem>) -> Vec<Vec<String>> {
    m.format(k)
}

pub fn form<K: Field>(q: &QuadraticForm<K>) -> Section {
    let mut s = Section::new();
    s.num("rank", q.rank()).grid("coeffs", q.format_coeffs()).str("literal", q.to_literal());
    s
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub input: Value,
    pub body: Section,
    /// Human-only lines (timings); never part of machine output.
    pub notes: Vec<String>,
}

impl Report {
    pub fn machine(&self) -> String {
        let mut top = Map::new();
        top.insert("command".into(), Value::String(self.command.clone()));
        top.insert("status".into(), Value::String(self.status.name().into()));
        top.insert("input".into(), self.input.clone());
        top.insert("result".into(), Value::Object(self.body.0.clone()));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).unwrap();
        s.push('\n');
        s
    }

    pub fn human(&self) -> String {
        let mut out = format!("{} [{}]\n", self.command, self.status.name());
        render(&mut out, &Value::Object(self.body.0.clone()), 1);
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Null => Some("-".into()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::String(_))) => Some(format!(
            "[{}]",
            a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn render(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (key, val) in m {
                match scalar(val) {
                    Some(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        render(out, val, depth + 1);
                    }
                }
            }
        }
        Value::Array(a) => {
            for item in a {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(out, item, depth + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
