//! The report document every subcommand emits, and its three renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One named line of output: a bound, a search statistic, a suite count or
/// a reproduced claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedResult {
    pub name: String,
    pub value: Option<f64>,
    pub reference: Option<String>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl NamedResult {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            reference: None,
            pass: None,
            data: None,
        }
    }

    pub fn reference(mut self, r: impl Into<String>) -> Self {
        self.reference = Some(r.into());
        self
    }

    pub fn pass(mut self, ok: bool) -> Self {
        self.pass = Some(ok);
        self
    }

    pub fn data<T: Serialize>(mut self, d: &T) -> Self {
        self.data = Some(serde_json::to_value(d).expect("report data serializes"));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub command: String,
    pub invocation: Vec<String>,
    pub timestamp: u64,
    pub params: Value,
    pub results: Vec<NamedResult>,
    pub status: Status,
}

impl ReportDocument {
    pub fn new(command: &str, params: Value, results: Vec<NamedResult>, status: Status) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            invocation: std::env::args().collect(),
            timestamp: timestamp(),
            params,
            results,
            status,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    /// Pretty JSON with every float rounded to 15 significant digits.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        round_floats(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value", "reference", "pass"])
            .expect("in-memory write");
        for r in &self.results {
            w.write_record([
                r.name.clone(),
                r.value.map(fmt_num).unwrap_or_default(),
                r.reference.clone().unwrap_or_default(),
                r.pass.map(|b| b.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ineqlab {} {}", self.version, self.command);
        if let Value::Object(m) = &self.params {
            if !m.is_empty() {
                let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}={}", compact(v))).collect();
                let _ = writeln!(out, "params: {}", parts.join(" "));
            }
        }
        let width = self.results.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.results {
            let value = r.value.map(fmt_num).unwrap_or_else(|| "-".into());
            let mut line = format!("  {:<width$}  {:>20}", r.name, value);
            if let Some(reference) = &r.reference {
                let _ = write!(line, "  [{reference}]");
            }
            if let Some(ok) = r.pass {
                line.push_str(if ok { "  PASS" } else { "  FAIL" });
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let _ = writeln!(
            out,
            "status: {}",
            if self.status == Status::Pass { "pass" } else { "fail" }
        );
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(fmt_num).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Rounds to 15 significant digits.
pub fn sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest decimal of `sig15(x)`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x == 0.0 || (1e-6..1e16).contains(&x.abs()) {
        format!("{}", sig15(x))
    } else {
        format!("{:e}", sig15(x))
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|x| Number::from_f64(sig15(x))) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Builds a JSON object from `(key, value)` pairs, keeping their order.
pub fn object<I, K>(pairs: I) -> Value
where
    I: IntoIterator<Item = (K, Value)>,
    K: Into<String>,
{
    Value::Object(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect::<Map<_, _>>())
}
