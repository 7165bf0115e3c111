//! JSON reports.
//!
//! Output is deterministic: object keys are sorted, floats are written with
//! 17 significant digits (so they parse back to the same `f64`), integers
//! stay integers, and non-finite numbers become `null`. Every report carries
//! the tool version, the sampling plan and the tolerance policy, which is
//! enough to reproduce any verdict in it.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::classify::ClassificationReport;
use crate::residual::TolerancePolicy;
use crate::sampling::SamplingPlan;

pub const TOOL_NAME: &str = "acms";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A report under construction: a fixed header plus named sections.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    root: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, structure: &str, plan: &SamplingPlan, policy: &TolerancePolicy) -> Self {
        let mut root = Map::new();
        root.insert("tool".into(), serde_json::json!({ "name": TOOL_NAME, "version": TOOL_VERSION }));
        root.insert("command".into(), Value::from(command));
        root.insert("structure".into(), Value::from(structure));
        root.insert("seed".into(), Value::from(plan.seed));
        root.insert("sampling".into(), to_value(plan));
        root.insert("tolerances".into(), to_value(policy));
        Self { root }
    }

    /// Add or replace a top-level section.
    pub fn section<T: Serialize + ?Sized>(&mut self, key: &str, value: &T) -> &mut Self {
        self.root.insert(key.into(), to_value(value));
        self
    }

    /// Add the classification along with a flat `verdicts` map keyed by
    /// condition name.
    pub fn classification(&mut self, r: &ClassificationReport) -> &mut Self {
        let mut verdicts = Map::new();
        verdicts.insert("Axioms".into(), Value::from(r.axioms.max.verdict.as_str()));
        for c in &r.conditions {
            verdicts.insert(c.name.clone(), Value::from(c.verdict.as_str()));
        }
        self.root.insert("verdicts".into(), Value::Object(verdicts));
        self.section("classification", r)
    }

    pub fn status(&mut self, status: &str) -> &mut Self {
        self.root.insert("status".into(), Value::from(status));
        self
    }

    pub fn value(&self) -> Value {
        Value::Object(self.root.clone())
    }

    pub fn to_json(&self) -> String {
        emit(&self.value())
    }
}

/// Serialize to a JSON value; NaN and infinities become `null`.
pub fn to_value<T: Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

/// Pretty-print with sorted keys and 17-significant-digit floats.
pub fn emit(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_number(n: &Number, out: &mut String) {
    if let Some(u) = n.as_u64() {
        out.push_str(&u.to_string());
    } else if let Some(i) = n.as_i64() {
        out.push_str(&i.to_string());
    } else {
        match n.as_f64() {
            Some(x) if x.is_finite() => out.push_str(&format!("{x:.16e}")),
            _ => out.push_str("null"),
        }
    }
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(v: &Value, level: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(level + 1, out);
                write_value(item, level + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(level, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                indent(level + 1, out);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*key], level + 1, out);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(level, out);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::classify::classify;

    #[test]
    fn floats_keep_seventeen_digits() {
        let v = serde_json::json!({ "b": 0.1, "a": [1, -2, 1e-300, f64::MAX], "c": "q\"" });
        let text = emit(&v);
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn non_finite_is_null() {
        let text = emit(&to_value(&[f64::NAN, f64::INFINITY, 1.5]));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, serde_json::json!([null, null, 1.5]));
    }

    #[test]
    fn classification_report_round_trips_and_is_stable() {
        let e = catalog::lookup("darboux_3").unwrap();
        let plan = SamplingPlan::new(10, 2, 3);
        let policy = TolerancePolicy::default();
        let build = || {
            let r = classify(&e.structure, &plan, &policy).unwrap();
            let mut rep = Report::new("classify", &e.name, &plan, &policy);
            rep.classification(&r).status("ok");
            rep
        };
        let a = build();
        let text = a.to_json();
        assert_eq!(text, build().to_json());
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(emit(&back), text);
        assert_eq!(back["seed"], 3);
        assert_eq!(back["tolerances"]["tol"].as_f64(), Some(1e-8));
        assert_eq!(back["verdicts"]["Sasakian"], "holds");
        assert_eq!(back["tool"]["version"], TOOL_VERSION);
    }
}
