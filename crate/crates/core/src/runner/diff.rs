//! Field-level comparison of two reports, ignoring timings.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::runner::report::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldDiff {
    /// JSON pointer to the differing field.
    pub path: String,
    pub left: Option<Value>,
    pub right: Option<Value>,
}

const IGNORED: &[&str] = &["timing_ms"];

pub fn parse_report(text: &str, label: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Report(format!("{label}: not a report: {e}")))?;
    match v.get("schema_version").and_then(Value::as_u64) {
        Some(s) if s == u64::from(SCHEMA_VERSION) => Ok(v),
        Some(s) => Err(Error::Report(format!(
            "{label}: schema version {s} does not match supported version {SCHEMA_VERSION}"
        ))),
        None => Err(Error::Report(format!("{label}: missing schema_version"))),
    }
}

/// Differences between two parsed reports. Checks are matched by name, so reordering
/// alone is not a difference.
pub fn compare_reports(left: &Value, right: &Value) -> Result<Vec<FieldDiff>> {
    let (l, r) = (left.get("schema_version"), right.get("schema_version"));
    if l != r {
        return Err(Error::Report(format!("schema version mismatch: {l:?} vs {r:?}")));
    }
    let mut out = Vec::new();
    walk("", left, right, &mut out);
    Ok(out)
}

fn escape(k: &str) -> String {
    k.replace('~', "~0").replace('/', "~1")
}

fn named(items: &[Value]) -> Option<Vec<(&str, &Value)>> {
    let names: Vec<(&str, &Value)> =
        items.iter().map(|v| Some((v.get("name")?.as_str()?, v))).collect::<Option<_>>()?;
    let mut uniq: Vec<&str> = names.iter().map(|e| e.0).collect();
    uniq.sort_unstable();
    uniq.dedup();
    (uniq.len() == names.len()).then_some(names)
}

fn walk(path: &str, a: &Value, b: &Value, out: &mut Vec<FieldDiff>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                if IGNORED.contains(&k.as_str()) {
                    continue;
                }
                let p = format!("{path}/{}", escape(k));
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => walk(&p, u, v, out),
                    (u, v) => out.push(FieldDiff { path: p, left: u.cloned(), right: v.cloned() }),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if let (Some(nx), Some(ny)) = (named(x), named(y)) {
                for (name, u) in &nx {
                    let p = format!("{path}/{}", escape(name));
                    match ny.iter().find(|e| e.0 == *name) {
                        Some((_, v)) => walk(&p, u, v, out),
                        None => out.push(FieldDiff { path: p, left: Some((*u).clone()), right: None }),
                    }
                }
                for (name, v) in &ny {
                    if !nx.iter().any(|e| e.0 == *name) {
                        let p = format!("{path}/{}", escape(name));
                        out.push(FieldDiff { path: p, left: None, right: Some((*v).clone()) });
                    }
                }
                return;
            }
            for i in 0..x.len().max(y.len()) {
                let p = format!("{path}/{i}");
                match (x.get(i), y.get(i)) {
                    (Some(u), Some(v)) => walk(&p, u, v, out),
                    (u, v) => out.push(FieldDiff { path: p, left: u.cloned(), right: v.cloned() }),
                }
            }
        }
        _ if a == b => {}
        _ => out.push(FieldDiff { path: path.to_string(), left: Some(a.clone()), right: Some(b.clone()) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn report(extra: Value) -> Value {
        let mut v = json!({"schema_version": SCHEMA_VERSION, "timing_ms": 5, "checks": [
            {"name": "a", "status": "PASS", "metrics": {"x": 1.0}, "timing_ms": 3},
            {"name": "b", "status": "PASS", "metrics": {"x": 2.0}, "timing_ms": 4}
        ]});
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        v
    }

    #[test]
    fn timings_and_order_are_ignored() {
        let a = report(json!({}));
        let mut b = report(json!({"timing_ms": 99}));
        b["checks"].as_array_mut().unwrap().reverse();
        assert!(compare_reports(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn differences_are_localized() {
        let a = report(json!({}));
        let mut b = a.clone();
        b["checks"][1]["metrics"]["x"] = json!(2.5);
        let d = compare_reports(&a, &b).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path, "/checks/b/metrics/x");
    }

    #[test]
    fn version_mismatch_and_garbage_are_errors() {
        let a = report(json!({}));
        let b = report(json!({"schema_version": 999}));
        assert!(compare_reports(&a, &b).is_err());
        assert!(parse_report("{not json", "r1").is_err());
        assert!(parse_report(&b.to_string(), "r2").unwrap_err().to_string().contains("schema version"));
    }
}
