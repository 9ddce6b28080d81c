use serde_json::{json, Map, Value};

use nearly_g2::sphere::CROSS_SIGN;

use crate::Format;

/// Report body plus the list of failed verification criteria.
pub struct Run {
    pub report: Value,
    pub failures: Vec<String>,
}

/// Wraps a command result with the metadata every report carries.
pub fn envelope(command: &str, seed: u64, parameters: Value, results: Value) -> Value {
    json!({
        "tool": "ng2",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "sigma": CROSS_SIGN,
        "parameters": parameters,
        "results": results,
    })
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("reports are plain JSON values");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter()
                .map(|(k, val)| format!("{k:<width$}  {val}\n"))
                .collect()
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => flatten_map(prefix, m, rows),
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), item, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn flatten_map(prefix: &str, m: &Map<String, Value>, rows: &mut Vec<(String, String)>) {
    for (k, v) in m {
        let full = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        flatten(&full, v, rows);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_flattens_nested_values() {
        let v = json!({"a": {"b": 1, "c": [1, 2]}, "d": "x", "e": [{"f": true}]});
        let t = render(&v, Format::Table);
        assert_eq!(t, "a.b    1\na.c    [1,2]\nd      x\ne.0.f  true\n");
    }

    #[test]
    fn envelope_carries_metadata() {
        let v = envelope("torsion", 7, json!({}), json!({}));
        assert_eq!(v["seed"], 7);
        assert_eq!(v["sigma"], -1.0);
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    }
}
