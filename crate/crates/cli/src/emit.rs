//! Deterministic report emission.
//!
//! JSON numbers carry 17 significant digits and CSV numbers 12, enough for
//! exact round-trips in JSON while keeping tables readable. Map keys are
//! emitted in sorted order so identical runs produce identical bytes.

use std::fmt::Write as _;

use serde_json::Value;

/// 17 significant digits: exact f64 round-trip.
pub fn json_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "\"nan\"".into()
    } else if v > 0.0 {
        "\"inf\"".into()
    } else {
        "\"-inf\"".into()
    }
}

/// 12 significant digits for CSV bodies.
pub fn csv_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// Serialize a `serde_json::Value` with the 17-digit float convention.
/// `serde_json`'s default map preserves sorted key order, so the output is
/// deterministic.
pub fn write_json(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                out.push_str(&json_number(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => {
            let _ = write!(out, "\"{}\"", escape(s));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "\"{}\":", escape(k));
                write_json(v, out);
            }
            out.push('}');
        }
    }
}

pub fn json_to_string(value: &Value) -> String {
    let mut out = String::new();
    write_json(value, &mut out);
    out
}

/// Report header lines: tool banner plus the resolved config echo, both as
/// `#` comments so the CSV body stays machine-readable.
pub fn report_header(subcommand: &str, config_json: &Value, timestamp: Option<u64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# riskmin {subcommand} report");
    let _ = writeln!(out, "# config = {}", json_to_string(config_json));
    if let Some(ts) = timestamp {
        let _ = writeln!(out, "# generated_at_unix = {ts}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip_is_exact() {
        for v in [0.1, -3.25e-17, 1.0 / 3.0, 2.0f64.powi(-52), 6.02e23] {
            let s = json_number(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }

    #[test]
    fn json_objects_are_sorted_and_stable() {
        let v = serde_json::json!({"beta": 1.5, "alpha": {"z": 2, "a": true}});
        assert_eq!(
            json_to_string(&v),
            "{\"alpha\":{\"a\":true,\"z\":2},\"beta\":1.5000000000000000e0}"
        );
    }
}
