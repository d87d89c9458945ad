//! Report documents and their text and machine renderings.

use serde_json::{Map, Value};

/// Unit lists longer than this are elided in text output.
pub const UNIT_PRINT_CAP: usize = 64;

/// JSON number for a `u128`, falling back to a string beyond `u64`.
pub fn num(n: u128) -> Value {
    match u64::try_from(n) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(n.to_string()),
    }
}

pub fn opt_num(n: Option<u128>) -> Value {
    n.map_or(Value::Null, num)
}

pub fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(
        items
            .into_iter()
            .map(|x| Value::String(x.to_string()))
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

/// One document per invocation.
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub status: &'static str,
    pub exit_code: i32,
    pub timing_ms: Option<u128>,
}

impl Report {
    pub fn to_value(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.clone()));
        doc.insert("args".into(), strings(&self.args));
        doc.insert("inputs".into(), Value::Object(self.inputs.clone()));
        doc.insert("result".into(), self.result.clone());
        doc.insert("status".into(), Value::String(self.status.into()));
        doc.insert("exit_code".into(), Value::from(self.exit_code));
        if let Some(t) = self.timing_ms {
            doc.insert("timing_ms".into(), num(t));
        }
        Value::Object(doc)
    }

    pub fn render(&self, format: Format) -> String {
        let v = self.to_value();
        match format {
            Format::Machine => {
                let mut s = serde_json::to_string_pretty(&v).expect("serializable");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                if let Value::Object(m) = &v {
                    render_object(m, 0, &mut out);
                }
                out
            }
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Object(m) => {
            let parts: Vec<String> = m
                .iter()
                .map(|(k, v)| format!("{k}={}", scalar(v)))
                .collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_object() && !x.is_array()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn render_object(m: &Map<String, Value>, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (key, value) in m {
        match value {
            Value::Array(items) if key == "units" && items.len() > UNIT_PRINT_CAP => {
                out.push_str(&format!(
                    "{pad}{key}: {} units, list elided (see order histogram)\n",
                    items.len()
                ));
            }
            Value::Object(inner) => {
                out.push_str(&format!("{pad}{key}:\n"));
                render_object(inner, indent + 2, out);
            }
            Value::Array(items) if !is_flat(value) => {
                out.push_str(&format!("{pad}{key}:\n"));
                for item in items {
                    match item {
                        Value::Object(inner) if inner.values().all(is_flat) => {
                            let parts: Vec<String> = inner
                                .iter()
                                .map(|(k, v)| format!("{k}: {}", scalar(v)))
                                .collect();
                            out.push_str(&format!("{pad}  - {}\n", parts.join(", ")));
                        }
                        Value::Object(inner) => {
                            out.push_str(&format!("{pad}  -\n"));
                            render_object(inner, indent + 4, out);
                        }
                        other => out.push_str(&format!("{pad}  - {}\n", scalar(other))),
                    }
                }
            }
            other => out.push_str(&format!("{pad}{key}: {}\n", scalar(other))),
        }
    }
}
