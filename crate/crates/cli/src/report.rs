//! The JSON envelope every analysis command prints.

use std::time::Duration;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct RunReport {
    pub command: &'static str,
    pub input: Value,
    pub parameters: Value,
    pub results: Value,
    pub elapsed: Duration,
    pub engines: Value,
}

impl RunReport {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "input": self.input,
            "parameters": self.parameters,
            "results": self.results,
            "timing": { "seconds": self.elapsed.as_secs_f64() },
            "versions": { "nhyp": VERSION, "engines": self.engines },
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("plain JSON");
                s.push('\n');
                s
            }
            Format::Table => self.table(),
        }
    }

    fn table(&self) -> String {
        let mut out = format!("command      {}\n", self.command);
        if let Some(digest) = self.input.get("sha256").and_then(Value::as_str) {
            out.push_str(&format!("input        {digest}\n"));
        }
        let empty = Map::new();
        for (k, v) in self.results.as_object().unwrap_or(&empty) {
            let shown = match v {
                Value::String(s) => s.clone(),
                Value::Null => "-".into(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k:<12} {shown}\n"));
        }
        out.push_str(&format!("elapsed      {:.3}s\n", self.elapsed.as_secs_f64()));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}
