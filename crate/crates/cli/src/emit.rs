//! Rendering of run artifacts. Everything here is a pure function of the artifact,
//! so equal runs give equal bytes.

use serde_json::{json, Value};
use tracelab_core::selftest::SCHEMA;

/// A rectangular table, preferred over the flattened form for CSV output.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Artifact {
    pub command: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub result: Value,
    pub table: Option<Table>,
}

impl Artifact {
    pub fn new(command: &'static str, seed: u64, passed: bool, result: Value) -> Self {
        Artifact {
            command,
            seed,
            passed,
            result,
            table: None,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn envelope(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "seed": self.seed,
            "command": self.command,
            "passed": self.passed,
            "result": self.result,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.envelope()).expect("artifact serializes");
        s.push('\n');
        s
    }

    /// `#` header lines carrying schema, seed and verdict, then either the table
    /// or `key,value` rows of the flattened result.
    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut out = format!(
            "# schema: {SCHEMA}\n# seed: {}\n# command: {}\n# passed: {}\n",
            self.seed, self.command, self.passed
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
            }
            None => {
                w.write_record(["key", "value"])?;
                let mut rows = Vec::new();
                flatten("", &self.result, &mut rows);
                for (k, v) in rows {
                    w.write_record([k, v])?;
                }
            }
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
