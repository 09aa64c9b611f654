use std::process::ExitCode;

use loccforge::Tolerances;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotFound,
    Error,
}

impl Status {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Status::Pass | Status::NotFound => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(1),
            Status::Error => ExitCode::from(2),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotFound => "not-found",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub payload: Value,
    pub tolerances: Value,
    pub version: String,
}

impl Report {
    pub fn new(command: &str, status: Status, payload: Value, tol: Tolerances<f64>) -> Self {
        Self {
            command: command.to_string(),
            status,
            payload,
            tolerances: json!({ "eq": tol.eq, "nonzero": tol.nonzero }),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn error(command: &str, message: String, tol: Tolerances<f64>) -> Self {
        Self::new(command, Status::Error, json!({ "message": message }), tol)
    }

    pub fn render(&self, json_format: bool) -> String {
        if json_format {
            return serde_json::to_string_pretty(self).expect("report serializes");
        }
        let mut lines = vec![
            format!("command: {}", self.command),
            format!("status: {}", self.status.label()),
            format!("version: {}", self.version),
        ];
        flatten("tolerances", &self.tolerances, &mut lines);
        flatten("", &self.payload, &mut lines);
        lines.join("\n")
    }
}

fn is_leafy(v: &Value) -> bool {
    !matches!(v, Value::Object(_)) && !matches!(v, Value::Array(a) if a.iter().any(|x| x.is_object()))
}

/// One `path = value` line per scalar; arrays without objects stay inline.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(items) if !is_leafy(v) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix} = {s}")),
        other => out.push(format!("{prefix} = {other}")),
    }
}
