use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use deuber_core::json::{canonical, content_hash, sha256_hex};
use deuber_core::{Error, ENGINE_VERSION};
use serde_json::{json, Value};

use crate::Global;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VERIFY, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Verification(_) | Error::InvalidCertificate(_) => EXIT_VERIFY,
            Error::Budget(_) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(format!("invalid JSON: {e}"))
    }
}

pub type CmdResult = Result<Status, Failure>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerificationFailed,
    BudgetExhausted,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => EXIT_OK,
            Status::VerificationFailed => EXIT_VERIFY,
            Status::BudgetExhausted => EXIT_BUDGET,
        }
    }
}

struct Written {
    path: PathBuf,
    kind: String,
    sha256: String,
}

/// One command invocation: collects inputs and artifacts, prints the
/// summary and appends the run record.
pub struct Session {
    pub global: Global,
    argv: Vec<String>,
    started: Instant,
    inputs: Vec<(String, String)>,
    written: Vec<Written>,
    lines: Vec<String>,
}

impl Session {
    pub fn new(global: Global, argv: &[String]) -> Self {
        Session {
            global,
            argv: argv.to_vec(),
            started: Instant::now(),
            inputs: Vec::new(),
            written: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn input(&mut self, name: &str, hash: String) {
        self.inputs.push((name.to_string(), hash));
    }

    pub fn read_input(&mut self, name: &str, path: &std::path::Path) -> Result<Value, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        self.input(name, sha256_hex(&bytes));
        Ok(serde_json::from_slice(&bytes)?)
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    /// Write `out/<name>` as pretty JSON.
    pub fn artifact(&mut self, name: &str, doc: &Value) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.global.out)?;
        let path = self.global.out.join(name);
        let mut text = serde_json::to_string_pretty(doc)?;
        text.push('\n');
        fs::write(&path, &text)?;
        self.written.push(Written {
            path: path.clone(),
            kind: doc.get("kind").and_then(Value::as_str).unwrap_or("").to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(path)
    }

    fn ledger_path(&self) -> PathBuf {
        self.global.ledger.clone().unwrap_or_else(|| self.global.out.join("ledger.ndjson"))
    }

    /// `subcommand words` followed by `--flag value` pairs sorted by flag.
    fn canonical_args(&self) -> Value {
        let mut words = Vec::new();
        let mut flags: Vec<(String, Value)> = Vec::new();
        let mut i = 0;
        while i < self.argv.len() {
            let a = &self.argv[i];
            if let Some(flag) = a.strip_prefix("--") {
                if let Some((k, v)) = flag.split_once('=') {
                    flags.push((k.to_string(), Value::String(v.to_string())));
                } else if self.argv.get(i + 1).is_some_and(|n| !n.starts_with("--")) {
                    flags.push((flag.to_string(), Value::String(self.argv[i + 1].clone())));
                    i += 1;
                } else {
                    flags.push((flag.to_string(), Value::Bool(true)));
                }
            } else {
                words.push(Value::String(a.clone()));
            }
            i += 1;
        }
        flags.sort_by(|a, b| a.0.cmp(&b.0));
        json!({
            "command": words,
            "flags": flags.into_iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        })
    }

    fn append_record(&self, exit: u8, error: Option<&str>) {
        let record = json!({
            "args": self.canonical_args(),
            "inputs": self.inputs.iter().map(|(n, h)| json!({"name": n, "sha256": h})).collect::<Vec<_>>(),
            "artifacts": self.written.iter().map(|w| json!({
                "file": w.path.display().to_string(),
                "kind": w.kind,
                "sha256": w.sha256,
            })).collect::<Vec<_>>(),
            "exit": exit,
            "error": error,
            "wall-ms": self.started.elapsed().as_millis() as u64,
            "engine-version": ENGINE_VERSION,
            "timestamp": chrono::Utc::now().to_rfc3339(),
        });
        let record = json!({"sha256": content_hash(&record), "record": record});
        let path = self.ledger_path();
        if let Some(dir) = path.parent() {
            let _ = fs::create_dir_all(dir);
        }
        let appended = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .and_then(|mut f| writeln!(f, "{}", canonical(&record)));
        if let Err(e) = appended {
            eprintln!("warning: could not append to {}: {e}", path.display());
        }
    }

    pub fn finish(self, status: Status) -> u8 {
        if !self.global.quiet {
            for l in &self.lines {
                println!("{l}");
            }
        }
        let code = status.code();
        self.append_record(code, None);
        code
    }

    pub fn finish_error(self, code: u8, message: &str) -> u8 {
        self.append_record(code, Some(message));
        code
    }
}
