use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use unital::certificate::{CheckRecord, Verdict};
use unital::pattern::io::to_json;
use unital::Certificate;

pub const SCHEMA_VERSION: u32 = 1;

/// What a subcommand leaves behind: the certificate plus any report data.
#[derive(Debug, Serialize)]
pub struct RunCertificate {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub report: serde_json::Value,
}

impl RunCertificate {
    pub fn new(command: &'static str, config: &impl Serialize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            config: serde_json::to_value(config).expect("config serializes"),
            passed: true,
            checks: Vec::new(),
            report: serde_json::Value::Null,
        }
    }

    pub fn add(&mut self, cert: Certificate) {
        self.checks.extend(cert.checks);
        self.passed = self.checks.iter().all(CheckRecord::passed);
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.add(Certificate::from_iter([record]));
    }

    pub fn report(&mut self, key: &str, value: impl Serialize) {
        if self.report.is_null() {
            self.report = serde_json::json!({});
        }
        self.report[key] = serde_json::to_value(value).expect("report serializes");
    }
}

/// Turns a failed record into an informational one, noting why.
pub fn relax(mut record: CheckRecord) -> CheckRecord {
    if record.verdict == Verdict::Fail {
        record.verdict = Verdict::Info;
        record
            .tallies
            .insert("relaxed".into(), serde_json::Value::Bool(true));
    }
    record
}

/// Wall-clock per phase, kept out of the certificate so reruns compare equal.
#[derive(Debug, Default, Serialize)]
pub struct Timings {
    phases: Vec<(String, f64)>,
    #[serde(skip)]
    last: Option<Instant>,
}

impl Timings {
    pub fn start() -> Self {
        Self {
            phases: Vec::new(),
            last: Some(Instant::now()),
        }
    }

    pub fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        let secs = self.last.map_or(0.0, |t| (now - t).as_secs_f64());
        self.phases.push((phase.to_string(), secs));
        self.last = Some(now);
    }
}

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn text(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        self.text(name, &to_json(value))
    }

    /// Writes `certificate.json` and `timings.json` and prints a summary.
    pub fn finish(&self, cert: &RunCertificate, timings: &Timings) -> Result<bool> {
        self.json("certificate.json", cert)?;
        self.json("timings.json", timings)?;
        for record in &cert.checks {
            let tag = match record.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Info => "INFO",
            };
            eprintln!("{tag} {}", record.check);
        }
        eprintln!(
            "{} -> {}",
            if cert.passed { "all checks passed" } else { "some checks failed" },
            self.dir.join("certificate.json").display()
        );
        Ok(cert.passed)
    }
}
