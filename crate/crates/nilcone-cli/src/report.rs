//! Command reports: verdict rows, a command-specific payload, and provenance.

use std::fmt::Write as _;
use std::time::Duration;

use nilcone::fan::{FanReport, Verdict};
use nilcone::hodge::Certificate;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "nilcone";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictRow {
    pub subject: String,
    pub check: String,
    pub verdict: Verdict,
    /// Non-binding rows are informational and do not affect the exit code.
    pub binding: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub input_sha256: String,
    pub tool: String,
    pub tool_version: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(input: &[u8], seed: u64) -> Self {
        let digest = Sha256::digest(input);
        let hex = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Provenance { input_sha256: hex, tool: TOOL.into(), tool_version: TOOL_VERSION.into(), seed }
    }
}

/// Markdown-only section, rendered after the verdict table.
#[derive(Debug, Clone)]
pub struct Section {
    pub heading: String,
    pub body: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub scenario: String,
    pub passed: bool,
    pub verdicts: Vec<VerdictRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<String>,
    pub certificates: serde_json::Value,
    pub notes: Vec<String>,
    pub provenance: Provenance,
    #[serde(skip)]
    pub sections: Vec<Section>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn new(command: &str, scenario: &str, provenance: Provenance) -> Self {
        Report {
            command: command.into(),
            scenario: scenario.into(),
            passed: true,
            verdicts: Vec::new(),
            qualifier: None,
            certificates: serde_json::Value::Null,
            notes: Vec::new(),
            provenance,
            sections: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn push(&mut self, subject: &str, check: &str, verdict: Verdict, binding: bool, detail: impl Into<String>) {
        self.verdicts.push(VerdictRow {
            subject: subject.into(),
            check: check.into(),
            verdict,
            binding,
            detail: detail.into(),
        });
        self.passed = self.verdicts.iter().filter(|v| v.binding).all(|v| v.verdict == Verdict::Pass);
    }

    pub fn push_bool(&mut self, subject: &str, check: &str, ok: bool, detail: impl Into<String>) {
        self.push(subject, check, if ok { Verdict::Pass } else { Verdict::Fail }, true, detail);
    }

    /// One row summarizing a certificate, with the first failing sub-check as detail.
    pub fn push_certificate(&mut self, subject: &str, check: &str, cert: &Certificate) {
        let detail = match cert.first_failure() {
            Some(c) => format!("{}: {}", c.name, c.detail),
            None => format!("{} sub-checks hold", cert.checks.len()),
        };
        self.push_bool(subject, check, cert.holds(), detail);
    }

    pub fn push_fan(&mut self, subject: &str, fan: &FanReport, binding: bool) {
        for v in &fan.verdicts {
            self.push(subject, &v.axiom, v.verdict, binding && v.binding, v.detail.clone());
        }
        for n in &fan.notes {
            if !self.notes.contains(n) {
                self.notes.push(n.clone());
            }
        }
        self.qualifier = Some(fan.qualifier.clone());
    }

    pub fn section(&mut self, heading: impl Into<String>, body: impl Into<String>) {
        self.sections.push(Section { heading: heading.into(), body: body.into() });
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        crate::json::to_string(self)
    }

    pub fn to_markdown(&self) -> String {
        let mut md = String::new();
        let _ = writeln!(md, "# {} `{}`\n", self.command, self.scenario);
        let _ = writeln!(md, "**Result: {}**", if self.passed { "PASS" } else { "FAIL" });
        if let Some(q) = &self.qualifier {
            let _ = writeln!(md, "\nVerdicts are {q}.");
        }
        let _ = writeln!(md, "\n| subject | check | verdict | binding | detail |");
        let _ = writeln!(md, "|---|---|---|---|---|");
        for v in &self.verdicts {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} |",
                cell(&v.subject),
                cell(&v.check),
                verdict_word(v.verdict),
                if v.binding { "yes" } else { "no" },
                cell(&v.detail)
            );
        }
        for s in &self.sections {
            let _ = writeln!(md, "\n## {}\n\n{}", s.heading, s.body.trim_end());
        }
        if !self.notes.is_empty() {
            let _ = writeln!(md, "\n## Notes\n");
            for n in &self.notes {
                let _ = writeln!(md, "- {n}");
            }
        }
        let p = &self.provenance;
        let _ = writeln!(
            md,
            "\n---\n{} {} · input sha256 `{}` · seed {} · {:.1} ms",
            p.tool,
            p.tool_version,
            p.input_sha256,
            p.seed,
            self.elapsed.as_secs_f64() * 1e3
        );
        md
    }
}

pub fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Undecided => "undecided",
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}
