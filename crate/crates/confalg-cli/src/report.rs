//! Deterministic result reports.
//!
//! Every command produces one [`Report`]: a typed summary rendered either as
//! aligned text or as pretty JSON.  Rendering is byte-deterministic — all
//! polynomial strings are canonical and re-parse to the same values — and the
//! process exit code follows the report: 0 when the verdict is `pass`, 1 when
//! it is `fail` (a counterexample or failed check), while input errors are
//! reported on stderr with exit code 2 before a report exists.

use std::io::Write;

use serde::Serialize;

use confalg::calgebra::CheckReport;

/// Write to stdout, tolerating a closed pipe (e.g. `confalg ... | head`).
pub fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

/// One command's complete result.
#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub subject: String,
    /// Ordered key/value context lines (kind, op, weight, ...).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<(String, String)>,
    /// Individual checks that ran, in order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckLine>,
    /// The first failing check's witness, if any check failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Constraint-system summary (search command only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Solutions>,
    pub verdict: String,
}

#[derive(Serialize)]
pub struct CheckLine {
    pub id: String,
    pub verdict: String,
}

#[derive(Serialize)]
pub struct Counterexample {
    pub check: String,
    /// Basis names of the witnessing tuple.
    pub witness: Vec<String>,
    /// Nonzero residual components as `(slot, canonical polynomial)` pairs.
    pub residual: Vec<(String, String)>,
}

#[derive(Serialize)]
pub struct Solutions {
    pub unknowns: usize,
    pub equations: usize,
    /// Unknowns no equation constrains; any value works.
    pub free: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<u128>,
    /// Each verified grid point as ordered `(unknown, value)` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<(String, String)>>>,
}

impl Report {
    pub fn new(command: &str, subject: &str) -> Report {
        Report {
            command: command.to_string(),
            subject: subject.to_string(),
            details: Vec::new(),
            checks: Vec::new(),
            counterexample: None,
            solutions: None,
            verdict: "pass".to_string(),
        }
    }

    pub fn detail(&mut self, key: &str, value: impl Into<String>) {
        self.details.push((key.to_string(), value.into()));
    }

    pub fn pass(&self) -> bool {
        self.verdict == "pass"
    }

    /// Record one standalone check outcome (no witness attached).
    pub fn push_check(&mut self, id: impl Into<String>, ok: bool) {
        self.checks.push(CheckLine {
            id: id.into(),
            verdict: if ok { "pass" } else { "fail" }.to_string(),
        });
        if !ok {
            self.verdict = "fail".to_string();
        }
    }

    /// Fold a [`CheckReport`] into the report: one line per checked law
    /// (ids prefixed with `prefix:` when a prefix is given) and, on the
    /// first failure overall, the counterexample.
    pub fn absorb(&mut self, prefix: &str, report: &CheckReport) {
        let qualify = |id: &str| {
            if prefix.is_empty() {
                id.to_string()
            } else {
                format!("{prefix}:{id}")
            }
        };
        let failing = report.failure.as_ref().map(|f| f.axiom_id.clone());
        for id in &report.axioms_checked {
            let ok = failing.as_deref() != Some(id.as_str());
            self.checks.push(CheckLine {
                id: qualify(id),
                verdict: if ok { "pass" } else { "fail" }.to_string(),
            });
        }
        if let Some(violation) = &report.failure {
            self.verdict = "fail".to_string();
            if self.counterexample.is_none() {
                self.counterexample = Some(Counterexample {
                    check: qualify(&violation.axiom_id),
                    witness: violation.witness_names.clone(),
                    residual: violation
                        .residual
                        .iter()
                        .map(|(slot, poly)| (slot.clone(), poly.to_string()))
                        .collect(),
                });
            }
        }
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |key: &str, value: &str| {
            out.push_str(&format!("{key:<10} {value}\n"));
        };
        kv("command", &self.command);
        kv("subject", &self.subject);
        for (key, value) in &self.details {
            kv(key, value);
        }
        for check in &self.checks {
            kv("check", &format!("{:<44} {}", check.id, check.verdict));
        }
        if let Some(ce) = &self.counterexample {
            out.push_str("counterexample\n");
            out.push_str(&format!("  check    {}\n", ce.check));
            out.push_str(&format!("  witness  ({})\n", ce.witness.join(", ")));
            for (slot, poly) in &ce.residual {
                out.push_str(&format!("  residual {slot}: {poly}\n"));
            }
        }
        if let Some(sol) = &self.solutions {
            let mut kv = |key: &str, value: &str| {
                out.push_str(&format!("{key:<10} {value}\n"));
            };
            kv("unknowns", &sol.unknowns.to_string());
            kv("equations", &sol.equations.to_string());
            let free = if sol.free.is_empty() { "(none)".to_string() } else { sol.free.join(", ") };
            kv("free", &free);
            if let Some(candidates) = sol.candidates {
                kv("candidates", &candidates.to_string());
            }
            if let Some(points) = &sol.points {
                kv("points", &points.len().to_string());
                for point in points {
                    let line: Vec<String> =
                        point.iter().map(|(name, value)| format!("{name}={value}")).collect();
                    kv("point", &line.join(", "));
                }
            }
        }
        out.push_str(&format!("{:<10} {}\n", "verdict", self.verdict));
        out
    }

    /// Print to stdout in the requested mode and return the exit code.
    /// A closed pipe downstream stops the output but keeps the verdict code.
    pub fn print(&self, json: bool) -> i32 {
        let text = if json {
            format!("{}\n", self.render_json())
        } else {
            self.render_text()
        };
        emit(&text);
        if self.pass() {
            0
        } else {
            1
        }
    }
}
