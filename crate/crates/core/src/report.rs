//! Per-file check reports, as human-readable text or JSON.

use std::fmt::Write as _;

use serde::Serialize;

use crate::syntax::Pos;
use crate::universe::Constraint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
    /// Not checked because an earlier command in the file failed.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanInfo {
    pub file: String,
    pub start: Pos,
    pub end: Pos,
}

/// One edge of an unsatisfiable core, with both endpoints' origins and the
/// command that introduced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreEdge {
    pub lo: String,
    pub rel: String,
    pub hi: String,
    pub site: Option<String>,
}

impl From<&Constraint> for CoreEdge {
    fn from(c: &Constraint) -> Self {
        CoreEdge {
            lo: format!("{} ({})", c.lo, c.lo.origin()),
            rel: c.rel.symbol().to_string(),
            hi: format!("{} ({})", c.hi, c.hi.origin()),
            site: c.site.as_ref().map(|s| s.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core: Option<Vec<CoreEdge>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommandReport {
    /// Declared or required name; absent for `Check`, `Eval` and parse errors.
    pub name: Option<String>,
    pub kind: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub span: SpanInfo,
    /// What `Check` and `Eval` print. Only shown in the text report.
    #[serde(skip)]
    pub output: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileReport {
    pub file: String,
    pub commands: Vec<CommandReport>,
    /// Universe levels in the environment after this file.
    pub levels: usize,
    pub constraints: usize,
    pub satisfiable: bool,
    pub ms: u64,
}

impl FileReport {
    pub fn is_ok(&self) -> bool {
        self.commands.iter().all(|c| c.status == Status::Ok)
    }

    pub fn first_error(&self) -> Option<&CommandReport> {
        self.commands.iter().find(|c| c.status == Status::Error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.commands {
            let _ = write!(out, "{}:{}:{}: {}", c.span.file, c.span.start.line, c.span.start.column, c.kind);
            if let Some(name) = &c.name {
                let _ = write!(out, " {name}");
            }
            match (&c.status, &c.error) {
                (Status::Error, Some(e)) => {
                    let _ = writeln!(out, ": error [{}] {}", e.kind, e.message);
                    for edge in e.core.iter().flatten() {
                        let _ = write!(out, "    {} {} {}", edge.lo, edge.rel, edge.hi);
                        if let Some(site) = &edge.site {
                            let _ = write!(out, "  from command at {site}");
                        }
                        out.push('\n');
                    }
                }
                (Status::Skipped, _) => out.push_str(": skipped\n"),
                _ => out.push_str(": ok\n"),
            }
            if let Some(text) = &c.output {
                let _ = writeln!(out, "  {text}");
            }
        }
        let count = |s: Status| self.commands.iter().filter(|c| c.status == s).count();
        let _ = writeln!(
            out,
            "{}: {} ok, {} failed, {} skipped; {} levels, {} constraints, {}; {} ms",
            self.file,
            count(Status::Ok),
            count(Status::Error),
            count(Status::Skipped),
            self.levels,
            self.constraints,
            if self.satisfiable { "satisfiable" } else { "unsatisfiable" },
            self.ms,
        );
        out
    }
}
