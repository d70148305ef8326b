//! Command processing and checking sessions.
//!
//! A session owns one global environment. Files are checked command by
//! command; `Require m` splices the commands of `m.pv` in place the first
//! time `m` is required, so a session behaves exactly like checking the
//! concatenation of its files.

use std::collections::HashSet;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::kernel::{
    add_definition, add_parameter, check_inductive, infer_type, CommandScope, GlobalEnv, KernelError,
};
use crate::reduce::{normalize, ReductionFlags, DEFAULT_FUEL};
use crate::report::{CommandReport, CoreEdge, ErrorInfo, FileReport, SpanInfo, Status};
use crate::syntax::ast::{Command, CommandKind, Expr, Pos, Span};
use crate::syntax::elab::Elaborator;
use crate::syntax::print::print_term;
use crate::syntax::{parse, ParseError};
use crate::term::{Telescope, Term};
use crate::universe::{Constraint, ConstraintSet, LevelAllocator, Origin, Satisfiability};

#[derive(Clone, Debug)]
pub struct Options {
    pub include_paths: Vec<PathBuf>,
    pub fuel: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { include_paths: Vec::new(), fuel: DEFAULT_FUEL }
    }
}

impl Options {
    pub fn flags(&self) -> ReductionFlags {
        ReductionFlags::with_fuel(self.fuel)
    }
}

#[derive(Clone, Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("universe inconsistency: {}", describe_core(.0))]
    UniverseInconsistency(Vec<Constraint>),
    #[error("cannot find `{0}`")]
    FileNotFound(String),
    #[error("cyclic Require: {}", .0.join(" -> "))]
    RequireCycle(Vec<String>),
    #[error("{file}:{error}")]
    Parse { file: String, error: ParseError },
}

fn describe_core(core: &[Constraint]) -> String {
    core.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

impl CommandError {
    pub fn kind(&self) -> &'static str {
        match self {
            CommandError::Kernel(e) => e.kind(),
            CommandError::UniverseInconsistency(_) => "UniverseInconsistency",
            CommandError::FileNotFound(_) => "FileNotFound",
            CommandError::RequireCycle(_) => "RequireCycle",
            CommandError::Parse { .. } => "ParseError",
        }
    }

    pub fn info(&self) -> ErrorInfo {
        let core = match self {
            CommandError::UniverseInconsistency(core) => Some(core.iter().map(CoreEdge::from).collect()),
            _ => None,
        };
        ErrorInfo { kind: self.kind().to_string(), message: self.to_string(), core }
    }
}

/// Failure to read a file named on the command line.
#[derive(Debug, Error)]
#[error("{path}: {source}")]
pub struct DriverError {
    pub path: String,
    #[source]
    pub source: io::Error,
}

/// Result of one successfully processed command.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub env: GlobalEnv,
    /// What `Check` and `Eval` print.
    pub output: Option<String>,
}

/// Checks one command against `env`. Declarations return the extended
/// environment; `Check` and `Eval` leave it unchanged. `Require` is handled
/// by [`Session`] and is a no-op here.
pub fn process(
    env: &GlobalEnv,
    cmd: &Command,
    file: &Arc<str>,
    flags: ReductionFlags,
) -> Result<Outcome, CommandError> {
    let site = Arc::new(Origin::user(file.clone(), cmd.span.start.line, cmd.span.start.column));
    let mut alloc = env.allocator();
    let elab = |alloc: &mut LevelAllocator, e: &Expr| {
        Elaborator::new(env, alloc, file.clone(), site.clone(), flags).closed(e)
    };

    let next = match &cmd.kind {
        CommandKind::Parameter { name, ty } | CommandKind::Axiom { name, ty } => {
            let ty = elab(&mut alloc, ty)?;
            let mut scope = CommandScope::new(&mut alloc, site.clone(), flags);
            add_parameter(env, &mut scope, name.as_str().into(), ty)?
        }
        CommandKind::Definition { name, ty, body } => {
            let ty = ty.as_ref().map(|ty| elab(&mut alloc, ty)).transpose()?;
            let body = elab(&mut alloc, body)?;
            let mut scope = CommandScope::new(&mut alloc, site.clone(), flags);
            add_definition(env, &mut scope, name.as_str().into(), ty, body)?
        }
        CommandKind::Theorem { name, ty, body } => {
            let ty = elab(&mut alloc, ty)?;
            let body = elab(&mut alloc, body)?;
            let mut scope = CommandScope::new(&mut alloc, site.clone(), flags);
            add_definition(env, &mut scope, name.as_str().into(), Some(ty), body)?
        }
        CommandKind::Inductive(decl) => {
            let desc = Elaborator::new(env, &mut alloc, file.clone(), site.clone(), flags).inductive(decl)?;
            let mut scope = CommandScope::new(&mut alloc, site.clone(), flags);
            check_inductive(env, &mut scope, desc)?
        }
        CommandKind::Record(decl) => {
            let desc = Elaborator::new(env, &mut alloc, file.clone(), site.clone(), flags).record(decl)?;
            let mut scope = CommandScope::new(&mut alloc, site.clone(), flags);
            check_inductive(env, &mut scope, desc)?
        }
        CommandKind::Check(e) | CommandKind::Eval(e) => {
            let t = elab(&mut alloc, e)?;
            let mut scope = CommandScope::new(&mut alloc, site.clone(), flags);
            let typing = infer_type(env, &mut scope, &Telescope::new(), &t)?;
            // Nothing is committed, but the term must still be typable
            // without breaking the universe constraints.
            let mut trial = env.constraints().clone();
            trial.add_constraints(typing.constraints);
            ensure_satisfiable(&trial)?;
            let shown = if matches!(cmd.kind, CommandKind::Eval(_)) {
                let nf: Term = normalize(env, &t, flags).map_err(KernelError::from)?;
                print_term(&nf, &[], Some(env))
            } else {
                print_term(&typing.ty, &[], Some(env))
            };
            return Ok(Outcome { env: env.clone(), output: Some(shown) });
        }
        CommandKind::Require(_) => return Ok(Outcome { env: env.clone(), output: None }),
    };

    let mut next = next;
    next.commit_levels(&alloc.take_issued(), alloc.next_id());
    ensure_satisfiable(next.constraints())?;
    Ok(Outcome { env: next, output: None })
}

fn ensure_satisfiable(constraints: &ConstraintSet) -> Result<(), CommandError> {
    match constraints.satisfiable() {
        Satisfiability::Sat(_) => Ok(()),
        Satisfiability::Unsat(core) => Err(CommandError::UniverseInconsistency(core)),
    }
}

/// One sequential checking session over a shared environment.
pub struct Session {
    env: GlobalEnv,
    options: Options,
    loaded: HashSet<PathBuf>,
}

impl Session {
    pub fn new(options: Options) -> Self {
        Session { env: GlobalEnv::new(), options, loaded: HashSet::new() }
    }

    pub fn env(&self) -> &GlobalEnv {
        &self.env
    }

    /// Checks a file. Only an unreadable top-level file is an `Err`;
    /// everything else is recorded in the report.
    pub fn check_file(&mut self, path: &Path) -> Result<FileReport, DriverError> {
        let io_err = |source| DriverError { path: path.display().to_string(), source };
        let text = std::fs::read_to_string(path).map_err(io_err)?;
        let canonical = path.canonicalize().map_err(io_err)?;
        let label = path.display().to_string();
        let dir = canonical.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(self.check_text(&label, Some(&canonical), &dir, &text))
    }

    /// Checks source text as if it were the file `label`; `Require` looks
    /// for modules in `dir` and then on the include path.
    pub fn check_source(&mut self, label: &str, dir: &Path, text: &str) -> FileReport {
        self.check_text(label, None, dir, text)
    }

    fn check_text(&mut self, label: &str, canonical: Option<&Path>, dir: &Path, text: &str) -> FileReport {
        let started = Instant::now();
        let mut commands = Vec::new();
        match parse(text) {
            Ok(cmds) => {
                let mut stack = Vec::new();
                if let Some(c) = canonical {
                    self.loaded.insert(c.to_path_buf());
                    stack.push(c.to_path_buf());
                }
                self.run(label.into(), dir, &cmds, &mut stack, &mut commands);
            }
            Err(error) => {
                let pos = Pos { line: error.line, column: error.column };
                let err = CommandError::Parse { file: label.to_string(), error };
                commands.push(CommandReport {
                    name: None,
                    kind: "Parse".to_string(),
                    status: Status::Error,
                    error: Some(err.info()),
                    span: SpanInfo { file: label.to_string(), start: pos, end: pos },
                    output: None,
                });
            }
        }
        let constraints = self.env.constraints();
        FileReport {
            file: label.to_string(),
            commands,
            levels: constraints.level_count(),
            constraints: constraints.len(),
            satisfiable: constraints.satisfiable().is_sat(),
            ms: started.elapsed().as_millis() as u64,
        }
    }

    /// Runs `cmds` in order. Returns `false` once a command fails, after
    /// marking the rest of `cmds` as skipped.
    fn run(
        &mut self,
        file: Arc<str>,
        dir: &Path,
        cmds: &[Command],
        stack: &mut Vec<PathBuf>,
        out: &mut Vec<CommandReport>,
    ) -> bool {
        for (i, cmd) in cmds.iter().enumerate() {
            let ok = match &cmd.kind {
                CommandKind::Require(module) => self.require(&file, dir, cmd, module, stack, out),
                _ => {
                    let result = process(&self.env, cmd, &file, self.options.flags());
                    let ok = result.is_ok();
                    let output = match result {
                        Ok(outcome) => {
                            self.env = outcome.env;
                            Ok(outcome.output)
                        }
                        Err(e) => Err(e),
                    };
                    out.push(entry(&file, cmd, output));
                    ok
                }
            };
            if !ok {
                for rest in &cmds[i + 1..] {
                    out.push(CommandReport { status: Status::Skipped, ..entry(&file, rest, Ok(None)) });
                }
                return false;
            }
        }
        true
    }

    fn require(
        &mut self,
        file: &Arc<str>,
        dir: &Path,
        cmd: &Command,
        module: &str,
        stack: &mut Vec<PathBuf>,
        out: &mut Vec<CommandReport>,
    ) -> bool {
        let fail = |out: &mut Vec<CommandReport>, e: CommandError| {
            out.push(entry(file, cmd, Err(e)));
            false
        };
        let Some((path, canonical)) = self.resolve(dir, module) else {
            return fail(out, CommandError::FileNotFound(format!("{module}.pv")));
        };
        if let Some(pos) = stack.iter().position(|p| *p == canonical) {
            let mut chain: Vec<String> = stack[pos..].iter().map(|p| p.display().to_string()).collect();
            chain.push(canonical.display().to_string());
            return fail(out, CommandError::RequireCycle(chain));
        }
        if self.loaded.contains(&canonical) {
            out.push(entry(file, cmd, Ok(None)));
            return true;
        }
        let Ok(text) = std::fs::read_to_string(&canonical) else {
            return fail(out, CommandError::FileNotFound(path.display().to_string()));
        };
        let label = path.display().to_string();
        let cmds = match parse(&text) {
            Ok(cmds) => cmds,
            Err(error) => return fail(out, CommandError::Parse { file: label, error }),
        };
        out.push(entry(file, cmd, Ok(None)));
        self.loaded.insert(canonical.clone());
        stack.push(canonical.clone());
        let sub_dir = canonical.parent().map(Path::to_path_buf).unwrap_or_default();
        let ok = self.run(label.into(), &sub_dir, &cmds, stack, out);
        stack.pop();
        ok
    }

    /// Finds `module.pv` next to the requiring file, then on the include path.
    fn resolve(&self, dir: &Path, module: &str) -> Option<(PathBuf, PathBuf)> {
        let file_name = format!("{module}.pv");
        std::iter::once(dir)
            .chain(self.options.include_paths.iter().map(PathBuf::as_path))
            .map(|d| d.join(&file_name))
            .find_map(|p| {
                let canonical = p.canonicalize().ok()?;
                canonical.is_file().then(|| (relative_display(&p), canonical))
            })
    }
}

/// Shortens absolute paths under the working directory for display.
fn relative_display(p: &Path) -> PathBuf {
    std::env::current_dir()
        .ok()
        .and_then(|cwd| p.strip_prefix(&cwd).ok().map(Path::to_path_buf))
        .unwrap_or_else(|| p.to_path_buf())
}

fn entry(file: &str, cmd: &Command, result: Result<Option<String>, CommandError>) -> CommandReport {
    let span = span_info(file, cmd.span);
    let (status, error, output) = match result {
        Ok(output) => (Status::Ok, None, output),
        Err(e) => (Status::Error, Some(e.info()), None),
    };
    CommandReport {
        name: cmd.kind.name().map(str::to_string),
        kind: cmd.kind.keyword().to_string(),
        status,
        error,
        span,
        output,
    }
}

fn span_info(file: &str, span: Span) -> SpanInfo {
    SpanInfo { file: file.to_string(), start: span.start, end: span.end }
}

/// Checks `paths` in order in one session.
pub fn check_files(paths: &[PathBuf], options: Options) -> Result<Vec<FileReport>, DriverError> {
    let mut session = Session::new(options);
    paths.iter().map(|p| session.check_file(p)).collect()
}
