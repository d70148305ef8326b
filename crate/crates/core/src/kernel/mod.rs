//! The typing judgment and declaration checking.

pub mod env;
pub mod inductive;
mod typing;

use std::sync::Arc;

use thiserror::Error;

pub use env::{
    ConstantInfo, ConstructorDecl, Decl, GlobalEnv, InductiveDescriptor, InductiveInfo,
};
pub use inductive::{check_inductive, eliminator_type};
pub use typing::Checker;

use crate::reduce::{ReduceError, ReductionFlags};
use crate::term::{Name, Telescope, Term};
use crate::universe::{Constraint, LevelAllocator, Origin};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("unbound variable #{0}")]
    UnboundVariable(usize),
    #[error("`{term}` has type `{ty}`, which is not a function type")]
    NotAFunction { term: String, ty: String },
    #[error("`{term}` has type `{ty}`, which is not a sort")]
    DomainNotASort { term: String, ty: String },
    #[error("`{term}` has type `{inferred}` but is expected to have type `{expected}`")]
    TypeMismatch { term: String, inferred: String, expected: String },
    #[error("constructor `{ctor}` is not strictly positive: {occurrence}")]
    PositivityViolation { ctor: String, occurrence: String },
    #[error("{0}")]
    ArityMismatch(String),
    #[error("`{0}` is already defined")]
    NameClash(String),
    #[error(transparent)]
    Reduction(#[from] ReduceError),
}

impl KernelError {
    /// Stable error-kind tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            KernelError::UnboundName(_) => "UnboundName",
            KernelError::UnboundVariable(_) => "UnboundVariable",
            KernelError::NotAFunction { .. } => "NotAFunction",
            KernelError::DomainNotASort { .. } => "DomainNotASort",
            KernelError::TypeMismatch { .. } => "TypeMismatch",
            KernelError::PositivityViolation { .. } => "PositivityViolation",
            KernelError::ArityMismatch(_) => "ArityMismatch",
            KernelError::NameClash(_) => "NameClash",
            KernelError::Reduction(ReduceError::FuelExhausted(_)) => "FuelExhausted",
        }
    }
}

/// What one command needs while talking to the kernel: the level allocator,
/// the source position to attribute synthesized levels and constraints to,
/// and the reduction budget.
pub struct CommandScope<'a> {
    pub alloc: &'a mut LevelAllocator,
    pub site: Arc<Origin>,
    pub flags: ReductionFlags,
}

impl<'a> CommandScope<'a> {
    pub fn new(alloc: &'a mut LevelAllocator, site: Arc<Origin>, flags: ReductionFlags) -> Self {
        CommandScope { alloc, site, flags }
    }

    pub fn checker<'s>(&'s mut self, env: &'s GlobalEnv) -> Checker<'s> {
        Checker::new(env, self.alloc, self.site.clone(), self.flags)
    }
}

#[derive(Clone, Debug)]
pub struct TypingResult {
    pub ty: Term,
    pub constraints: Vec<Constraint>,
}

pub fn infer_type(
    env: &GlobalEnv,
    scope: &mut CommandScope<'_>,
    ctx: &Telescope,
    t: &Term,
) -> Result<TypingResult, KernelError> {
    let mut checker = scope.checker(env);
    let mut ctx = ctx.clone();
    let ty = checker.infer(&mut ctx, t)?;
    Ok(TypingResult { ty, constraints: checker.into_constraints() })
}

pub fn check_type(
    env: &GlobalEnv,
    scope: &mut CommandScope<'_>,
    ctx: &Telescope,
    t: &Term,
    expected: &Term,
) -> Result<Vec<Constraint>, KernelError> {
    let mut checker = scope.checker(env);
    let mut ctx = ctx.clone();
    checker.check(&mut ctx, t, expected)?;
    Ok(checker.into_constraints())
}

fn ensure_fresh(env: &GlobalEnv, name: &str) -> Result<(), KernelError> {
    if env.is_defined(name) {
        Err(KernelError::NameClash(name.to_string()))
    } else {
        Ok(())
    }
}

/// Declares `name : ty` without a body.
pub fn add_parameter(
    env: &GlobalEnv,
    scope: &mut CommandScope<'_>,
    name: Name,
    ty: Term,
) -> Result<GlobalEnv, KernelError> {
    ensure_fresh(env, &name)?;
    let mut checker = scope.checker(env);
    checker.sort_of(&mut Telescope::new(), &ty)?;
    let delta = checker.into_constraints();
    let mut out = env.clone();
    out.add_constraints(delta);
    out.push_constant(ConstantInfo { name, ty, body: None });
    Ok(out)
}

/// Checks `body` (against `ty` when given) and extends the environment.
pub fn add_definition(
    env: &GlobalEnv,
    scope: &mut CommandScope<'_>,
    name: Name,
    ty: Option<Term>,
    body: Term,
) -> Result<GlobalEnv, KernelError> {
    ensure_fresh(env, &name)?;
    let mut checker = scope.checker(env);
    let mut ctx = Telescope::new();
    let ty = match ty {
        Some(ty) => {
            checker.sort_of(&mut ctx, &ty)?;
            checker.check(&mut ctx, &body, &ty)?;
            ty
        }
        None => checker.infer(&mut ctx, &body)?,
    };
    let delta = checker.into_constraints();
    let mut out = env.clone();
    out.add_constraints(delta);
    out.push_constant(ConstantInfo { name, ty, body: Some(body) });
    Ok(out)
}
