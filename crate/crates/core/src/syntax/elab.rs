//! Elaboration of surface syntax into kernel terms.
//!
//! Names resolve to the innermost local binder first, then to globals. Each
//! occurrence of `Type` gets a fresh level whose origin is its source
//! position. `a = b` becomes `eq A a b` where `A` is the inferred type of `a`.

use std::sync::Arc;

use super::ast::*;
use super::print::print_expr;
use crate::kernel::env::{ConstructorDecl, GlobalEnv, InductiveDescriptor};
use crate::kernel::{Checker, KernelError};
use crate::reduce::ReductionFlags;
use crate::term::{lift, Name, Sort, Telescope, Term};
use crate::universe::{LevelAllocator, Origin};

pub struct Elaborator<'a> {
    env: &'a GlobalEnv,
    alloc: &'a mut LevelAllocator,
    file: Arc<str>,
    site: Arc<Origin>,
    flags: ReductionFlags,
}

impl<'a> Elaborator<'a> {
    pub fn new(
        env: &'a GlobalEnv,
        alloc: &'a mut LevelAllocator,
        file: Arc<str>,
        site: Arc<Origin>,
        flags: ReductionFlags,
    ) -> Self {
        Elaborator { env, alloc, file, site, flags }
    }

    pub fn closed(&mut self, e: &Expr) -> Result<Term, KernelError> {
        self.term(&mut Telescope::new(), e)
    }

    pub fn term(&mut self, ctx: &mut Telescope, e: &Expr) -> Result<Term, KernelError> {
        match &e.kind {
            ExprKind::Ident(name) => self.resolve(ctx, name),
            ExprKind::Prop => Ok(Term::prop()),
            ExprKind::Type => {
                let origin = Origin::user(self.file.clone(), e.span.start.line, e.span.start.column);
                Ok(Term::ty(self.alloc.fresh(Arc::new(origin))))
            }
            ExprKind::App(f, a) => Ok(Term::app(self.term(ctx, f)?, self.term(ctx, a)?)),
            ExprKind::Arrow(a, b) => {
                let a = self.term(ctx, a)?;
                let b = self.term(ctx, b)?;
                Ok(Term::arrow(a, b))
            }
            ExprKind::Equals(a, b) => {
                let ta = self.term(ctx, a)?;
                let tb = self.term(ctx, b)?;
                // Constraints from this inference are discarded: the kernel
                // re-derives whatever the resulting `eq` application needs.
                let mut checker = Checker::new(self.env, &mut *self.alloc, self.site.clone(), self.flags);
                let ty = checker.infer(ctx, &ta)?;
                Ok(Term::apps(Term::Eq, [ty, ta, tb]))
            }
            ExprKind::Fun(groups, body) => {
                let n = self.push_binders(ctx, groups)?;
                match self.term(ctx, body) {
                    Ok(body) => Ok(close(ctx, n, body, Term::Lam)),
                    Err(e) => {
                        truncate(ctx, ctx.len() - n);
                        Err(e)
                    }
                }
            }
            ExprKind::Forall(groups, body) => {
                let n = self.push_binders(ctx, groups)?;
                match self.term(ctx, body) {
                    Ok(body) => Ok(close(ctx, n, body, Term::Pi)),
                    Err(e) => {
                        truncate(ctx, ctx.len() - n);
                        Err(e)
                    }
                }
            }
        }
    }

    fn resolve(&self, ctx: &Telescope, name: &str) -> Result<Term, KernelError> {
        if let Some(pos) = ctx.entries().iter().rposition(|(x, _)| &**x == name) {
            return Ok(Term::Var(ctx.len() - 1 - pos));
        }
        self.env.resolve(name).ok_or_else(|| KernelError::UnboundName(name.to_string()))
    }

    /// Elaborates binder groups left to right, pushing each bound name onto
    /// `ctx`. A group's type is elaborated once and shifted for later names.
    /// Returns the number of entries pushed. On error `ctx` is restored.
    pub fn push_binders(&mut self, ctx: &mut Telescope, groups: &[BinderGroup]) -> Result<usize, KernelError> {
        let start = ctx.len();
        for g in groups {
            let ty = match self.term(ctx, &g.ty) {
                Ok(ty) => ty,
                Err(e) => {
                    truncate(ctx, start);
                    return Err(e);
                }
            };
            for (k, x) in g.names.iter().enumerate() {
                ctx.push(x.as_str().into(), lift(&ty, k, 0));
            }
        }
        Ok(ctx.len() - start)
    }

    fn sort(&mut self, ctx: &mut Telescope, e: &Expr) -> Result<Sort, KernelError> {
        match self.term(ctx, e)? {
            Term::Sort(s) => Ok(s),
            _ => Err(KernelError::ArityMismatch(format!(
                "the arity of an inductive must be `Prop` or `Type`, found `{}`",
                print_expr(e)
            ))),
        }
    }

    pub fn inductive(&mut self, d: &InductiveDecl) -> Result<InductiveDescriptor, KernelError> {
        let mut params = Telescope::new();
        self.push_binders(&mut params, &d.params)?;
        let sort = self.sort(&mut params.clone(), &d.sort)?;
        let name: Name = d.name.as_str().into();
        let provisional = self.env.with_provisional_inductive(&name, &params, &sort);
        let mut inner = Elaborator {
            env: &provisional,
            alloc: &mut *self.alloc,
            file: self.file.clone(),
            site: self.site.clone(),
            flags: self.flags,
        };
        let mut ctors = Vec::with_capacity(d.ctors.len());
        for c in &d.ctors {
            let ty = inner.term(&mut params.clone(), &c.ty)?;
            ctors.push(ConstructorDecl { name: c.name.as_str().into(), ty });
        }
        Ok(InductiveDescriptor { name, params, sort, ctors, fields: None })
    }

    /// A record is a one-constructor inductive whose constructor takes the
    /// fields in order; later field types may mention earlier fields.
    pub fn record(&mut self, d: &RecordDecl) -> Result<InductiveDescriptor, KernelError> {
        let mut params = Telescope::new();
        self.push_binders(&mut params, &d.params)?;
        let sort = self.sort(&mut params.clone(), &d.sort)?;
        let name: Name = d.name.as_str().into();
        let n = params.len();

        let mut ctx = params.clone();
        let mut fields = Telescope::new();
        for f in &d.fields {
            let ty = self.term(&mut ctx, &f.ty)?;
            ctx.push(f.name.as_str().into(), ty.clone());
            fields.push(f.name.as_str().into(), ty);
        }
        let m = fields.len();
        let concl = Term::apps(Term::Ind(name.clone()), (0..n).map(|p| Term::Var(m + n - 1 - p)));
        let ctor = ConstructorDecl { name: d.ctor_name().into(), ty: fields.close_pi(concl) };
        let field_names = d.fields.iter().map(|f| Name::from(f.name.as_str())).collect();
        Ok(InductiveDescriptor { name, params, sort, ctors: vec![ctor], fields: Some(field_names) })
    }
}

fn truncate(ctx: &mut Telescope, len: usize) {
    while ctx.len() > len {
        ctx.pop();
    }
}

/// Pops the innermost `n` entries of `ctx`, wrapping `body` in one binder each.
fn close(
    ctx: &mut Telescope,
    n: usize,
    body: Term,
    binder: fn(Name, Arc<Term>, Arc<Term>) -> Term,
) -> Term {
    (0..n).fold(body, |acc, _| {
        let (x, ty) = ctx.pop().expect("binder pushed by push_binders");
        binder(x, Arc::new(ty), Arc::new(acc))
    })
}
