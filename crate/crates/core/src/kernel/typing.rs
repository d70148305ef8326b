use std::sync::Arc;

use super::env::GlobalEnv;
use super::inductive::eliminator_type;
use super::KernelError;
use crate::reduce::{self, ConvMode, ConversionResult, ReductionFlags};
use crate::syntax::print::print_term;
use crate::term::{subst, Sort, Telescope, Term};
use crate::universe::{Constraint, Level, LevelAllocator, Origin};

/// Type inference and checking for one command.
///
/// Constraints emitted along the way accumulate in the checker; the caller
/// merges them into the environment and tests satisfiability.
pub struct Checker<'a> {
    env: &'a GlobalEnv,
    alloc: &'a mut LevelAllocator,
    site: Arc<Origin>,
    synthesized: Arc<Origin>,
    flags: ReductionFlags,
    delta: Vec<Constraint>,
}

impl<'a> Checker<'a> {
    pub fn new(
        env: &'a GlobalEnv,
        alloc: &'a mut LevelAllocator,
        site: Arc<Origin>,
        flags: ReductionFlags,
    ) -> Self {
        let synthesized = Arc::new(Origin { synthesized: true, ..(*site).clone() });
        Checker { env, alloc, site, synthesized, flags, delta: Vec::new() }
    }

    pub fn env(&self) -> &GlobalEnv {
        self.env
    }

    pub fn flags(&self) -> ReductionFlags {
        self.flags
    }

    /// Records a constraint, attributing it to the current command.
    pub fn add_constraint(&mut self, c: Constraint) {
        self.constrain(c);
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.delta
    }

    pub fn into_constraints(self) -> Vec<Constraint> {
        self.delta
    }

    fn fresh(&mut self) -> Level {
        self.alloc.fresh(self.synthesized.clone())
    }

    fn constrain(&mut self, c: Constraint) {
        self.delta.push(c.with_site(self.site.clone()));
    }

    fn whnf(&self, t: &Term) -> Result<Term, KernelError> {
        Ok(reduce::whnf(self.env, t, self.flags)?)
    }

    fn show(&self, ctx: &Telescope, t: &Term) -> String {
        print_term(t, &ctx.names(), Some(self.env))
    }

    pub fn infer(&mut self, ctx: &mut Telescope, t: &Term) -> Result<Term, KernelError> {
        match t {
            Term::Var(i) => ctx.lookup(*i).ok_or(KernelError::UnboundVariable(*i)),
            Term::Sort(Sort::Prop) => Ok(Term::ty(self.fresh())),
            Term::Sort(Sort::Type(u)) => {
                let v = self.fresh();
                self.constrain(Constraint::lt(u, &v));
                Ok(Term::ty(v))
            }
            Term::Const(name) => self
                .env
                .constant(name)
                .map(|c| c.ty.clone())
                .ok_or_else(|| KernelError::UnboundName(name.to_string())),
            Term::Ind(name) => self
                .env
                .inductive(name)
                .map(|i| i.ty.clone())
                .ok_or_else(|| KernelError::UnboundName(name.to_string())),
            Term::Ctor(name, index) => self
                .env
                .inductive(name)
                .and_then(|i| i.ctor_types.get(*index).cloned())
                .ok_or_else(|| KernelError::UnboundName(format!("{name}#{index}"))),
            Term::Elim(name) => {
                let info = self
                    .env
                    .inductive(name)
                    .cloned()
                    .ok_or_else(|| KernelError::UnboundName(super::env::elim_name(name)))?;
                let motive = if info.large_elim { Sort::Type(self.fresh()) } else { Sort::Prop };
                Ok(eliminator_type(&info, motive))
            }
            Term::Eq => Ok(eq_type(self.fresh())),
            Term::Refl => Ok(refl_type(self.fresh())),
            Term::EqElim => {
                let u = self.fresh();
                let w = self.fresh();
                Ok(eq_elim_type(u, w))
            }
            Term::Lam(x, a, b) => {
                self.sort_of(ctx, a)?;
                ctx.push(x.clone(), (**a).clone());
                let body_ty = self.infer(ctx, b);
                ctx.pop();
                Ok(Term::Pi(x.clone(), a.clone(), Arc::new(body_ty?)))
            }
            Term::Pi(x, a, b) => {
                let sa = self.sort_of(ctx, a)?;
                ctx.push(x.clone(), (**a).clone());
                let sb = self.sort_of(ctx, b);
                ctx.pop();
                match sb? {
                    Sort::Prop => Ok(Term::prop()),
                    Sort::Type(ub) => {
                        let w = self.fresh();
                        if let Sort::Type(ua) = sa {
                            self.constrain(Constraint::le(&ua, &w));
                        }
                        self.constrain(Constraint::le(&ub, &w));
                        Ok(Term::ty(w))
                    }
                }
            }
            Term::App(f, a) => {
                let f_ty = self.infer(ctx, f)?;
                match self.whnf(&f_ty)? {
                    Term::Pi(_, dom, cod) => {
                        self.check(ctx, a, &dom)?;
                        Ok(subst(&cod, a, 0))
                    }
                    other => Err(KernelError::NotAFunction {
                        term: self.show(ctx, f),
                        ty: self.show(ctx, &other),
                    }),
                }
            }
        }
    }

    /// Infers the type of `t` and requires it to reduce to a sort.
    pub fn sort_of(&mut self, ctx: &mut Telescope, t: &Term) -> Result<Sort, KernelError> {
        let ty = self.infer(ctx, t)?;
        match self.whnf(&ty)? {
            Term::Sort(s) => Ok(s),
            other => Err(KernelError::DomainNotASort {
                term: self.show(ctx, t),
                ty: self.show(ctx, &other),
            }),
        }
    }

    /// Checks `t` against `expected` up to cumulativity.
    pub fn check(&mut self, ctx: &mut Telescope, t: &Term, expected: &Term) -> Result<(), KernelError> {
        let inferred = self.infer(ctx, t)?;
        // A term that computes to a sort inhabits any strictly larger universe.
        // Comparing levels directly avoids routing through the floating level
        // of its inferred type.
        if let Term::Sort(Sort::Type(w)) = self.whnf(expected)? {
            if let Term::Sort(s) = self.whnf(t)? {
                if let Sort::Type(u) = s {
                    self.constrain(Constraint::lt(&u, &w));
                }
                return Ok(());
            }
        }
        match reduce::convertible(self.env, &inferred, expected, ConvMode::Cumulative, self.flags)? {
            ConversionResult::Convertible(delta) => {
                for c in delta {
                    self.constrain(c);
                }
                Ok(())
            }
            ConversionResult::NotConvertible(..) => Err(KernelError::TypeMismatch {
                term: self.show(ctx, t),
                inferred: self.show(ctx, &inferred),
                expected: self.show(ctx, expected),
            }),
        }
    }
}

/// `forall (A : Type(u)), A -> A -> Prop`
pub fn eq_type(u: Level) -> Term {
    Term::pi(
        "A",
        Term::ty(u),
        Term::pi("_", Term::Var(0), Term::pi("_", Term::Var(1), Term::prop())),
    )
}

/// `forall (A : Type(u)) (x : A), eq A x x`
pub fn refl_type(u: Level) -> Term {
    Term::pi(
        "A",
        Term::ty(u),
        Term::pi("x", Term::Var(0), Term::apps(Term::Eq, [Term::Var(1), Term::Var(0), Term::Var(0)])),
    )
}

/// `forall (A : Type(u)) (x : A) (P : A -> Type(w)), P x -> forall (y : A), eq A x y -> P y`
pub fn eq_elim_type(u: Level, w: Level) -> Term {
    let eq_xy = Term::apps(Term::Eq, [Term::Var(4), Term::Var(3), Term::Var(0)]);
    let p_y = Term::app(Term::Var(3), Term::Var(1));
    let tail = Term::pi("y", Term::Var(3), Term::pi("e", eq_xy, p_y));
    let p_x = Term::app(Term::Var(0), Term::Var(1));
    Term::pi(
        "A",
        Term::ty(u),
        Term::pi(
            "x",
            Term::Var(0),
            Term::pi("P", Term::pi("_", Term::Var(1), Term::ty(w)), Term::pi("_", p_x, tail)),
        ),
    )
}
