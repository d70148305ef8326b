//! β/δ/ι reduction, normalization and conversion with cumulativity.

use std::sync::Arc;

use thiserror::Error;

use crate::kernel::env::{GlobalEnv, InductiveInfo};
use crate::term::{lift, struct_eq, subst, Sort, Term};
use crate::universe::Constraint;

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionFlags {
    pub beta: bool,
    pub delta: bool,
    pub iota: bool,
    /// Contraction budget for one top-level reduction call.
    pub fuel: u64,
}

impl Default for ReductionFlags {
    fn default() -> Self {
        ReductionFlags { beta: true, delta: true, iota: true, fuel: DEFAULT_FUEL }
    }
}

impl ReductionFlags {
    pub fn with_fuel(fuel: u64) -> Self {
        ReductionFlags { fuel: fuel.max(1), ..Self::default() }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("reduction did not terminate within {0} steps")]
    FuelExhausted(u64),
}

struct Machine<'e> {
    env: &'e GlobalEnv,
    flags: ReductionFlags,
    fuel: u64,
}

impl<'e> Machine<'e> {
    fn new(env: &'e GlobalEnv, flags: ReductionFlags) -> Self {
        Machine { env, flags, fuel: flags.fuel }
    }

    fn tick(&mut self) -> Result<(), ReduceError> {
        if self.fuel == 0 {
            return Err(ReduceError::FuelExhausted(self.flags.fuel));
        }
        self.fuel -= 1;
        Ok(())
    }

    fn whnf(&mut self, t: &Term) -> Result<Term, ReduceError> {
        let mut cur = t.clone();
        loop {
            let (head, mut args) = split_spine(&cur);
            match &head {
                Term::Lam(_, _, body) if self.flags.beta && !args.is_empty() => {
                    self.tick()?;
                    let arg = args.remove(0);
                    cur = Term::apps(subst(body, &arg, 0), args);
                }
                Term::Const(name) if self.flags.delta => {
                    match self.env.constant(name).and_then(|c| c.body.as_ref()) {
                        Some(body) => {
                            self.tick()?;
                            cur = Term::apps(body.clone(), args);
                        }
                        None => return Ok(cur),
                    }
                }
                Term::Elim(name) if self.flags.iota => {
                    let Some(info) = self.env.inductive(name) else { return Ok(cur) };
                    let need = info.elim_arity();
                    if args.len() < need {
                        return Ok(cur);
                    }
                    let major = self.whnf(&args[need - 1])?;
                    match iota_elim(info, &args[..need], &major) {
                        Some(reduct) => {
                            self.tick()?;
                            cur = Term::apps(reduct, args.drain(need..));
                        }
                        None => {
                            args[need - 1] = major;
                            return Ok(Term::apps(head, args));
                        }
                    }
                }
                Term::EqElim if self.flags.iota && args.len() >= 6 => {
                    let major = self.whnf(&args[5])?;
                    if is_refl(&major) {
                        self.tick()?;
                        let inhabitant = args[3].clone();
                        cur = Term::apps(inhabitant, args.drain(6..));
                    } else {
                        args[5] = major;
                        return Ok(Term::apps(head, args));
                    }
                }
                _ => return Ok(cur),
            }
        }
    }

    /// Strong normalization, arguments first. Well-typed terms are strongly
    /// normalizing, so the strategy does not change the result, and
    /// evaluating arguments once avoids copying unevaluated recursive calls.
    fn normalize(&mut self, t: &Term) -> Result<Term, ReduceError> {
        match t {
            Term::Lam(x, a, b) => {
                Ok(Term::Lam(x.clone(), Arc::new(self.normalize(a)?), Arc::new(self.normalize(b)?)))
            }
            Term::Pi(x, a, b) => {
                Ok(Term::Pi(x.clone(), Arc::new(self.normalize(a)?), Arc::new(self.normalize(b)?)))
            }
            Term::Const(_) => self.apply(t.clone(), Vec::new()),
            Term::App(..) => {
                let (head, args) = split_spine(t);
                let args = args.iter().map(|a| self.normalize(a)).collect::<Result<Vec<_>, _>>()?;
                self.apply(head, args)
            }
            _ => Ok(t.clone()),
        }
    }

    /// Normal form of `head args` where every arg is already normal.
    fn apply(&mut self, head: Term, mut args: Vec<Term>) -> Result<Term, ReduceError> {
        match &head {
            Term::Lam(_, _, body) if self.flags.beta && !args.is_empty() => {
                self.tick()?;
                let arg = args.remove(0);
                let reduct = self.normalize(&subst(body, &arg, 0))?;
                let (h, mut front) = split_spine(&reduct);
                front.extend(args);
                self.apply(h, front)
            }
            Term::Const(name) if self.flags.delta => {
                match self.env.constant(name).and_then(|c| c.body.clone()) {
                    Some(body) => {
                        self.tick()?;
                        let body = self.normalize(&body)?;
                        let (h, mut front) = split_spine(&body);
                        front.extend(args);
                        self.apply(h, front)
                    }
                    None => Ok(Term::apps(head, args)),
                }
            }
            Term::Elim(name) if self.flags.iota => {
                let info = self.env.inductive(name).cloned();
                let need = info.as_ref().map_or(usize::MAX, |i| i.elim_arity());
                if args.len() < need {
                    return Ok(Term::apps(head, args));
                }
                let info = info.expect("arity found");
                match iota_elim(&info, &args[..need], &args[need - 1]) {
                    Some(reduct) => {
                        self.tick()?;
                        let rest = args.split_off(need);
                        self.reapply(reduct, rest)
                    }
                    None => Ok(Term::apps(head, args)),
                }
            }
            Term::EqElim if self.flags.iota && args.len() >= 6 && is_refl(&args[5]) => {
                self.tick()?;
                let rest = args.split_off(6);
                let inhabitant = args.swap_remove(3);
                self.reapply(inhabitant, rest)
            }
            Term::Lam(..) | Term::Pi(..) => {
                let head = self.normalize(&head)?;
                Ok(Term::apps(head, args))
            }
            _ => Ok(Term::apps(head, args)),
        }
    }

    /// Normalizes a contractum built from normal pieces, then applies the
    /// remaining normal arguments.
    fn reapply(&mut self, reduct: Term, rest: Vec<Term>) -> Result<Term, ReduceError> {
        let reduct = self.normalize(&reduct)?;
        let (h, mut front) = split_spine(&reduct);
        front.extend(rest);
        self.apply(h, front)
    }
}

fn split_spine(t: &Term) -> (Term, Vec<Term>) {
    let (head, args) = t.spine();
    (head.clone(), args.into_iter().cloned().collect())
}

fn is_refl(t: &Term) -> bool {
    let (head, args) = t.spine();
    matches!(head, Term::Refl) && args.len() == 2
}

/// Contracts `I_rect params motive branches major` when `major` is a
/// constructor application. `args` holds exactly the recursor's arguments.
fn iota_elim(info: &InductiveInfo, args: &[Term], major: &Term) -> Option<Term> {
    let (head, major_args) = major.spine();
    let Term::Ctor(ind, index) = head else { return None };
    if ind != info.name() {
        return None;
    }
    let n = info.num_params();
    let m = info.ctor_arity(*index);
    if major_args.len() != n + m {
        return None;
    }
    let params = &args[..n];
    let ctor_args: Vec<Term> = major_args[n..].iter().map(|a| (*a).clone()).collect();
    let prefix = Term::apps(Term::Elim(ind.clone()), args[..args.len() - 1].iter().cloned());

    // Argument types, instantiated, to rebuild binders of functional
    // recursive arguments.
    let mut ty = info.ctor_types[*index].clone();
    for p in params {
        ty = instantiate_pi(&ty, p)?;
    }
    let mut arg_types = Vec::with_capacity(m);
    for a in &ctor_args {
        let Term::Pi(_, dom, _) = &ty else { return None };
        arg_types.push((**dom).clone());
        ty = instantiate_pi(&ty, a)?;
    }

    let mut hyps = Vec::new();
    for (j, rec) in info.recursive_args[*index].iter().enumerate() {
        let Some(k) = *rec else { continue };
        let mut binders = Vec::with_capacity(k);
        let mut arg_ty = &arg_types[j];
        for _ in 0..k {
            let Term::Pi(y, b, rest) = arg_ty else { return None };
            binders.push((y.clone(), b.clone()));
            arg_ty = rest;
        }
        let applied = Term::apps(lift(&ctor_args[j], k, 0), (0..k).rev().map(Term::Var));
        let body = Term::app(lift(&prefix, k, 0), applied);
        let hyp = binders
            .into_iter()
            .rev()
            .fold(body, |acc, (y, b)| Term::Lam(y, b, Arc::new(acc)));
        hyps.push(hyp);
    }

    let branch = args[n + 1 + index].clone();
    Some(Term::apps(branch, ctor_args.into_iter().chain(hyps)))
}

fn instantiate_pi(ty: &Term, arg: &Term) -> Option<Term> {
    match ty {
        Term::Pi(_, _, body) => Some(subst(body, arg, 0)),
        _ => None,
    }
}

pub fn whnf(env: &GlobalEnv, t: &Term, flags: ReductionFlags) -> Result<Term, ReduceError> {
    Machine::new(env, flags).whnf(t)
}

pub fn normalize(env: &GlobalEnv, t: &Term, flags: ReductionFlags) -> Result<Term, ReduceError> {
    Machine::new(env, flags).normalize(t)
}

/// Contracts the redex at the root of `t`, if there is one.
pub fn contract(env: &GlobalEnv, t: &Term, flags: ReductionFlags) -> Option<Term> {
    match t {
        Term::App(f, a) if flags.beta => {
            if let Term::Lam(_, _, body) = &**f {
                return Some(subst(body, a, 0));
            }
        }
        Term::Const(name) if flags.delta => {
            return env.constant(name).and_then(|c| c.body.clone());
        }
        _ => {}
    }
    if !flags.iota {
        return None;
    }
    let (head, args) = t.spine();
    match head {
        Term::Elim(name) => {
            let info = env.inductive(name)?;
            if args.len() != info.elim_arity() {
                return None;
            }
            let args: Vec<Term> = args.into_iter().cloned().collect();
            iota_elim(info, &args, &args[args.len() - 1])
        }
        Term::EqElim if args.len() == 6 && is_refl(args[5]) => Some(args[3].clone()),
        _ => None,
    }
}

/// One leftmost-outermost reduction step.
pub fn step(env: &GlobalEnv, t: &Term, flags: ReductionFlags) -> Option<Term> {
    if let Some(r) = contract(env, t, flags) {
        return Some(r);
    }
    match t {
        Term::App(f, a) => {
            if let Some(f2) = step(env, f, flags) {
                return Some(Term::App(Arc::new(f2), a.clone()));
            }
            step(env, a, flags).map(|a2| Term::App(f.clone(), Arc::new(a2)))
        }
        Term::Lam(x, a, b) => {
            if let Some(a2) = step(env, a, flags) {
                return Some(Term::Lam(x.clone(), Arc::new(a2), b.clone()));
            }
            step(env, b, flags).map(|b2| Term::Lam(x.clone(), a.clone(), Arc::new(b2)))
        }
        Term::Pi(x, a, b) => {
            if let Some(a2) = step(env, a, flags) {
                return Some(Term::Pi(x.clone(), Arc::new(a2), b.clone()));
            }
            step(env, b, flags).map(|b2| Term::Pi(x.clone(), a.clone(), Arc::new(b2)))
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvMode {
    Equal,
    /// Left-hand side may sit in a smaller universe than the right.
    Cumulative,
}

#[derive(Clone, Debug)]
pub enum ConversionResult {
    Convertible(Vec<Constraint>),
    /// Head normal forms of the two sides.
    NotConvertible(Term, Term),
}

impl ConversionResult {
    pub fn is_convertible(&self) -> bool {
        matches!(self, ConversionResult::Convertible(_))
    }
}

/// Judgmental equality (or cumulative inclusion) of two terms, with the
/// universe constraints it requires.
pub fn convertible(
    env: &GlobalEnv,
    t: &Term,
    u: &Term,
    mode: ConvMode,
    flags: ReductionFlags,
) -> Result<ConversionResult, ReduceError> {
    let mut conv = Converter { machine: Machine::new(env, flags), delta: Vec::new() };
    if conv.conv(t, u, mode)? {
        Ok(ConversionResult::Convertible(conv.delta))
    } else {
        let mut m = Machine::new(env, flags);
        Ok(ConversionResult::NotConvertible(m.whnf(t)?, m.whnf(u)?))
    }
}

struct Converter<'e> {
    machine: Machine<'e>,
    delta: Vec<Constraint>,
}

impl Converter<'_> {
    fn conv(&mut self, t: &Term, u: &Term, mode: ConvMode) -> Result<bool, ReduceError> {
        if struct_eq(t, u) {
            return Ok(true);
        }
        let t = self.machine.whnf(t)?;
        let u = self.machine.whnf(u)?;
        if struct_eq(&t, &u) {
            return Ok(true);
        }
        match (&t, &u) {
            (Term::Sort(a), Term::Sort(b)) => Ok(self.sort_leq(a, b, mode)),
            (Term::Pi(_, a1, b1), Term::Pi(_, a2, b2)) => {
                Ok(self.conv(a1, a2, ConvMode::Equal)? && self.conv(b1, b2, mode)?)
            }
            (Term::Lam(_, a1, b1), Term::Lam(_, a2, b2)) => {
                Ok(self.conv(a1, a2, ConvMode::Equal)? && self.conv(b1, b2, ConvMode::Equal)?)
            }
            _ => {
                let (h1, args1) = t.spine();
                let (h2, args2) = u.spine();
                if args1.len() != args2.len() || !is_atom(h1) || !struct_eq(h1, h2) {
                    return Ok(false);
                }
                for (a, b) in args1.into_iter().zip(args2) {
                    if !self.conv(a, b, ConvMode::Equal)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn sort_leq(&mut self, a: &Sort, b: &Sort, mode: ConvMode) -> bool {
        match (a, b) {
            (Sort::Prop, Sort::Prop) => true,
            (Sort::Prop, Sort::Type(_)) => mode == ConvMode::Cumulative,
            (Sort::Type(_), Sort::Prop) => false,
            (Sort::Type(x), Sort::Type(y)) => {
                if x != y {
                    self.delta.push(Constraint::le(x, y));
                    if mode == ConvMode::Equal {
                        self.delta.push(Constraint::le(y, x));
                    }
                }
                true
            }
        }
    }
}

fn is_atom(t: &Term) -> bool {
    !matches!(t, Term::App(..) | Term::Lam(..) | Term::Pi(..) | Term::Sort(_))
}
