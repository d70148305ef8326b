//! Kernel term language.
//!
//! Bound variables are de Bruijn indices; globals are referenced by name.
//! Binder names are kept for printing only and never take part in equality.

use std::fmt;
use std::sync::Arc;

use crate::universe::Level;

pub type Name = Arc<str>;

#[derive(Clone, Debug)]
pub enum Sort {
    Prop,
    Type(Level),
}

impl PartialEq for Sort {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Sort::Prop, Sort::Prop) => true,
            (Sort::Type(a), Sort::Type(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Sort {}

#[derive(Clone, Debug)]
pub enum Term {
    Var(usize),
    Sort(Sort),
    Const(Name),
    App(Arc<Term>, Arc<Term>),
    Lam(Name, Arc<Term>, Arc<Term>),
    Pi(Name, Arc<Term>, Arc<Term>),
    /// An inductive type.
    Ind(Name),
    /// Constructor `index` of the named inductive.
    Ctor(Name, usize),
    /// Recursor of the named inductive.
    Elim(Name),
    /// Built-in propositional equality `eq : forall (A : Type), A -> A -> Prop`.
    Eq,
    Refl,
    EqElim,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        struct_eq(self, other)
    }
}

impl Eq for Term {}

/// Structural equality up to binder display names. Levels compare by id.
pub fn struct_eq(t: &Term, u: &Term) -> bool {
    use Term::*;
    match (t, u) {
        (Var(i), Var(j)) => i == j,
        (Sort(s), Sort(r)) => s == r,
        (Const(a), Const(b)) | (Ind(a), Ind(b)) | (Elim(a), Elim(b)) => a == b,
        (Ctor(a, i), Ctor(b, j)) => a == b && i == j,
        (App(f, a), App(g, b)) => {
            (Arc::ptr_eq(f, g) || struct_eq(f, g)) && (Arc::ptr_eq(a, b) || struct_eq(a, b))
        }
        (Lam(_, a, b), Lam(_, c, d)) | (Pi(_, a, b), Pi(_, c, d)) => {
            struct_eq(a, c) && struct_eq(b, d)
        }
        (Eq, Eq) | (Refl, Refl) | (EqElim, EqElim) => true,
        _ => false,
    }
}

impl Term {
    pub fn prop() -> Term {
        Term::Sort(Sort::Prop)
    }

    pub fn ty(level: Level) -> Term {
        Term::Sort(Sort::Type(level))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn lam(name: &str, domain: Term, body: Term) -> Term {
        Term::Lam(name.into(), Arc::new(domain), Arc::new(body))
    }

    pub fn pi(name: &str, domain: Term, codomain: Term) -> Term {
        Term::Pi(name.into(), Arc::new(domain), Arc::new(codomain))
    }

    /// Non-dependent function type. The codomain is given in the outer scope.
    pub fn arrow(domain: Term, codomain: Term) -> Term {
        Term::pi("_", domain, lift(&codomain, 1, 0))
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// True when `Var(index)` occurs free.
    pub fn has_free_var(&self, index: usize) -> bool {
        match self {
            Term::Var(i) => *i == index,
            Term::App(f, a) => f.has_free_var(index) || a.has_free_var(index),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                a.has_free_var(index) || b.has_free_var(index + 1)
            }
            _ => false,
        }
    }

    /// Closedness scan: every variable is bound within `depth` enclosing binders.
    pub fn is_closed_under(&self, depth: usize) -> bool {
        match self {
            Term::Var(i) => *i < depth,
            Term::App(f, a) => f.is_closed_under(depth) && a.is_closed_under(depth),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                a.is_closed_under(depth) && b.is_closed_under(depth + 1)
            }
            _ => true,
        }
    }

    /// True when the inductive `name` (or any of its constructors or recursor) occurs.
    pub fn mentions_inductive(&self, name: &str) -> bool {
        match self {
            Term::Ind(n) | Term::Elim(n) | Term::Ctor(n, _) => &**n == name,
            Term::App(f, a) => f.mentions_inductive(name) || a.mentions_inductive(name),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                a.mentions_inductive(name) || b.mentions_inductive(name)
            }
            _ => false,
        }
    }

    /// Number of term nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Visits every universe level mentioned by the term.
    pub fn for_each_level(&self, f: &mut impl FnMut(&Level)) {
        match self {
            Term::Sort(Sort::Type(l)) => f(l),
            Term::App(g, a) => {
                g.for_each_level(f);
                a.for_each_level(f);
            }
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                a.for_each_level(f);
                b.for_each_level(f);
            }
            _ => {}
        }
    }
}

/// Shifts every free variable at or above `cutoff` up by `amount`.
pub fn lift(t: &Term, amount: usize, cutoff: usize) -> Term {
    if amount == 0 {
        return t.clone();
    }
    match t {
        Term::Var(i) if *i >= cutoff => Term::Var(i + amount),
        Term::App(f, a) => Term::App(
            Arc::new(lift(f, amount, cutoff)),
            Arc::new(lift(a, amount, cutoff)),
        ),
        Term::Lam(x, a, b) => Term::Lam(
            x.clone(),
            Arc::new(lift(a, amount, cutoff)),
            Arc::new(lift(b, amount, cutoff + 1)),
        ),
        Term::Pi(x, a, b) => Term::Pi(
            x.clone(),
            Arc::new(lift(a, amount, cutoff)),
            Arc::new(lift(b, amount, cutoff + 1)),
        ),
        _ => t.clone(),
    }
}

/// Replaces `Var(target)` by `replacement` and removes that variable from
/// the context: indices above `target` drop by one. `replacement` is read in
/// the resulting context and is lifted as it moves under binders.
pub fn subst(t: &Term, replacement: &Term, target: usize) -> Term {
    subst_at(t, replacement, target, 0)
}

fn subst_at(t: &Term, r: &Term, target: usize, depth: usize) -> Term {
    match t {
        Term::Var(i) => {
            let k = target + depth;
            if *i == k {
                lift(r, depth, 0)
            } else if *i > k {
                Term::Var(i - 1)
            } else {
                Term::Var(*i)
            }
        }
        Term::App(f, a) => Term::App(
            Arc::new(subst_at(f, r, target, depth)),
            Arc::new(subst_at(a, r, target, depth)),
        ),
        Term::Lam(x, a, b) => Term::Lam(
            x.clone(),
            Arc::new(subst_at(a, r, target, depth)),
            Arc::new(subst_at(b, r, target, depth + 1)),
        ),
        Term::Pi(x, a, b) => Term::Pi(
            x.clone(),
            Arc::new(subst_at(a, r, target, depth)),
            Arc::new(subst_at(b, r, target, depth + 1)),
        ),
        _ => t.clone(),
    }
}

/// Replaces every `Const(name)` by `replacement`, lifted under binders.
pub fn replace_const(t: &Term, name: &str, replacement: &Term) -> Term {
    replace_const_at(t, name, replacement, 0)
}

fn replace_const_at(t: &Term, name: &str, r: &Term, depth: usize) -> Term {
    match t {
        Term::Const(c) if &**c == name => lift(r, depth, 0),
        Term::App(f, a) => Term::App(
            Arc::new(replace_const_at(f, name, r, depth)),
            Arc::new(replace_const_at(a, name, r, depth)),
        ),
        Term::Lam(x, a, b) => Term::Lam(
            x.clone(),
            Arc::new(replace_const_at(a, name, r, depth)),
            Arc::new(replace_const_at(b, name, r, depth + 1)),
        ),
        Term::Pi(x, a, b) => Term::Pi(
            x.clone(),
            Arc::new(replace_const_at(a, name, r, depth)),
            Arc::new(replace_const_at(b, name, r, depth + 1)),
        ),
        _ => t.clone(),
    }
}

/// Turns occurrences of the placeholder constant `name` into a fresh outermost
/// bound variable, shifting existing free variables up by one.
pub fn abstract_const(t: &Term, name: &str) -> Term {
    abstract_at(&lift(t, 1, 0), name, 0)
}

fn abstract_at(t: &Term, name: &str, depth: usize) -> Term {
    match t {
        Term::Const(c) if &**c == name => Term::Var(depth),
        Term::App(f, a) => Term::App(
            Arc::new(abstract_at(f, name, depth)),
            Arc::new(abstract_at(a, name, depth)),
        ),
        Term::Lam(x, a, b) => Term::Lam(
            x.clone(),
            Arc::new(abstract_at(a, name, depth)),
            Arc::new(abstract_at(b, name, depth + 1)),
        ),
        Term::Pi(x, a, b) => Term::Pi(
            x.clone(),
            Arc::new(abstract_at(a, name, depth)),
            Arc::new(abstract_at(b, name, depth + 1)),
        ),
        _ => t.clone(),
    }
}

/// Typing context: each entry's type may mention earlier entries.
#[derive(Clone, Debug, Default)]
pub struct Telescope {
    entries: Vec<(Name, Term)>,
}

impl Telescope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, name: Name, ty: Term) {
        self.entries.push((name, ty));
    }

    pub fn pop(&mut self) -> Option<(Name, Term)> {
        self.entries.pop()
    }

    pub fn entries(&self) -> &[(Name, Term)] {
        &self.entries
    }

    /// Type of `Var(index)`, lifted into the full context.
    pub fn lookup(&self, index: usize) -> Option<Term> {
        let len = self.entries.len();
        if index >= len {
            return None;
        }
        let (_, ty) = &self.entries[len - 1 - index];
        Some(lift(ty, index + 1, 0))
    }

    /// Display names, innermost last.
    pub fn names(&self) -> Vec<Name> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    /// `forall (entries), body`.
    pub fn close_pi(&self, body: Term) -> Term {
        self.entries
            .iter()
            .rev()
            .fold(body, |acc, (x, ty)| Term::Pi(x.clone(), Arc::new(ty.clone()), Arc::new(acc)))
    }

    /// `fun (entries) => body`.
    pub fn close_lam(&self, body: Term) -> Term {
        self.entries
            .iter()
            .rev()
            .fold(body, |acc, (x, ty)| Term::Lam(x.clone(), Arc::new(ty.clone()), Arc::new(acc)))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::print_term(self, &[], None))
    }
}
