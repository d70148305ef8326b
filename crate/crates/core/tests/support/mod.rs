//! Oracles and generators shared by the integration tests and the
//! acceptance suite. Nothing here calls the code it is used to check,
//! except where a test needs the checker to confirm a generated term.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;

use picheck::driver::{Options, Session};
use picheck::kernel::{check_type, CommandScope, GlobalEnv};
use picheck::reduce::{contract, ReductionFlags};
use picheck::term::{Telescope, Term};
use picheck::universe::{Constraint, ConstraintSet, Level, LevelAllocator, Origin, Rel};

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Every `.pv` file under the corpus directory, sorted.
pub fn corpus_files() -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut dirs = vec![corpus_dir()];
    while let Some(d) = dirs.pop() {
        for entry in std::fs::read_dir(d).expect("corpus directory") {
            let p = entry.expect("directory entry").path();
            if p.is_dir() {
                dirs.push(p);
            } else if p.extension().is_some_and(|e| e == "pv") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Named-variable terms: an independent model of lift and subst.

#[derive(Clone, Debug, PartialEq)]
pub enum Named {
    Var(String),
    Const(String),
    Prop,
    App(Box<Named>, Box<Named>),
    Lam(String, Box<Named>, Box<Named>),
    Pi(String, Box<Named>, Box<Named>),
}

/// Reads a de Bruijn term with free variable `i` named `free[len - 1 - i]`.
/// Every binder gets a globally fresh name, so later substitution cannot
/// capture.
pub fn to_named(t: &Term, free: &[String], counter: &mut usize) -> Named {
    fn go(t: &Term, names: &mut Vec<String>, counter: &mut usize) -> Named {
        match t {
            Term::Var(i) => Named::Var(names[names.len() - 1 - i].clone()),
            Term::Const(c) => Named::Const(c.to_string()),
            Term::Sort(_) => Named::Prop,
            Term::App(f, a) => Named::App(Box::new(go(f, names, counter)), Box::new(go(a, names, counter))),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                let dom = go(a, names, counter);
                *counter += 1;
                let x = format!("b{counter}");
                names.push(x.clone());
                let body = go(b, names, counter);
                names.pop();
                if matches!(t, Term::Lam(..)) {
                    Named::Lam(x, Box::new(dom), Box::new(body))
                } else {
                    Named::Pi(x, Box::new(dom), Box::new(body))
                }
            }
            other => panic!("unsupported in the named model: {other:?}"),
        }
    }
    go(t, &mut free.to_vec(), counter)
}

/// Back to de Bruijn indices, resolving names innermost-first against the
/// binders and then against `free` (innermost last).
pub fn from_named(n: &Named, free: &[String]) -> Term {
    fn go(n: &Named, names: &mut Vec<String>) -> Term {
        match n {
            Named::Var(x) => {
                let pos = names.iter().rposition(|y| y == x).expect("named variable in scope");
                Term::Var(names.len() - 1 - pos)
            }
            Named::Const(c) => Term::constant(c),
            Named::Prop => Term::prop(),
            Named::App(f, a) => Term::app(go(f, names), go(a, names)),
            Named::Lam(x, a, b) | Named::Pi(x, a, b) => {
                let dom = go(a, names);
                names.push(x.clone());
                let body = go(b, names);
                names.pop();
                if matches!(n, Named::Lam(..)) {
                    Term::lam(x, dom, body)
                } else {
                    Term::pi(x, dom, body)
                }
            }
        }
    }
    go(n, &mut free.to_vec())
}

/// Textbook substitution; binders are assumed distinct from `x` and from the
/// free names of `r`.
pub fn named_subst(n: &Named, x: &str, r: &Named) -> Named {
    match n {
        Named::Var(y) if y == x => r.clone(),
        Named::Var(_) | Named::Const(_) | Named::Prop => n.clone(),
        Named::App(f, a) => Named::App(Box::new(named_subst(f, x, r)), Box::new(named_subst(a, x, r))),
        Named::Lam(y, a, b) => Named::Lam(y.clone(), Box::new(named_subst(a, x, r)), Box::new(named_subst(b, x, r))),
        Named::Pi(y, a, b) => Named::Pi(y.clone(), Box::new(named_subst(a, x, r)), Box::new(named_subst(b, x, r))),
    }
}

/// Free-variable names `v0 .. v{n-1}`, innermost last.
pub fn free_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Oracle for `lift(t, amount, cutoff)` where `t` lives under `free`:
/// insert `amount` unused names below the innermost `cutoff` ones.
pub fn oracle_lift(t: &Term, nfree: usize, amount: usize, cutoff: usize) -> Term {
    let free = free_names(nfree);
    let named = to_named(t, &free, &mut 0);
    let mut wider = free.clone();
    let at = wider.len() - cutoff;
    for k in 0..amount {
        wider.insert(at, format!("new{k}"));
    }
    from_named(&named, &wider)
}

/// Oracle for `subst(t, r, target)`: `r` lives in the context with the
/// target variable removed.
pub fn oracle_subst(t: &Term, r: &Term, nfree: usize, target: usize) -> Term {
    let free = free_names(nfree);
    let x = free[nfree - 1 - target].clone();
    let mut smaller = free.clone();
    smaller.remove(nfree - 1 - target);
    let mut counter = 0;
    let named_t = to_named(t, &free, &mut counter);
    let named_r = to_named(r, &smaller, &mut counter);
    from_named(&named_subst(&named_t, &x, &named_r), &smaller)
}

/// Random untyped term over Var/Const/Prop/App/Lam/Pi whose free variables
/// are below `nfree` at the top.
pub fn random_term(rng: &mut impl Rng, depth: usize, nfree: usize) -> Term {
    let leaf = depth == 0 || rng.gen_ratio(1, 4);
    if leaf {
        return match rng.gen_range(0..4) {
            0 | 1 if nfree > 0 => Term::Var(rng.gen_range(0..nfree)),
            2 => Term::prop(),
            _ => Term::constant(["a", "b", "c"][rng.gen_range(0..3)]),
        };
    }
    match rng.gen_range(0..3) {
        0 => Term::app(random_term(rng, depth - 1, nfree), random_term(rng, depth - 1, nfree)),
        1 => Term::lam("x", random_term(rng, depth - 1, nfree), random_term(rng, depth - 1, nfree + 1)),
        _ => Term::pi("x", random_term(rng, depth - 1, nfree), random_term(rng, depth - 1, nfree + 1)),
    }
}

pub fn term_depth(t: &Term) -> usize {
    match t {
        Term::App(f, a) | Term::Lam(_, f, a) | Term::Pi(_, f, a) => 1 + term_depth(f).max(term_depth(a)),
        _ => 0,
    }
}

// ---------------------------------------------------------------------------
// Brute-force universe satisfiability.

/// Small constraint problem over levels `0..n`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub n: usize,
    pub atoms: Vec<(usize, Rel, usize)>,
}

impl Problem {
    /// Searches assignments with values in `0..=n`. A satisfiable system
    /// over n levels always has a witness in that range (the longest strict
    /// chain has fewer than n steps).
    pub fn brute_force(&self) -> bool {
        let mut values = vec![0u32; self.n];
        self.search(0, &mut values)
    }

    fn search(&self, k: usize, values: &mut Vec<u32>) -> bool {
        if k == self.n {
            return true;
        }
        for v in 0..=self.n as u32 {
            values[k] = v;
            let consistent = self.atoms.iter().all(|&(lo, rel, hi)| {
                if lo > k || hi > k {
                    return true;
                }
                holds(values[lo], rel, values[hi])
            });
            if consistent && self.search(k + 1, values) {
                return true;
            }
        }
        false
    }

    pub fn holds_under(&self, values: &[u32]) -> bool {
        self.atoms.iter().all(|&(lo, rel, hi)| holds(values[lo], rel, values[hi]))
    }

    /// The same problem as a kernel constraint set; levels carry ids `0..n`.
    pub fn to_set(&self) -> (ConstraintSet, Vec<Level>) {
        let mut alloc = LevelAllocator::default();
        let origin = Arc::new(Origin::synthesized("oracle"));
        let levels: Vec<Level> = (0..self.n).map(|_| alloc.fresh(origin.clone())).collect();
        let mut set = ConstraintSet::new();
        for l in &levels {
            set.add_level(l);
        }
        set.add_constraints(
            self.atoms.iter().map(|&(lo, rel, hi)| Constraint::new(levels[lo].clone(), rel, levels[hi].clone())),
        );
        (set, levels)
    }

    pub fn random(rng: &mut impl Rng, max_levels: usize, max_constraints: usize) -> Problem {
        let n = rng.gen_range(1..=max_levels);
        let m = rng.gen_range(0..=max_constraints);
        let atoms = (0..m)
            .map(|_| {
                let rel = if rng.gen_bool(0.5) { Rel::Lt } else { Rel::Le };
                (rng.gen_range(0..n), rel, rng.gen_range(0..n))
            })
            .collect();
        Problem { n, atoms }
    }
}

fn holds(lo: u32, rel: Rel, hi: u32) -> bool {
    match rel {
        Rel::Lt => lo < hi,
        Rel::Le => lo <= hi,
    }
}

/// Every constraint `(lo, rel, hi)` over `n` levels.
pub fn all_atoms(n: usize) -> Vec<(usize, Rel, usize)> {
    let mut out = Vec::new();
    for lo in 0..n {
        for hi in 0..n {
            for rel in [Rel::Lt, Rel::Le] {
                // `u <= u` always holds and adds nothing to enumerate.
                if lo == hi && rel == Rel::Le {
                    continue;
                }
                out.push((lo, rel, hi));
            }
        }
    }
    out
}

/// Calls `f` on every subset of `atoms` with at most `max` elements.
pub fn for_each_subset(atoms: &[(usize, Rel, usize)], max: usize, f: &mut impl FnMut(&[(usize, Rel, usize)])) {
    fn go(
        atoms: &[(usize, Rel, usize)],
        start: usize,
        max: usize,
        chosen: &mut Vec<(usize, Rel, usize)>,
        f: &mut impl FnMut(&[(usize, Rel, usize)]),
    ) {
        f(chosen);
        if chosen.len() == max {
            return;
        }
        for i in start..atoms.len() {
            chosen.push(atoms[i]);
            go(atoms, i + 1, max, chosen, f);
            chosen.pop();
        }
    }
    go(atoms, 0, max, &mut Vec::new(), f);
}

/// Checks the solver against the brute-force search on one problem: the
/// verdicts agree, a witness satisfies every constraint, and a core is a
/// subset of the input that is itself unsatisfiable.
pub fn solver_agrees(p: &Problem) -> Result<(), String> {
    use picheck::universe::Satisfiability;
    let (set, levels) = p.to_set();
    let expected = p.brute_force();
    match set.satisfiable() {
        Satisfiability::Sat(assignment) => {
            if !expected {
                return Err(format!("solver says sat, brute force says unsat: {p:?}"));
            }
            let values: Vec<u32> = levels.iter().map(|l| assignment.get(l).expect("assigned")).collect();
            if !p.holds_under(&values) {
                return Err(format!("witness {values:?} violates {p:?}"));
            }
        }
        Satisfiability::Unsat(core) => {
            if expected {
                return Err(format!("solver says unsat, brute force says sat: {p:?}"));
            }
            let atoms: Vec<(usize, Rel, usize)> =
                core.iter().map(|c| (c.lo.id() as usize, c.rel, c.hi.id() as usize)).collect();
            if !atoms.iter().all(|a| p.atoms.contains(a)) {
                return Err(format!("core {atoms:?} is not a subset of {p:?}"));
            }
            if (Problem { n: p.n, atoms }).brute_force() {
                return Err(format!("core of {p:?} is satisfiable"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Well-typed random terms over a small arithmetic signature.

/// The environment of `arith.pv`: `nat`, `bool`, `plus` and `negb`.
pub fn signature_env() -> GlobalEnv {
    let mut session = Session::new(Options::default());
    let report = session.check_file(&corpus_dir().join("arith.pv")).expect("arith.pv readable");
    assert!(report.is_ok(), "{}", report.to_text());
    session.env().clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Nat,
    Bool,
    NatToNat,
}

impl Ty {
    pub fn term(self) -> Term {
        match self {
            Ty::Nat => Term::Ind("nat".into()),
            Ty::Bool => Term::Ind("bool".into()),
            Ty::NatToNat => Term::arrow(Ty::Nat.term(), Ty::Nat.term()),
        }
    }
}

fn nat() -> Term {
    Ty::Nat.term()
}

fn ctor(ind: &str, i: usize) -> Term {
    Term::Ctor(ind.into(), i)
}

/// Generates closed terms of a requested simple type, mixing constructors,
/// δ-redexes (`plus`, `negb`), β-redexes and recursor applications.
pub struct TermGen<'r, R: Rng> {
    pub rng: &'r mut R,
}

impl<R: Rng> TermGen<'_, R> {
    /// A term of type `ty` in a context whose variables have types `ctx`
    /// (innermost last), at most `depth` deep. Each variable is used at
    /// most once; the flag records whether it has been.
    pub fn gen(&mut self, ty: Ty, depth: usize, ctx: &mut Vec<(Ty, bool)>) -> Term {
        if depth <= 1 {
            return self.leaf(ty, ctx);
        }
        let d = depth - 1;
        match ty {
            Ty::Nat => match self.rng.gen_range(0..7) {
                0 => self.leaf(ty, ctx),
                1 => Term::app(ctor("nat", 1), self.gen(Ty::Nat, d, ctx)),
                2 => Term::apps(Term::constant("plus"), [self.gen(Ty::Nat, d, ctx), self.gen(Ty::Nat, d, ctx)]),
                3 => self.beta(ty, d, ctx),
                4 => self.nat_rec(ty, d, ctx),
                5 => self.bool_case(ty, d, ctx),
                _ => Term::app(self.gen(Ty::NatToNat, d, ctx), self.gen(Ty::Nat, d, ctx)),
            },
            Ty::Bool => match self.rng.gen_range(0..5) {
                0 => self.leaf(ty, ctx),
                1 => Term::app(Term::constant("negb"), self.gen(Ty::Bool, d, ctx)),
                2 => self.beta(ty, d, ctx),
                3 => self.nat_rec(ty, d, ctx),
                _ => self.bool_case(ty, d, ctx),
            },
            Ty::NatToNat => match self.rng.gen_range(0..3) {
                0 => Term::app(Term::constant("plus"), self.gen(Ty::Nat, d, ctx)),
                1 => self.beta(ty, d, ctx),
                _ => {
                    ctx.push((Ty::Nat, false));
                    let body = self.gen(Ty::Nat, d, ctx);
                    ctx.pop();
                    Term::lam("x", nat(), body)
                }
            },
        }
    }

    fn leaf(&mut self, ty: Ty, ctx: &mut [(Ty, bool)]) -> Term {
        let n = ctx.len();
        let vars: Vec<usize> = (0..n).filter(|&i| ctx[n - 1 - i] == (ty, false)).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.5) {
            let i = vars[self.rng.gen_range(0..vars.len())];
            ctx[n - 1 - i].1 = true;
            return Term::Var(i);
        }
        match ty {
            Ty::Nat => {
                let n = self.rng.gen_range(0..3);
                (0..n).fold(ctor("nat", 0), |acc, _| Term::app(ctor("nat", 1), acc))
            }
            Ty::Bool => ctor("bool", self.rng.gen_range(0..2)),
            Ty::NatToNat => Term::lam("x", nat(), Term::app(ctor("nat", 1), Term::Var(0))),
        }
    }

    /// `(fun (x : A) => body) arg`
    fn beta(&mut self, ty: Ty, d: usize, ctx: &mut Vec<(Ty, bool)>) -> Term {
        let arg_ty = [Ty::Nat, Ty::Bool][self.rng.gen_range(0..2)];
        let arg = self.gen(arg_ty, d, ctx);
        ctx.push((arg_ty, false));
        let body = self.gen(ty, d, ctx);
        ctx.pop();
        Term::app(Term::lam("x", arg_ty.term(), body), arg)
    }

    /// `nat_rect (fun _ => T) base (fun (k : nat) (r : T) => step) n` with `n`
    /// a numeral below 4
    fn nat_rec(&mut self, ty: Ty, d: usize, ctx: &mut Vec<(Ty, bool)>) -> Term {
        let motive = Term::lam("k", nat(), ty.term());
        let base = self.gen(ty, d, ctx);
        ctx.push((Ty::Nat, false));
        ctx.push((ty, false));
        let step = self.gen(ty, d, ctx);
        ctx.pop();
        ctx.pop();
        let step = Term::lam("k", nat(), Term::lam("r", ty.term(), step));
        // A literal major premise keeps nested recursions from computing
        // towers of numbers.
        let n = (0..self.rng.gen_range(0..4)).fold(ctor("nat", 0), |acc, _| Term::app(ctor("nat", 1), acc));
        Term::apps(Term::Elim("nat".into()), [motive, base, step, n])
    }

    /// `bool_rect (fun _ => T) a b c`
    fn bool_case(&mut self, ty: Ty, d: usize, ctx: &mut Vec<(Ty, bool)>) -> Term {
        let motive = Term::lam("c", Ty::Bool.term(), ty.term());
        let a = self.gen(ty, d, ctx);
        let b = self.gen(ty, d, ctx);
        let c = self.gen(Ty::Bool, d, ctx);
        Term::apps(Term::Elim("bool".into()), [motive, a, b, c])
    }
}

/// Type-checks a closed term against `ty` and confirms the universe
/// constraints stay satisfiable.
pub fn well_typed(env: &GlobalEnv, t: &Term, ty: &Term) -> Result<(), String> {
    let mut alloc = env.allocator();
    let mut scope = CommandScope::new(&mut alloc, Arc::new(Origin::synthesized("gen")), ReductionFlags::default());
    let delta = check_type(env, &mut scope, &Telescope::new(), t, ty).map_err(|e| e.to_string())?;
    let mut all = env.constraints().clone();
    for l in alloc.issued() {
        all.add_level(l);
    }
    all.add_constraints(delta);
    if all.satisfiable().is_sat() {
        Ok(())
    } else {
        Err("constraints became unsatisfiable".into())
    }
}

/// Positions of all redexes, as paths of child indices (0 = function or
/// domain, 1 = argument or body).
pub fn redex_paths(env: &GlobalEnv, t: &Term) -> Vec<Vec<u8>> {
    fn go(env: &GlobalEnv, t: &Term, path: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if contract(env, t, ReductionFlags::default()).is_some() {
            out.push(path.clone());
        }
        if let Term::App(a, b) | Term::Lam(_, a, b) | Term::Pi(_, a, b) = t {
            path.push(0);
            go(env, a, path, out);
            path.pop();
            path.push(1);
            go(env, b, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(env, t, &mut Vec::new(), &mut out);
    out
}

/// Contracts the redex at `path`.
pub fn contract_at(env: &GlobalEnv, t: &Term, path: &[u8]) -> Term {
    let Some((&first, rest)) = path.split_first() else {
        return contract(env, t, ReductionFlags::default()).expect("redex at path");
    };
    match t {
        Term::App(a, b) => {
            if first == 0 {
                Term::App(Arc::new(contract_at(env, a, rest)), b.clone())
            } else {
                Term::App(a.clone(), Arc::new(contract_at(env, b, rest)))
            }
        }
        Term::Lam(x, a, b) | Term::Pi(x, a, b) => {
            let (a, b) = if first == 0 {
                (Arc::new(contract_at(env, a, rest)), b.clone())
            } else {
                (a.clone(), Arc::new(contract_at(env, b, rest)))
            };
            if matches!(t, Term::Lam(..)) {
                Term::Lam(x.clone(), a, b)
            } else {
                Term::Pi(x.clone(), a, b)
            }
        }
        _ => unreachable!("path leads into a leaf"),
    }
}

/// Innermost normalization: normalize the children, then contract the root
/// and start over on the result. Returns `None` when `fuel` contractions
/// are not enough.
pub fn normalize_innermost(env: &GlobalEnv, t: &Term, fuel: &mut u64) -> Option<Term> {
    let t = match t {
        Term::App(f, a) => Term::app(normalize_innermost(env, f, fuel)?, normalize_innermost(env, a, fuel)?),
        Term::Lam(x, a, b) => Term::Lam(
            x.clone(),
            Arc::new(normalize_innermost(env, a, fuel)?),
            Arc::new(normalize_innermost(env, b, fuel)?),
        ),
        Term::Pi(x, a, b) => Term::Pi(
            x.clone(),
            Arc::new(normalize_innermost(env, a, fuel)?),
            Arc::new(normalize_innermost(env, b, fuel)?),
        ),
        other => other.clone(),
    };
    match contract(env, &t, ReductionFlags::default()) {
        Some(r) => {
            *fuel = fuel.checked_sub(1)?;
            normalize_innermost(env, &r, fuel)
        }
        None => Some(t),
    }
}

/// Contracts `steps` redexes, each chosen uniformly at random among those
/// present; stops early at a normal form.
pub fn random_steps(env: &GlobalEnv, t: &Term, rng: &mut impl Rng, steps: usize) -> Term {
    let mut cur = t.clone();
    for _ in 0..steps {
        let paths = redex_paths(env, &cur);
        if paths.is_empty() {
            break;
        }
        cur = contract_at(env, &cur, &paths[rng.gen_range(0..paths.len())]);
    }
    cur
}

/// Leftmost-outermost normalization: reduce the head redex until the term
/// is in weak head normal form, then normalize the pieces left to right.
/// Returns `None` when `fuel` contractions are not enough.
pub fn normalize_outermost(env: &GlobalEnv, t: &Term, fuel: &mut u64) -> Option<Term> {
    let w = whnf_outermost(env, t, fuel)?;
    Some(match &w {
        Term::Lam(x, a, b) => Term::Lam(
            x.clone(),
            Arc::new(normalize_outermost(env, a, fuel)?),
            Arc::new(normalize_outermost(env, b, fuel)?),
        ),
        Term::Pi(x, a, b) => Term::Pi(
            x.clone(),
            Arc::new(normalize_outermost(env, a, fuel)?),
            Arc::new(normalize_outermost(env, b, fuel)?),
        ),
        Term::App(..) => {
            let (head, args) = w.spine();
            let mut out = head.clone();
            for a in args {
                out = Term::app(out, normalize_outermost(env, a, fuel)?);
            }
            out
        }
        _ => w,
    })
}

fn whnf_outermost(env: &GlobalEnv, t: &Term, fuel: &mut u64) -> Option<Term> {
    let mut cur = t.clone();
    loop {
        let (head, args) = cur.spine();
        let head = head.clone();
        let args: Vec<Term> = args.into_iter().cloned().collect();
        // The major premise of a recursor is the one argument that has to
        // be evaluated before the head can fire.
        let major = match &head {
            Term::Elim(name) => env.inductive(name).map(|i| i.elim_arity() - 1).filter(|&k| k < args.len()),
            Term::EqElim if args.len() >= 6 => Some(5),
            _ => None,
        };
        let mut args = args;
        if let Some(k) = major {
            args[k] = whnf_outermost(env, &args[k], fuel)?;
        }
        let arity = match (&head, major) {
            (_, Some(k)) => k + 1,
            (Term::Lam(..), _) => 1,
            _ => 0,
        };
        if arity > args.len() {
            return Some(Term::apps(head, args));
        }
        let rest = args.split_off(arity);
        let redex = Term::apps(head.clone(), args.iter().cloned());
        match contract(env, &redex, ReductionFlags::default()) {
            Some(r) => {
                *fuel = fuel.checked_sub(1)?;
                cur = Term::apps(r, rest);
            }
            None => return Some(Term::apps(redex, rest)),
        }
    }
}
