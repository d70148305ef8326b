//! Inductive and record declarations: well-formedness, strict positivity,
//! recursor types and record projections.

use std::collections::HashSet;
use std::sync::Arc;

use super::env::{elim_name, GlobalEnv, InductiveDescriptor, InductiveInfo};
use super::{add_definition, ensure_fresh, CommandScope, KernelError};
use crate::reduce::{self, ConvMode};
use crate::term::{abstract_const, replace_const, subst, Name, Sort, Telescope, Term};

/// Placeholder constants used while assembling binder telescopes. The `#`
/// prefix cannot appear in source identifiers.
#[derive(Default)]
struct Placeholders {
    next: usize,
}

impl Placeholders {
    fn fresh(&mut self) -> Name {
        self.next += 1;
        format!("#{}", self.next).into()
    }
}

/// A binder whose bound variable is represented by a placeholder constant.
struct Binder {
    placeholder: Name,
    display: Name,
    ty: Term,
}

impl Binder {
    fn var(&self) -> Term {
        Term::Const(self.placeholder.clone())
    }
}

fn close_pis(binders: &[Binder], body: Term) -> Term {
    binders.iter().rev().fold(body, |acc, b| {
        Term::Pi(b.display.clone(), Arc::new(b.ty.clone()), Arc::new(abstract_const(&acc, &b.placeholder)))
    })
}

fn close_lams(binders: &[Binder], body: Term) -> Term {
    binders.iter().rev().fold(body, |acc, b| {
        Term::Lam(b.display.clone(), Arc::new(b.ty.clone()), Arc::new(abstract_const(&acc, &b.placeholder)))
    })
}

/// Peels `count` leading Π binders off `ty`, naming each bound variable with
/// a placeholder. Returns the binders and the remaining body.
fn open_pis(ty: &Term, count: usize, ph: &mut Placeholders) -> Option<(Vec<Binder>, Term)> {
    let mut binders = Vec::with_capacity(count);
    let mut cur = ty.clone();
    for _ in 0..count {
        let Term::Pi(x, a, b) = &cur else { return None };
        let placeholder = ph.fresh();
        let next = subst(b, &Term::Const(placeholder.clone()), 0);
        binders.push(Binder { placeholder, display: x.clone(), ty: (**a).clone() });
        cur = next;
    }
    Some((binders, cur))
}

fn count_pis(ty: &Term) -> usize {
    let mut n = 0;
    let mut cur = ty;
    while let Term::Pi(_, _, b) = cur {
        n += 1;
        cur = b;
    }
    n
}

/// Recursor type for `info` with the motive landing in `motive_sort`:
///
/// `forall params (P : forall (x : I params), s) branch_1 .. branch_k (x : I params), P x`
///
/// where each branch takes the constructor arguments, then one induction
/// hypothesis per recursive argument, and returns `P (c params args)`.
pub fn eliminator_type(info: &InductiveInfo, motive_sort: Sort) -> Term {
    let mut ph = Placeholders::default();
    let n = info.num_params();
    let (params, _) = open_pis(&info.ty, n, &mut ph).expect("inductive type has its parameters");
    let param_vars: Vec<Term> = params.iter().map(Binder::var).collect();
    let ind_applied = Term::apps(Term::Ind(info.name().clone()), param_vars.clone());

    let motive = Binder {
        placeholder: ph.fresh(),
        display: "P".into(),
        ty: Term::pi("x", ind_applied.clone(), Term::Sort(motive_sort)),
    };

    let mut branches = Vec::with_capacity(info.num_ctors());
    for (i, ctor_ty) in info.ctor_types.iter().enumerate() {
        let mut ty = ctor_ty.clone();
        for p in &param_vars {
            let Term::Pi(_, _, b) = &ty else { unreachable!("constructor type has its parameters") };
            ty = subst(b, p, 0);
        }
        let (args, _) = open_pis(&ty, info.ctor_arity(i), &mut ph).expect("constructor arity");
        let mut hyps = Vec::new();
        for (arg, rec) in args.iter().zip(&info.recursive_args[i]) {
            let Some(k) = *rec else { continue };
            let (ys, _) = open_pis(&arg.ty, k, &mut ph).expect("recursive argument binders");
            let applied = Term::apps(arg.var(), ys.iter().map(Binder::var));
            let hyp_ty = close_pis(&ys, Term::app(motive.var(), applied));
            hyps.push(Binder {
                placeholder: ph.fresh(),
                display: format!("IH{}", arg.display).into(),
                ty: hyp_ty,
            });
        }
        let ctor_app = Term::apps(
            Term::Ctor(info.name().clone(), i),
            param_vars.iter().cloned().chain(args.iter().map(Binder::var)),
        );
        let concl = Term::app(motive.var(), ctor_app);
        let mut all = args;
        all.extend(hyps);
        branches.push(Binder {
            placeholder: ph.fresh(),
            display: format!("f{i}").into(),
            ty: close_pis(&all, concl),
        });
    }

    let major = Binder { placeholder: ph.fresh(), display: "x".into(), ty: ind_applied };
    let result = Term::app(motive.var(), major.var());
    let mut all = params;
    all.push(motive);
    all.extend(branches);
    all.push(major);
    close_pis(&all, result)
}

/// Shape and positivity analysis of one constructor type (in the parameter
/// context). Returns the recursive-argument layout.
fn analyze_constructor(
    ind: &str,
    ctor: &str,
    num_params: usize,
    ty: &Term,
) -> Result<Vec<Option<usize>>, KernelError> {
    let mut args = Vec::new();
    let mut cur = ty;
    while let Term::Pi(_, a, b) = cur {
        args.push(&**a);
        cur = b;
    }
    let m = args.len();
    if !applies_to_params(cur, ind, num_params, m) {
        return Err(KernelError::ArityMismatch(format!(
            "constructor `{ctor}` must return `{ind}` applied to exactly its {num_params} parameter(s)"
        )));
    }

    let mut layout = Vec::with_capacity(m);
    for (j, arg) in args.into_iter().enumerate() {
        if !arg.mentions_inductive(ind) {
            layout.push(None);
            continue;
        }
        // Allowed: forall (y_1 : B_1) .. (y_k : B_k), I params   with I absent from every B.
        let mut k = 0;
        let mut inner = arg;
        while let Term::Pi(_, b, rest) = inner {
            if b.mentions_inductive(ind) {
                return Err(KernelError::PositivityViolation {
                    ctor: ctor.to_string(),
                    occurrence: format!(
                        "`{ind}` occurs to the left of an arrow in argument {}",
                        j + 1
                    ),
                });
            }
            k += 1;
            inner = rest;
        }
        if !applies_to_params(inner, ind, num_params, j + k) {
            return Err(KernelError::PositivityViolation {
                ctor: ctor.to_string(),
                occurrence: format!(
                    "argument {} uses `{ind}` other than as `{ind}` applied to its parameters",
                    j + 1
                ),
            });
        }
        layout.push(Some(k));
    }
    Ok(layout)
}

/// `t` is `Ind(ind)` applied to the parameters, seen from `depth` binders
/// below the parameter context.
fn applies_to_params(t: &Term, ind: &str, num_params: usize, depth: usize) -> bool {
    let (head, args) = t.spine();
    matches!(head, Term::Ind(name) if &**name == ind)
        && args.len() == num_params
        && args
            .iter()
            .enumerate()
            .all(|(p, a)| matches!(a, Term::Var(i) if *i == depth + num_params - 1 - p))
}

/// Checks an inductive declaration and extends the environment with the
/// type, its constructors, its recursor and (for records) the projections.
pub fn check_inductive(
    env: &GlobalEnv,
    scope: &mut CommandScope<'_>,
    desc: InductiveDescriptor,
) -> Result<GlobalEnv, KernelError> {
    let name = desc.name.clone();
    let mut introduced: Vec<String> = vec![name.to_string(), elim_name(&name)];
    introduced.extend(desc.ctors.iter().map(|c| c.name.to_string()));
    if let Some(fields) = &desc.fields {
        introduced.extend(fields.iter().map(|f| f.to_string()));
    }
    let mut seen = HashSet::new();
    for n in &introduced {
        ensure_fresh(env, n)?;
        if !seen.insert(n.as_str()) {
            return Err(KernelError::NameClash(n.clone()));
        }
    }

    let provisional = env.with_provisional_inductive(&name, &desc.params, &desc.sort);
    let mut checker = scope.checker(&provisional);

    let mut ctx = Telescope::new();
    for (x, ty) in desc.params.entries() {
        checker.sort_of(&mut ctx, ty)?;
        ctx.push(x.clone(), ty.clone());
    }

    let n = desc.params.len();
    let mut recursive_args = Vec::with_capacity(desc.ctors.len());
    for ctor in &desc.ctors {
        recursive_args.push(analyze_constructor(&name, &ctor.name, n, &ctor.ty)?);
        let ctor_sort = checker.sort_of(&mut ctx, &ctor.ty)?;
        let fits = reduce::convertible(
            &provisional,
            &Term::Sort(ctor_sort),
            &Term::Sort(desc.sort.clone()),
            ConvMode::Cumulative,
            checker.flags(),
        )?;
        match fits {
            reduce::ConversionResult::Convertible(delta) => {
                for c in delta {
                    checker.add_constraint(c);
                }
            }
            reduce::ConversionResult::NotConvertible(..) => {
                return Err(KernelError::ArityMismatch(format!(
                    "constructor `{}` lives in a larger sort than `{name}`",
                    ctor.name
                )));
            }
        }
    }
    let delta = checker.into_constraints();

    let large_elim = match desc.sort {
        Sort::Type(_) => true,
        Sort::Prop => desc.ctors.is_empty(),
    };
    let info = InductiveInfo {
        ty: desc.params.close_pi(Term::Sort(desc.sort.clone())),
        ctor_types: desc.ctors.iter().map(|c| desc.params.close_pi(c.ty.clone())).collect(),
        recursive_args,
        large_elim,
        desc,
    };

    let mut out = env.clone();
    out.add_constraints(delta);
    out.push_inductive(info.clone());

    if let Some(fields) = &info.desc.fields {
        for (k, field) in fields.iter().enumerate() {
            let (ty, body) = projection(&info, fields, k);
            out = add_definition(&out, scope, field.clone(), Some(ty), body)?;
        }
    }
    Ok(out)
}

/// Type and body of the `k`-th record projection, defined through the
/// recursor:
///
/// `fun params (r : R params) => R_rect params (fun r => T_k) (fun fields => field_k) r`
///
/// where `T_k` is the field type with earlier fields replaced by their
/// projections applied to `r`.
fn projection(info: &InductiveInfo, fields: &[Name], k: usize) -> (Term, Term) {
    let mut ph = Placeholders::default();
    let n = info.num_params();
    let (params, _) = open_pis(&info.ty, n, &mut ph).expect("record parameters");
    let param_vars: Vec<Term> = params.iter().map(Binder::var).collect();
    let record_applied = Term::apps(Term::Ind(info.name().clone()), param_vars.clone());

    let mut ctor_ty = info.ctor_types[0].clone();
    for p in &param_vars {
        let Term::Pi(_, _, b) = &ctor_ty else { unreachable!() };
        ctor_ty = subst(b, p, 0);
    }
    let arity = count_pis(&ctor_ty);
    let (field_binders, _) = open_pis(&ctor_ty, arity, &mut ph).expect("record fields");

    let r = Binder { placeholder: ph.fresh(), display: "r".into(), ty: record_applied.clone() };
    let mut field_ty = field_binders[k].ty.clone();
    for (j, earlier) in field_binders[..k].iter().enumerate() {
        let proj = Term::apps(
            Term::Const(fields[j].clone()),
            param_vars.iter().cloned().chain([r.var()]),
        );
        field_ty = replace_const(&field_ty, &earlier.placeholder, &proj);
    }

    let mut outer = params;
    outer.push(r);
    let ty = close_pis(&outer, field_ty.clone());

    let r_var = outer.last().expect("record binder").var();
    let motive_binder = Binder { placeholder: ph.fresh(), display: "r".into(), ty: record_applied };
    let motive_body = replace_const(&field_ty, &outer.last().unwrap().placeholder, &motive_binder.var());
    let motive = close_lams(std::slice::from_ref(&motive_binder), motive_body);
    let branch = close_lams(&field_binders, field_binders[k].var());
    let body = Term::apps(
        Term::Elim(info.name().clone()),
        param_vars.into_iter().chain([motive, branch, r_var]),
    );
    (ty, close_lams(&outer, body))
}
