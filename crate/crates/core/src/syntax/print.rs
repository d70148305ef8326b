//! Pretty-printing for surface syntax and kernel terms.
//!
//! Kernel terms are printed by first reading them back into surface syntax,
//! so both share one layout. Printed commands parse back to equal commands.

use std::collections::HashSet;

use super::ast::*;
use crate::kernel::env::{elim_name, GlobalEnv};
use crate::term::{Name, Sort, Term};

const PREC_TERM: u8 = 0;
const PREC_EQ: u8 = 1;
const PREC_APP: u8 = 2;
const PREC_ATOM: u8 = 3;

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, PREC_TERM);
    out
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Ident(_) | ExprKind::Prop | ExprKind::Type => PREC_ATOM,
        ExprKind::App(..) => PREC_APP,
        ExprKind::Equals(..) => PREC_EQ,
        ExprKind::Arrow(..) | ExprKind::Fun(..) | ExprKind::Forall(..) => PREC_TERM,
    }
}

fn expr(out: &mut String, e: &Expr, prec: u8) {
    let parens = precedence(e) < prec;
    if parens {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Ident(s) => out.push_str(s),
        ExprKind::Prop => out.push_str("Prop"),
        ExprKind::Type => out.push_str("Type"),
        ExprKind::App(f, a) => {
            expr(out, f, PREC_APP);
            out.push(' ');
            expr(out, a, PREC_ATOM);
        }
        ExprKind::Equals(a, b) => {
            expr(out, a, PREC_APP);
            out.push_str(" = ");
            expr(out, b, PREC_APP);
        }
        ExprKind::Arrow(a, b) => {
            expr(out, a, PREC_EQ);
            out.push_str(" -> ");
            expr(out, b, PREC_TERM);
        }
        ExprKind::Fun(groups, b) => {
            out.push_str("fun ");
            binder_groups(out, groups);
            out.push_str(" => ");
            expr(out, b, PREC_TERM);
        }
        ExprKind::Forall(groups, b) => {
            out.push_str("forall ");
            binder_groups(out, groups);
            out.push_str(", ");
            expr(out, b, PREC_TERM);
        }
    }
    if parens {
        out.push(')');
    }
}

fn binder_groups(out: &mut String, groups: &[BinderGroup]) {
    for (i, g) in groups.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push('(');
        out.push_str(&g.names.join(" "));
        out.push(':');
        expr(out, &g.ty, PREC_TERM);
        out.push(')');
    }
}

pub fn print_command(cmd: &Command) -> String {
    let mut out = String::new();
    match &cmd.kind {
        CommandKind::Parameter { name, ty } | CommandKind::Axiom { name, ty } => {
            out.push_str(&format!("{} {name} : {}", cmd.kind.keyword(), print_expr(ty)));
        }
        CommandKind::Definition { name, ty, body } => {
            out.push_str(&format!("Definition {name}"));
            if let Some(ty) = ty {
                out.push_str(&format!(" : {}", print_expr(ty)));
            }
            out.push_str(&format!(" := {}", print_expr(body)));
        }
        CommandKind::Theorem { name, ty, body } => {
            out.push_str(&format!("Theorem {name} : {} := {}", print_expr(ty), print_expr(body)));
        }
        CommandKind::Inductive(d) => {
            out.push_str(&format!("Inductive {}", d.name));
            params(&mut out, &d.params);
            out.push_str(&format!(" : {} :=", print_expr(&d.sort)));
            for (i, c) in d.ctors.iter().enumerate() {
                out.push_str(if i == 0 { "\n  " } else { "\n| " });
                out.push_str(&format!("{} : {}", c.name, print_expr(&c.ty)));
            }
        }
        CommandKind::Record(d) => {
            out.push_str(&format!("Record {}", d.name));
            params(&mut out, &d.params);
            out.push_str(&format!(" : {} :=", print_expr(&d.sort)));
            if let Some(ctor) = &d.ctor {
                out.push_str(&format!(" {ctor}"));
            }
            out.push_str(" {");
            for (i, f) in d.fields.iter().enumerate() {
                out.push_str(if i == 0 { "\n  " } else { ";\n  " });
                out.push_str(&format!("{} : {}", f.name, print_expr(&f.ty)));
            }
            out.push_str("\n}");
        }
        CommandKind::Require(m) => out.push_str(&format!("Require {m}")),
        CommandKind::Check(e) => out.push_str(&format!("Check {}", print_expr(e))),
        CommandKind::Eval(e) => out.push_str(&format!("Eval {}", print_expr(e))),
    }
    out.push('.');
    out
}

fn params(out: &mut String, groups: &[BinderGroup]) {
    if !groups.is_empty() {
        out.push(' ');
        binder_groups(out, groups);
    }
}

pub fn print_commands(cmds: &[Command]) -> String {
    cmds.iter().map(|c| print_command(c) + "\n").collect()
}

/// Prints a kernel term. `names` gives display names for the free variables,
/// innermost last; `env` supplies constructor names.
pub fn print_term(t: &Term, names: &[Name], env: Option<&GlobalEnv>) -> String {
    let mut rb = Readback { names: names.iter().map(|n| n.to_string()).collect(), env };
    print_expr(&rb.expr(t))
}

struct Readback<'e> {
    names: Vec<String>,
    env: Option<&'e GlobalEnv>,
}

fn mk(kind: ExprKind) -> Expr {
    Expr { kind, span: Span::default() }
}

fn ident(s: impl Into<String>) -> Expr {
    mk(ExprKind::Ident(s.into()))
}

impl Readback<'_> {
    fn expr(&mut self, t: &Term) -> Expr {
        match t {
            Term::Var(i) => {
                let len = self.names.len();
                if *i < len {
                    ident(self.names[len - 1 - i].clone())
                } else {
                    ident(format!("_free{}", i - len))
                }
            }
            Term::Sort(Sort::Prop) => mk(ExprKind::Prop),
            Term::Sort(Sort::Type(_)) => mk(ExprKind::Type),
            Term::Const(n) | Term::Ind(n) => ident(n.to_string()),
            Term::Ctor(ind, i) => match self.env.and_then(|e| e.ctor_name(ind, *i)) {
                Some(n) => ident(n.to_string()),
                None => ident(format!("{ind}_ctor{i}")),
            },
            Term::Elim(ind) => ident(elim_name(ind)),
            Term::Eq => ident("eq"),
            Term::Refl => ident("refl"),
            Term::EqElim => ident("eq_elim"),
            Term::App(..) => {
                let (head, args) = t.spine();
                if matches!(head, Term::Eq) && args.len() == 3 {
                    let a = self.expr(args[1]);
                    let b = self.expr(args[2]);
                    return mk(ExprKind::Equals(Box::new(a), Box::new(b)));
                }
                let mut acc = self.expr(head);
                for a in args {
                    let a = self.expr(a);
                    acc = mk(ExprKind::App(Box::new(acc), Box::new(a)));
                }
                acc
            }
            Term::Lam(..) => {
                let mut groups = Vec::new();
                let mut cur = t;
                let pushed = self.names.len();
                while let Term::Lam(x, a, b) = cur {
                    let ty = self.expr(a);
                    let name = self.fresh_name(x, b);
                    groups.push(BinderGroup { names: vec![name.clone()], ty, span: Span::default() });
                    self.names.push(name);
                    cur = b;
                }
                let body = self.expr(cur);
                self.names.truncate(pushed);
                mk(ExprKind::Fun(groups, Box::new(body)))
            }
            Term::Pi(_, a, b) if !b.has_free_var(0) => {
                let dom = self.expr(a);
                self.names.push("_".into());
                let cod = self.expr(b);
                self.names.pop();
                mk(ExprKind::Arrow(Box::new(dom), Box::new(cod)))
            }
            Term::Pi(..) => {
                let mut groups = Vec::new();
                let mut cur = t;
                let pushed = self.names.len();
                while let Term::Pi(x, a, b) = cur {
                    if !b.has_free_var(0) {
                        break;
                    }
                    let ty = self.expr(a);
                    let name = self.fresh_name(x, b);
                    groups.push(BinderGroup { names: vec![name.clone()], ty, span: Span::default() });
                    self.names.push(name);
                    cur = b;
                }
                let body = self.expr(cur);
                self.names.truncate(pushed);
                mk(ExprKind::Forall(groups, Box::new(body)))
            }
        }
    }

    /// Picks a display name for a binder that does not capture a name the
    /// body refers to.
    fn fresh_name(&self, hint: &str, body: &Term) -> String {
        let base = if hint.is_empty() || hint == "_" || hint.starts_with('#') { "x" } else { hint };
        let mut taken: HashSet<String> = HashSet::new();
        let len = self.names.len();
        // Only names of variables the body actually mentions can be captured.
        for (i, n) in self.names.iter().enumerate() {
            if body.has_free_var(len - i) {
                taken.insert(n.clone());
            }
        }
        collect_globals(body, self.env, &mut taken);
        if !taken.contains(base) {
            return base.to_string();
        }
        (0..).map(|k| format!("{base}{k}")).find(|n| !taken.contains(n)).unwrap()
    }
}

fn collect_globals(t: &Term, env: Option<&GlobalEnv>, out: &mut HashSet<String>) {
    match t {
        Term::Const(n) | Term::Ind(n) => {
            out.insert(n.to_string());
        }
        Term::Ctor(ind, i) => {
            if let Some(n) = env.and_then(|e| e.ctor_name(ind, *i)) {
                out.insert(n.to_string());
            }
        }
        Term::Elim(ind) => {
            out.insert(elim_name(ind));
        }
        Term::Eq => {
            out.insert("eq".into());
        }
        Term::Refl => {
            out.insert("refl".into());
        }
        Term::EqElim => {
            out.insert("eq_elim".into());
        }
        Term::App(f, a) | Term::Lam(_, f, a) | Term::Pi(_, f, a) => {
            collect_globals(f, env, out);
            collect_globals(a, env, out);
        }
        Term::Var(_) | Term::Sort(_) => {}
    }
}
