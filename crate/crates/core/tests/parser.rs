mod support;

use proptest::prelude::*;

use picheck::syntax::ast::{BinderGroup, Expr, ExprKind, Span};
use picheck::syntax::print::{print_commands, print_expr};
use picheck::syntax::{parse, parse_expr};

#[test]
fn corpus_round_trips_through_printer() {
    let files = support::corpus_files();
    assert!(files.len() >= 12);
    for f in files {
        let text = std::fs::read_to_string(&f).unwrap();
        let cmds = parse(&text).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        let printed = print_commands(&cmds);
        let again = parse(&printed).unwrap_or_else(|e| panic!("{}: reprint: {e}\n{printed}", f.display()));
        assert_eq!(cmds, again, "{}", f.display());
    }
}

#[test]
fn parsing_is_deterministic() {
    for f in support::corpus_files() {
        let text = std::fs::read_to_string(&f).unwrap();
        let runs: Vec<String> = (0..3).map(|_| format!("{:?}", parse(&text))).collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{}", f.display());
    }
}

#[test]
fn parse_errors_point_at_the_offending_token() {
    let err = parse("Definition x := fun (a : A) a.").unwrap_err();
    assert_eq!((err.line, err.column), (1, 29));
    assert!(err.to_string().contains("=>"), "{err}");
    let err = parse("Parameter A : Type.\nCheck (a b.").unwrap_err();
    assert_eq!((err.line, err.column), (2, 11));
}

fn mk(kind: ExprKind) -> Expr {
    Expr { kind, span: Span::default() }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "f", "nat"]).prop_map(|s| mk(ExprKind::Ident(s.into()))),
        Just(mk(ExprKind::Prop)),
        Just(mk(ExprKind::Type)),
    ];
    leaf.prop_recursive(5, 40, 3, |inner| {
        let group = (prop::collection::vec(prop::sample::select(vec!["x", "y"]), 1..3), inner.clone())
            .prop_map(|(names, ty)| BinderGroup {
                names: names.into_iter().map(String::from).collect(),
                ty,
                span: Span::default(),
            });
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| mk(ExprKind::App(Box::new(f), Box::new(a)))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| mk(ExprKind::Arrow(Box::new(a), Box::new(b)))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| mk(ExprKind::Equals(Box::new(a), Box::new(b)))),
            (prop::collection::vec(group.clone(), 1..3), inner.clone())
                .prop_map(|(g, b)| mk(ExprKind::Fun(g, Box::new(b)))),
            (prop::collection::vec(group, 1..3), inner).prop_map(|(g, b)| mk(ExprKind::Forall(g, Box::new(b)))),
        ]
    })
}

proptest! {
    #[test]
    fn printed_expressions_parse_back(e in arb_expr()) {
        let text = print_expr(&e);
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }
}
