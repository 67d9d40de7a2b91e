mod common;

use nrc_core::fixtures::*;
use nrc_core::eval::{denote, Value, ValueEnv};
use nrc_core::lang::*;
use nrc_core::pipeline::{compile, CompileError};
use proptest::prelude::*;

#[test]
fn example_queries_have_their_result_types() {
    let f = rs_store();
    for (q, ty) in [
        (Q1, "{(A: int, B: int, D: int)}"),
        (Q2, "{(C: int, D: int)}"),
        (Q3, "{(A: int, D: int)}"),
    ] {
        assert_eq!(compile(q, &f).unwrap().ty, parse_type(ty).unwrap(), "{q}");
    }
}

#[test]
fn q1_core_form_nests_comprehensions_around_a_conditional() {
    let c = compile(Q1, &rs_store()).unwrap();
    let CoreExpr::Comp(_, r, outer) = &c.core else { panic!("outer node is {}", c.core) };
    assert_eq!(r, &Atom::lab("r"));
    let mut e = outer.as_ref();
    while let CoreExpr::Let(_, _, body) = e {
        e = body;
    }
    let CoreExpr::Comp(_, s, inner) = e else { panic!("inner node is {e}") };
    assert_eq!(s, &Atom::lab("s"));
    let mut e = inner.as_ref();
    while let CoreExpr::Let(_, _, body) = e {
        e = body;
    }
    assert!(matches!(e, CoreExpr::If(..)), "{e}");
}

#[test]
fn ill_typed_programs_are_rejected() {
    let f = rs_store();
    for src in ["1 + true", "{x.E | x in R}", "if 1 then 2 else 3", "true == false", "R union S", "{}"] {
        assert!(matches!(compile(src, &f), Err(CompileError::Type(_))), "{src}");
    }
}

#[test]
fn unbound_variables_are_reported() {
    assert!(matches!(compile("R union T", &rs_store()), Err(CompileError::UnboundVar(x)) if x == "T"));
}

#[test]
fn syntax_errors_are_reported() {
    assert!(matches!(compile("for (x in R", &rs_store()), Err(CompileError::Parse(_))));
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..5).prop_map(Expr::int),
        any::<bool>().prop_map(Expr::Bool),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Plus(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, a, b)| Expr::If(Box::new(c), Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Let("x".into(), Box::new(a), Box::new(b))),
            inner.prop_map(|a| Expr::Singleton(Box::new(a))),
        ]
    })
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(e in arb_expr()) {
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn anf_output_is_anormal(e in arb_expr()) {
        let a = anormalize(&e);
        prop_assert!(CoreExpr::from_surface_exact(&a.to_surface()).is_some(), "{} is not A-normal", a);
    }

    #[test]
    fn anf_preserves_meaning(e in arb_expr()) {
        let gamma: ValueEnv = [("x".to_string(), Value::int(1)), ("y".to_string(), Value::int(2))].into();
        if let Ok(v) = denote(&e, &gamma) {
            prop_assert_eq!(denote(&anormalize(&e).to_surface(), &gamma).unwrap(), v);
        }
    }
}
