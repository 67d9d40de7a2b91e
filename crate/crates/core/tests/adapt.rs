mod common;

use common::*;
use nrc_core::adapt::*;
use nrc_core::check;
use nrc_core::eval::{denote, Value};
use nrc_core::fixtures::*;
use nrc_core::lang::parse;
use nrc_core::pipeline::run_traced;
use nrc_core::store::*;
use nrc_core::trace::*;
use proptest::prelude::*;

fn int(i: i64) -> Constructor {
    Constructor::Int(i.into())
}

fn adapted(r: &Run, sigma2: &Store) -> (Store, Trace) {
    adapt(sigma2, &r.trace, &mut adapt_supply(sigma2, &r.trace)).unwrap()
}

#[test]
fn unchanged_input_gives_back_the_same_trace() {
    let f = rs_store();
    for (q, dest) in [(Q1, Q1_DEST), (Q2, Q2_DEST)] {
        let r = run(q, &f, dest);
        let (s, t) = adapted(&r, &f.store);
        assert_eq!(t, r.trace);
        assert_eq!(s, r.out);
        assert!(run_fidelity_check(&r.compiled.core, &f.store, &r.dest, &EditScript::default()).pass);
    }
}

#[test]
fn flipping_the_test_reevaluates_the_other_branch() {
    let f = cond_store();
    let r = run(COND, &f, COND_DEST);
    let edits = EditScript(vec![(l("lx"), int(4))]);
    let sigma2 = edits.apply(&f.store);
    let (s, t) = adapted(&r, &sigma2);
    assert_eq!(readback(&s, &r.dest).unwrap(), Value::int(4));
    let gold = golden("c1 <- 5; l1' <- lx = c1; cond(l1',f, l' <- lx)");
    assert!(trace_alpha_eq(&t, &gold, &frontier(&f, &r.dest)), "{t}");
    let (scratch, _) = run_traced(&sigma2, &r.dest, &r.compiled.core).unwrap();
    assert_eq!(readback(&scratch, &r.dest).unwrap(), Value::int(4));
}

#[test]
fn q1_with_a_matching_third_row() {
    let f = rs_store();
    let r = run(Q1, &f, Q1_DEST);
    let edits = EditScript(vec![(l("s31"), int(4))]);
    let sigma2 = edits.apply(&f.store);
    let (s, t) = adapted(&r, &sigma2);

    let mut edited = f.clone();
    edited.store = sigma2.clone();
    let want = denote(&parse(Q1).unwrap(), &check::value_env(&edited, &parse(Q1).unwrap()).unwrap()).unwrap();
    assert_eq!(readback(&s, &r.dest).unwrap(), want);
    assert_eq!(want.to_string(), "{(A: 7, B: 42, D: 7)}");

    // Every row keeps its cached entry; within r1 only the s3 step changes.
    let (Trace::Iter { theta: old, .. }, Trace::Iter { theta: new, .. }) = (&r.trace, &t) else { panic!() };
    assert_eq!(old.keys().collect::<Vec<_>>(), new.keys().collect::<Vec<_>>());
    let inner = |th: &Theta, row: &str| {
        let mut found = None;
        th[&l(row)].0.visit(&mut |n| {
            if let Trace::Iter { theta, .. } = n {
                found = Some(theta.clone());
            }
        });
        found.unwrap()
    };
    let (o1, n1) = (inner(old, "r1"), inner(new, "r1"));
    assert_eq!(o1[&l("s1")], n1[&l("s1")]);
    assert_eq!(o1[&l("s2")], n1[&l("s2")]);
    assert_ne!(o1[&l("s3")], n1[&l("s3")]);

    let v = run_fidelity_check(&r.compiled.core, &f.store, &r.dest, &edits);
    assert!(v.pass, "{v}");
}

#[test]
fn removing_and_adding_rows() {
    let f = intro_store();
    let r = run(INTRO, &f, INTRO_DEST);
    let drop = EditScript(vec![(l("l"), Constructor::Coll([(l("l1"), 1)].into_iter().collect()))]);
    let (s, t) = adapted(&r, &drop.apply(&f.store));
    assert_eq!(readback(&s, &r.dest).unwrap(), Value::bag([(Value::int(2), 1)]));
    let Trace::Iter { theta, .. } = &t else { panic!() };
    assert_eq!(theta.keys().cloned().collect::<LabelSet>(), labels(&["l1"]));

    let add = EditScript(vec![
        (l("n1"), int(5)),
        (l("n2"), int(9)),
        (l("n"), Constructor::Record([("A".to_string(), l("n1")), ("B".to_string(), l("n2"))].into())),
        (l("l"), Constructor::Coll([(l("l1"), 1), (l("l2"), 1), (l("n"), 1)].into_iter().collect())),
    ]);
    let (s, _) = adapted(&r, &add.apply(&f.store));
    assert_eq!(readback(&s, &r.dest).unwrap(), Value::bag([(Value::int(2), 1), (Value::int(3), 1), (Value::int(9), 1)]));
    assert!(run_fidelity_check(&r.compiled.core, &f.store, &r.dest, &add).pass);
}

#[test]
fn illegal_edits_are_refused() {
    let f = intro_store();
    let r = run(INTRO, &f, INTRO_DEST);
    let written = r.trace.written_labels().into_iter().find(|x| x.is_generated()).unwrap();
    let clash = EditScript(vec![(written.clone(), int(0))]).apply(&f.store);
    assert_eq!(check_edit(&f.store, &clash, &r.trace, &r.dest), Err(IllegalEdit::WritesTraceLabel(written)));
    let retyped = EditScript(vec![(l("l12"), Constructor::Bool(true))]).apply(&f.store);
    assert_eq!(check_edit(&f.store, &retyped, &r.trace, &r.dest), Err(IllegalEdit::IllTyped));
    let fine = EditScript(vec![(l("l11"), int(3))]).apply(&f.store);
    assert_eq!(check_edit(&f.store, &fine, &r.trace, &r.dest), Ok(()));
}

#[test]
fn matching_avoiding_a_set() {
    let f = rs_store();
    let psi = infer_store_type(&f.store).unwrap();
    assert!(matches_avoiding(&f.store, &psi, &LabelSet::new()));
    assert!(!matches_avoiding(&f.store, &psi, &labels(&["r11"])));
    let edited = EditScript(vec![(l("r11"), int(3))]).apply(&f.store);
    assert!(matches_avoiding(&edited, &psi, &LabelSet::new()));
}

#[test]
fn edit_scripts_round_trip_through_json() {
    let edits = EditScript(vec![(l("s31"), int(4)), (l("s"), Constructor::Coll([(l("s1"), 2)].into_iter().collect()))]);
    let json = edits.to_json();
    assert_eq!(json[0]["label"], "s31");
    assert_eq!(EditScript::from_json(&json).unwrap(), edits);
}

fn report(r: check::PropertyReport) -> Result<(), TestCaseError> {
    prop_assert!(r.passed(), "{}", r);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Adapting to a legal edit succeeds and agrees with evaluation from
    /// scratch.
    #[test]
    fn adaptation_has_fidelity(seed in any::<u64>()) {
        report(check::fidelity(seed, 4))?;
    }

    #[test]
    fn adaptation_is_idempotent(seed in any::<u64>()) {
        report(check::idempotence(seed, 4))?;
    }
}
