mod common;

use common::*;
use nrc_core::check;
use nrc_core::fixtures::*;
use nrc_core::slicing::*;
use nrc_core::store::Term;
use nrc_core::trace::{print_trace, trace_alpha_eq, Trace};
use proptest::prelude::*;

/// Our trace renamed to the reference listing's labels.
fn in_gold_names(q: &str, file: &nrc_core::store::StoreFile, dest: &str, gold: &Trace) -> Trace {
    let r = run(q, file, dest);
    rename(&r.trace, &renaming(&r.trace, gold, &frontier(file, &r.dest)))
}

#[test]
fn q1_backward_slice_from_the_first_row() {
    let f = rs_store();
    let t = in_gold_names(Q1, &f, Q1_DEST, &q1_trace());
    let s = backward_slice(&t, &labels(&["l1"])).unwrap();
    assert!(trace_alpha_eq(&s, &golden(Q1_SLICE_L1), &frontier(&f, &l(Q1_DEST))), "{}", print_trace(&s, false));
    assert_eq!(squash(&simplify(&s).to_string()), squash(Q1_SLICE_L1_SIMPLIFIED));
    assert_eq!(residue(&s).to_string(), "{(A:r11,B:r12,D:s32)}");
}

#[test]
fn q2_simplified_slice_for_the_sum() {
    let f = rs_store();
    let t = in_gold_names(Q2, &f, Q2_DEST, &q2_trace());
    let s = backward_slice(&t, &labels(&["l12'"])).unwrap();
    assert_eq!(squash(&simplify(&s).to_string()), squash(Q2_SLICE_L12_SIMPLIFIED));
    assert_eq!(residue(&s).to_string(), "s12 + s22");
}

#[test]
fn projection_example_slices() {
    let f = intro_store();
    let t = in_gold_names(INTRO, &f, INTRO_DEST, &golden(INTRO_TRACE));
    let fr = frontier(&f, &l(INTRO_DEST));
    let back = backward_slice(&t, &labels(&["l1'"])).unwrap();
    assert!(trace_alpha_eq(&back, &golden(INTRO_BACKWARD_L1), &fr), "{back}");
    assert_eq!(forward_slice(&t, &labels(&["l21"])), None);
    let fwd = forward_slice(&t, &labels(&["l22"])).unwrap();
    assert!(trace_alpha_eq(&fwd, &golden(INTRO_FORWARD_L22), &fr), "{fwd}");
}

#[test]
fn slicing_on_everything_keeps_the_whole_trace() {
    let f = rs_store();
    let r = run(Q2, &f, Q2_DEST);
    assert_eq!(backward_slice(&r.trace, &r.trace.written_labels()).as_ref(), Some(&r.trace));
    let inputs = f.store.labels().cloned().collect();
    let fwd = forward_slice(&r.trace, &inputs).unwrap();
    // Constants depend on no input, so only their steps drop out.
    let dropped: Vec<_> = r.trace.steps().into_iter().filter(|s| !fwd.steps().contains(s)).cloned().collect();
    assert_eq!(dropped.len(), 3);
    assert!(dropped.iter().all(|s| matches!(s, Trace::Assign { term: Term::Int(_), .. })), "{dropped:?}");

    let f = intro_store();
    let r = run(INTRO, &f, INTRO_DEST);
    let inputs = f.store.labels().cloned().collect();
    assert_eq!(forward_slice(&r.trace, &inputs).as_ref(), Some(&r.trace));
}

#[test]
fn assignments_simplify_to_one_expression() {
    let t = golden("a <- 1; b <- x + a; c <- b + y");
    assert_eq!(residue(&t).to_string(), "(x + 1) + y");
}

#[test]
fn unknown_focus_labels_are_rejected() {
    let f = intro_store();
    let r = run(INTRO, &f, INTRO_DEST);
    assert!(check_focus(&r.trace, &labels(&["l1"]), Some(&f.store)).is_ok());
    assert!(matches!(check_focus(&r.trace, &labels(&["nope"]), Some(&f.store)), Err(SliceError::UnknownLabel(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Sufficiency, monotonicity, closure duality and provenance on the slice.
    #[test]
    fn slicing_properties(seed in any::<u64>()) {
        let r = check::slicing(seed, 4);
        prop_assert!(r.passed(), "{}", r);
    }
}
