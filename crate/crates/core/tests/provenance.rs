mod common;

use std::collections::BTreeMap;

use common::*;
use nrc_core::check;
use nrc_core::fixtures::*;
use nrc_core::pipeline::supply_for;
use nrc_core::provenance::*;
use nrc_core::store::*;
use proptest::prelude::*;

/// Our label for each label of the reference trace.
fn gold_names(r: &Run, gold: &nrc_core::trace::Trace, file: &StoreFile) -> BTreeMap<Label, Label> {
    renaming(&r.trace, gold, &frontier(file, &r.dest)).into_iter().map(|(ours, g)| (g, ours)).collect()
}

fn where_cells(q: &str, dest: &str, gold: nrc_core::trace::Trace) -> impl Fn(&str) -> Option<String> {
    let f = rs_store();
    let r = run(q, &f, dest);
    let names = gold_names(&r, &gold, &f);
    let Annotations::Where(h) = Annotations::identity(Kind::Where, &f.store).extract(&r.trace) else { unreachable!() };
    move |g: &str| {
        let ours = names.get(&l(g)).cloned().unwrap_or_else(|| l(g));
        h.get(&ours).cloned().flatten().map(|a| a.to_string())
    }
}

#[test]
fn where_provenance_of_q1_cells() {
    let w = where_cells(Q1, Q1_DEST, q1_trace());
    for (cell, src) in [("l11", "r11"), ("l12", "r12"), ("l13", "s32"), ("l21", "r21"), ("l22", "r22"), ("l23", "s32")] {
        assert_eq!(w(cell).as_deref(), Some(src), "{cell}");
    }
    for cell in ["l1", "l2", "l"] {
        assert_eq!(w(cell), None, "{cell}");
    }
}

#[test]
fn where_provenance_of_q2_cells() {
    let w = where_cells(Q2, Q2_DEST, q2_trace());
    assert_eq!(w("l21'").as_deref(), Some("r32"));
    assert_eq!(w("l22'").as_deref(), Some("r31"));
    for cell in ["l11'", "l12'", "l1'", "l2'", "l'"] {
        assert_eq!(w(cell), None, "{cell}");
    }
}

#[test]
fn extraction_matches_annotated_evaluation_on_the_examples() {
    let f = rs_store();
    for (q, dest) in [(Q1, Q1_DEST), (Q2, Q2_DEST), (Q3, "l")] {
        let r = run(q, &f, dest);
        for kind in [Kind::Where, Kind::Dep, Kind::Nat, Kind::Bool, Kind::Poly] {
            let h = Annotations::identity(kind, &f.store);
            let (_, evaluated) = h.eval(&f.store, &r.dest, &r.compiled.core, &mut supply_for(&f.store, &r.dest)).unwrap();
            assert_eq!(h.extract(&r.trace).differences(&evaluated), Vec::<Label>::new(), "{q} {kind:?}");
        }
    }
}

fn dep_of(q: &str, dest: &str, gold: nrc_core::trace::Trace, cell: &str) -> DepAnn {
    let f = rs_store();
    let r = run(q, &f, dest);
    let names = gold_names(&r, &gold, &f);
    let Annotations::Dep(h) = Annotations::identity(Kind::Dep, &f.store).extract(&r.trace) else { unreachable!() };
    h.get(names.get(&l(cell)).unwrap_or(&l(cell))).cloned().unwrap_or_default()
}

// The listed sets omit tokens the union-based rules add (record fields of
// returned rows, the sum's source rows), so only inclusion holds.
#[test]
fn dependency_sets_include_the_listed_tokens() {
    let a1 = labels(&["r", "s", "r1", "r2", "r3", "s1", "s2", "s3", "r13", "s11", "r23", "s21", "r33", "s31"]);
    let top = dep_of(Q1, Q1_DEST, q1_trace(), "l");
    assert!(a1.is_subset(&top), "{top:?}");
    assert_eq!(top.difference(&a1).cloned().collect::<LabelSet>(), labels(&["r11", "r12", "r21", "r22", "s32"]));

    let a3 = labels(&["s11", "s12", "s21", "s22", "s31"]);
    let d = dep_of(Q2, Q2_DEST, q2_trace(), "l12'");
    assert_eq!(d.difference(&a3).cloned().collect::<LabelSet>(), labels(&["s", "s1", "s2", "s3"]));
}

fn poly(terms: &[&[&str]]) -> Poly {
    terms.iter().fold(Poly::zero(), |acc, m| acc.add(&m.iter().fold(Poly::one(), |p, x| p.mul(&Poly::var(*x)))))
}

fn krow(fields: &[(&str, i64)]) -> KValue<Poly> {
    KValue::Record(fields.iter().map(|(f, i)| (f.to_string(), KValue::Int((*i).into()))).collect())
}

fn poly_readback(q: &str, dest: &str) -> KValue<Poly> {
    let f = rs_store();
    let r = run(q, &f, dest);
    let Annotations::Poly(h) = Annotations::identity(Kind::Poly, &f.store).extract(&r.trace) else { unreachable!() };
    k_readback(&r.out, &h, &r.dest).unwrap()
}

#[test]
fn q1_rows_carry_products_of_their_source_rows() {
    let want = KValue::Coll(
        [
            (krow(&[("A", 1), ("B", 2), ("D", 7)]), poly(&[&["r1", "s3"]])),
            (krow(&[("A", 1), ("B", 3), ("D", 7)]), poly(&[&["r2", "s3"]])),
        ]
        .into(),
    );
    assert_eq!(poly_readback(Q1, Q1_DEST), want);
}

#[test]
fn q3_merges_the_duplicate_row() {
    let want = KValue::Coll([(krow(&[("A", 1), ("D", 7)]), poly(&[&["r1", "s3"], &["r2", "s3"]]))].into());
    let got = poly_readback(Q3, "l");
    assert_eq!(got, want);
    assert_eq!(got.to_string(), "{(A: 1, D: 7) : r1*s3 + r2*s3}");
}

#[test]
fn k_readback_ignores_element_multiplicity() {
    let sigma: Store = [
        (l("l1"), Constructor::Int(1.into())),
        (l("l2"), Constructor::Int(2.into())),
        (l("l3"), Constructor::Int(1.into())),
        (l("l"), Constructor::Coll([(l("l1"), 2), (l("l2"), 3), (l("l3"), 1)].into_iter().collect())),
    ]
    .into_iter()
    .collect();
    let h: AnnMap<KAnn<Poly>> =
        [(l("l"), Some(["k1", "k2", "k3"].iter().zip(["l1", "l2", "l3"]).map(|(k, x)| (l(x), Poly::var(*k))).collect()))].into_iter().collect();
    let want = KValue::Coll([(KValue::Int(1.into()), poly(&[&["k1"], &["k3"]])), (KValue::Int(2.into()), poly(&[&["k2"]]))].into());
    assert_eq!(k_readback(&sigma, &h, &l("l")).unwrap(), want);
    assert_eq!(k_readback(&sigma, &h, &l("l1")).unwrap(), KValue::Int(1.into()));
    let empty: Store = [(l("e"), Constructor::Coll(LabelMultiset::new()))].into_iter().collect();
    let he: AnnMap<KAnn<Poly>> = [(l("e"), Some(KCollection::zero()))].into_iter().collect();
    assert_eq!(k_readback(&empty, &he, &l("e")).unwrap(), KValue::Coll(BTreeMap::new()));
}

#[test]
fn term_annotation_functions() {
    let hw: AnnMap<WhereAnn> = [(l("a"), Some(l("r11")))].into_iter().collect();
    assert_eq!(where_fn(&Term::Copy(l("a")), &hw), Some(l("r11")));
    assert_eq!(where_fn(&Term::Plus(l("a"), l("a")), &hw), None);
    assert_eq!(where_fn(&Term::Int(5.into()), &hw), None);

    let hd: AnnMap<DepAnn> = [(l("a"), labels(&["x"])), (l("b"), labels(&["y"]))].into_iter().collect();
    assert_eq!(dep_fn(&Term::Int(3.into()), &hd), DepAnn::new());
    assert_eq!(dep_fn(&Term::Plus(l("a"), l("b")), &hd), labels(&["x", "y"]));
    assert_eq!(dep_fn(&Term::Singleton(l("a")), &hd), labels(&["x"]));

    let hk: AnnMap<KAnn<Nat>> = AnnMap::new();
    assert_eq!(semiring_fn(&Term::Empty(None), &hk), Some(KCollection::zero()));
    assert_eq!(semiring_fn(&Term::Singleton(l("a")), &hk), Some(KCollection::eta(&l("a"))));
    assert_eq!(semiring_fn(&Term::Plus(l("a"), l("b")), &hk), None);
}

#[test]
fn k_collection_monad() {
    let e = KCollection::<Poly>::eta(&l("a"));
    assert_eq!(e.get(&l("a")), Poly::one());
    assert_eq!(e.get(&l("b")), Poly::zero());
    let f: KCollection<Poly> = [(l("l1"), Poly::var("k1"))].into_iter().collect();
    let g = |_: &Label| -> KCollection<Poly> { [(l("m"), Poly::var("k2"))].into_iter().collect() };
    assert_eq!(f.bind(g), [(l("m"), poly(&[&["k1", "k2"]]))].into_iter().collect());
    assert_eq!(f.add(&KCollection::zero()), f);
}

#[test]
fn copy_chains_in_q1() {
    let f = rs_store();
    let r = run(Q1, &f, Q1_DEST);
    let names = gold_names(&r, &q1_trace(), &f);
    assert!(chain_of_copies(&r.trace, &l("r12"), &names[&l("l12")]));
    for cell in ["l11", "l12", "l13", "l21", "l22", "l23", "l1", "l2"] {
        assert!(!chain_of_copies(&r.trace, &l("r13"), &names[&l(cell)]), "{cell}");
    }
    assert!(chain_of_copies(&r.trace, &l("r13"), &l("r13")));
}

#[test]
fn annotation_json_round_trips() {
    let f = rs_store();
    let r = run(Q1, &f, Q1_DEST);
    for kind in [Kind::Where, Kind::Dep, Kind::Nat, Kind::Bool, Kind::Poly] {
        let a = Annotations::identity(kind, &f.store).extract(&r.trace);
        assert_eq!(Annotations::from_json(&a.to_json()).unwrap(), a, "{kind:?}");
    }
}

fn report(r: check::PropertyReport) -> Result<(), TestCaseError> {
    prop_assert!(r.passed(), "{}", r);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Includes the copy-chain characterization of where-provenance.
    #[test]
    fn where_extraction_matches_its_oracle(seed in any::<u64>()) {
        report(check::extraction(Kind::Where, seed, 4))?;
    }

    #[test]
    fn dep_extraction_matches_its_oracle(seed in any::<u64>()) {
        report(check::extraction(Kind::Dep, seed, 4))?;
    }

    #[test]
    fn semiring_extraction_matches_its_oracle(seed in any::<u64>()) {
        for kind in [Kind::Nat, Kind::Bool, Kind::Poly] {
            report(check::extraction(kind, seed, 2))?;
        }
    }

    #[test]
    fn counting_annotations_recover_bag_semantics(seed in any::<u64>()) {
        report(check::bag_semantics(seed, 4))?;
    }

    #[test]
    fn nat_laws(a in 0u64..50, b in 0u64..50, c in 0u64..50) {
        let (a, b, c) = (Nat(a.into()), Nat(b.into()), Nat(c.into()));
        prop_assert_eq!(check::check_laws(&a, &b, &c), Ok(()));
    }

    #[test]
    fn bool_laws(a: bool, b: bool, c: bool) {
        prop_assert_eq!(check::check_laws(&Boolean(a), &Boolean(b), &Boolean(c)), Ok(()));
    }

    #[test]
    fn poly_laws(seed in any::<u64>()) {
        report(check::semiring_laws::<Poly>(seed, 8))?;
    }
}
