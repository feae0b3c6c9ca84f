//! Algebraic laws of the de Bruijn operations, the printer and subcapturing.

mod common;

use capless::checker::{subcapture, Binding, TypeContext};
use capless::surface::{parse_term, print_term};
use capless::syntax::{Bound, Capture, CaptureSet, Loc, Namespace, ShapeType, Syntax, Type, Var};
use common::*;
use proptest::prelude::*;

const NAMESPACES: [Namespace; 3] = [Namespace::Term, Namespace::Type, Namespace::Capt];

fn many() -> ProptestConfig {
    ProptestConfig::with_cases(10_000)
}

proptest! {
    #![proptest_config(many())]

    #[test]
    fn shift_up_then_down_is_identity(t in term(), ns in 0..3usize, cutoff in 0..3usize) {
        let ns = NAMESPACES[ns];
        let up = t.shifted(ns, 1, cutoff).unwrap();
        prop_assert!(!up.mentions(ns, cutoff));
        prop_assert_eq!(up.shifted(ns, -1, cutoff).unwrap(), t);
    }

    #[test]
    fn substituting_a_variable_for_itself_is_identity(t in term(), i in 0..FREE) {
        prop_assert_eq!(t.subst_term(i, Var::Bound(i)), t.clone());
        prop_assert_eq!(t.subst_type(i, &ShapeType::TVar(i)), t.clone());
        prop_assert_eq!(t.subst_capt(i, &CaptureSet::singleton(Capture::CaptVar(i))), t);
    }

    #[test]
    fn shift_agrees_with_named(t in term(), ns in 0..3usize, cutoff in 0..3usize) {
        let ns = NAMESPACES[ns];
        let expected = named_subst(&t, |_| Replace::Bump(ns, cutoff));
        prop_assert_eq!(t.shifted(ns, 1, cutoff).unwrap(), expected);
    }

    #[test]
    fn term_substitution_agrees_with_named(t in term(), target in 0..FREE, to in var()) {
        let expected = named_subst(&t, |_| Replace::Term(target, match to {
            Var::Bound(j) => NVar::X(j),
            Var::Loc(l) => NVar::L(l),
        }));
        prop_assert_eq!(t.subst_term(target, to), expected);
    }

    #[test]
    fn type_substitution_agrees_with_named(t in term(), target in 0..FREE, to in shape()) {
        let expected = named_subst(&t, |s| Replace::Type(target, name_shape(s, &to)));
        prop_assert_eq!(t.subst_type(target, &to), expected);
    }

    #[test]
    fn capture_substitution_agrees_with_named(t in term(), target in 0..FREE, to in captures()) {
        let expected = named_subst(&t, |s| Replace::Capt(target, name_set(s, &to)));
        prop_assert_eq!(t.subst_capt(target, &to), expected);
    }

    #[test]
    fn opening_agrees_with_named(t in term(), x in var(), s in shape(), c in captures()) {
        let expected = named_open(&t, Scope::with(&[OPENED], &[], &[]), |_| Replace::Term(OPENED, match x {
            Var::Bound(j) => NVar::X(j),
            Var::Loc(l) => NVar::L(l),
        }));
        prop_assert_eq!(t.open_term(x), expected);
        let expected = named_open(&t, Scope::with(&[], &[OPENED], &[]), |sc| Replace::Type(OPENED, name_shape(sc, &s)));
        prop_assert_eq!(t.open_type(&s), expected);
        let expected = named_open(&t, Scope::with(&[], &[], &[OPENED]), |sc| Replace::Capt(OPENED, name_set(sc, &c)));
        prop_assert_eq!(t.open_capt(&c), expected);
    }

    #[test]
    fn printing_round_trips(t in term()) {
        let closed = close(t);
        let text = print_term(&closed);
        let (_, back) = parse_term(&text).map_err(|d| TestCaseError::fail(format!("{text}: {d:?}")))?;
        prop_assert_eq!(back, closed);
    }

    #[test]
    fn types_round_trip(e in exist_type()) {
        let wrapped = close(capless::syntax::Term::lam(
            Type::pure(ShapeType::Fun(Box::new(Type::top()), Box::new(e))),
            capless::syntax::Term::var(0),
        ));
        let text = print_term(&wrapped);
        let (_, back) = parse_term(&text).map_err(|d| TestCaseError::fail(format!("{text}: {d:?}")))?;
        prop_assert_eq!(back, wrapped);
    }
}

/// A random well-formed context: each binding may only mention earlier ones.
fn context() -> impl Strategy<Value = TypeContext> {
    prop::collection::vec((0..3u8, any::<u8>(), any::<bool>()), 0..5).prop_map(|layout| {
        let mut ctx = TypeContext::empty();
        for (kind, mask, star) in layout {
            let atoms = atoms_of(&ctx);
            let set: CaptureSet = atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| *a)
                .collect();
            ctx = match kind {
                0 => ctx.push(Binding::Term(Type::new(ShapeType::Top, set))),
                1 if star => ctx.push(Binding::Capt(Bound::Star)),
                1 => ctx.push(Binding::Capt(Bound::Set(set))),
                _ => ctx.push(Binding::Type(ShapeType::Top)),
            };
        }
        ctx
    })
}

fn atoms_of(ctx: &TypeContext) -> Vec<Capture> {
    let d = ctx.depth();
    (0..d.term)
        .map(Capture::TermVar)
        .chain((0..d.capt).map(Capture::CaptVar))
        .collect()
}

fn subset(atoms: &[Capture], mask: u8) -> CaptureSet {
    atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, a)| *a)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn subcapture_is_reflexive(ctx in context(), m in any::<u8>()) {
        let c = subset(&atoms_of(&ctx), m);
        prop_assert!(subcapture(&ctx, &c, &c).unwrap());
    }

    #[test]
    fn subcapture_is_transitive(ctx in context(), m1 in any::<u8>(), m2 in any::<u8>(), m3 in any::<u8>()) {
        let atoms = atoms_of(&ctx);
        let (a, b, c) = (subset(&atoms, m1), subset(&atoms, m2), subset(&atoms, m3));
        if subcapture(&ctx, &a, &b).unwrap() && subcapture(&ctx, &b, &c).unwrap() {
            prop_assert!(subcapture(&ctx, &a, &c).unwrap());
        }
    }

    #[test]
    fn subcapture_is_elementwise(ctx in context(), m1 in any::<u8>(), m2 in any::<u8>()) {
        let atoms = atoms_of(&ctx);
        let (a, b) = (subset(&atoms, m1), subset(&atoms, m2));
        let each = a.iter().all(|x| subcapture(&ctx, &CaptureSet::singleton(*x), &b).unwrap());
        prop_assert_eq!(subcapture(&ctx, &a, &b).unwrap(), each);
    }

    #[test]
    fn subcapture_is_monotone_on_the_right(ctx in context(), m1 in any::<u8>(), m2 in any::<u8>(), extra in any::<u8>()) {
        let atoms = atoms_of(&ctx);
        let (a, b) = (subset(&atoms, m1), subset(&atoms, m2));
        let bigger = b.union(&subset(&atoms, extra));
        if subcapture(&ctx, &a, &b).unwrap() {
            prop_assert!(subcapture(&ctx, &a, &bigger).unwrap());
        }
    }

    #[test]
    fn empty_set_is_least(ctx in context(), m in any::<u8>()) {
        let c = subset(&atoms_of(&ctx), m);
        prop_assert!(subcapture(&ctx, &CaptureSet::empty(), &c).unwrap());
    }
}

#[test]
fn locations_are_never_shifted() {
    let t = capless::syntax::Term::App(Var::Loc(Loc(3)), Var::Bound(0));
    for ns in NAMESPACES {
        assert_eq!(
            t.shifted(ns, 5, 0).unwrap().subst_term(0, Var::Bound(0)),
            t.shifted(ns, 5, 0).unwrap()
        );
    }
    assert_eq!(
        t.shifted(Namespace::Term, 2, 0).unwrap(),
        capless::syntax::Term::App(Var::Loc(Loc(3)), Var::Bound(2))
    );
}
