//! Shared generators and a named reference implementation of substitution.
#![allow(dead_code)]

use std::collections::BTreeSet;

use capless::syntax::{
    Answer, Bound, Capture, CaptureSet, ExistType, Loc, Namespace, ShapeType, Term, Type, Value,
    Var,
};
use proptest::prelude::*;

/// Free indices range over `0..FREE` in every namespace.
pub const FREE: usize = 4;

pub fn var() -> impl Strategy<Value = Var> {
    prop_oneof![9 => (0..FREE).prop_map(Var::Bound), 1 => (0..3usize).prop_map(|l| Var::Loc(Loc(l)))]
}

pub fn atom() -> impl Strategy<Value = Capture> {
    prop_oneof![
        4 => (0..FREE).prop_map(Capture::TermVar),
        4 => (0..FREE).prop_map(Capture::CaptVar),
        1 => (0..2usize).prop_map(|l| Capture::Loc(Loc(l))),
    ]
}

pub fn captures() -> BoxedStrategy<CaptureSet> {
    prop::collection::vec(atom(), 0..3)
        .prop_map(|v| v.into_iter().collect())
        .boxed()
}

pub fn bound() -> BoxedStrategy<Bound> {
    prop_oneof![Just(Bound::Star), captures().prop_map(Bound::Set)].boxed()
}

pub fn shape() -> BoxedStrategy<ShapeType> {
    let leaf = prop_oneof![Just(ShapeType::Top), (0..FREE).prop_map(ShapeType::TVar)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        let ty = (inner.clone(), captures()).prop_map(|(s, c)| Type::new(s, c));
        let ety = prop_oneof![
            ty.clone().prop_map(ExistType::Plain),
            ty.clone().prop_map(ExistType::Exists)
        ];
        prop_oneof![
            (ty, ety.clone()).prop_map(|(t, e)| ShapeType::Fun(Box::new(t), Box::new(e))),
            (inner, ety.clone()).prop_map(|(s, e)| ShapeType::TFun(Box::new(s), Box::new(e))),
            (bound(), ety).prop_map(|(b, e)| ShapeType::CFun(b, Box::new(e))),
        ]
    })
    .boxed()
}

pub fn ty() -> BoxedStrategy<Type> {
    (shape(), captures())
        .prop_map(|(s, c)| Type::new(s, c))
        .boxed()
}

pub fn exist_type() -> BoxedStrategy<ExistType> {
    prop_oneof![
        ty().prop_map(ExistType::Plain),
        ty().prop_map(ExistType::Exists)
    ]
    .boxed()
}

/// Arbitrary (not necessarily well-typed) terms with free variables below
/// [`FREE`] in each namespace.
pub fn term() -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        var().prop_map(|v| Term::Ans(Answer::Var(v))),
        (captures(), var()).prop_map(|(c, v)| Term::pack(c, v)),
        (var(), var()).prop_map(|(f, a)| Term::App(f, a)),
        (var(), shape()).prop_map(|(f, s)| Term::TApp(f, s)),
        (var(), captures()).prop_map(|(f, c)| Term::CApp(f, c)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (ty(), inner.clone()).prop_map(|(t, b)| Term::lam(t, b)),
            (shape(), inner.clone()).prop_map(|(s, b)| Term::tlam(s, b)),
            (bound(), inner.clone()).prop_map(|(c, b)| Term::clam(c, b)),
            (inner.clone(), inner.clone()).prop_map(|(t, u)| Term::let_(t, u)),
            (inner.clone(), inner).prop_map(|(t, u)| Term::let_ex(t, u)),
        ]
    })
    .boxed()
}

/// Wraps `t` in enough binders of every kind that its free variables
/// become bound.
pub fn close(t: Term) -> Term {
    let mut t = t;
    for _ in 0..FREE {
        t = Term::lam(Type::top(), t);
    }
    for _ in 0..FREE {
        t = Term::tlam(ShapeType::Top, t);
    }
    for _ in 0..FREE {
        t = Term::clam(Bound::Star, t);
    }
    t
}

// ---------------------------------------------------------------------------
// Named syntax. Every binder carries an explicit name; free variables are
// named by their index, binders get fresh names from `FIRST_BINDER` on, so a
// free name can never be captured.

pub type Name = usize;
const FIRST_BINDER: Name = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NAtom {
    X(Name),
    C(Name),
    L(Loc),
}

pub type NSet = BTreeSet<NAtom>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NVar {
    X(Name),
    L(Loc),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NBound {
    Star,
    Set(NSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NShape {
    Top,
    TVar(Name),
    Fun(Name, Box<NType>, Box<NExist>),
    TFun(Name, Box<NShape>, Box<NExist>),
    CFun(Name, NBound, Box<NExist>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NType(pub NShape, pub NSet);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NExist {
    Exists(Name, NType),
    Plain(NType),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NTerm {
    Var(NVar),
    Lam(Name, NType, Box<NTerm>),
    TLam(Name, NShape, Box<NTerm>),
    CLam(Name, NBound, Box<NTerm>),
    Pack(NSet, NVar),
    App(NVar, NVar),
    TApp(NVar, NShape),
    CApp(NVar, NSet),
    Let(Name, Box<NTerm>, Box<NTerm>),
    LetEx(Name, Name, Box<NTerm>, Box<NTerm>),
}

/// Binder names in scope, innermost last, per namespace.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    term: Vec<Name>,
    ty: Vec<Name>,
    capt: Vec<Name>,
    fresh: Name,
}

fn name_of(stack: &[Name], index: usize) -> Name {
    if index < stack.len() {
        stack[stack.len() - 1 - index]
    } else {
        index - stack.len()
    }
}

fn index_of(stack: &[Name], name: Name) -> usize {
    match stack.iter().rev().position(|n| *n == name) {
        Some(p) => p,
        None => {
            assert!(name < FIRST_BINDER, "binder name {name} used out of scope");
            stack.len() + name
        }
    }
}

impl Scope {
    pub fn new() -> Self {
        Scope {
            fresh: FIRST_BINDER,
            ..Scope::default()
        }
    }

    /// A scope whose innermost binders are the given names.
    pub fn with(term: &[Name], ty: &[Name], capt: &[Name]) -> Self {
        Scope {
            term: term.to_vec(),
            ty: ty.to_vec(),
            capt: capt.to_vec(),
            fresh: FIRST_BINDER,
        }
    }

    fn fresh(&mut self) -> Name {
        self.fresh += 1;
        self.fresh
    }

    fn under<R>(
        &mut self,
        stack: fn(&mut Scope) -> &mut Vec<Name>,
        name: Name,
        f: impl FnOnce(&mut Scope) -> R,
    ) -> R {
        stack(self).push(name);
        let r = f(self);
        stack(self).pop();
        r
    }
}

fn terms(s: &mut Scope) -> &mut Vec<Name> {
    &mut s.term
}
fn types(s: &mut Scope) -> &mut Vec<Name> {
    &mut s.ty
}
fn capts(s: &mut Scope) -> &mut Vec<Name> {
    &mut s.capt
}

// de Bruijn -> named

pub fn name_set(s: &Scope, c: &CaptureSet) -> NSet {
    c.iter()
        .map(|a| match *a {
            Capture::TermVar(i) => NAtom::X(name_of(&s.term, i)),
            Capture::CaptVar(i) => NAtom::C(name_of(&s.capt, i)),
            Capture::Loc(l) => NAtom::L(l),
        })
        .collect()
}

fn name_var(s: &Scope, v: Var) -> NVar {
    match v {
        Var::Bound(i) => NVar::X(name_of(&s.term, i)),
        Var::Loc(l) => NVar::L(l),
    }
}

fn name_bound(s: &Scope, b: &Bound) -> NBound {
    match b {
        Bound::Star => NBound::Star,
        Bound::Set(c) => NBound::Set(name_set(s, c)),
    }
}

pub fn name_shape(s: &mut Scope, t: &ShapeType) -> NShape {
    match t {
        ShapeType::Top => NShape::Top,
        ShapeType::TVar(i) => NShape::TVar(name_of(&s.ty, *i)),
        ShapeType::Fun(p, r) => {
            let p = name_type(s, p);
            let n = s.fresh();
            NShape::Fun(
                n,
                Box::new(p),
                Box::new(s.under(terms, n, |s| name_exist(s, r))),
            )
        }
        ShapeType::TFun(b, r) => {
            let b = name_shape(s, b);
            let n = s.fresh();
            NShape::TFun(
                n,
                Box::new(b),
                Box::new(s.under(types, n, |s| name_exist(s, r))),
            )
        }
        ShapeType::CFun(b, r) => {
            let b = name_bound(s, b);
            let n = s.fresh();
            NShape::CFun(n, b, Box::new(s.under(capts, n, |s| name_exist(s, r))))
        }
    }
}

pub fn name_type(s: &mut Scope, t: &Type) -> NType {
    NType(name_shape(s, &t.shape), name_set(s, &t.captures))
}

pub fn name_exist(s: &mut Scope, e: &ExistType) -> NExist {
    match e {
        ExistType::Plain(t) => NExist::Plain(name_type(s, t)),
        ExistType::Exists(t) => {
            let n = s.fresh();
            NExist::Exists(n, s.under(capts, n, |s| name_type(s, t)))
        }
    }
}

pub fn name_term(s: &mut Scope, t: &Term) -> NTerm {
    match t {
        Term::Ans(Answer::Var(v)) => NTerm::Var(name_var(s, *v)),
        Term::Ans(Answer::Val(Value::Lam(p, b))) => {
            let p = name_type(s, p);
            let n = s.fresh();
            NTerm::Lam(n, p, Box::new(s.under(terms, n, |s| name_term(s, b))))
        }
        Term::Ans(Answer::Val(Value::TLam(p, b))) => {
            let p = name_shape(s, p);
            let n = s.fresh();
            NTerm::TLam(n, p, Box::new(s.under(types, n, |s| name_term(s, b))))
        }
        Term::Ans(Answer::Val(Value::CLam(p, b))) => {
            let p = name_bound(s, p);
            let n = s.fresh();
            NTerm::CLam(n, p, Box::new(s.under(capts, n, |s| name_term(s, b))))
        }
        Term::Ans(Answer::Val(Value::Pack(c, y))) => NTerm::Pack(name_set(s, c), name_var(s, *y)),
        Term::App(f, a) => NTerm::App(name_var(s, *f), name_var(s, *a)),
        Term::TApp(f, a) => NTerm::TApp(name_var(s, *f), name_shape(s, a)),
        Term::CApp(f, a) => NTerm::CApp(name_var(s, *f), name_set(s, a)),
        Term::Let(t, u) => {
            let t = name_term(s, t);
            let n = s.fresh();
            NTerm::Let(
                n,
                Box::new(t),
                Box::new(s.under(terms, n, |s| name_term(s, u))),
            )
        }
        Term::LetEx(t, u) => {
            let t = name_term(s, t);
            let (c, x) = (s.fresh(), s.fresh());
            let u = s.under(capts, c, |s| s.under(terms, x, |s| name_term(s, u)));
            NTerm::LetEx(c, x, Box::new(t), Box::new(u))
        }
    }
}

// named -> de Bruijn

fn index_set(s: &Scope, c: &NSet) -> CaptureSet {
    c.iter()
        .map(|a| match *a {
            NAtom::X(n) => Capture::TermVar(index_of(&s.term, n)),
            NAtom::C(n) => Capture::CaptVar(index_of(&s.capt, n)),
            NAtom::L(l) => Capture::Loc(l),
        })
        .collect()
}

fn index_var(s: &Scope, v: NVar) -> Var {
    match v {
        NVar::X(n) => Var::Bound(index_of(&s.term, n)),
        NVar::L(l) => Var::Loc(l),
    }
}

fn index_bound(s: &Scope, b: &NBound) -> Bound {
    match b {
        NBound::Star => Bound::Star,
        NBound::Set(c) => Bound::Set(index_set(s, c)),
    }
}

pub fn index_shape(s: &mut Scope, t: &NShape) -> ShapeType {
    match t {
        NShape::Top => ShapeType::Top,
        NShape::TVar(n) => ShapeType::TVar(index_of(&s.ty, *n)),
        NShape::Fun(n, p, r) => ShapeType::Fun(
            Box::new(index_type(s, p)),
            Box::new(s.under(terms, *n, |s| index_exist(s, r))),
        ),
        NShape::TFun(n, b, r) => ShapeType::TFun(
            Box::new(index_shape(s, b)),
            Box::new(s.under(types, *n, |s| index_exist(s, r))),
        ),
        NShape::CFun(n, b, r) => ShapeType::CFun(
            index_bound(s, b),
            Box::new(s.under(capts, *n, |s| index_exist(s, r))),
        ),
    }
}

pub fn index_type(s: &mut Scope, t: &NType) -> Type {
    Type::new(index_shape(s, &t.0), index_set(s, &t.1))
}

pub fn index_exist(s: &mut Scope, e: &NExist) -> ExistType {
    match e {
        NExist::Plain(t) => ExistType::Plain(index_type(s, t)),
        NExist::Exists(n, t) => ExistType::Exists(s.under(capts, *n, |s| index_type(s, t))),
    }
}

pub fn index_term(s: &mut Scope, t: &NTerm) -> Term {
    match t {
        NTerm::Var(v) => Term::Ans(Answer::Var(index_var(s, *v))),
        NTerm::Lam(n, p, b) => {
            let p = index_type(s, p);
            Term::lam(p, s.under(terms, *n, |s| index_term(s, b)))
        }
        NTerm::TLam(n, p, b) => {
            let p = index_shape(s, p);
            Term::tlam(p, s.under(types, *n, |s| index_term(s, b)))
        }
        NTerm::CLam(n, p, b) => {
            let p = index_bound(s, p);
            Term::clam(p, s.under(capts, *n, |s| index_term(s, b)))
        }
        NTerm::Pack(c, y) => Term::pack(index_set(s, c), index_var(s, *y)),
        NTerm::App(f, a) => Term::App(index_var(s, *f), index_var(s, *a)),
        NTerm::TApp(f, a) => Term::TApp(index_var(s, *f), index_shape(s, a)),
        NTerm::CApp(f, a) => Term::CApp(index_var(s, *f), index_set(s, a)),
        NTerm::Let(n, t, u) => {
            let t = index_term(s, t);
            Term::let_(t, s.under(terms, *n, |s| index_term(s, u)))
        }
        NTerm::LetEx(c, x, t, u) => {
            let t = index_term(s, t);
            Term::let_ex(
                t,
                s.under(capts, *c, |s| s.under(terms, *x, |s| index_term(s, u))),
            )
        }
    }
}

// Named substitution. Binder names never clash with free names, so this is
// plain replacement.

#[derive(Clone, Debug)]
pub enum Replace {
    Term(Name, NVar),
    Type(Name, NShape),
    Capt(Name, NSet),
    /// Renumbers free names `>= cutoff` of one namespace upwards by one.
    Bump(Namespace, Name),
}

fn bump(r: &Replace, ns: Namespace, n: Name) -> Name {
    match r {
        Replace::Bump(which, cutoff) if *which == ns && n >= *cutoff && n < FIRST_BINDER => n + 1,
        _ => n,
    }
}

fn replace_var(r: &Replace, v: NVar) -> NVar {
    match (r, v) {
        (Replace::Term(from, to), NVar::X(n)) if n == *from => *to,
        (_, NVar::X(n)) => NVar::X(bump(r, Namespace::Term, n)),
        _ => v,
    }
}

fn replace_set(r: &Replace, c: &NSet) -> NSet {
    let mut out = NSet::new();
    for a in c {
        match (r, a) {
            (Replace::Term(from, to), NAtom::X(n)) if n == from => out.insert(match to {
                NVar::X(m) => NAtom::X(*m),
                NVar::L(l) => NAtom::L(*l),
            }),
            (Replace::Capt(from, to), NAtom::C(n)) if n == from => {
                out.extend(to.iter().copied());
                true
            }
            (_, NAtom::X(n)) => out.insert(NAtom::X(bump(r, Namespace::Term, *n))),
            (_, NAtom::C(n)) => out.insert(NAtom::C(bump(r, Namespace::Capt, *n))),
            _ => out.insert(*a),
        };
    }
    out
}

fn replace_bound(r: &Replace, b: &NBound) -> NBound {
    match b {
        NBound::Star => NBound::Star,
        NBound::Set(c) => NBound::Set(replace_set(r, c)),
    }
}

pub fn replace_shape(r: &Replace, t: &NShape) -> NShape {
    match t {
        NShape::Top => NShape::Top,
        NShape::TVar(n) => match r {
            Replace::Type(from, to) if from == n => to.clone(),
            _ => NShape::TVar(bump(r, Namespace::Type, *n)),
        },
        NShape::Fun(n, p, e) => NShape::Fun(
            *n,
            Box::new(replace_type(r, p)),
            Box::new(replace_exist(r, e)),
        ),
        NShape::TFun(n, b, e) => NShape::TFun(
            *n,
            Box::new(replace_shape(r, b)),
            Box::new(replace_exist(r, e)),
        ),
        NShape::CFun(n, b, e) => {
            NShape::CFun(*n, replace_bound(r, b), Box::new(replace_exist(r, e)))
        }
    }
}

pub fn replace_type(r: &Replace, t: &NType) -> NType {
    NType(replace_shape(r, &t.0), replace_set(r, &t.1))
}

pub fn replace_exist(r: &Replace, e: &NExist) -> NExist {
    match e {
        NExist::Plain(t) => NExist::Plain(replace_type(r, t)),
        NExist::Exists(n, t) => NExist::Exists(*n, replace_type(r, t)),
    }
}

pub fn replace_term(r: &Replace, t: &NTerm) -> NTerm {
    let b = |t: &NTerm| Box::new(replace_term(r, t));
    match t {
        NTerm::Var(v) => NTerm::Var(replace_var(r, *v)),
        NTerm::Lam(n, p, body) => NTerm::Lam(*n, replace_type(r, p), b(body)),
        NTerm::TLam(n, p, body) => NTerm::TLam(*n, replace_shape(r, p), b(body)),
        NTerm::CLam(n, p, body) => NTerm::CLam(*n, replace_bound(r, p), b(body)),
        NTerm::Pack(c, y) => NTerm::Pack(replace_set(r, c), replace_var(r, *y)),
        NTerm::App(f, a) => NTerm::App(replace_var(r, *f), replace_var(r, *a)),
        NTerm::TApp(f, a) => NTerm::TApp(replace_var(r, *f), replace_shape(r, a)),
        NTerm::CApp(f, a) => NTerm::CApp(replace_var(r, *f), replace_set(r, a)),
        NTerm::Let(n, t, u) => NTerm::Let(*n, b(t), b(u)),
        NTerm::LetEx(c, x, t, u) => NTerm::LetEx(*c, *x, b(t), b(u)),
    }
}

/// Name reserved for the binder being opened.
pub const OPENED: Name = FIRST_BINDER;

/// The reference answer for `subst_*` at the free index `target`.
pub fn named_subst(t: &Term, r: impl FnOnce(&mut Scope) -> Replace) -> Term {
    let mut s = Scope::new();
    let named = name_term(&mut s, t);
    let rep = r(&mut s);
    index_term(&mut Scope::new(), &replace_term(&rep, &named))
}

/// The reference answer for `open_*`: `t` sits under one binder of the
/// namespace selected by `inner`, which is named [`OPENED`] and replaced.
pub fn named_open(t: &Term, inner: Scope, r: impl FnOnce(&mut Scope) -> Replace) -> Term {
    let mut s = Scope {
        fresh: FIRST_BINDER + 1,
        ..inner
    };
    let named = name_term(&mut s, t);
    let rep = r(&mut Scope::new());
    index_term(&mut Scope::new(), &replace_term(&rep, &named))
}
