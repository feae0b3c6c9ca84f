//! Nameless abstract syntax of the calculus.
//!
//! Term, type and capture variables live in three independent de Bruijn
//! namespaces. A binder only ever shifts indices of its own namespace, so
//! `fun (x: T) => t` bumps term indices inside `t` while leaving type and
//! capture indices alone. Store locations are a separate atom kind and are
//! never touched by shifting or substitution of bound variables.

use std::collections::BTreeSet;
use std::convert::Infallible;
use std::fmt;

use thiserror::Error;

/// A store location allocated by the evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc(pub usize);

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    Term,
    Type,
    Capt,
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Namespace::Term => "term",
            Namespace::Type => "type",
            Namespace::Capt => "capture",
        })
    }
}

/// A term-level variable reference: either a bound de Bruijn index or a
/// run-time store location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Bound(usize),
    Loc(Loc),
}

impl Var {
    pub fn to_capture(self) -> Capture {
        match self {
            Var::Bound(i) => Capture::TermVar(i),
            Var::Loc(l) => Capture::Loc(l),
        }
    }
}

/// A single capture-set atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Capture {
    TermVar(usize),
    CaptVar(usize),
    Loc(Loc),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CaptureSet(BTreeSet<Capture>);

impl CaptureSet {
    pub fn empty() -> Self {
        CaptureSet(BTreeSet::new())
    }

    pub fn singleton(atom: Capture) -> Self {
        CaptureSet(BTreeSet::from([atom]))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, atom: &Capture) -> bool {
        self.0.contains(atom)
    }

    pub fn insert(&mut self, atom: Capture) -> bool {
        self.0.insert(atom)
    }

    pub fn remove(&mut self, atom: &Capture) -> bool {
        self.0.remove(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Capture> + '_ {
        self.0.iter()
    }

    pub fn union(&self, other: &CaptureSet) -> CaptureSet {
        CaptureSet(self.0.union(&other.0).copied().collect())
    }

    /// `C \ x`: drops exactly the given term variable.
    pub fn minus_term_var(&self, index: usize) -> CaptureSet {
        let mut out = self.clone();
        out.0.remove(&Capture::TermVar(index));
        out
    }

    /// Plain set inclusion, the `sc-elem` premise.
    pub fn is_subset(&self, other: &CaptureSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<Capture> for CaptureSet {
    fn from_iter<I: IntoIterator<Item = Capture>>(iter: I) -> Self {
        CaptureSet(iter.into_iter().collect())
    }
}

impl IntoIterator for CaptureSet {
    type Item = Capture;
    type IntoIter = std::collections::btree_set::IntoIter<Capture>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a CaptureSet {
    type Item = &'a Capture;
    type IntoIter = std::collections::btree_set::Iter<'a, Capture>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Upper bound of a capture variable: `*` or a concrete set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Star,
    Set(CaptureSet),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShapeType {
    Top,
    TVar(usize),
    /// `forall (x: T) E`; binds a term variable in the result.
    Fun(Box<Type>, Box<ExistType>),
    /// `forall [X <: S] E`; binds a type variable in the result.
    TFun(Box<ShapeType>, Box<ExistType>),
    /// `forall [c <: B] E`; binds a capture variable in the result.
    CFun(Bound, Box<ExistType>),
}

/// A capturing type `S^C`. Pure types are `S^{}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Type {
    pub shape: ShapeType,
    pub captures: CaptureSet,
}

impl Type {
    pub fn new(shape: ShapeType, captures: CaptureSet) -> Self {
        Type { shape, captures }
    }

    pub fn pure(shape: ShapeType) -> Self {
        Type {
            shape,
            captures: CaptureSet::empty(),
        }
    }

    pub fn top() -> Self {
        Type::pure(ShapeType::Top)
    }
}

/// `exists c. T` or a plain type. The existential binds one capture variable
/// and cannot nest, which the representation enforces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExistType {
    Exists(Type),
    Plain(Type),
}

impl ExistType {
    pub fn as_plain(&self) -> Option<&Type> {
        match self {
            ExistType::Plain(t) => Some(t),
            ExistType::Exists(_) => None,
        }
    }
}

impl From<Type> for ExistType {
    fn from(t: Type) -> Self {
        ExistType::Plain(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Ans(Answer),
    App(Var, Var),
    TApp(Var, ShapeType),
    CApp(Var, CaptureSet),
    /// `let x = t in u`; binds one term variable in `u`.
    Let(Box<Term>, Box<Term>),
    /// `let <c, x> = t in u`; binds a capture variable (outer) and a term
    /// variable (inner) in `u`.
    LetEx(Box<Term>, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Lam(Type, Box<Term>),
    TLam(ShapeType, Box<Term>),
    CLam(Bound, Box<Term>),
    Pack(CaptureSet, Var),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Var(Var),
    Val(Value),
}

impl Term {
    pub fn var(index: usize) -> Term {
        Term::Ans(Answer::Var(Var::Bound(index)))
    }

    pub fn loc(loc: Loc) -> Term {
        Term::Ans(Answer::Var(Var::Loc(loc)))
    }

    pub fn val(v: Value) -> Term {
        Term::Ans(Answer::Val(v))
    }

    pub fn lam(param: Type, body: Term) -> Term {
        Term::val(Value::Lam(param, Box::new(body)))
    }

    pub fn tlam(bound: ShapeType, body: Term) -> Term {
        Term::val(Value::TLam(bound, Box::new(body)))
    }

    pub fn clam(bound: Bound, body: Term) -> Term {
        Term::val(Value::CLam(bound, Box::new(body)))
    }

    pub fn pack(set: CaptureSet, x: Var) -> Term {
        Term::val(Value::Pack(set, x))
    }

    pub fn let_(bound: Term, body: Term) -> Term {
        Term::Let(Box::new(bound), Box::new(body))
    }

    pub fn let_ex(bound: Term, body: Term) -> Term {
        Term::LetEx(Box::new(bound), Box::new(body))
    }

    pub fn is_answer(&self) -> bool {
        matches!(self, Term::Ans(_))
    }

    pub fn as_answer(&self) -> Option<&Answer> {
        match self {
            Term::Ans(a) => Some(a),
            _ => None,
        }
    }

    /// Number of AST nodes, used to budget generators and reports.
    pub fn size(&self) -> usize {
        match self {
            Term::Ans(Answer::Val(Value::Lam(_, b)))
            | Term::Ans(Answer::Val(Value::TLam(_, b)))
            | Term::Ans(Answer::Val(Value::CLam(_, b))) => 1 + b.size(),
            Term::Ans(_) | Term::App(..) | Term::TApp(..) | Term::CApp(..) => 1,
            Term::Let(t, u) | Term::LetEx(t, u) => 1 + t.size() + u.size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("shifting {namespace} index {index} by {amount} drops it below zero")]
    NegativeIndex {
        namespace: Namespace,
        index: usize,
        amount: isize,
    },
}

/// How many binders of each namespace have been passed during a traversal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Depth {
    pub term: usize,
    pub ty: usize,
    pub capt: usize,
}

impl Depth {
    pub fn enter(self, ns: Namespace) -> Depth {
        let mut d = self;
        match ns {
            Namespace::Term => d.term += 1,
            Namespace::Type => d.ty += 1,
            Namespace::Capt => d.capt += 1,
        }
        d
    }

    pub fn get(self, ns: Namespace) -> usize {
        match ns {
            Namespace::Term => self.term,
            Namespace::Type => self.ty,
            Namespace::Capt => self.capt,
        }
    }
}

/// Rewrites variable occurrences during a structural traversal. Each
/// callback receives the raw index together with the binder depth at the
/// occurrence.
pub trait VarMapper {
    type Error;
    fn term(&mut self, index: usize, depth: Depth) -> Result<Var, Self::Error>;
    fn ty(&mut self, index: usize, depth: Depth) -> Result<ShapeType, Self::Error>;
    fn capt(&mut self, index: usize, depth: Depth) -> Result<CaptureSet, Self::Error>;

    /// Called for every location atom; locations are never rewritten.
    fn location(&mut self, _loc: Loc) {}
}

/// Structural traversal plus the derived de Bruijn operations.
pub trait Syntax: Sized + Clone {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error>;

    fn shifted(&self, ns: Namespace, amount: isize, cutoff: usize) -> Result<Self, SyntaxError> {
        let mut amounts = [0; 3];
        amounts[ns_slot(ns)] = amount;
        let mut cutoffs = [0; 3];
        cutoffs[ns_slot(ns)] = cutoff;
        self.traverse(&mut Shift { amounts, cutoffs }, Depth::default())
    }

    /// Shifts every namespace at once, all with cutoff zero. Upward only, so
    /// it cannot fail.
    fn shifted_all(&self, by: Depth) -> Self {
        if by == Depth::default() {
            return self.clone();
        }
        let amounts = [by.term as isize, by.ty as isize, by.capt as isize];
        match self.traverse(
            &mut Shift {
                amounts,
                cutoffs: [0; 3],
            },
            Depth::default(),
        ) {
            Ok(v) => v,
            Err(_) => unreachable!("upward shift never underflows"),
        }
    }

    fn subst_term(&self, target: usize, replacement: Var) -> Self {
        infallible(self.traverse(
            &mut SubstTerm {
                target,
                replacement,
            },
            Depth::default(),
        ))
    }

    fn subst_type(&self, target: usize, replacement: &ShapeType) -> Self {
        infallible(self.traverse(
            &mut SubstType {
                target,
                replacement,
            },
            Depth::default(),
        ))
    }

    fn subst_capt(&self, target: usize, replacement: &CaptureSet) -> Self {
        infallible(self.traverse(
            &mut SubstCapt {
                target,
                replacement,
            },
            Depth::default(),
        ))
    }

    /// Instantiates the innermost term binder (index 0) with `replacement`
    /// and removes it, lowering the remaining free term indices by one.
    /// `replacement` is expressed in the context outside the binder.
    fn open_term(&self, replacement: Var) -> Self {
        infallible(self.traverse(&mut OpenTerm { replacement }, Depth::default()))
    }

    fn open_type(&self, replacement: &ShapeType) -> Self {
        infallible(self.traverse(&mut OpenType { replacement }, Depth::default()))
    }

    fn open_capt(&self, replacement: &CaptureSet) -> Self {
        infallible(self.traverse(&mut OpenCapt { replacement }, Depth::default()))
    }

    fn free_atoms(&self, ns: Namespace) -> FreeAtoms {
        let mut collect = CollectFree {
            ns,
            found: FreeAtoms::default(),
        };
        infallible(self.traverse(&mut collect, Depth::default()));
        collect.found
    }

    fn mentions(&self, ns: Namespace, index: usize) -> bool {
        self.free_atoms(ns).indices.contains(&index)
    }
}

/// Free indices of one namespace. Locations are reported alongside term
/// variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeAtoms {
    pub indices: BTreeSet<usize>,
    pub locations: BTreeSet<Loc>,
}

fn infallible<T>(r: Result<T, Infallible>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => match e {},
    }
}

fn ns_slot(ns: Namespace) -> usize {
    match ns {
        Namespace::Term => 0,
        Namespace::Type => 1,
        Namespace::Capt => 2,
    }
}

struct Shift {
    amounts: [isize; 3],
    cutoffs: [usize; 3],
}

impl Shift {
    fn apply(&self, ns: Namespace, index: usize, depth: Depth) -> Result<usize, SyntaxError> {
        let slot = ns_slot(ns);
        let amount = self.amounts[slot];
        if amount == 0 || index < self.cutoffs[slot] + depth.get(ns) {
            return Ok(index);
        }
        let moved = index as isize + amount;
        if moved < 0 {
            return Err(SyntaxError::NegativeIndex {
                namespace: ns,
                index,
                amount,
            });
        }
        Ok(moved as usize)
    }
}

impl VarMapper for Shift {
    type Error = SyntaxError;

    fn term(&mut self, index: usize, depth: Depth) -> Result<Var, SyntaxError> {
        Ok(Var::Bound(self.apply(Namespace::Term, index, depth)?))
    }

    fn ty(&mut self, index: usize, depth: Depth) -> Result<ShapeType, SyntaxError> {
        Ok(ShapeType::TVar(self.apply(
            Namespace::Type,
            index,
            depth,
        )?))
    }

    fn capt(&mut self, index: usize, depth: Depth) -> Result<CaptureSet, SyntaxError> {
        Ok(CaptureSet::singleton(Capture::CaptVar(self.apply(
            Namespace::Capt,
            index,
            depth,
        )?)))
    }
}

fn lift_var(v: Var, depth: Depth) -> Var {
    match v {
        Var::Bound(i) => Var::Bound(i + depth.term),
        loc => loc,
    }
}

struct SubstTerm {
    target: usize,
    replacement: Var,
}

impl VarMapper for SubstTerm {
    type Error = Infallible;

    fn term(&mut self, index: usize, depth: Depth) -> Result<Var, Infallible> {
        if index == self.target + depth.term {
            Ok(lift_var(self.replacement, depth))
        } else {
            Ok(Var::Bound(index))
        }
    }

    fn ty(&mut self, index: usize, _: Depth) -> Result<ShapeType, Infallible> {
        Ok(ShapeType::TVar(index))
    }

    fn capt(&mut self, index: usize, _: Depth) -> Result<CaptureSet, Infallible> {
        Ok(CaptureSet::singleton(Capture::CaptVar(index)))
    }
}

struct SubstType<'a> {
    target: usize,
    replacement: &'a ShapeType,
}

impl VarMapper for SubstType<'_> {
    type Error = Infallible;

    fn term(&mut self, index: usize, _: Depth) -> Result<Var, Infallible> {
        Ok(Var::Bound(index))
    }

    fn ty(&mut self, index: usize, depth: Depth) -> Result<ShapeType, Infallible> {
        if index == self.target + depth.ty {
            Ok(self.replacement.shifted_all(depth))
        } else {
            Ok(ShapeType::TVar(index))
        }
    }

    fn capt(&mut self, index: usize, _: Depth) -> Result<CaptureSet, Infallible> {
        Ok(CaptureSet::singleton(Capture::CaptVar(index)))
    }
}

struct SubstCapt<'a> {
    target: usize,
    replacement: &'a CaptureSet,
}

impl VarMapper for SubstCapt<'_> {
    type Error = Infallible;

    fn term(&mut self, index: usize, _: Depth) -> Result<Var, Infallible> {
        Ok(Var::Bound(index))
    }

    fn ty(&mut self, index: usize, _: Depth) -> Result<ShapeType, Infallible> {
        Ok(ShapeType::TVar(index))
    }

    fn capt(&mut self, index: usize, depth: Depth) -> Result<CaptureSet, Infallible> {
        if index == self.target + depth.capt {
            Ok(self.replacement.shifted_all(depth))
        } else {
            Ok(CaptureSet::singleton(Capture::CaptVar(index)))
        }
    }
}

fn open_index(index: usize, depth: usize) -> Option<usize> {
    use std::cmp::Ordering::*;
    match index.cmp(&depth) {
        Less => Some(index),
        Equal => None,
        Greater => Some(index - 1),
    }
}

struct OpenTerm {
    replacement: Var,
}

impl VarMapper for OpenTerm {
    type Error = Infallible;

    fn term(&mut self, index: usize, depth: Depth) -> Result<Var, Infallible> {
        Ok(match open_index(index, depth.term) {
            Some(i) => Var::Bound(i),
            None => lift_var(self.replacement, depth),
        })
    }

    fn ty(&mut self, index: usize, _: Depth) -> Result<ShapeType, Infallible> {
        Ok(ShapeType::TVar(index))
    }

    fn capt(&mut self, index: usize, _: Depth) -> Result<CaptureSet, Infallible> {
        Ok(CaptureSet::singleton(Capture::CaptVar(index)))
    }
}

struct OpenType<'a> {
    replacement: &'a ShapeType,
}

impl VarMapper for OpenType<'_> {
    type Error = Infallible;

    fn term(&mut self, index: usize, _: Depth) -> Result<Var, Infallible> {
        Ok(Var::Bound(index))
    }

    fn ty(&mut self, index: usize, depth: Depth) -> Result<ShapeType, Infallible> {
        Ok(match open_index(index, depth.ty) {
            Some(i) => ShapeType::TVar(i),
            None => self.replacement.shifted_all(depth),
        })
    }

    fn capt(&mut self, index: usize, _: Depth) -> Result<CaptureSet, Infallible> {
        Ok(CaptureSet::singleton(Capture::CaptVar(index)))
    }
}

struct OpenCapt<'a> {
    replacement: &'a CaptureSet,
}

impl VarMapper for OpenCapt<'_> {
    type Error = Infallible;

    fn term(&mut self, index: usize, _: Depth) -> Result<Var, Infallible> {
        Ok(Var::Bound(index))
    }

    fn ty(&mut self, index: usize, _: Depth) -> Result<ShapeType, Infallible> {
        Ok(ShapeType::TVar(index))
    }

    fn capt(&mut self, index: usize, depth: Depth) -> Result<CaptureSet, Infallible> {
        Ok(match open_index(index, depth.capt) {
            Some(i) => CaptureSet::singleton(Capture::CaptVar(i)),
            None => self.replacement.shifted_all(depth),
        })
    }
}

struct CollectFree {
    ns: Namespace,
    found: FreeAtoms,
}

impl VarMapper for CollectFree {
    type Error = Infallible;

    fn term(&mut self, index: usize, depth: Depth) -> Result<Var, Infallible> {
        if self.ns == Namespace::Term && index >= depth.term {
            self.found.indices.insert(index - depth.term);
        }
        Ok(Var::Bound(index))
    }

    fn ty(&mut self, index: usize, depth: Depth) -> Result<ShapeType, Infallible> {
        if self.ns == Namespace::Type && index >= depth.ty {
            self.found.indices.insert(index - depth.ty);
        }
        Ok(ShapeType::TVar(index))
    }

    fn capt(&mut self, index: usize, depth: Depth) -> Result<CaptureSet, Infallible> {
        if self.ns == Namespace::Capt && index >= depth.capt {
            self.found.indices.insert(index - depth.capt);
        }
        Ok(CaptureSet::singleton(Capture::CaptVar(index)))
    }

    fn location(&mut self, loc: Loc) {
        if self.ns == Namespace::Term {
            self.found.locations.insert(loc);
        }
    }
}

impl Syntax for Var {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        match *self {
            Var::Bound(i) => m.term(i, depth),
            Var::Loc(l) => {
                m.location(l);
                Ok(Var::Loc(l))
            }
        }
    }
}

impl Syntax for CaptureSet {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        let mut out = BTreeSet::new();
        for atom in &self.0 {
            match *atom {
                Capture::TermVar(i) => {
                    out.insert(m.term(i, depth)?.to_capture());
                }
                Capture::CaptVar(i) => out.extend(m.capt(i, depth)?.0),
                Capture::Loc(l) => {
                    m.location(l);
                    out.insert(Capture::Loc(l));
                }
            }
        }
        Ok(CaptureSet(out))
    }
}

impl Syntax for Bound {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        Ok(match self {
            Bound::Star => Bound::Star,
            Bound::Set(c) => Bound::Set(c.traverse(m, depth)?),
        })
    }
}

impl Syntax for ShapeType {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        Ok(match self {
            ShapeType::Top => ShapeType::Top,
            ShapeType::TVar(i) => m.ty(*i, depth)?,
            ShapeType::Fun(param, result) => ShapeType::Fun(
                Box::new(param.traverse(m, depth)?),
                Box::new(result.traverse(m, depth.enter(Namespace::Term))?),
            ),
            ShapeType::TFun(bound, result) => ShapeType::TFun(
                Box::new(bound.traverse(m, depth)?),
                Box::new(result.traverse(m, depth.enter(Namespace::Type))?),
            ),
            ShapeType::CFun(bound, result) => ShapeType::CFun(
                bound.traverse(m, depth)?,
                Box::new(result.traverse(m, depth.enter(Namespace::Capt))?),
            ),
        })
    }
}

impl Syntax for Type {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        Ok(Type {
            shape: self.shape.traverse(m, depth)?,
            captures: self.captures.traverse(m, depth)?,
        })
    }
}

impl Syntax for ExistType {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        Ok(match self {
            ExistType::Exists(t) => ExistType::Exists(t.traverse(m, depth.enter(Namespace::Capt))?),
            ExistType::Plain(t) => ExistType::Plain(t.traverse(m, depth)?),
        })
    }
}

impl Syntax for Value {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        Ok(match self {
            Value::Lam(param, body) => Value::Lam(
                param.traverse(m, depth)?,
                Box::new(body.traverse(m, depth.enter(Namespace::Term))?),
            ),
            Value::TLam(bound, body) => Value::TLam(
                bound.traverse(m, depth)?,
                Box::new(body.traverse(m, depth.enter(Namespace::Type))?),
            ),
            Value::CLam(bound, body) => Value::CLam(
                bound.traverse(m, depth)?,
                Box::new(body.traverse(m, depth.enter(Namespace::Capt))?),
            ),
            Value::Pack(set, x) => Value::Pack(set.traverse(m, depth)?, x.traverse(m, depth)?),
        })
    }
}

impl Syntax for Answer {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        Ok(match self {
            Answer::Var(x) => Answer::Var(x.traverse(m, depth)?),
            Answer::Val(v) => Answer::Val(v.traverse(m, depth)?),
        })
    }
}

impl Syntax for Term {
    fn traverse<M: VarMapper>(&self, m: &mut M, depth: Depth) -> Result<Self, M::Error> {
        Ok(match self {
            Term::Ans(a) => Term::Ans(a.traverse(m, depth)?),
            Term::App(f, x) => Term::App(f.traverse(m, depth)?, x.traverse(m, depth)?),
            Term::TApp(f, s) => Term::TApp(f.traverse(m, depth)?, s.traverse(m, depth)?),
            Term::CApp(f, c) => Term::CApp(f.traverse(m, depth)?, c.traverse(m, depth)?),
            Term::Let(t, u) => Term::Let(
                Box::new(t.traverse(m, depth)?),
                Box::new(u.traverse(m, depth.enter(Namespace::Term))?),
            ),
            Term::LetEx(t, u) => Term::LetEx(
                Box::new(t.traverse(m, depth)?),
                Box::new(u.traverse(m, depth.enter(Namespace::Capt).enter(Namespace::Term))?),
            ),
        })
    }
}
