//! Brute-force declarative oracles. They search derivations built from the
//! inference rules as written, including explicit transitivity, so they
//! share no code with the algorithmic checker beyond context lookup.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::checker::TypeContext;
use crate::syntax::{Bound, Capture, CaptureSet, ExistType, ShapeType, Type};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{what} has {size} elements, above the oracle limit of {limit}")]
pub struct BudgetExceeded {
    pub what: &'static str,
    pub size: usize,
    pub limit: usize,
}

const MAX_ATOMS: usize = 6;
const MAX_UNIVERSE: usize = 20_000;

/// Derivation search for `ctx ⊢ c1 <: c2` of height at most `depth`, with
/// intermediate sets of `sc-trans` drawn from all subsets of the atoms that
/// are in scope or mentioned.
pub fn oracle_subcapture(
    ctx: &TypeContext,
    c1: &CaptureSet,
    c2: &CaptureSet,
    depth: usize,
) -> Result<bool, BudgetExceeded> {
    let mut search = CaptureSearch::new(ctx, [c1, c2])?;
    Ok(search.holds(c1, c2, depth))
}

pub fn oracle_sub_bound(
    ctx: &TypeContext,
    b1: &Bound,
    b2: &Bound,
    depth: usize,
) -> Result<bool, BudgetExceeded> {
    match (b1, b2) {
        (_, Bound::Star) => Ok(true),
        (Bound::Star, Bound::Set(_)) => Ok(false),
        (Bound::Set(c1), Bound::Set(c2)) => oracle_subcapture(ctx, c1, c2, depth),
    }
}

pub(crate) struct CaptureSearch {
    atoms: Vec<Capture>,
    /// Bound of each atom as a mask; `None` for `*` or no usable bound.
    bounds: Vec<Option<u64>>,
    memo: HashMap<(u64, u64, usize), bool>,
}

impl CaptureSearch {
    pub(crate) fn new<'a>(
        ctx: &TypeContext,
        extra: impl IntoIterator<Item = &'a CaptureSet>,
    ) -> Result<Self, BudgetExceeded> {
        let d = ctx.depth();
        let mut atoms: BTreeSet<Capture> = BTreeSet::new();
        atoms.extend((0..d.term).map(Capture::TermVar));
        atoms.extend((0..d.capt).map(Capture::CaptVar));
        atoms.extend(ctx.locations().iter().map(|(l, _)| Capture::Loc(l)));
        for c in extra {
            atoms.extend(c.iter().copied());
        }
        let atoms: Vec<Capture> = atoms.into_iter().collect();
        let mut raw_bounds = Vec::new();
        for a in &atoms {
            let bound = match *a {
                Capture::TermVar(i) => ctx.lookup_term(i).map(|t| t.captures),
                Capture::CaptVar(i) => match ctx.lookup_capt(i) {
                    Some(Bound::Set(c)) => Some(c),
                    _ => None,
                },
                Capture::Loc(l) => ctx.location(l).map(|t| t.captures.clone()),
            };
            if let Some(b) = &bound {
                atoms_missing(&atoms, b)?;
            }
            raw_bounds.push(bound);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(BudgetExceeded {
                what: "capture atom universe",
                size: atoms.len(),
                limit: MAX_ATOMS,
            });
        }
        let mut s = CaptureSearch {
            atoms,
            bounds: Vec::new(),
            memo: HashMap::new(),
        };
        s.bounds = raw_bounds
            .iter()
            .map(|b| b.as_ref().map(|b| s.mask(b)))
            .collect();
        Ok(s)
    }

    fn mask(&self, c: &CaptureSet) -> u64 {
        c.iter().fold(0, |m, a| {
            m | 1
                << self
                    .atoms
                    .iter()
                    .position(|b| b == a)
                    .expect("atom in universe")
        })
    }

    pub(crate) fn holds(&mut self, c1: &CaptureSet, c2: &CaptureSet, depth: usize) -> bool {
        let (m1, m2) = (self.mask(c1), self.mask(c2));
        self.derive(m1, m2, depth)
    }

    fn derive(&mut self, c1: u64, c2: u64, depth: usize) -> bool {
        if depth == 0 {
            return false;
        }
        if let Some(&r) = self.memo.get(&(c1, c2, depth)) {
            return r;
        }
        let r = self.derive_uncached(c1, c2, depth);
        self.memo.insert((c1, c2, depth), r);
        r
    }

    fn derive_uncached(&mut self, c1: u64, c2: u64, depth: usize) -> bool {
        // sc-elem
        if c1 & !c2 == 0 {
            return true;
        }
        // sc-var / sc-bound
        if c1.count_ones() == 1 {
            let i = c1.trailing_zeros() as usize;
            if self.bounds[i] == Some(c2) {
                return true;
            }
        }
        // sc-set, over every cover of c1 by two strictly smaller sets
        let mut a = (c1 - 1) & c1;
        while a != 0 {
            let rest = c1 & !a;
            let mut extra = a;
            loop {
                let b = rest | extra;
                if b != c1 && self.derive(a, c2, depth - 1) && self.derive(b, c2, depth - 1) {
                    return true;
                }
                if extra == 0 {
                    break;
                }
                extra = (extra - 1) & a;
            }
            a = (a - 1) & c1;
        }
        // sc-trans through any set over the universe
        let full = (1u64 << self.atoms.len()) - 1;
        for mid in 0..=full {
            if mid != c1
                && mid != c2
                && self.derive(c1, mid, depth - 1)
                && self.derive(mid, c2, depth - 1)
            {
                return true;
            }
        }
        false
    }
}

fn atoms_missing(atoms: &[Capture], c: &CaptureSet) -> Result<(), BudgetExceeded> {
    if c.iter().all(|a| atoms.contains(a)) {
        Ok(())
    } else {
        // bounds reach outside the atoms in scope only for ill-formed contexts
        Err(BudgetExceeded {
            what: "ill-scoped bound",
            size: c.len(),
            limit: 0,
        })
    }
}

/// Subject of the subtyping oracle: shapes, or possibly-existential types
/// (plain capturing types included).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    Shape(ShapeType),
    Exist(ExistType),
}

impl From<ShapeType> for Item {
    fn from(s: ShapeType) -> Self {
        Item::Shape(s)
    }
}

impl From<Type> for Item {
    fn from(t: Type) -> Self {
        Item::Exist(ExistType::Plain(t))
    }
}

impl From<ExistType> for Item {
    fn from(e: ExistType) -> Self {
        Item::Exist(e)
    }
}

const SEARCH_DEPTH: usize = 8;

/// The least relation over a finite universe of types closed under every
/// subtyping rule, premises in extended contexts included. Transitivity may
/// only pass through members of the universe.
///
/// Only shapes are stored: capturing types are related by `capt` alone, whose
/// two premises are already transitive, and existentials compare their bodies
/// in a sub-oracle under `c <: *`.
pub struct SubtypeOracle {
    shapes: Vec<ShapeType>,
    index: HashMap<ShapeType, usize>,
    rel: Vec<Vec<u64>>,
    sets: HashMap<CaptureSet, usize>,
    capture: Vec<Vec<bool>>,
    under_exist: Option<Box<SubtypeOracle>>,
}

/// `ctx ⊢ lhs <: rhs` by the declarative rules, with `trans` intermediates
/// drawn from every type of structural depth ≤ `depth` (plus the subjects).
pub fn oracle_sub_type<T: Into<Item> + Clone>(
    ctx: &TypeContext,
    lhs: &T,
    rhs: &T,
    depth: usize,
) -> Result<bool, BudgetExceeded> {
    let (a, b): (Item, Item) = (lhs.clone().into(), rhs.clone().into());
    let mut seeds = enumerate(ctx, depth);
    seeds.push(a.clone());
    seeds.push(b.clone());
    let oracle = SubtypeOracle::build(ctx, seeds)?;
    Ok(oracle.holds(&a, &b).unwrap_or(false))
}

/// Every shape and (existential) type of structural depth ≤ `depth` built
/// from `Top`, the innermost type variable, capture sets over the innermost
/// capture variable, and the four binding constructors.
pub fn enumerate(ctx: &TypeContext, depth: usize) -> Vec<Item> {
    let mut out: Vec<Item> = shapes(ctx, depth).into_iter().map(Item::Shape).collect();
    out.extend(exists(ctx, depth).into_iter().map(Item::Exist));
    out
}

fn capsets(ctx: &TypeContext) -> Vec<CaptureSet> {
    let mut out = vec![CaptureSet::empty()];
    if ctx.depth().capt > 0 {
        out.push(CaptureSet::singleton(Capture::CaptVar(0)));
    }
    out
}

fn bounds(ctx: &TypeContext) -> Vec<Bound> {
    std::iter::once(Bound::Star)
        .chain(capsets(ctx).into_iter().map(Bound::Set))
        .collect()
}

fn shapes(ctx: &TypeContext, depth: usize) -> Vec<ShapeType> {
    let mut out = vec![ShapeType::Top];
    if ctx.depth().ty > 0 {
        out.push(ShapeType::TVar(0));
    }
    if depth == 0 {
        return out;
    }
    for t in types(ctx, depth - 1) {
        for e in exists(&ctx.push_term(t.clone()), depth - 1) {
            out.push(ShapeType::Fun(Box::new(t.clone()), Box::new(e)));
        }
    }
    for s in shapes(ctx, depth - 1) {
        for e in exists(&ctx.push_type(s.clone()), depth - 1) {
            out.push(ShapeType::TFun(Box::new(s.clone()), Box::new(e)));
        }
    }
    for b in bounds(ctx) {
        for e in exists(&ctx.push_capt(b.clone()), depth - 1) {
            out.push(ShapeType::CFun(b.clone(), Box::new(e)));
        }
    }
    out
}

fn types(ctx: &TypeContext, depth: usize) -> Vec<Type> {
    let caps = capsets(ctx);
    shapes(ctx, depth)
        .into_iter()
        .flat_map(|s| caps.iter().map(move |c| Type::new(s.clone(), c.clone())))
        .collect()
}

fn exists(ctx: &TypeContext, depth: usize) -> Vec<ExistType> {
    let mut out: Vec<ExistType> = types(ctx, depth)
        .into_iter()
        .map(ExistType::Plain)
        .collect();
    if depth > 0 {
        out.extend(
            types(&ctx.push_capt(Bound::Star), depth - 1)
                .into_iter()
                .map(ExistType::Exists),
        );
    }
    out
}

/// A possibly-existential type inside an oracle: shape and capture-set
/// indices, one level down for existentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Key {
    Plain(usize, usize),
    Exists(usize, usize),
}

/// A member of an oracle's universe, see [`SubtypeOracle::member`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Member(Slot);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Shape(usize),
    Exist(Key),
}

/// What the rule for a shape's head constructor needs, as indices. `family`
/// picks the sub-oracle for the extended context, `body` the result type.
#[derive(Clone, Copy)]
enum Head {
    Other,
    Fun {
        param: (usize, usize),
        family: usize,
        body: usize,
    },
    TFun {
        bound: usize,
        family: usize,
        body: usize,
    },
    CFun {
        bound: Option<usize>,
        family: usize,
        body: usize,
    },
}

/// Bodies under one constructor, with an oracle per distinct binder.
struct Family<B> {
    binders: HashMap<B, usize>,
    bodies: HashMap<ExistType, usize>,
    oracles: Vec<(SubtypeOracle, Vec<Option<Key>>)>,
}

impl<B: Clone + Eq + std::hash::Hash> Family<B> {
    fn new() -> Self {
        Family {
            binders: HashMap::new(),
            bodies: HashMap::new(),
            oracles: Vec::new(),
        }
    }

    fn add(&mut self, binder: &B, body: &ExistType) -> (usize, usize) {
        let n = self.binders.len();
        let family = *self.binders.entry(binder.clone()).or_insert(n);
        let n = self.bodies.len();
        let body = *self.bodies.entry(body.clone()).or_insert(n);
        (family, body)
    }

    fn solve(&mut self, extend: impl Fn(&B) -> TypeContext) -> Result<(), BudgetExceeded> {
        let mut bodies: Vec<(&ExistType, usize)> =
            self.bodies.iter().map(|(e, i)| (e, *i)).collect();
        bodies.sort_by_key(|b| b.1);
        let seeds: Vec<Item> = bodies
            .iter()
            .map(|(e, _)| Item::Exist((*e).clone()))
            .collect();
        let mut binders: Vec<(&B, usize)> = self.binders.iter().map(|(b, i)| (b, *i)).collect();
        binders.sort_by_key(|b| b.1);
        for (b, _) in binders {
            let oracle = SubtypeOracle::build(&extend(b), seeds.clone())?;
            let keys = bodies.iter().map(|(e, _)| oracle.key(e)).collect();
            self.oracles.push((oracle, keys));
        }
        Ok(())
    }

    fn body_le(&self, family: usize, b1: usize, b2: usize) -> bool {
        let (oracle, keys) = &self.oracles[family];
        match (keys[b1], keys[b2]) {
            (Some(k1), Some(k2)) => oracle.le(k1, k2),
            _ => false,
        }
    }
}

fn intern(sets: &mut HashMap<CaptureSet, usize>, c: &CaptureSet) -> usize {
    let n = sets.len();
    *sets.entry(c.clone()).or_insert(n)
}

impl SubtypeOracle {
    pub fn build(ctx: &TypeContext, seeds: Vec<Item>) -> Result<Self, BudgetExceeded> {
        // the universe: seed shapes plus every same-context component a rule
        // premise may ask about
        let mut sets: HashMap<CaptureSet, usize> = HashMap::new();
        let mut exist_seeds = Vec::new();
        let mut work = vec![ShapeType::Top];
        for seed in seeds {
            match seed {
                Item::Shape(s) => work.push(s),
                Item::Exist(ExistType::Plain(t)) => {
                    intern(&mut sets, &t.captures);
                    work.push(t.shape);
                }
                Item::Exist(ExistType::Exists(t)) => exist_seeds.push(Item::from(t)),
            }
        }
        let mut shapes = Vec::new();
        let mut index: HashMap<ShapeType, usize> = HashMap::new();
        while let Some(s) = work.pop() {
            if index.contains_key(&s) {
                continue;
            }
            match &s {
                ShapeType::TVar(i) => work.extend(ctx.lookup_type(*i)),
                ShapeType::Fun(t, _) => {
                    intern(&mut sets, &t.captures);
                    work.push(t.shape.clone());
                }
                ShapeType::TFun(b, _) => work.push((**b).clone()),
                ShapeType::CFun(Bound::Set(c), _) => {
                    intern(&mut sets, c);
                }
                _ => {}
            }
            index.insert(s.clone(), shapes.len());
            shapes.push(s);
        }
        let n = shapes.len();
        if n > MAX_UNIVERSE {
            return Err(BudgetExceeded {
                what: "shape universe",
                size: n,
                limit: MAX_UNIVERSE,
            });
        }

        let mut ordered: Vec<(&CaptureSet, usize)> = sets.iter().map(|(c, i)| (c, *i)).collect();
        ordered.sort_by_key(|c| c.1);
        let mut search = CaptureSearch::new(ctx, ordered.iter().map(|c| c.0))?;
        let capture: Vec<Vec<bool>> = ordered
            .iter()
            .map(|(c1, _)| {
                ordered
                    .iter()
                    .map(|(c2, _)| search.holds(c1, c2, SEARCH_DEPTH))
                    .collect()
            })
            .collect();

        // premises in extended contexts, solved first
        let mut funs = Family::<Type>::new();
        let mut tfuns = Family::<ShapeType>::new();
        let mut cfuns = Family::<Bound>::new();
        let heads: Vec<Head> = shapes
            .iter()
            .map(|s| match s {
                ShapeType::Fun(t, e) => {
                    let (family, body) = funs.add(t, e);
                    Head::Fun {
                        param: (index[&t.shape], sets[&t.captures]),
                        family,
                        body,
                    }
                }
                ShapeType::TFun(b, e) => {
                    let (family, body) = tfuns.add(b, e);
                    Head::TFun {
                        bound: index[&**b],
                        family,
                        body,
                    }
                }
                ShapeType::CFun(b, e) => {
                    let (family, body) = cfuns.add(b, e);
                    let bound = match b {
                        Bound::Star => None,
                        Bound::Set(c) => Some(sets[c]),
                    };
                    Head::CFun {
                        bound,
                        family,
                        body,
                    }
                }
                _ => Head::Other,
            })
            .collect();
        funs.solve(|t| ctx.push_term(t.clone()))?;
        tfuns.solve(|s| ctx.push_type(s.clone()))?;
        cfuns.solve(|b| ctx.push_capt(b.clone()))?;
        let under_exist = if exist_seeds.is_empty() {
            None
        } else {
            Some(Box::new(SubtypeOracle::build(
                &ctx.push_capt(Bound::Star),
                exist_seeds,
            )?))
        };

        let mut oracle = SubtypeOracle {
            rel: vec![vec![0; n.div_ceil(64)]; n],
            shapes,
            index,
            sets,
            capture,
            under_exist,
        };
        let top = oracle.index[&ShapeType::Top];
        for i in 0..n {
            oracle.set(i, i); // refl
            oracle.set(i, top); // top
            if let ShapeType::TVar(x) = &oracle.shapes[i] {
                if let Some(b) = ctx.lookup_type(*x) {
                    let b = oracle.index[&b];
                    oracle.set(i, b); // tvar
                }
            }
        }
        let mut groups: [Vec<usize>; 3] = Default::default();
        for (i, h) in heads.iter().enumerate() {
            match h {
                Head::Fun { .. } => groups[0].push(i),
                Head::TFun { .. } => groups[1].push(i),
                Head::CFun { .. } => groups[2].push(i),
                Head::Other => {}
            }
        }
        oracle.transitive_closure();
        loop {
            let mut fresh = Vec::new();
            for group in &groups {
                for &i in group {
                    for &j in group {
                        if !oracle.get(i, j)
                            && oracle.rule_fires(heads[i], heads[j], &funs, &tfuns, &cfuns)
                        {
                            fresh.push((i, j));
                        }
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            for (i, j) in fresh {
                oracle.set(i, j);
            }
            oracle.transitive_closure();
        }
        Ok(oracle)
    }

    /// (fun), (tfun) and (cfun) for two shapes with the same head.
    fn rule_fires(
        &self,
        a: Head,
        b: Head,
        funs: &Family<Type>,
        tfuns: &Family<ShapeType>,
        cfuns: &Family<Bound>,
    ) -> bool {
        match (a, b) {
            (
                Head::Fun {
                    param: (s1, c1),
                    body: e1,
                    ..
                },
                Head::Fun {
                    param: (s2, c2),
                    family,
                    body: e2,
                },
            ) => self.le(Key::Plain(s2, c2), Key::Plain(s1, c1)) && funs.body_le(family, e1, e2),
            (
                Head::TFun {
                    bound: s1,
                    body: e1,
                    ..
                },
                Head::TFun {
                    bound: s2,
                    family,
                    body: e2,
                },
            ) => self.get(s2, s1) && tfuns.body_le(family, e1, e2),
            (
                Head::CFun {
                    bound: b1,
                    body: e1,
                    ..
                },
                Head::CFun {
                    bound: b2,
                    family,
                    body: e2,
                },
            ) => {
                let bound_ok = match (b2, b1) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(c2), Some(c1)) => self.capture[c2][c1],
                };
                bound_ok && cfuns.body_le(family, e1, e2)
            }
            _ => false,
        }
    }

    fn key(&self, e: &ExistType) -> Option<Key> {
        match e {
            ExistType::Plain(t) => Some(Key::Plain(
                *self.index.get(&t.shape)?,
                *self.sets.get(&t.captures)?,
            )),
            ExistType::Exists(t) => {
                match self
                    .under_exist
                    .as_ref()?
                    .key(&ExistType::Plain(t.clone()))?
                {
                    Key::Plain(s, c) => Some(Key::Exists(s, c)),
                    Key::Exists(..) => None,
                }
            }
        }
    }

    /// (capt) on plain types, (exist) on existentials.
    fn le(&self, a: Key, b: Key) -> bool {
        match (a, b) {
            (Key::Plain(s1, c1), Key::Plain(s2, c2)) => self.get(s1, s2) && self.capture[c1][c2],
            (Key::Exists(s1, c1), Key::Exists(s2, c2)) => self
                .under_exist
                .as_ref()
                .is_some_and(|o| o.le(Key::Plain(s1, c1), Key::Plain(s2, c2))),
            _ => false,
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rel[i][j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.rel[i][j / 64] |= 1 << (j % 64);
    }

    fn transitive_closure(&mut self) {
        let n = self.shapes.len();
        for k in 0..n {
            let row_k = self.rel[k].clone();
            for i in 0..n {
                if i != k && self.get(i, k) {
                    for (w, bits) in self.rel[i].iter_mut().zip(&row_k) {
                        *w |= bits;
                    }
                }
            }
        }
    }

    /// `None` when either side is outside the universe.
    pub fn holds(&self, a: &Item, b: &Item) -> Option<bool> {
        Some(self.relates(self.member(a)?, self.member(b)?))
    }

    /// Resolves a universe member once, for repeated queries.
    pub fn member(&self, item: &Item) -> Option<Member> {
        match item {
            Item::Shape(s) => self.index.get(s).map(|&i| Member(Slot::Shape(i))),
            Item::Exist(e) => self.key(e).map(|k| Member(Slot::Exist(k))),
        }
    }

    pub fn relates(&self, a: Member, b: Member) -> bool {
        match (a.0, b.0) {
            (Slot::Shape(i), Slot::Shape(j)) => self.get(i, j),
            (Slot::Exist(x), Slot::Exist(y)) => self.le(x, y),
            _ => false,
        }
    }

    /// Number of shapes in the universe.
    pub fn size(&self) -> usize {
        self.shapes.len()
    }
}
