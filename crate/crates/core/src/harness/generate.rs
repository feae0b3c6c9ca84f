//! Random well-typed programs. Generation is type-directed: every bound term
//! is synthesized as it is built, eliminations are only emitted for heads of
//! the right shape, and a let whose body cannot avoid its binder falls back
//! to a closed body.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checker::{check_against, sub_bound, sub_type, type_synth, TypeContext};
use crate::syntax::{Bound, Capture, CaptureSet, ExistType, ShapeType, Term, Type, Var};

const ATTEMPTS: usize = 8;

fn identity() -> Term {
    Term::lam(Type::top(), Term::var(0))
}

/// A closed program that type-checks in the empty context; deterministic in
/// `seed`. `size` bounds the number of let bindings and abstractions.
pub fn gen_well_typed(seed: u64, size: usize) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let empty = TypeContext::empty();
    for _ in 0..ATTEMPTS {
        let mut g = Gen {
            rng: &mut rng,
            budget: size,
        };
        let t = g.body(&empty);
        if type_synth(&empty, &t).is_ok() {
            return t;
        }
    }
    identity()
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    budget: usize,
}

impl Gen<'_> {
    fn spend(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    fn body(&mut self, ctx: &TypeContext) -> Term {
        if self.budget == 0 || self.rng.gen_bool(0.15) {
            return self.answer(ctx);
        }
        self.budget -= 1;
        let bound = self.bound(ctx);
        let Ok(r) = type_synth(ctx, &bound) else {
            return self.answer(ctx);
        };
        let (inner, wrap): (TypeContext, fn(Term, Term) -> Term) = match r.ty {
            ExistType::Plain(t) => (ctx.push_term(t), Term::let_),
            ExistType::Exists(t) => (ctx.push_capt(Bound::Star).push_term(t), Term::let_ex),
        };
        let rest = self.body(&inner);
        let candidate = wrap(bound.clone(), rest);
        if type_synth(ctx, &candidate).is_ok() {
            return candidate;
        }
        let closed = wrap(bound, identity());
        if type_synth(ctx, &closed).is_ok() {
            closed
        } else {
            identity()
        }
    }

    fn answer(&mut self, ctx: &TypeContext) -> Term {
        let n = ctx.depth().term;
        if n > 0 && self.rng.gen_bool(0.5) {
            return Term::var(self.rng.gen_range(0..n));
        }
        if self.spend() {
            self.value(ctx)
        } else {
            identity()
        }
    }

    fn bound(&mut self, ctx: &TypeContext) -> Term {
        let n = ctx.depth().term;
        let mut options: Vec<Term> = Vec::new();
        let heads: Vec<(usize, ShapeType)> = (0..n)
            .filter_map(|i| ctx.lookup_term(i).map(|t| (i, promote(ctx, t.shape))))
            .collect();
        for (f, shape) in &heads {
            let fv = Var::Bound(*f);
            match shape {
                ShapeType::Fun(param, _) => {
                    for a in 0..n {
                        let expected = ExistType::Plain((**param).clone());
                        if check_against(ctx, &Term::var(a), &expected).is_ok() {
                            options.push(Term::App(fv, Var::Bound(a)));
                        }
                    }
                }
                ShapeType::TFun(b, _) => {
                    for s in self.shape_pool(ctx) {
                        if sub_type(ctx, &s, &**b).unwrap_or(false) {
                            options.push(Term::TApp(fv, s));
                        }
                    }
                }
                ShapeType::CFun(b, _) => {
                    for c in self.set_pool(ctx) {
                        if sub_bound(ctx, &Bound::Set(c.clone()), b).unwrap_or(false) {
                            options.push(Term::CApp(fv, c));
                        }
                    }
                }
                _ => {}
            }
        }
        let roll = self.rng.gen_range(0..10);
        if !options.is_empty() && roll < 6 {
            return options.choose(self.rng).cloned().expect("non-empty");
        }
        if n > 0 && roll == 6 {
            let y = self.rng.gen_range(0..n);
            return Term::pack(CaptureSet::singleton(Capture::TermVar(y)), Var::Bound(y));
        }
        if n > 0 && roll == 7 {
            return Term::var(self.rng.gen_range(0..n));
        }
        if roll == 8 && self.spend() {
            return self.body(ctx);
        }
        self.value(ctx)
    }

    /// Abstraction bodies get a small slice of the budget so that most of
    /// the program stays at top level, where it is actually evaluated.
    fn value(&mut self, ctx: &TypeContext) -> Term {
        let slice = self.rng.gen_range(0..=2).min(self.budget);
        let rest = self.budget - slice;
        self.budget = slice;
        let v = self.abstraction(ctx);
        self.budget += rest;
        v
    }

    fn abstraction(&mut self, ctx: &TypeContext) -> Term {
        match self.rng.gen_range(0..6) {
            0..=2 => {
                let param = self
                    .type_pool(ctx)
                    .choose(self.rng)
                    .cloned()
                    .expect("non-empty");
                let body = self.body(&ctx.push_term(param.clone()));
                Term::lam(param, body)
            }
            3 | 4 => {
                let bound = self
                    .shape_pool(ctx)
                    .choose(self.rng)
                    .cloned()
                    .expect("non-empty");
                let body = self.body(&ctx.push_type(bound.clone()));
                Term::tlam(bound, body)
            }
            _ => {
                let mut bounds = vec![Bound::Star];
                bounds.extend(self.set_pool(ctx).into_iter().map(Bound::Set));
                let bound = bounds.choose(self.rng).cloned().expect("non-empty");
                let body = self.body(&ctx.push_capt(bound.clone()));
                Term::clam(bound, body)
            }
        }
    }

    fn shape_pool(&self, ctx: &TypeContext) -> Vec<ShapeType> {
        let mut out = vec![
            ShapeType::Top,
            ShapeType::Fun(Box::new(Type::top()), Box::new(Type::top().into())),
        ];
        out.extend((0..ctx.depth().ty).map(ShapeType::TVar));
        out
    }

    fn set_pool(&self, ctx: &TypeContext) -> Vec<CaptureSet> {
        let d = ctx.depth();
        let mut out = vec![CaptureSet::empty()];
        out.extend((0..d.term).map(|i| CaptureSet::singleton(Capture::TermVar(i))));
        out.extend((0..d.capt).map(|i| CaptureSet::singleton(Capture::CaptVar(i))));
        out
    }

    fn type_pool(&self, ctx: &TypeContext) -> Vec<Type> {
        let mut out = vec![Type::top(), Type::top()];
        for s in self.shape_pool(ctx) {
            out.push(Type::pure(s));
        }
        for c in self.set_pool(ctx).into_iter().skip(1) {
            out.push(Type::new(ShapeType::Top, c));
        }
        out
    }
}

fn promote(ctx: &TypeContext, mut shape: ShapeType) -> ShapeType {
    while let ShapeType::TVar(i) = shape {
        match ctx.lookup_type(i) {
            Some(b) => shape = b,
            None => return ShapeType::Top,
        }
    }
    shape
}
