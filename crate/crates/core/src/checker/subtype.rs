//! Algorithmic subtyping. Reflexivity is a structural-equality fast path and
//! transitivity is only used through type-variable promotion. Full bounded
//! quantification makes the relation undecidable, so every query carries a
//! step budget and answers `false` once it is spent.

use super::context::TypeContext;
use super::error::{TypeError, TypeErrorKind};
use super::rules::Rule;
use super::subcapture::{sub_bound_traced, subcapture_traced};
use super::wf::{wf_exist_type, wf_shape, wf_type};
use crate::surface::{print_exist_type_in, print_shape_in, print_type_in, PrintScope};
use crate::syntax::{ExistType, ShapeType, Type};

pub const DEFAULT_FUEL: usize = 100_000;

/// Anything the subtyping judgement relates: shapes, capturing types and
/// possibly-existential types.
pub trait Subtypable {
    fn well_formed(&self, ctx: &TypeContext) -> bool;
    fn render(&self, ctx: &TypeContext) -> String;
    #[doc(hidden)]
    fn sub(&self, other: &Self, ctx: &TypeContext, st: &mut State) -> bool;
}

#[doc(hidden)]
pub struct State {
    fuel: usize,
    rules: Vec<Rule>,
}

impl State {
    fn tick(&mut self) -> bool {
        if self.fuel == 0 {
            return false;
        }
        self.fuel -= 1;
        true
    }

    fn attempt(&mut self, f: impl FnOnce(&mut State) -> bool) -> bool {
        let mark = self.rules.len();
        let ok = f(self);
        if !ok {
            self.rules.truncate(mark);
        }
        ok
    }
}

pub fn sub_type<T: Subtypable>(ctx: &TypeContext, lhs: &T, rhs: &T) -> Result<bool, TypeError> {
    for t in [lhs, rhs] {
        if !t.well_formed(ctx) {
            return Err(TypeErrorKind::IllFormedType(t.render(ctx)).into());
        }
    }
    Ok(sub_type_traced(ctx, lhs, rhs, &mut Vec::new()))
}

/// Decides `lhs <: rhs` without well-formedness checks; on success the rules
/// used are appended to `rules`.
pub(crate) fn sub_type_traced<T: Subtypable>(
    ctx: &TypeContext,
    lhs: &T,
    rhs: &T,
    rules: &mut Vec<Rule>,
) -> bool {
    sub_type_with_fuel(ctx, lhs, rhs, DEFAULT_FUEL, rules)
}

pub fn sub_type_with_fuel<T: Subtypable>(
    ctx: &TypeContext,
    lhs: &T,
    rhs: &T,
    fuel: usize,
    rules: &mut Vec<Rule>,
) -> bool {
    let mut st = State {
        fuel,
        rules: Vec::new(),
    };
    let ok = lhs.sub(rhs, ctx, &mut st);
    if ok {
        rules.extend(st.rules);
    }
    ok
}

impl Subtypable for ShapeType {
    fn well_formed(&self, ctx: &TypeContext) -> bool {
        wf_shape(ctx, self)
    }

    fn render(&self, ctx: &TypeContext) -> String {
        print_shape_in(&PrintScope::generated(ctx.depth()), self)
    }

    fn sub(&self, other: &Self, ctx: &TypeContext, st: &mut State) -> bool {
        if !st.tick() {
            return false;
        }
        if self == other {
            st.rules.push(Rule::Refl);
            return true;
        }
        match (self, other) {
            (_, ShapeType::Top) => {
                st.rules.push(Rule::Top);
                true
            }
            (ShapeType::TVar(i), _) => {
                let Some(bound) = ctx.lookup_type(*i) else {
                    return false;
                };
                st.rules.push(Rule::TVar);
                if bound == *other {
                    return true;
                }
                st.rules.push(Rule::Trans);
                bound.sub(other, ctx, st)
            }
            (ShapeType::Fun(t1, e1), ShapeType::Fun(t2, e2)) => st.attempt(|st| {
                st.rules.push(Rule::Fun);
                t2.sub(t1, ctx, st) && e1.sub(e2, &ctx.push_term((**t2).clone()), st)
            }),
            (ShapeType::TFun(s1, e1), ShapeType::TFun(s2, e2)) => st.attempt(|st| {
                st.rules.push(Rule::TFun);
                s2.sub(s1, ctx, st) && e1.sub(e2, &ctx.push_type((**s2).clone()), st)
            }),
            (ShapeType::CFun(b1, e1), ShapeType::CFun(b2, e2)) => st.attempt(|st| {
                st.rules.push(Rule::CFun);
                sub_bound_traced(ctx, b2, b1, &mut st.rules)
                    && e1.sub(e2, &ctx.push_capt(b2.clone()), st)
            }),
            _ => false,
        }
    }
}

impl Subtypable for Type {
    fn well_formed(&self, ctx: &TypeContext) -> bool {
        wf_type(ctx, self)
    }

    fn render(&self, ctx: &TypeContext) -> String {
        print_type_in(&PrintScope::generated(ctx.depth()), self)
    }

    fn sub(&self, other: &Self, ctx: &TypeContext, st: &mut State) -> bool {
        if self == other {
            st.rules.push(Rule::Refl);
            return true;
        }
        st.attempt(|st| {
            st.rules.push(Rule::Capt);
            self.shape.sub(&other.shape, ctx, st)
                && subcapture_traced(ctx, &self.captures, &other.captures, &mut st.rules)
        })
    }
}

impl Subtypable for ExistType {
    fn well_formed(&self, ctx: &TypeContext) -> bool {
        wf_exist_type(ctx, self)
    }

    fn render(&self, ctx: &TypeContext) -> String {
        print_exist_type_in(&PrintScope::generated(ctx.depth()), self)
    }

    fn sub(&self, other: &Self, ctx: &TypeContext, st: &mut State) -> bool {
        match (self, other) {
            (ExistType::Plain(t1), ExistType::Plain(t2)) => t1.sub(t2, ctx, st),
            (ExistType::Exists(t1), ExistType::Exists(t2)) => {
                if t1 == t2 {
                    st.rules.push(Rule::Refl);
                    return true;
                }
                st.attempt(|st| {
                    st.rules.push(Rule::Exist);
                    t1.sub(t2, &ctx.push_capt(crate::syntax::Bound::Star), st)
                })
            }
            _ => false,
        }
    }
}
