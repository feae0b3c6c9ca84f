//! Use-set synthesizing type checker. Subsumption is applied only where a
//! premise needs a particular form: at application arguments, at pack
//! components, and through [`check_against`].

use super::context::{Avoidance, TypeContext};
use super::error::{TypeError, TypeErrorKind};
use super::rules::{Derivation, Rule};
use super::subcapture::{sub_bound_traced, subcapture_traced};
use super::subtype::sub_type_traced;
use super::wf::{wf_bound, wf_capture_set, wf_exist_type, wf_shape, wf_type};
use crate::surface::{
    print_bound_in, print_captures_in, print_exist_type_in, print_shape_in, print_type_in,
    PrintScope,
};
use crate::syntax::{
    Answer, Bound, Capture, CaptureSet, Depth, ExistType, Namespace, ShapeType, Syntax, Term, Type,
    Value, Var,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypingResult {
    pub use_set: CaptureSet,
    pub ty: ExistType,
    pub derivation: Derivation,
}

impl TypingResult {
    fn new(ctx: &TypeContext, rule: Rule, use_set: CaptureSet, ty: ExistType) -> Self {
        let derivation = Derivation {
            rule,
            use_set: use_set.clone(),
            ty: ty.clone(),
            scope: ctx.depth(),
            side: Vec::new(),
            children: Vec::new(),
        };
        TypingResult {
            use_set,
            ty,
            derivation,
        }
    }

    fn side(mut self, rules: Vec<Rule>) -> Self {
        self.derivation.side = rules;
        self
    }

    fn children(mut self, children: Vec<Derivation>) -> Self {
        self.derivation.children = children;
        self
    }
}

pub fn type_synth(ctx: &TypeContext, t: &Term) -> Result<TypingResult, TypeError> {
    match t {
        Term::Ans(Answer::Var(v)) => synth_var(ctx, *v),
        Term::Ans(Answer::Val(v)) => synth_value(ctx, v),
        Term::App(f, a) => synth_app(ctx, *f, *a),
        Term::TApp(f, s) => synth_tapp(ctx, *f, s),
        Term::CApp(f, d) => synth_capp(ctx, *f, d),
        Term::Let(bound, body) => synth_let(ctx, bound, body),
        Term::LetEx(bound, body) => synth_let_ex(ctx, bound, body),
    }
}

/// Checks `t` against `expected`, returning the synthesized (minimal)
/// use-set and `expected` as the type.
pub fn check_against(
    ctx: &TypeContext,
    t: &Term,
    expected: &ExistType,
) -> Result<TypingResult, TypeError> {
    if !wf_exist_type(ctx, expected) {
        return Err(TypeErrorKind::IllFormedType(show_exist(ctx, expected)).into());
    }
    if let (Term::Ans(Answer::Val(Value::Pack(c, y))), ExistType::Exists(body)) = (t, expected) {
        ensure_wf_set(ctx, c)?;
        let component = ExistType::Plain(body.open_capt(c));
        let inner = check_against(ctx, &Term::Ans(Answer::Var(*y)), &component)?;
        return Ok(
            TypingResult::new(ctx, Rule::Pack, CaptureSet::empty(), expected.clone())
                .children(vec![inner.derivation]),
        );
    }
    let r = type_synth(ctx, t)?;
    subsume(ctx, r, expected)
}

fn subsume(
    ctx: &TypeContext,
    r: TypingResult,
    expected: &ExistType,
) -> Result<TypingResult, TypeError> {
    if r.ty == *expected {
        return Ok(r);
    }
    let mut rules = Vec::new();
    if !sub_type_traced(ctx, &r.ty, expected, &mut rules) {
        return Err(TypeErrorKind::SubtypeFailure {
            found: show_exist(ctx, &r.ty),
            expected: show_exist(ctx, expected),
        }
        .into());
    }
    Ok(
        TypingResult::new(ctx, Rule::Sub, r.use_set.clone(), expected.clone())
            .side(rules)
            .children(vec![r.derivation]),
    )
}

fn synth_var(ctx: &TypeContext, v: Var) -> Result<TypingResult, TypeError> {
    let declared = match v {
        Var::Bound(i) => ctx.lookup_term(i).ok_or(TypeErrorKind::UnboundVariable {
            namespace: Namespace::Term,
            index: i,
        })?,
        Var::Loc(l) => ctx
            .location(l)
            .cloned()
            .ok_or(TypeErrorKind::UnboundLocation(l))?,
    };
    let me = CaptureSet::singleton(v.to_capture());
    let ty = Type::new(declared.shape, me.clone());
    Ok(TypingResult::new(ctx, Rule::Var, me, ty.into()))
}

fn synth_value(ctx: &TypeContext, v: &Value) -> Result<TypingResult, TypeError> {
    match v {
        Value::Lam(param, body) => {
            if !wf_type(ctx, param) {
                return Err(TypeErrorKind::IllFormedType(show_type(ctx, param)).into());
            }
            let inner = type_synth(&ctx.push_term(param.clone()), body).map_err(|e| e.under(0))?;
            let captured = lower(Namespace::Term, &inner.use_set.minus_term_var(0));
            let shape = ShapeType::Fun(Box::new(param.clone()), Box::new(inner.ty.clone()));
            Ok(TypingResult::new(
                ctx,
                Rule::Abs,
                CaptureSet::empty(),
                Type::new(shape, captured).into(),
            )
            .children(vec![inner.derivation]))
        }
        Value::TLam(bound, body) => {
            if !wf_shape(ctx, bound) {
                return Err(TypeErrorKind::IllFormedType(show_shape(ctx, bound)).into());
            }
            let inner = type_synth(&ctx.push_type(bound.clone()), body).map_err(|e| e.under(0))?;
            let captured = lower(Namespace::Type, &inner.use_set);
            let shape = ShapeType::TFun(Box::new(bound.clone()), Box::new(inner.ty.clone()));
            Ok(TypingResult::new(
                ctx,
                Rule::TAbs,
                CaptureSet::empty(),
                Type::new(shape, captured).into(),
            )
            .children(vec![inner.derivation]))
        }
        Value::CLam(bound, body) => {
            if !wf_bound(ctx, bound) {
                let shown = print_bound_in(&scope(ctx), bound);
                return Err(TypeErrorKind::IllFormedType(shown).into());
            }
            let inner_ctx = ctx.push_capt(bound.clone());
            let inner = type_synth(&inner_ctx, body).map_err(|e| e.under(0))?;
            if inner.use_set.contains(&Capture::CaptVar(0)) {
                return Err(TypeError::new(TypeErrorKind::AvoidanceFailure {
                    binder: "capture parameter",
                    subject: print_captures_in(&scope(&inner_ctx), &inner.use_set),
                }));
            }
            let captured = lower(Namespace::Capt, &inner.use_set);
            let shape = ShapeType::CFun(bound.clone(), Box::new(inner.ty.clone()));
            Ok(TypingResult::new(
                ctx,
                Rule::CAbs,
                CaptureSet::empty(),
                Type::new(shape, captured).into(),
            )
            .children(vec![inner.derivation]))
        }
        Value::Pack(c, y) => {
            ensure_wf_set(ctx, c)?;
            let inner = synth_var(ctx, *y)?;
            let Some(y_ty) = inner.ty.as_plain().cloned() else {
                unreachable!("variables have plain types")
            };
            let mut rules = Vec::new();
            if !subcapture_traced(ctx, &inner.use_set, c, &mut rules) {
                return Err(TypeErrorKind::AnnotationRequired {
                    var: print_captures_in(&scope(ctx), &inner.use_set),
                    set: print_captures_in(&scope(ctx), c),
                }
                .into());
            }
            rules.insert(0, Rule::Capt);
            let component = Type::new(y_ty.shape.clone(), c.clone());
            let sub = TypingResult::new(
                ctx,
                Rule::Sub,
                inner.use_set.clone(),
                component.clone().into(),
            )
            .side(rules)
            .children(vec![inner.derivation]);
            let shape = component.shape.shifted_all(crate::syntax::Depth {
                term: 0,
                ty: 0,
                capt: 1,
            });
            let packed =
                ExistType::Exists(Type::new(shape, CaptureSet::singleton(Capture::CaptVar(0))));
            Ok(
                TypingResult::new(ctx, Rule::Pack, CaptureSet::empty(), packed)
                    .children(vec![sub.derivation]),
            )
        }
    }
}

/// Synthesizes the head of an elimination and promotes its shape through
/// type-variable bounds. The returned derivation is wrapped in `sub` when
/// promotion happened.
fn head(ctx: &TypeContext, f: Var) -> Result<(ShapeType, Derivation), TypeError> {
    let r = synth_var(ctx, f)?;
    let Some(ty) = r.ty.as_plain().cloned() else {
        unreachable!("variables have plain types")
    };
    let mut shape = ty.shape.clone();
    let mut rules = Vec::new();
    while let ShapeType::TVar(i) = shape {
        let bound = ctx.lookup_type(i).ok_or(TypeErrorKind::UnboundVariable {
            namespace: Namespace::Type,
            index: i,
        })?;
        if !rules.is_empty() {
            rules.push(Rule::Trans);
        }
        rules.push(Rule::TVar);
        shape = bound;
    }
    if rules.is_empty() {
        return Ok((shape, r.derivation));
    }
    rules.insert(0, Rule::Capt);
    rules.push(Rule::ScElem);
    let promoted = Type::new(shape.clone(), ty.captures);
    let wrapped = TypingResult::new(ctx, Rule::Sub, r.use_set, promoted.into())
        .side(rules)
        .children(vec![r.derivation]);
    Ok((shape, wrapped.derivation))
}

fn not_a(ctx: &TypeContext, expected: &'static str, found: &ShapeType) -> TypeError {
    TypeErrorKind::NotAFunction {
        expected,
        found: show_shape(ctx, found),
    }
    .into()
}

fn synth_app(ctx: &TypeContext, f: Var, a: Var) -> Result<TypingResult, TypeError> {
    let (shape, fd) = head(ctx, f)?;
    let ShapeType::Fun(param, result) = &shape else {
        return Err(not_a(ctx, "function", &shape));
    };
    let arg = check_against(
        ctx,
        &Term::Ans(Answer::Var(a)),
        &ExistType::Plain((**param).clone()),
    )
    .map_err(|e| match e.kind {
        TypeErrorKind::SubtypeFailure { found, expected } => {
            TypeErrorKind::ArgumentTypeMismatch { found, expected }.into()
        }
        _ => e,
    })?;
    let use_set: CaptureSet = [f.to_capture(), a.to_capture()].into_iter().collect();
    Ok(
        TypingResult::new(ctx, Rule::App, use_set, result.open_term(a))
            .children(vec![fd, arg.derivation]),
    )
}

fn synth_tapp(ctx: &TypeContext, f: Var, arg: &ShapeType) -> Result<TypingResult, TypeError> {
    if !wf_shape(ctx, arg) {
        return Err(TypeErrorKind::IllFormedType(show_shape(ctx, arg)).into());
    }
    let (shape, fd) = head(ctx, f)?;
    let ShapeType::TFun(bound, result) = &shape else {
        return Err(not_a(ctx, "type function", &shape));
    };
    let mut rules = Vec::new();
    if !sub_type_traced(ctx, arg, &**bound, &mut rules) {
        return Err(TypeErrorKind::BoundNotSatisfied {
            argument: show_shape(ctx, arg),
            bound: show_shape(ctx, bound),
        }
        .into());
    }
    Ok(TypingResult::new(
        ctx,
        Rule::TApp,
        CaptureSet::singleton(f.to_capture()),
        result.open_type(arg),
    )
    .side(rules)
    .children(vec![fd]))
}

fn synth_capp(ctx: &TypeContext, f: Var, arg: &CaptureSet) -> Result<TypingResult, TypeError> {
    ensure_wf_set(ctx, arg)?;
    let (shape, fd) = head(ctx, f)?;
    let ShapeType::CFun(bound, result) = &shape else {
        return Err(not_a(ctx, "capture function", &shape));
    };
    let mut rules = Vec::new();
    if !sub_bound_traced(ctx, &Bound::Set(arg.clone()), bound, &mut rules) {
        return Err(TypeErrorKind::BoundNotSatisfied {
            argument: print_captures_in(&scope(ctx), arg),
            bound: print_bound_in(&scope(ctx), bound),
        }
        .into());
    }
    Ok(TypingResult::new(
        ctx,
        Rule::CApp,
        CaptureSet::singleton(f.to_capture()),
        result.open_capt(arg),
    )
    .side(rules)
    .children(vec![fd]))
}

fn synth_let(ctx: &TypeContext, bound: &Term, body: &Term) -> Result<TypingResult, TypeError> {
    let first = type_synth(ctx, bound).map_err(|e| e.under(0))?;
    let ExistType::Plain(bound_ty) = &first.ty else {
        return Err(TypeError::new(TypeErrorKind::ExistentialEscape {
            found: show_exist(ctx, &first.ty),
        })
        .under(0));
    };
    let inner_ctx = ctx.push_term(bound_ty.clone());
    let mut second = type_synth(&inner_ctx, body).map_err(|e| e.under(1))?;
    // {x} <: captures(T) by sc-var, so a use of x is covered by what its type captures
    let x_captures = bound_ty.captures.shifted_all(Depth {
        term: 1,
        ty: 0,
        capt: 0,
    });
    if inner_ctx.avoidance() == Avoidance::Widen && second.ty.mentions(Namespace::Term, 0) {
        let widened = widen_exist(&second.ty, 0, &x_captures);
        if widened.shifted(Namespace::Term, -1, 0).is_ok() {
            second = subsume(&inner_ctx, second, &widened)?;
        }
    }
    let ty = avoid(
        &inner_ctx,
        Namespace::Term,
        "let-bound variable",
        &second.ty,
    )?;
    let mut rest = second.use_set.clone();
    if rest.remove(&Capture::TermVar(0)) {
        rest = rest.union(&x_captures);
    }
    let rest = lower(Namespace::Term, &rest);
    let use_set = first.use_set.union(&rest);
    Ok(TypingResult::new(ctx, Rule::Let, use_set, ty)
        .children(vec![first.derivation, second.derivation]))
}

fn synth_let_ex(ctx: &TypeContext, bound: &Term, body: &Term) -> Result<TypingResult, TypeError> {
    let first = type_synth(ctx, bound).map_err(|e| e.under(0))?;
    let ExistType::Exists(component) = &first.ty else {
        return Err(TypeError::new(TypeErrorKind::NotAnExistential {
            found: show_exist(ctx, &first.ty),
        })
        .under(0));
    };
    let capt_ctx = ctx.push_capt(Bound::Star);
    let inner_ctx = capt_ctx.push_term(component.clone());
    let second = type_synth(&inner_ctx, body).map_err(|e| e.under(1))?;
    let ty = avoid(&inner_ctx, Namespace::Term, "unpacked variable", &second.ty)?;
    let ty = avoid(&capt_ctx, Namespace::Capt, "unpacked capture variable", &ty)?;
    let mut rest = second.use_set.clone();
    if rest.remove(&Capture::TermVar(0)) {
        rest = rest.union(&component.captures.shifted_all(Depth {
            term: 1,
            ty: 0,
            capt: 0,
        }));
    }
    let rest = lower(Namespace::Term, &rest);
    let rest = avoid(
        &capt_ctx,
        Namespace::Capt,
        "unpacked capture variable",
        &rest,
    )?;
    let use_set = first.use_set.union(&rest);
    Ok(TypingResult::new(ctx, Rule::LetE, use_set, ty)
        .children(vec![first.derivation, second.derivation]))
}

/// Replaces term variable `x` by `by` in every capture set at a covariant
/// position. Parameter types and bounds are left alone.
fn widen_exist(e: &ExistType, x: usize, by: &CaptureSet) -> ExistType {
    match e {
        ExistType::Plain(t) => ExistType::Plain(widen_type(t, x, by)),
        ExistType::Exists(t) => ExistType::Exists(widen_type(
            t,
            x,
            &by.shifted_all(Depth {
                term: 0,
                ty: 0,
                capt: 1,
            }),
        )),
    }
}

fn widen_type(t: &Type, x: usize, by: &CaptureSet) -> Type {
    let mut captures = t.captures.clone();
    if captures.remove(&Capture::TermVar(x)) {
        captures = captures.union(by);
    }
    let shape = match &t.shape {
        ShapeType::Fun(param, result) => ShapeType::Fun(
            param.clone(),
            Box::new(widen_exist(
                result,
                x + 1,
                &by.shifted_all(Depth {
                    term: 1,
                    ty: 0,
                    capt: 0,
                }),
            )),
        ),
        ShapeType::TFun(bound, result) => ShapeType::TFun(
            bound.clone(),
            Box::new(widen_exist(
                result,
                x,
                &by.shifted_all(Depth {
                    term: 0,
                    ty: 1,
                    capt: 0,
                }),
            )),
        ),
        ShapeType::CFun(bound, result) => ShapeType::CFun(
            bound.clone(),
            Box::new(widen_exist(
                result,
                x,
                &by.shifted_all(Depth {
                    term: 0,
                    ty: 0,
                    capt: 1,
                }),
            )),
        ),
        other => other.clone(),
    };
    Type::new(shape, captures)
}

/// Pops the innermost binder of `ns` from `subject`, failing if it is
/// mentioned. `inner` is the context that still contains the binder.
fn avoid<T: Syntax + Printable>(
    inner: &TypeContext,
    ns: Namespace,
    binder: &'static str,
    subject: &T,
) -> Result<T, TypeError> {
    subject.shifted(ns, -1, 0).map_err(|_| {
        TypeError::new(TypeErrorKind::AvoidanceFailure {
            binder,
            subject: subject.show(inner),
        })
    })
}

fn lower<T: Syntax>(ns: Namespace, subject: &T) -> T {
    match subject.shifted(ns, -1, 0) {
        Ok(v) => v,
        Err(_) => unreachable!("binder was removed or checked absent before lowering"),
    }
}

fn ensure_wf_set(ctx: &TypeContext, c: &CaptureSet) -> Result<(), TypeError> {
    if wf_capture_set(ctx, c) {
        Ok(())
    } else {
        Err(TypeErrorKind::IllFormedCaptureSet(print_captures_in(&scope(ctx), c)).into())
    }
}

fn scope(ctx: &TypeContext) -> PrintScope {
    PrintScope::generated(ctx.depth())
}

fn show_exist(ctx: &TypeContext, e: &ExistType) -> String {
    print_exist_type_in(&scope(ctx), e)
}

fn show_type(ctx: &TypeContext, t: &Type) -> String {
    print_type_in(&scope(ctx), t)
}

fn show_shape(ctx: &TypeContext, s: &ShapeType) -> String {
    print_shape_in(&scope(ctx), s)
}

trait Printable {
    fn show(&self, ctx: &TypeContext) -> String;
}

impl Printable for ExistType {
    fn show(&self, ctx: &TypeContext) -> String {
        show_exist(ctx, self)
    }
}

impl Printable for CaptureSet {
    fn show(&self, ctx: &TypeContext) -> String {
        print_captures_in(&scope(ctx), self)
    }
}
