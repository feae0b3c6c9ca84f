//! Well-formedness: every variable is bound in the right namespace and
//! every location is declared.

use super::context::{Binding, LocationContext, TypeContext};
use crate::syntax::{Bound, Capture, CaptureSet, Depth, ExistType, Namespace, ShapeType, Type};

pub fn wf_capture_set(ctx: &TypeContext, c: &CaptureSet) -> bool {
    set_ok(ctx.depth(), ctx.locations(), c)
}

pub fn wf_bound(ctx: &TypeContext, b: &Bound) -> bool {
    bound_ok(ctx.depth(), ctx.locations(), b)
}

pub fn wf_shape(ctx: &TypeContext, s: &ShapeType) -> bool {
    shape_ok(ctx.depth(), ctx.locations(), s)
}

pub fn wf_type(ctx: &TypeContext, t: &Type) -> bool {
    type_ok(ctx.depth(), ctx.locations(), t)
}

pub fn wf_exist_type(ctx: &TypeContext, e: &ExistType) -> bool {
    exist_ok(ctx.depth(), ctx.locations(), e)
}

/// Each binding's annotation is well formed in the prefix before it.
pub fn wf_context(ctx: &TypeContext) -> bool {
    let locs = ctx.locations();
    let mut depth = Depth::default();
    for b in ctx.bindings() {
        let ok = match &b {
            Binding::Term(t) => type_ok(depth, locs, t),
            Binding::Type(s) => shape_ok(depth, locs, s),
            Binding::Capt(bd) => bound_ok(depth, locs, bd),
        };
        if !ok {
            return false;
        }
        depth = depth.enter(b.namespace());
    }
    true
}

fn set_ok(d: Depth, locs: &LocationContext, c: &CaptureSet) -> bool {
    c.iter().all(|a| match *a {
        Capture::TermVar(i) => i < d.term,
        Capture::CaptVar(i) => i < d.capt,
        Capture::Loc(l) => locs.contains(l),
    })
}

fn bound_ok(d: Depth, locs: &LocationContext, b: &Bound) -> bool {
    match b {
        Bound::Star => true,
        Bound::Set(c) => set_ok(d, locs, c),
    }
}

fn shape_ok(d: Depth, locs: &LocationContext, s: &ShapeType) -> bool {
    match s {
        ShapeType::Top => true,
        ShapeType::TVar(i) => *i < d.ty,
        ShapeType::Fun(t, e) => type_ok(d, locs, t) && exist_ok(d.enter(Namespace::Term), locs, e),
        ShapeType::TFun(b, e) => {
            shape_ok(d, locs, b) && exist_ok(d.enter(Namespace::Type), locs, e)
        }
        ShapeType::CFun(b, e) => {
            bound_ok(d, locs, b) && exist_ok(d.enter(Namespace::Capt), locs, e)
        }
    }
}

fn type_ok(d: Depth, locs: &LocationContext, t: &Type) -> bool {
    shape_ok(d, locs, &t.shape) && set_ok(d, locs, &t.captures)
}

fn exist_ok(d: Depth, locs: &LocationContext, e: &ExistType) -> bool {
    match e {
        ExistType::Exists(t) => type_ok(d.enter(Namespace::Capt), locs, t),
        ExistType::Plain(t) => type_ok(d, locs, t),
    }
}
