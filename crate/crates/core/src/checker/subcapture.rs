//! Algorithmic subcapturing: `C1 <: C2` holds iff every atom of `C1` lies in
//! the least set containing `C2` that is closed under "an atom whose bound is
//! already inside joins".

use std::collections::BTreeMap;

use super::context::TypeContext;
use super::error::{TypeError, TypeErrorKind};
use super::rules::Rule;
use super::wf::wf_capture_set;
use crate::surface::{print_captures_in, PrintScope};
use crate::syntax::{Bound, Capture, CaptureSet};

pub fn subcapture(ctx: &TypeContext, c1: &CaptureSet, c2: &CaptureSet) -> Result<bool, TypeError> {
    for c in [c1, c2] {
        if !wf_capture_set(ctx, c) {
            let shown = print_captures_in(&PrintScope::generated(ctx.depth()), c);
            return Err(TypeErrorKind::IllFormedCaptureSet(shown).into());
        }
    }
    Ok(subcapture_traced(ctx, c1, c2, &mut Vec::new()))
}

pub fn sub_bound(ctx: &TypeContext, b1: &Bound, b2: &Bound) -> Result<bool, TypeError> {
    match (b1, b2) {
        (_, Bound::Star) => Ok(true),
        (Bound::Star, Bound::Set(_)) => Ok(false),
        (Bound::Set(c1), Bound::Set(c2)) => subcapture(ctx, c1, c2),
    }
}

/// The upward closure of `c2` in `ctx`.
pub fn closure(ctx: &TypeContext, c2: &CaptureSet) -> CaptureSet {
    let bounds = ctx.capture_bounds();
    let mut reach = c2.clone();
    loop {
        let mut grew = false;
        for (atom, bound) in &bounds {
            if !reach.contains(atom) && bound.is_subset(&reach) {
                reach.insert(*atom);
                grew = true;
            }
        }
        if !grew {
            return reach;
        }
    }
}

/// Decides `c1 <: c2` without well-formedness checks, appending the rules a
/// derivation would use to `rules` when it holds.
pub(crate) fn subcapture_traced(
    ctx: &TypeContext,
    c1: &CaptureSet,
    c2: &CaptureSet,
    rules: &mut Vec<Rule>,
) -> bool {
    if c1.is_subset(c2) {
        rules.push(Rule::ScElem);
        return true;
    }
    let reach = closure(ctx, c2);
    if !c1.is_subset(&reach) {
        return false;
    }
    let bounds: BTreeMap<Capture, CaptureSet> = ctx.capture_bounds().into_iter().collect();
    trace_within(&bounds, c1, c2, rules);
    true
}

/// Records the rules of a derivation for `c1 <: c2`, where every atom of
/// `c1` is already known to lie in the closure of `c2`.
fn trace_within(
    bounds: &BTreeMap<Capture, CaptureSet>,
    c1: &CaptureSet,
    c2: &CaptureSet,
    rules: &mut Vec<Rule>,
) {
    if c1.is_subset(c2) {
        rules.push(Rule::ScElem);
        return;
    }
    if c1.len() >= 2 {
        rules.push(Rule::ScSet);
    }
    for atom in c1.iter() {
        if c2.contains(atom) {
            rules.push(Rule::ScElem);
            continue;
        }
        rules.push(match atom {
            Capture::CaptVar(_) => Rule::ScBound,
            Capture::TermVar(_) | Capture::Loc(_) => Rule::ScVar,
        });
        rules.push(Rule::ScTrans);
        if let Some(bound) = bounds.get(atom) {
            trace_within(bounds, bound, c2, rules);
        }
    }
}

pub(crate) fn sub_bound_traced(
    ctx: &TypeContext,
    b1: &Bound,
    b2: &Bound,
    rules: &mut Vec<Rule>,
) -> bool {
    match (b1, b2) {
        (_, Bound::Star) => true,
        (Bound::Star, Bound::Set(_)) => false,
        (Bound::Set(c1), Bound::Set(c2)) => subcapture_traced(ctx, c1, c2, rules),
    }
}
