use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::checker::{
    check_against, sub_type, subcapture, type_synth, Avoidance, LocationContext, TypeContext,
    TypeError, TypingResult,
};
use crate::evaluator::{step_in_place, Config, Store};
use crate::surface::{print_captures_in, print_exist_type, print_term, PrintScope};
use crate::syntax::{Capture, CaptureSet, ExistType, Loc, Term, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("store entry {loc} is ill-typed: {reason}")]
    StoreIllTyped { loc: Loc, reason: String },
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Runtime configurations are typed with widening avoidance: substitution
/// can sharpen a result type to mention a let binder that the declarative
/// system would remove by subsumption.
fn context_for(locs: &LocationContext) -> TypeContext {
    TypeContext::with_locations(Arc::new(locs.clone())).with_avoidance(Avoidance::Widen)
}

/// Types each stored value under the entries allocated before it.
pub fn infer_locations(store: &Store) -> Result<LocationContext, ConfigError> {
    let mut locs = LocationContext::new();
    for (loc, v) in store.iter() {
        let ty = type_stored(&locs, loc, v)?;
        locs.insert(loc, ty);
    }
    Ok(locs)
}

fn type_stored(
    prefix: &LocationContext,
    loc: Loc,
    v: &Value,
) -> Result<crate::syntax::Type, ConfigError> {
    let r = type_synth(&context_for(prefix), &Term::val(v.clone())).map_err(|e| {
        ConfigError::StoreIllTyped {
            loc,
            reason: e.to_string(),
        }
    })?;
    match r.ty {
        ExistType::Plain(t) => Ok(t),
        ExistType::Exists(_) => Err(ConfigError::StoreIllTyped {
            loc,
            reason: "stored value has an existential type".into(),
        }),
    }
}

/// Types a runtime configuration: the store must agree with `locs`, after
/// which locations behave like term variables of their annotated types.
pub fn type_config(
    locs: &LocationContext,
    store: &Store,
    t: &Term,
) -> Result<TypingResult, ConfigError> {
    for (loc, v) in store.iter() {
        let Some(expected) = locs.get(loc) else {
            return Err(ConfigError::StoreIllTyped {
                loc,
                reason: "location has no annotation".into(),
            });
        };
        check_against(
            &context_for(&locs.before(loc)),
            &Term::val(v.clone()),
            &expected.clone().into(),
        )
        .map_err(|e| ConfigError::StoreIllTyped {
            loc,
            reason: e.to_string(),
        })?;
    }
    Ok(type_synth(&context_for(locs), t)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub rule: String,
    pub lookups: Vec<String>,
    pub preservation_ok: bool,
    pub use_set_ok: bool,
    pub monitor_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Index of the step whose check failed (the number of steps taken
    /// before the offending configuration).
    pub step: usize,
    pub flag: &'static str,
    pub detail: String,
    pub term: String,
    pub store: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub program: String,
    pub initial_typed: bool,
    pub initial_use_set: Option<String>,
    pub initial_type: Option<String>,
    pub steps: Vec<StepReport>,
    pub progress_ok: bool,
    pub preservation_ok: bool,
    pub monitor_ok: bool,
    pub termination_ok: bool,
    pub store_monotonic: bool,
    pub termination_steps: Option<usize>,
    pub answer: Option<String>,
    pub counterexample: Option<Counterexample>,
}

impl SoundnessReport {
    pub fn all_ok(&self) -> bool {
        self.initial_typed
            && self.progress_ok
            && self.preservation_ok
            && self.monitor_ok
            && self.termination_ok
            && self.store_monotonic
    }
}

/// Checks a closed program: it must type-check, after which every step is
/// checked for progress, preservation and the capture monitor.
pub fn check_soundness(
    id: &str,
    program: &Term,
    fuel: usize,
) -> Result<SoundnessReport, TypeError> {
    type_synth(&TypeContext::empty(), program)?;
    Ok(check_config(id, Config::new(program.clone()), fuel))
}

struct Typed {
    use_set: CaptureSet,
    ty: ExistType,
}

/// Drives an arbitrary configuration. If it does not type, only progress and
/// termination are meaningful and `initial_typed` is false.
pub fn check_config(id: &str, config: Config, fuel: usize) -> SoundnessReport {
    let mut report = SoundnessReport {
        program: id.to_string(),
        initial_typed: true,
        initial_use_set: None,
        initial_type: None,
        steps: Vec::new(),
        progress_ok: true,
        preservation_ok: true,
        monitor_ok: true,
        termination_ok: false,
        store_monotonic: true,
        termination_steps: None,
        answer: None,
        counterexample: None,
    };
    let mut config = config;
    let mut locs = match infer_locations(&config.store) {
        Ok(l) => Some(l),
        Err(_) => None,
    };
    let typed = match &locs {
        Some(l) => type_config(l, &config.store, &config.term).map_err(|e| e.to_string()),
        None => Err("the store is ill-typed".to_string()),
    };
    let initial = match typed {
        Ok(r) => Some(Typed {
            use_set: r.use_set,
            ty: r.ty,
        }),
        Err(e) => {
            report.counterexample = Some(Counterexample {
                step: 0,
                flag: "typing",
                detail: e,
                term: print_term(&config.term),
                store: config
                    .store
                    .iter()
                    .map(|(l, v)| (l.to_string(), print_term(&Term::val(v.clone()))))
                    .collect(),
            });
            None
        }
    };
    match &initial {
        Some(t) => {
            let scope = PrintScope::new();
            report.initial_use_set = Some(print_captures_in(&scope, &t.use_set));
            report.initial_type = Some(print_exist_type(&t.ty));
        }
        None => report.initial_typed = false,
    }
    let initial_ty = initial.as_ref().map(|t| t.ty.clone());
    let mut prev = initial;
    let fail = |report: &mut SoundnessReport,
                step: usize,
                flag: &'static str,
                detail: String,
                c: &Config| {
        // an untyped start is the least informative failure, so anything
        // found while running replaces it
        let replace = report
            .counterexample
            .as_ref()
            .map_or(true, |c| c.flag == "typing");
        if replace {
            report.counterexample = Some(Counterexample {
                step,
                flag,
                detail,
                term: print_term(&c.term),
                store: c
                    .store
                    .iter()
                    .map(|(l, v)| (l.to_string(), print_term(&Term::val(v.clone()))))
                    .collect(),
            });
        }
    };
    for n in 0..=fuel {
        if let Term::Ans(a) = &config.term {
            report.termination_ok = true;
            report.termination_steps = Some(n);
            report.answer = Some(print_term(&Term::Ans(a.clone())));
            break;
        }
        if n == fuel {
            fail(
                &mut report,
                n,
                "termination",
                format!("no answer after {fuel} steps"),
                &config,
            );
            break;
        }
        let before = config.clone();
        let step = match step_in_place(&mut config) {
            Ok(Some(step)) => step,
            Ok(None) => unreachable!("answers are handled above"),
            Err(reason) => {
                report.progress_ok = false;
                fail(&mut report, n, "progress", reason.to_string(), &before);
                break;
            }
        };
        let mut rec = StepReport {
            rule: step.rule.name().to_string(),
            lookups: step.lookups.iter().map(|l| l.to_string()).collect(),
            preservation_ok: true,
            use_set_ok: true,
            monitor_ok: true,
        };
        if !before.store.is_prefix_of(&config.store) {
            report.store_monotonic = false;
            fail(
                &mut report,
                n,
                "store",
                "a store binding changed or vanished".into(),
                &before,
            );
        }
        if let (Some(p), Some(l)) = (&prev, &locs) {
            // the monitor reads the use-set predicted for the pre-step configuration
            let ctx = context_for(l);
            for loc in &step.lookups {
                let ok = subcapture(&ctx, &CaptureSet::singleton(Capture::Loc(*loc)), &p.use_set)
                    .unwrap_or(false);
                if !ok {
                    rec.monitor_ok = false;
                    fail(
                        &mut report,
                        n,
                        "monitor",
                        format!("{loc} is not covered by the use-set"),
                        &before,
                    );
                }
            }
        }
        if let Some(l) = locs.as_mut() {
            for (loc, v) in config.store.iter() {
                if !l.contains(loc) {
                    match type_stored(l, loc, v) {
                        Ok(t) => l.insert(loc, t),
                        Err(e) => {
                            rec.preservation_ok = false;
                            fail(&mut report, n + 1, "preservation", e.to_string(), &config);
                        }
                    }
                }
            }
        }
        if let (Some(p), Some(l), Some(e0)) = (&prev, &locs, &initial_ty) {
            let ctx = context_for(l);
            match type_synth(&ctx, &config.term) {
                Ok(r) => {
                    let ty_ok = sub_type(&ctx, &r.ty, &p.ty).unwrap_or(false)
                        && sub_type(&ctx, &r.ty, e0).unwrap_or(false);
                    let set_ok = subcapture(&ctx, &r.use_set, &p.use_set).unwrap_or(false);
                    if !ty_ok {
                        rec.preservation_ok = false;
                        let detail = format!(
                            "type {} is not below {}",
                            print_exist_type(&r.ty),
                            print_exist_type(&p.ty)
                        );
                        fail(&mut report, n + 1, "preservation", detail, &config);
                    }
                    if !set_ok {
                        rec.use_set_ok = false;
                        let scope = PrintScope::new();
                        let detail = format!(
                            "use-set {} is not below {}",
                            print_captures_in(&scope, &r.use_set),
                            print_captures_in(&scope, &p.use_set)
                        );
                        fail(&mut report, n + 1, "preservation", detail, &config);
                    }
                    prev = Some(Typed {
                        use_set: r.use_set,
                        ty: r.ty,
                    });
                }
                Err(e) => {
                    rec.preservation_ok = false;
                    fail(&mut report, n + 1, "preservation", e.to_string(), &config);
                    prev = None;
                }
            }
        }
        report.preservation_ok &= rec.preservation_ok && rec.use_set_ok;
        report.monitor_ok &= rec.monitor_ok;
        report.steps.push(rec);
    }
    report
}
