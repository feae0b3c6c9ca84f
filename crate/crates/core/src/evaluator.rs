//! Small-step machine over configurations `<store | term>`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::surface::print_term;
use crate::syntax::{Answer, Loc, Syntax, Term, Value, Var};

pub const DEFAULT_FUEL: usize = 10_000;

/// Append-only map from locations to the values lifted there.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Store {
    values: BTreeMap<Loc, Value>,
    next: usize,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn get(&self, loc: Loc) -> Option<&Value> {
        self.values.get(&loc)
    }

    pub fn contains(&self, loc: Loc) -> bool {
        self.values.contains_key(&loc)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entries in allocation order.
    pub fn iter(&self) -> impl Iterator<Item = (Loc, &Value)> + '_ {
        self.values.iter().map(|(l, v)| (*l, v))
    }

    pub fn alloc(&mut self, v: Value) -> Loc {
        let loc = Loc(self.next);
        self.next += 1;
        self.values.insert(loc, v);
        loc
    }

    /// Whether every binding of `self` is present, unchanged, in `later`.
    pub fn is_prefix_of(&self, later: &Store) -> bool {
        self.values
            .iter()
            .all(|(l, v)| later.values.get(l) == Some(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frame {
    /// `let x = [] in body`
    Let(Term),
    /// `let <c, x> = [] in body`
    LetEx(Term),
}

/// Evaluation context, outermost frame first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalContext {
    pub frames: Vec<Frame>,
}

impl EvalContext {
    pub fn plug(&self, t: Term) -> Term {
        self.frames.iter().rev().fold(t, |inner, f| match f {
            Frame::Let(body) => Term::let_(inner, body.clone()),
            Frame::LetEx(body) => Term::let_ex(inner, body.clone()),
        })
    }
}

/// Splits `t` into a context and the focus to reduce; `None` for answers.
pub fn decompose(t: &Term) -> Option<(EvalContext, Term)> {
    if t.is_answer() {
        return None;
    }
    let mut frames = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Let(bound, body) if !bound.is_answer() => {
                frames.push(Frame::Let((**body).clone()));
                cur = bound;
            }
            Term::LetEx(bound, body) if !bound.is_answer() => {
                frames.push(Frame::LetEx((**body).clone()));
                cur = bound;
            }
            _ => return Some((EvalContext { frames }, cur.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub store: Store,
    pub term: Term,
}

impl Config {
    pub fn new(term: Term) -> Self {
        Config {
            store: Store::new(),
            term,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionRule {
    Apply,
    TApply,
    CApply,
    Rename,
    RenameE,
    Lift,
}

impl ReductionRule {
    pub const ALL: [ReductionRule; 6] = [
        ReductionRule::Apply,
        ReductionRule::TApply,
        ReductionRule::CApply,
        ReductionRule::Rename,
        ReductionRule::RenameE,
        ReductionRule::Lift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionRule::Apply => "apply",
            ReductionRule::TApply => "tapply",
            ReductionRule::CApply => "capply",
            ReductionRule::Rename => "rename",
            ReductionRule::RenameE => "rename-e",
            ReductionRule::Lift => "lift",
        }
    }
}

impl fmt::Display for ReductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StuckReason {
    #[error("application head `{0}` is not a location in the store")]
    UnboundLocation(String),
    #[error("{form} of a stored {found}")]
    NotAFunction {
        form: &'static str,
        found: &'static str,
    },
    #[error("existential let of a non-pack answer `{0}`")]
    PackShapeMismatch(String),
}

impl StuckReason {
    pub fn name(&self) -> &'static str {
        match self {
            StuckReason::UnboundLocation(_) => "UnboundLocation",
            StuckReason::NotAFunction { .. } => "NotAFunction",
            StuckReason::PackShapeMismatch(_) => "PackShapeMismatch",
        }
    }
}

/// One fired reduction: the rule, the locations whose stored values it read,
/// and the focus it rewrote.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: ReductionRule,
    pub lookups: Vec<Loc>,
    pub focus: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped { next: Config, step: Step },
    AnswerReached(Answer),
    Stuck(StuckReason),
}

pub fn step_once(c: &Config) -> StepOutcome {
    let mut next = c.clone();
    match step_in_place(&mut next) {
        Ok(Some(step)) => StepOutcome::Stepped { next, step },
        Ok(None) => match &c.term {
            Term::Ans(a) => StepOutcome::AnswerReached(a.clone()),
            _ => unreachable!("only answers fail to decompose"),
        },
        Err(reason) => StepOutcome::Stuck(reason),
    }
}

fn kind_name(v: &Value) -> &'static str {
    match v {
        Value::Lam(..) => "term abstraction",
        Value::TLam(..) => "type abstraction",
        Value::CLam(..) => "capture abstraction",
        Value::Pack(..) => "pack",
    }
}

fn lookup<'s>(store: &'s Store, head: Var) -> Result<(Loc, &'s Value), StuckReason> {
    match head {
        Var::Loc(l) => store
            .get(l)
            .map(|v| (l, v))
            .ok_or_else(|| StuckReason::UnboundLocation(l.to_string())),
        Var::Bound(i) => Err(StuckReason::UnboundLocation(format!("x?{i}"))),
    }
}

/// Fires one rule on `c`, or returns `Ok(None)` if `c` holds an answer.
pub fn step_in_place(c: &mut Config) -> Result<Option<Step>, StuckReason> {
    let Some((ctx, focus)) = decompose(&c.term) else {
        return Ok(None);
    };
    let mut lookups = Vec::new();
    let (rule, reduct) = match &focus {
        Term::App(f, a) => {
            let (l, v) = lookup(&c.store, *f)?;
            lookups.push(l);
            let Value::Lam(_, body) = v else {
                return Err(StuckReason::NotAFunction {
                    form: "term application",
                    found: kind_name(v),
                });
            };
            (ReductionRule::Apply, body.open_term(*a))
        }
        Term::TApp(f, s) => {
            let (l, v) = lookup(&c.store, *f)?;
            lookups.push(l);
            let Value::TLam(_, body) = v else {
                return Err(StuckReason::NotAFunction {
                    form: "type application",
                    found: kind_name(v),
                });
            };
            (ReductionRule::TApply, body.open_type(s))
        }
        Term::CApp(f, d) => {
            let (l, v) = lookup(&c.store, *f)?;
            lookups.push(l);
            let Value::CLam(_, body) = v else {
                return Err(StuckReason::NotAFunction {
                    form: "capture application",
                    found: kind_name(v),
                });
            };
            (ReductionRule::CApply, body.open_capt(d))
        }
        Term::Let(bound, body) => match bound.as_answer() {
            Some(Answer::Var(y)) => (ReductionRule::Rename, body.open_term(*y)),
            Some(Answer::Val(v)) => {
                let l = c.store.alloc(v.clone());
                (ReductionRule::Lift, body.open_term(Var::Loc(l)))
            }
            None => unreachable!("decompose peels non-answer bounds"),
        },
        Term::LetEx(bound, body) => match bound.as_answer() {
            // the term binder is innermost, so it is instantiated first
            Some(Answer::Val(Value::Pack(set, y))) => {
                (ReductionRule::RenameE, body.open_term(*y).open_capt(set))
            }
            _ => return Err(StuckReason::PackShapeMismatch(print_term(bound))),
        },
        Term::Ans(_) => unreachable!("decompose never focuses an answer"),
    };
    c.term = ctx.plug(reduct);
    Ok(Some(Step {
        rule,
        lookups,
        focus,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub answer: Answer,
    pub store: Store,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("stuck after {} steps: {reason}", steps.len())]
    Stuck {
        reason: StuckReason,
        config: Config,
        steps: Vec<Step>,
    },
    #[error("fuel exhausted after {} steps", steps.len())]
    FuelExhausted { config: Config, steps: Vec<Step> },
}

impl RunError {
    pub fn steps(&self) -> &[Step] {
        match self {
            RunError::Stuck { steps, .. } | RunError::FuelExhausted { steps, .. } => steps,
        }
    }
}

/// Steps until an answer, a stuck configuration, or `fuel` steps.
pub fn run(c: Config, fuel: usize) -> Result<RunResult, RunError> {
    let mut config = c;
    let mut steps = Vec::new();
    loop {
        if let Term::Ans(a) = &config.term {
            return Ok(RunResult {
                answer: a.clone(),
                store: config.store,
                steps,
            });
        }
        if steps.len() >= fuel {
            return Err(RunError::FuelExhausted { config, steps });
        }
        match step_in_place(&mut config) {
            Ok(Some(step)) => steps.push(step),
            Ok(None) => unreachable!("answers are handled above"),
            Err(reason) => {
                return Err(RunError::Stuck {
                    reason,
                    config,
                    steps,
                })
            }
        }
    }
}
