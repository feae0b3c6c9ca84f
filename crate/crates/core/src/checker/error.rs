use thiserror::Error;

use crate::syntax::{Loc, Namespace};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unbound {namespace} variable with index {index}")]
    UnboundVariable { namespace: Namespace, index: usize },
    #[error("location {0} is not in the location context")]
    UnboundLocation(Loc),
    #[error("expected a {expected}, found `{found}`")]
    NotAFunction {
        expected: &'static str,
        found: String,
    },
    #[error("argument of type `{found}` does not conform to parameter type `{expected}`")]
    ArgumentTypeMismatch { found: String, expected: String },
    #[error("`{argument}` does not satisfy the bound `{bound}`")]
    BoundNotSatisfied { argument: String, bound: String },
    #[error("the {binder} bound here escapes its scope in `{subject}`")]
    AvoidanceFailure {
        binder: &'static str,
        subject: String,
    },
    #[error("`let` cannot bind an existential `{found}`; unpack it with `let <c, x> = ...`")]
    ExistentialEscape { found: String },
    #[error("expected an existential type, found `{found}`")]
    NotAnExistential { found: String },
    #[error("cannot synthesize a type for this pack: `{var}` is not covered by `{set}`; add an annotation")]
    AnnotationRequired { var: String, set: String },
    #[error("`{found}` is not a subtype of `{expected}`")]
    SubtypeFailure { found: String, expected: String },
    #[error("ill-formed capture set `{0}`")]
    IllFormedCaptureSet(String),
    #[error("ill-formed type `{0}`")]
    IllFormedType(String),
}

impl TypeErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            TypeErrorKind::UnboundVariable { .. } => "E0201",
            TypeErrorKind::UnboundLocation(_) => "E0202",
            TypeErrorKind::NotAFunction { .. } => "E0203",
            TypeErrorKind::ArgumentTypeMismatch { .. } => "E0204",
            TypeErrorKind::BoundNotSatisfied { .. } => "E0205",
            TypeErrorKind::AvoidanceFailure { .. } => "E0206",
            TypeErrorKind::ExistentialEscape { .. } => "E0207",
            TypeErrorKind::NotAnExistential { .. } => "E0208",
            TypeErrorKind::AnnotationRequired { .. } => "E0209",
            TypeErrorKind::SubtypeFailure { .. } => "E0210",
            TypeErrorKind::IllFormedCaptureSet(_) => "E0211",
            TypeErrorKind::IllFormedType(_) => "E0212",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TypeErrorKind::UnboundVariable { .. } => "UnboundVariable",
            TypeErrorKind::UnboundLocation(_) => "UnboundLocation",
            TypeErrorKind::NotAFunction { .. } => "NotAFunction",
            TypeErrorKind::ArgumentTypeMismatch { .. } => "ArgumentTypeMismatch",
            TypeErrorKind::BoundNotSatisfied { .. } => "BoundNotSatisfied",
            TypeErrorKind::AvoidanceFailure { .. } => "AvoidanceFailure",
            TypeErrorKind::ExistentialEscape { .. } => "ExistentialEscape",
            TypeErrorKind::NotAnExistential { .. } => "NotAnExistential",
            TypeErrorKind::AnnotationRequired { .. } => "AnnotationRequired",
            TypeErrorKind::SubtypeFailure { .. } => "SubtypeFailure",
            TypeErrorKind::IllFormedCaptureSet(_) => "IllFormedCaptureSet",
            TypeErrorKind::IllFormedType(_) => "IllFormedType",
        }
    }
}

/// A type error at `path`: child indices from the root term down to the
/// offending subterm (value bodies and let bounds are child 0, let bodies
/// child 1).
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub path: Vec<usize>,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind) -> Self {
        TypeError {
            kind,
            path: Vec::new(),
        }
    }

    pub(crate) fn under(mut self, child: usize) -> Self {
        self.path.insert(0, child);
        self
    }
}

impl From<TypeErrorKind> for TypeError {
    fn from(kind: TypeErrorKind) -> Self {
        TypeError::new(kind)
    }
}
