//! Well-formedness, subcapturing, subtyping and use-set synthesizing typing.

mod context;
mod error;
mod rules;
mod subcapture;
mod subtype;
mod typing;
mod wf;

pub use context::{Avoidance, Binding, LocationContext, TypeContext};
pub use error::{TypeError, TypeErrorKind};
pub use rules::{Derivation, Rule};
pub use subcapture::{closure, sub_bound, subcapture};
pub use subtype::{sub_type, sub_type_with_fuel, Subtypable, DEFAULT_FUEL};
pub use typing::{check_against, type_synth, TypingResult};
pub use wf::{wf_bound, wf_capture_set, wf_context, wf_exist_type, wf_shape, wf_type};
