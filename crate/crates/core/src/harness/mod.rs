//! Soundness checking and oracle infrastructure: store typing, per-step
//! progress/preservation/monitor checks, brute-force declarative oracles and
//! a generator of well-typed programs.

mod generate;
mod oracle;
mod soundness;

pub use crate::checker::LocationContext;
pub use generate::gen_well_typed;
pub use oracle::{
    enumerate, oracle_sub_bound, oracle_sub_type, oracle_subcapture, BudgetExceeded, Item, Member,
    SubtypeOracle,
};
pub use soundness::{
    check_config, check_soundness, infer_locations, type_config, ConfigError, Counterexample,
    SoundnessReport, StepReport,
};
