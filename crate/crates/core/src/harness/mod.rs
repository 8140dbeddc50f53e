//! Random generation, differential fuzzing, counterexample search and
//! shrinking.

pub mod corpus;
pub mod fuzz;
pub mod generator;
pub mod schedule;
pub mod shrink;

pub use fuzz::{
    find_counterexample, find_ttm_counterexample, fuzz, run_schedule, trial_input, Algorithm,
    CounterexampleSearch, FuzzReport, KeyedEntry, Replay, Violation, ViolationKind,
};
pub use generator::{gen_tree, GeneratorConfig};
pub use schedule::{gen_schedule, Call, CallSchedule};
pub use shrink::shrink;
