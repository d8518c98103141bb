//! Experiment drivers: interferometer A-matrix flattening, heralded cat-state
//! preparation, staged cubic-phase-state preparation, and verification of a
//! published cubic-phase solution. Each driver returns an
//! [`report::ExperimentReport`] that the CLI serializes to JSON plus sibling
//! CSV artifacts.

pub mod borealis;
pub mod report;
pub mod state_prep;
pub mod targets;

pub use borealis::{build_borealis_a, flatness_cost, run_gbs_flatten, BorealisCircuit, GbsConfig};
pub use report::ExperimentReport;
pub use state_prep::{
    run_cat_prep, run_cubic_prep, verify_cubic_solution, CatPrepConfig, CubicPrepConfig,
};
pub use targets::{target_cat, target_cubic, Parity};
