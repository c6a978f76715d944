//! Stochastic simulation of a prey school evading a single predator.
//!
//! The model is a system of coupled stochastic differential equations:
//! prey pair up through distance-graded attraction/repulsion and
//! velocity matching, flee the predator with a fright force, and the
//! predator steers toward the school (its center, or a mean over the
//! nearest-weighted prey). Integration is Euler-Maruyama with additive
//! position noise; prey within the catch radius of the predator are
//! removed as eaten.
//!
//! The crate is organized bottom-up:
//!
//! * [`params`]: every model constant, validation, and the four named
//!   evasion-pattern presets.
//! * [`state`]: positions/velocities/alive flags of the school and the
//!   predator.
//! * [`noise`]: seeded Wiener increments and initial-condition draws,
//!   with one independent stream per trial.
//! * [`school`]: pair forces and the predator-free schooling phase.
//! * [`predation`]: fright and hunting forces and the pursuit stepper.
//! * [`metrics`]: diameter, velocity spread, subgroup count, and the
//!   evasion-pattern classifier.
//! * [`survival`]: per-trial records, eaten-fraction series, average
//!   living time.
//! * [`montecarlo`]: deterministic parallel trial batches and the
//!   school-size sweep.
//!
//! Everything a caller normally needs is re-exported at the root.

pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod noise;
pub mod params;
pub mod predation;
pub mod school;
pub mod state;
pub mod survival;
mod vecmath;

pub use error::SimError;
pub use metrics::{
    classify_pattern, classify_record, count_subgroups, school_center, school_diameter,
    velocity_std, Classification,
};
pub use montecarlo::{
    install_worker_limit, run_trial, run_trials, sweep_school_size, SweepFailure, SweepRow,
    SweepTable, TrialBatch, TrialFailure, TrialSummary, MC_RECORD_EVERY,
};
pub use noise::NoiseSource;
pub use params::{pattern_preset, PatternLabel, PatternPreset, SimParams, Strategy};
pub use predation::{
    flight_force, hunting_force, hunting_force_center, hunting_force_nearest, predation_step,
    predator_spawn, prey_acceleration, run_predation, StepEvents,
};
pub use school::{generate_school, pair_interaction, school_step};
pub use state::{PredatorState, SwarmState};
pub use survival::{average_living_time, p_eaten_series, Frame, MetricSample, TrialRecord};
