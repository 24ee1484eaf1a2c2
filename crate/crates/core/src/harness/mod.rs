//! Experiment plumbing: configs, norm series, sweeps and the lemma suite.

mod config;
mod lemmas;
mod series;
mod simulate;
mod sweep;

pub use config::{ExperimentConfig, KEYS};
pub use lemmas::{
    check_besov_exactness, check_duhamel_oracle, check_plane_wave_decay, e0_cross_check, equivalence_band, limits,
    measure_bilinear_estimate, measure_c_grad, measure_c_sum, u0_scaling, verify_lemmas, BilinearEstimate, LemmaCheck,
    LemmaReport, LemmaSuite, MeasuredConstants, Relation, SweepChecks, CONSTRUCTION_CHECKS,
};
pub use series::{NormRow, NormSeries, SERIES_COLUMNS, SERIES_SCHEMA};
pub use simulate::{
    check_constraints, initial_norms, run_simulation, simulate_field, write_outputs, InflationRatio, SimulationReport,
    SimulationRun,
};
pub use sweep::{log_log_slope, run_sweep, SweepFit, SweepReport, SweepRow, SWEEP_SCHEMA};

use crate::error::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const INVALID_CONFIG: i32 = 2;
    pub const NUMERICAL_ABORT: i32 = 3;
    pub const LEMMA_FAILURE: i32 = 4;
}

/// Exit code for an error that ended a run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ConstraintViolation(_) | Error::Config { .. } | Error::InvalidParameter(_) => exit::INVALID_CONFIG,
        _ => exit::NUMERICAL_ABORT,
    }
}
