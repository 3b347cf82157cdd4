//! Measurement without collapse for small spin systems.
//!
//! * [`state`]: dense state vectors, unitary evolution and time reversal.
//! * [`measurement`]: premeasurement of spins by an apparatus, environment
//!   records with exponentially small overlaps, reduced density matrices.
//! * [`branch`]: enumeration of the `2^n` outcome branches and their
//!   counting-measure and Born-measure statistics.
//! * [`sampling`]: seeded collapse-style and counting-style sampling.
//! * [`output`]: CSV schemas shared with the command-line tool.
//!
//! With the default `parallel` feature the heavy loops run on rayon; the
//! results are bit-identical to a sequential build.

pub mod binomial;
pub mod branch;
pub mod error;
pub mod measurement;
pub mod output;
pub mod par;
pub mod sampling;
pub mod state;

pub use branch::{
    classify, enumerate_branches, everett_limit_scan, measure_report_analytic,
    measure_report_exact, typical_set_bounds, Branch, BranchCount, Classification,
    MaverickCriterion, MeasureReport,
};
pub use error::{Error, Result};
pub use measurement::{
    branch_overlap, entangle_environment, premeasure, premeasure_n, reduce_to_pointer_pair, reduce_to_system,
    OverlapPoint, PointerModel, ReducedDensityMatrix, SpinPreparation,
};
pub use par::Execution;
pub use sampling::{compare_runs, sample_born, sample_counting, RunComparison, SampleMode, SampleRun};
pub use state::{
    apply_unitary, evolve, evolve_reverse, fidelity, inner_product, tensor_product,
    HermitianOperator, StateVector, UnitaryOperator,
};
