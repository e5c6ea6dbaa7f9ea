//! Simulation toolkit for idealized two-outcome interference experiments
//! (double slit with filtering slits, Mach-Zehnder interferometer).
//!
//! The particle can land on exactly two screen points, `A` and `B`. On top
//! of that minimal setting the crate builds the classic variations: a
//! which-path detector with configurable pointer overlap, the
//! Elitzur-Vaidman bomb and the interaction-free certification loop, an
//! entangled idler measured in either of two bases and in either time order,
//! gradual environment monitoring with an exponential or rotating overlap
//! law, exact finite-dimensional environments under block Hamiltonians, and
//! a phenomenological threshold collapse at a critical time.
//!
//! Everything is computed twice: exactly, from the state vector
//! ([`scenario::exact_distribution`]), and by seeded Monte Carlo sampling
//! ([`stats::run_many`]), with [`stats::compare_to_oracle`] checking the two
//! against each other.

pub mod channels;
pub mod error;
pub mod ket;
pub mod layout;
pub mod measure;
pub mod operator;
pub mod rng;
pub mod scenario;
pub mod states;
pub mod stats;

/// Tolerance for stored-state invariants: norms, traces, Hermiticity,
/// basis orthonormality.
pub const TOL_STORAGE: f64 = 1e-12;

/// Tolerance for unitarity and Hermiticity checks on operators.
pub const TOL_UNITARY: f64 = 1e-10;

/// Tolerance for composed evolution identities, e.g. splitting
/// `exp(-iH(t1+t2))` into two steps.
pub const TOL_EVOLUTION: f64 = 1e-9;

/// Norm drift beyond which an allegedly unitary step fails instead of being
/// silently renormalized.
pub const TOL_DRIFT: f64 = 1e-8;

/// Floor for density-operator eigenvalues (roundoff may push a zero
/// eigenvalue slightly negative).
pub const TOL_EIGEN_FLOOR: f64 = -1e-10;

/// Probability floor below which an outcome cannot be projected onto.
pub const MIN_OUTCOME_PROB: f64 = 1e-15;

pub use channels::{
    bomb_channel, emit_idler, entangle_which_path, finite_env_overlap,
    finite_env_overlap_difference_form, finite_env_state, monitor_environment, rotate_idler,
    BlockHamiltonian, DecoherenceLaw, RotatingIdlerLaw,
};
pub use error::{Error, Result};
pub use ket::Ket;
pub use layout::{Subsystem, SubsystemLayout};
pub use measure::{
    born_probabilities, project_collapse, sample, CollapseEvent, CollapsePolicy,
    MeasurementBasis, OutcomeRecord, PolicyRun, TrialEvent,
};
pub use operator::{evolve_hermitian, DensityOperator, Operator};
pub use rng::{mix64, SeedSpec, TrialRng};
pub use scenario::{
    bomb_saving_protocol, composite_key, exact_distribution, run_trial, sweep, BombVerdict,
    Distribution, MeasureOrder, Scenario, Verdict,
};
pub use states::{
    bomb_ready, change_frame, detector_layout, idler_states, overlap_estimate, particle_frame,
    particle_state, pointer_states, BombKind, IdlerBasis, OverlapEstimate, ParticleFrame,
    PointerModel, SlitChoice,
};
pub use stats::{compare_to_oracle, run_many, CellCheck, OracleReport, StatSummary, ORACLE_SIGMA};
