//! Stroboscopic tomography for open quantum systems.
//!
//! Given a Kossakowski–Lindblad generator this crate computes how many
//! distinct observables (the index of cyclicity) and how many measurement
//! instants per observable (the degree of the minimal polynomial) are needed
//! to reconstruct an unknown initial density matrix, searches for observable
//! sets satisfying the Krylov spanning condition, and closes the loop by
//! simulating stroboscopic measurement data and inverting it.

pub mod algebra;
pub mod analysis;
pub mod cli;
pub mod error;
pub mod io;
pub mod model;
pub mod random;
pub mod tomography;

pub use algebra::{ComplexMatrix, ToleranceConfig};
pub use analysis::{
    find_observables, krylov_subspace, measurement_budget, spectral_report, verify_observables,
    DistinctEigenvalue, ObservableSet, SpectralReport, Verification,
};
pub use error::{Error, Result};
pub use model::{
    build_generator, evolve, laser_cooling_model, DensityMatrix, Jump, LindbladModel,
    Superoperator, VecConvention,
};
pub use tomography::{
    default_time_grid, reconstruct, simulate_measurements, state_distance, Measurement,
    MeasurementRecord, ReconstructOptions, ReconstructionResult, StateDistance, TimeGrid,
};

pub use num_complex::Complex64 as C64;
