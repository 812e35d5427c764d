//! Continuous-time quantum walks of one to three interacting bosons on a
//! finite one-dimensional lattice, solved by exact diagonalization.
//!
//! The pipeline is [`fock`] (basis and states) → [`hamiltonian`] → [`dynamics`]
//! (spectral propagation) → [`observables`], with [`ensemble`] averaging over
//! quasi-periodic disorder phases and [`runner`] driving it from TOML files.

pub mod analysis;
pub mod bundled;
pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod observables;
pub mod runner;

pub use config::ExperimentConfig;
pub use dynamics::{run_evolution, SpectralDecomposition, TimeGrid};
pub use ensemble::{run_ensemble, run_single, EnsembleSpec, Experiment, InitialCondition};
pub use error::{Error, Result};
pub use fock::{FockBasis, Lattice, QuantumState};
pub use hamiltonian::{build_hamiltonian, HermitianOperator, ModelParams};
pub use observables::{ObservableRequest, ObservableSeries};
