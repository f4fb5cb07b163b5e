//! Exact quantum spectra of dressed linear chain graphs.
//!
//! The spectrum is computed three ways: roots of the transfer-matrix
//! determinant, the same determinant expanded into an exponential sum, and
//! the periodic-orbit series for individual eigenvalues.

pub mod chain;
pub mod error;
pub mod expansion;
pub mod expsum;
pub mod montecarlo;
pub mod orbits;
pub mod spectrum;
pub mod trace;
pub mod transfer;

pub use chain::{ChainConfig, ChainSpec, VertexCoefficients};
pub use error::{Error, Result};
pub use expansion::{expand_determinant, regularity_margin, CosinePair, SpectralForm};
pub use expsum::{multiply_expsum, ExponentialSum};
pub use spectrum::{classify_intervals, find_roots, staircase, RootRecord, SeparatorGrid};
pub use transfer::{delta_numeric, total_transfer, transfer_matrix, ComplexMatrix2};
pub use montecarlo::{simulate, simulate_trials, SimulationStats};
pub use orbits::{enumerate_orbits, orbit_amplitude, DirectedBond, Direction, PeriodicOrbit};
pub use trace::{density_of_states, eigenvalue_series, ActionClass, EigenvalueSeries, OrbitSum};
