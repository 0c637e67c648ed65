//! Lower bounds on the time a pure state needs to rotate by an arbitrary
//! angle under a time-independent Hamiltonian, and the machinery to check
//! them against exact evolution.
//!
//! Units are natural (hbar = 1) throughout; `h = 2 pi` only appears when
//! formatting results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bc;
pub mod bounds;
pub mod cases;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod harness;
pub mod operators;
pub mod state;

pub use bc::{bc_bound, bc_poly, certify, triple_from_tangency, BcOptimizer, BcResult, TrigTriple};
pub use bounds::{bound_report, glm_beta_bound, mean_energy_family, BoundLabel, BoundReport};
pub use error::{QslError, Result};
pub use evolution::{evolve, first_passage, overlap, OverlapSample, TMaxPolicy};
pub use hamiltonian::{energy_stats, spectral_decompose, EnergyStats, HamiltonianSystem};
pub use harness::{emit_curves, verify_random, RunConfig, VerificationReport};
pub use state::{angle, Angle, QuantumState};
