//! Dephasing of a central spin-1/2 coupled to a bath of independent spins.
//!
//! The model: a central qubit with level splitting Ω couples through its σᶻ
//! to N bath spins, each with self-Hamiltonian ωᵢσᵢˣ and coupling λᵢσᵢᶻ.
//! The interaction commutes with the system Hamiltonian, so populations are
//! conserved and the bath only suppresses the coherence by a factor F(t).
//!
//! The crate computes F(t) in closed form and by brute-force propagation
//! ([`oracle`]), builds the reduced density matrix, and evaluates the
//! geometric phase acquired over quasi-cyclic paths of period τ = 2π/Ω,
//! exactly (quadrature), kinematically (eigenbranch functional), and
//! perturbatively in the coupling ([`phase`]). [`experiments`] regenerates
//! the standard parameter sweeps as CSV plus gnuplot scripts.

pub mod config;
pub mod error;
pub mod experiments;
pub mod mat2;
pub mod model;
pub mod oracle;
pub mod phase;
pub mod validate;

pub use config::ModelConfig;
pub use error::{Error, Result};
pub use mat2::Mat2;
pub use model::{Bath, BathSpin, CentralSpin};
pub use phase::{GpResult, QuadratureSpec};
