//! Simulation and benchmarking toolkit for a detuned Kerr-cat qubit.
//!
//! The crate covers the full desk-scale characterization pipeline of a
//! Kerr-parametric-oscillator cat qubit stabilized by a detuned two-photon
//! drive:
//!
//! - [`fock`]: dense linear algebra on a truncated oscillator Hilbert space
//!   (ladder operators, displacements, coherent/cat states, Hermitian
//!   eigendecomposition).
//! - [`model`]: SNAIL potential analysis and the detuned Kerr-cat
//!   Hamiltonian, displaced-frame coefficients, perturbation theory, spectra
//!   and excited-state degeneracy detection.
//! - [`dynamics`]: Schrödinger/Lindblad time evolution, the four-process
//!   noise model, quasi-static frequency-noise averaging, and bit-flip /
//!   phase-flip lifetime extraction.
//! - [`gates`]: pulse-level Z(θ) and X(π/2) gates, Chevron sweeps, and
//!   logical-channel extraction.
//! - [`readout`]: semiclassical cat-quadrature readout with a QNDness
//!   metric.
//! - [`channel`]: 4×4 Pauli-transfer-matrix algebra, error generators,
//!   Pauli and dihedral twirling.
//! - [`bench`]: D8 dihedral randomized benchmarking and linear-inversion
//!   gate set tomography.
//!
//! Frequencies are expressed in units of the Kerr coefficient K and times in
//! 1/K unless stated otherwise; unit conversion lives at the CLI boundary.

pub mod bench;
pub mod channel;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod gates;
pub mod linalg;
pub mod model;
pub mod readout;
pub mod rng;

pub use error::{Error, Result};
