//! Numerical laboratory for the planar, circularly symmetric 3+1 Dirac equation.
//!
//! The crate covers three connected problems:
//!
//! - the symmetry generators of the circular Dirac Hamiltonian (`𝒮_z`, `𝓛_z`,
//!   `J_z`, `K`, the spin-symmetry vector `𝒪` and its γ⁵ conjugate) and the
//!   numerical verification of their algebra on finite spectral
//!   representations ([`operator_lab`]);
//! - bound states of the coupled first-order radial equations in a sector
//!   `(k, m_j)` by shooting ([`radial_solver`]), cross-checked against an
//!   independent staggered-grid finite-difference eigensolver ([`fd_oracle`]);
//! - the spin and pseudospin degeneracy pairings and the ladder maps between
//!   partner sectors ([`degeneracy`]).
//!
//! Natural units `ħ = c = 1` are used throughout.

pub mod angular_basis;
pub mod bessel;
pub mod config;
pub mod degeneracy;
pub mod error;
pub mod fd_oracle;
pub mod operator_lab;
pub mod potentials;
pub mod quantum_numbers;
pub mod radial_solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use potentials::{PotentialSet, Profile};
pub use quantum_numbers::{HalfInt, QuantumNumbers, Sign};
pub use radial_solver::{RadialGrid, RadialSolution};
