//! Finite spectral representations of the Dirac matrices and symmetry
//! generators, with numerical checks of their algebra.

pub mod claims;
pub mod closure;
pub mod dirac;
pub mod ladder;
pub mod operators;
pub mod state;

pub use claims::{verify_algebra, AlgebraReport, AlgebraSettings, ClaimRecord};
pub use closure::{hamiltonian_sector_closure, hamiltonian_sector_closure_with, position_hamiltonian, ClosureOptions};
pub use dirac::{Axis, DiracMatrices, M4};
pub use ladder::{ladder_apply, ladder_check, to_momentum, LadderCheck, LadderImage, MomentumGrid, Symmetry};
pub use operators::{build_generator, eigen_residual, Generator, OperatorRep};
pub use state::{Layout, Space, SpectralState};
