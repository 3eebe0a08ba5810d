//! The circular Dirac Hamiltonian on a polar position grid and the
//! sector-closure check.

use std::sync::Arc;

use num_complex::Complex64;

use super::dirac::{Axis, DiracMatrices, M4};
use super::operators::OperatorRep;
use super::state::{Layout, Space, SpectralState};
use crate::angular_basis::spin_slot;
use crate::error::{Error, Result};
use crate::potentials::PotentialSet;
use crate::quantum_numbers::QuantumNumbers;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Polar grid and perturbation for [`hamiltonian_sector_closure_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureOptions {
    pub rho_min: f64,
    pub rho_max: f64,
    pub n_radii: usize,
    pub n_angles: usize,
    /// `V_Σ(ρ)` is replaced by `V_Σ(ρ)(1 + anisotropy·cos φ)`.
    pub anisotropy: f64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions { rho_min: 0.05, rho_max: 6.0, n_radii: 240, n_angles: 32, anisotropy: 0.0 }
    }
}

impl ClosureOptions {
    pub fn layout(&self) -> Result<Arc<Layout>> {
        if !(self.rho_min > 0.0 && self.rho_max > self.rho_min) || self.n_radii < 5 {
            return Err(Error::BadGrid(format!(
                "closure grid needs 0 < rho_min < rho_max and at least 5 radii, got ({}, {}, {})",
                self.rho_min, self.rho_max, self.n_radii
            )));
        }
        let h = (self.rho_max - self.rho_min) / (self.n_radii - 1) as f64;
        let radii: Vec<f64> = (0..self.n_radii).map(|i| self.rho_min + i as f64 * h).collect();
        let weights = radii.iter().map(|r| r * h).collect();
        Layout::polar(Space::Position, radii, weights, self.n_angles)
    }
}

fn radial_unit(d: &DiracMatrices, phi: f64) -> M4 {
    d.alpha(Axis::X) * re(phi.cos()) + d.alpha(Axis::Y) * re(phi.sin())
}

fn azimuthal_unit(d: &DiracMatrices, phi: f64) -> M4 {
    d.alpha(Axis::X) * re(-phi.sin()) + d.alpha(Axis::Y) * re(phi.cos())
}

/// `H = −iα_ρ ∂_ρ + α_φ L_z/ρ − V_φ α_φ + iβα_ρ U_ρ + βm + V_Σ P_+ + V_Δ P_−`
/// in position space, with an optional `cos φ` modulation of `V_Σ`.
pub fn position_hamiltonian(pot: &PotentialSet, anisotropy: f64) -> OperatorRep {
    let d = DiracMatrices::standard();
    let kinetic_radial =
        OperatorRep::field("-iα_ρ", Some(Space::Position), move |_, phi| radial_unit(&d, phi) * (-I)).times(&OperatorRep::radial_derivative());
    let kinetic_angular = OperatorRep::field("α_φ/ρ", Some(Space::Position), move |r, phi| azimuthal_unit(&d, phi) * re(1.0 / r))
        .times(&OperatorRep::orbital(Axis::Z));
    let pot = pot.clone();
    let local = OperatorRep::field("V(ρ, φ)", Some(Space::Position), move |r, phi| {
        let v_sigma = pot.sigma.value(r) * (1.0 + anisotropy * phi.cos());
        let tensor = d.beta * radial_unit(&d, phi) * (I * pot.tensor.value(r));
        azimuthal_unit(&d, phi) * re(-pot.phi.value(r))
            + tensor
            + d.beta * re(pot.mass)
            + d.p_plus * re(v_sigma)
            + d.p_minus * re(pot.delta.value(r))
    });
    kinetic_radial.plus(&kinetic_angular).plus(&local).renamed("H")
}

/// `(1/√ρ)(i g h_{l,s}, f h_{l+s,−s})` sampled on `layout`.
pub fn ansatz_state(layout: Arc<Layout>, sector: &QuantumNumbers, g: impl Fn(f64) -> f64, f: impl Fn(f64) -> f64) -> Result<SpectralState> {
    let n = layout.n_radii();
    let radii: Vec<f64> = (0..n).map(|r| layout.radius(r)).collect();
    let gs: Vec<Complex64> = radii.iter().map(|&r| re(g(r) / r.sqrt())).collect();
    let fs: Vec<Complex64> = radii.iter().map(|&r| re(f(r) / r.sqrt())).collect();
    if gs.iter().chain(&fs).any(|v| !v.re.is_finite()) {
        return Err(Error::Numeric("radial test profile is not finite on the grid".into()));
    }
    SpectralState::sector_state(layout, sector, &gs, &fs)
}

/// The (component, harmonic) pairs a sector state occupies.
pub fn sector_support(sector: &QuantumNumbers) -> [(usize, i64); 2] {
    let s = sector.s();
    [(spin_slot(s), sector.l()), (2 + spin_slot(-s), sector.lower_l())]
}

/// Relative norm of `HΨ` outside the sector's two harmonics, for the ansatz
/// built from radial profiles `g` and `f`.
pub fn hamiltonian_sector_closure(
    pot: &PotentialSet,
    sector: &QuantumNumbers,
    g: impl Fn(f64) -> f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    hamiltonian_sector_closure_with(pot, sector, g, f, &ClosureOptions::default())
}

pub fn hamiltonian_sector_closure_with(
    pot: &PotentialSet,
    sector: &QuantumNumbers,
    g: impl Fn(f64) -> f64,
    f: impl Fn(f64) -> f64,
    options: &ClosureOptions,
) -> Result<f64> {
    pot.validate()?;
    let layout = options.layout()?;
    let band = sector.l().abs().max(sector.lower_l().abs()) + 2;
    if band >= options.n_angles as i64 / 2 {
        return Err(Error::Aliasing { l_max: band, n_angles: options.n_angles });
    }
    let psi = ansatz_state(layout, sector, g, f)?;
    let image = position_hamiltonian(pot, options.anisotropy).apply(&psi)?;
    image.leakage(&sector_support(sector))
}
