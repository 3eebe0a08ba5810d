//! Ladder maps between degenerate partner sectors, evaluated in momentum
//! space where the direction `p̂` is multiplicative.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::operators::{build_generator, eigen_residual, Generator};
use super::state::{Layout, Space, SpectralState};
use crate::angular_basis::spin_slot;
use crate::bessel::{hankel_sqrt, simpson_weights};
use crate::error::{Error, Result};
use crate::potentials::PotentialSet;
use crate::quantum_numbers::{HalfInt, QuantumNumbers};
use crate::radial_solver::RadialSolution;

/// Image norms below this are reported as annihilation.
pub const NULL_IMAGE: f64 = 1e-10;

/// Which symmetry's ladder is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Spin,
    Pseudospin,
}

/// Midpoint momentum grid times a uniform angular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub p_max: f64,
    pub n_momenta: usize,
    pub n_angles: usize,
}

impl Default for MomentumGrid {
    fn default() -> Self {
        MomentumGrid { p_max: 12.0, n_momenta: 256, n_angles: 32 }
    }
}

impl MomentumGrid {
    pub fn momenta(&self) -> Vec<f64> {
        let dp = self.p_max / self.n_momenta as f64;
        (0..self.n_momenta).map(|i| (i as f64 + 0.5) * dp).collect()
    }

    pub fn layout(&self) -> Result<Arc<Layout>> {
        if !(self.p_max.is_finite() && self.p_max > 0.0) || self.n_momenta < 2 {
            return Err(Error::BadGrid(format!("momentum grid needs p_max > 0 and 2+ points, got ({}, {})", self.p_max, self.n_momenta)));
        }
        let dp = self.p_max / self.n_momenta as f64;
        let momenta = self.momenta();
        let weights = momenta.iter().map(|p| p * dp).collect();
        Layout::polar(Space::Momentum, momenta, weights, self.n_angles)
    }
}

fn uniform_spacing(rho: &[f64]) -> Result<f64> {
    let n = rho.len();
    if n < 3 {
        return Err(Error::BadGrid("radial solution has fewer than 3 points".into()));
    }
    let h = (rho[n - 1] - rho[0]) / (n - 1) as f64;
    if rho.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::BadGrid("momentum transform needs a uniform radial grid".into()));
    }
    Ok(h)
}

/// Two-dimensional Fourier transform of the sector spinor built from a radial
/// solution, one Hankel transform per component.
pub fn to_momentum(sol: &RadialSolution, grid: &MomentumGrid) -> Result<SpectralState> {
    let layout = grid.layout()?;
    let h = uniform_spacing(&sol.rho)?;
    let weights = simpson_weights(sol.rho.len(), h);
    let momenta = grid.momenta();
    let sector = &sol.sector;
    let s = sector.s();
    let upper_l = sector.l();
    let lower_l = sector.lower_l();
    let upper = hankel_sqrt(&sol.g, &sol.rho, &weights, &[upper_l], &momenta).remove(0);
    let lower = hankel_sqrt(&sol.f, &sol.rho, &weights, &[lower_l], &momenta).remove(0);
    let mut state = SpectralState::zeros(layout.clone());
    let i = Complex64::new(0.0, 1.0);
    let phase = |l: i64| (-i).powi(l.rem_euclid(4) as i32);
    let norm = 1.0 / (2.0 * PI).sqrt();
    let components = [(spin_slot(s), upper_l, upper, i), (2 + spin_slot(-s), lower_l, lower, Complex64::new(1.0, 0.0))];
    for (c, l, amplitude, prefactor) in components {
        let ph = phase(l) * prefactor * norm;
        for (r, (&p, &u)) in momenta.iter().zip(&amplitude).enumerate() {
            let radial = ph * (u / p.sqrt());
            for a in 0..layout.n_angular() {
                let angular = Complex64::from_polar(1.0, l as f64 * layout.angle(a));
                state.set(r, c, a, radial * angular);
            }
        }
    }
    Ok(state)
}

/// Result of a ladder application.
#[derive(Debug, Clone)]
pub struct LadderImage {
    pub symmetry: Symmetry,
    pub source: QuantumNumbers,
    /// Sector the image should occupy.
    pub target: QuantumNumbers,
    /// Image norm before normalisation; zero signals annihilation.
    pub norm: f64,
    /// Normalised image, absent when the ladder annihilates the state.
    pub state: Option<SpectralState>,
}

impl LadderImage {
    pub fn is_null(&self) -> bool {
        self.state.is_none()
    }
}

/// `(k, m_j, s) → (−k+1, m_j−s, −s)`.
pub fn spin_target(q: &QuantumNumbers) -> QuantumNumbers {
    let s = q.s();
    let mj = HalfInt::from_twice(q.mj().twice() - 2 * s.value());
    QuantumNumbers::from_ls(mj_to_l(mj, -s), -s)
}

/// `(k, m_j, s) → (−k−1, m_j+s, −s)`.
pub fn pseudospin_target(q: &QuantumNumbers) -> QuantumNumbers {
    let s = q.s();
    let mj = HalfInt::from_twice(q.mj().twice() + 2 * s.value());
    QuantumNumbers::from_ls(mj_to_l(mj, -s), -s)
}

fn mj_to_l(mj: HalfInt, s: crate::Sign) -> i64 {
    (mj.twice() - s.value()) / 2
}

/// Applies `𝒪_{−s}` (spin) or `𝒪̃_{+s}` (pseudospin) to a bound eigenstate in
/// momentum space.
pub fn ladder_apply(symmetry: Symmetry, pot: &PotentialSet, sol: &RadialSolution, grid: &MomentumGrid) -> Result<LadderImage> {
    let s = sol.sector.s();
    let (generator, target) = match symmetry {
        Symmetry::Spin => {
            if !pot.is_spin_symmetric() {
                return Err(Error::SymmetryViolated("spin ladder needs constant V_delta with V_phi = U_rho = 0".into()));
            }
            (Generator::SpinLadder(-s), spin_target(&sol.sector))
        }
        Symmetry::Pseudospin => {
            if !pot.is_pseudospin_symmetric() {
                return Err(Error::SymmetryViolated("pseudospin ladder needs constant V_sigma with V_phi = U_rho = 0".into()));
            }
            (Generator::PseudospinLadder(s), pseudospin_target(&sol.sector))
        }
    };
    let psi = to_momentum(sol, grid)?;
    let image = build_generator(generator).apply(&psi)?;
    let norm = image.norm();
    let state = if norm > NULL_IMAGE * psi.norm().max(1.0) { Some(image.scaled(Complex64::new(1.0 / norm, 0.0))) } else { None };
    Ok(LadderImage { symmetry, source: sol.sector, target, norm, state })
}

/// `|⟨a, b⟩|` for states normalised on the fly.
pub fn overlap(a: &SpectralState, b: &SpectralState) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Numeric("overlap with a null state".into()));
    }
    Ok(a.inner(b)?.norm() / (na * nb))
}

/// Eigenvalue residuals of a momentum-space sector state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabelResiduals {
    pub spin_z: f64,
    pub orbital_gen_z: f64,
    pub total_z: f64,
    pub spin_orbit: f64,
}

impl LabelResiduals {
    pub fn max(&self) -> f64 {
        self.spin_z.max(self.orbital_gen_z).max(self.total_z).max(self.spin_orbit)
    }
}

/// `‖Gψ − gψ‖/‖ψ‖` for `G ∈ {𝒮_z, 𝓛_z, J_z, K}` and the labels of `sector`.
pub fn label_residuals(psi: &SpectralState, sector: &QuantumNumbers) -> Result<LabelResiduals> {
    Ok(LabelResiduals {
        spin_z: eigen_residual(&build_generator(Generator::SpinZ), psi, sector.s().as_f64())?,
        orbital_gen_z: eigen_residual(&build_generator(Generator::OrbitalZ), psi, sector.l() as f64)?,
        total_z: eigen_residual(&build_generator(Generator::TotalZ), psi, sector.mj().to_f64())?,
        spin_orbit: eigen_residual(&build_generator(Generator::SpinOrbit), psi, sector.k().to_f64())?,
    })
}

/// Overlap of a ladder image with the partner eigenstate, plus the image's
/// label residuals against the target sector.
#[derive(Debug, Clone, Serialize)]
pub struct LadderCheck {
    pub symmetry: Symmetry,
    pub source: String,
    pub target: String,
    pub energy_source: f64,
    pub energy_target: f64,
    pub overlap: f64,
    pub labels: LabelResiduals,
    pub null_image: bool,
}

pub fn ladder_check(
    symmetry: Symmetry,
    pot: &PotentialSet,
    source: &RadialSolution,
    partner: &RadialSolution,
    grid: &MomentumGrid,
) -> Result<LadderCheck> {
    let image = ladder_apply(symmetry, pot, source, grid)?;
    if partner.sector != image.target {
        return Err(Error::RepresentationMismatch {
            op: "ladder_check".into(),
            reason: format!("partner sector {} differs from ladder target {}", partner.sector, image.target),
        });
    }
    let (overlap_value, labels, null_image) = match &image.state {
        Some(state) => {
            let partner_state = to_momentum(partner, grid)?;
            (overlap(state, &partner_state)?, label_residuals(state, &image.target)?, false)
        }
        None => (0.0, LabelResiduals { spin_z: 0.0, orbital_gen_z: 0.0, total_z: 0.0, spin_orbit: 0.0 }, true),
    };
    Ok(LadderCheck {
        symmetry,
        source: source.sector.to_string(),
        target: image.target.to_string(),
        energy_source: source.energy,
        energy_target: partner.energy,
        overlap: overlap_value,
        labels,
        null_image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Profile;
    use crate::quantum_numbers::parse_sector;
    use crate::radial_solver::{find_bound_states, RadialGrid};

    #[test]
    fn targets_match_partner_maps() {
        let q = parse_sector("3/2,3/2").unwrap();
        assert_eq!(spin_target(&q), parse_sector("-1/2,1/2").unwrap());
        let q = parse_sector("1/2,1/2").unwrap();
        assert_eq!(pseudospin_target(&q), parse_sector("-3/2,3/2").unwrap());
        for q in crate::quantum_numbers::enumerate_sectors(4) {
            assert_eq!(spin_target(&spin_target(&q)), q);
            assert_eq!(pseudospin_target(&pseudospin_target(&q)), q);
        }
    }

    #[test]
    fn momentum_transform_preserves_norm_and_labels() {
        let pot = PotentialSet::free(1.0).with_sigma(Profile::Harmonic { lambda: 1.0 });
        let q = parse_sector("3/2,3/2").unwrap();
        let grid = RadialGrid::new(1e-4, 7.0, 1401).unwrap();
        let sol = find_bound_states(&q, &pot, (1.2, 3.0), 0, &grid).unwrap().states.remove(0);
        let psi = to_momentum(&sol, &MomentumGrid::default()).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-6, "{}", psi.norm());
        assert!(label_residuals(&psi, &q).unwrap().max() < 1e-12);
    }

    #[test]
    fn ladder_refuses_broken_symmetry() {
        let pot = PotentialSet::free(1.0)
            .with_sigma(Profile::Harmonic { lambda: 1.0 })
            .with_delta(Profile::Harmonic { lambda: -0.2 });
        let q = parse_sector("3/2,3/2").unwrap();
        let grid = RadialGrid::new(1e-4, 7.0, 1401).unwrap();
        let sol = find_bound_states(&q, &pot, (1.2, 6.0), 2, &grid).unwrap().states.remove(0);
        let err = ladder_apply(Symmetry::Spin, &pot, &sol, &MomentumGrid::default()).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolated(_)));
    }

    #[test]
    fn spin_ladder_reaches_partner_eigenstate() {
        let pot = PotentialSet::free(1.0).with_sigma(Profile::Harmonic { lambda: 1.0 });
        let grid = RadialGrid::new(1e-4, 7.0, 1401).unwrap();
        let q = parse_sector("3/2,3/2").unwrap();
        let source = find_bound_states(&q, &pot, (1.2, 4.0), 1, &grid).unwrap().states;
        let partner = find_bound_states(&spin_target(&q), &pot, (1.2, 4.0), 1, &grid).unwrap().states;
        for (a, b) in source.iter().zip(&partner) {
            assert_eq!(a.n, b.n);
            let check = ladder_check(Symmetry::Spin, &pot, a, b, &MomentumGrid::default()).unwrap();
            assert!(check.overlap >= 0.999, "{check:?}");
            assert!(check.labels.max() < 1e-10, "{check:?}");
        }
    }

    #[test]
    fn pseudospin_ladder_reaches_partner_eigenstate() {
        let pot = PotentialSet::free(1.0).with_delta(Profile::Harmonic { lambda: 1.0 });
        let grid = RadialGrid::new(1e-4, 7.0, 1401).unwrap();
        let q = parse_sector("1/2,1/2").unwrap();
        let source = find_bound_states(&q, &pot, (1.5, 4.0), 3, &grid).unwrap().states;
        let partner = find_bound_states(&pseudospin_target(&q), &pot, (1.5, 4.0), 3, &grid).unwrap().states;
        assert!(!source.is_empty());
        for a in &source {
            let b = partner.iter().find(|b| b.f_nodes == a.f_nodes).expect("partner with equal f nodes");
            assert!((a.energy - b.energy).abs() < 1e-8 * a.energy.abs());
            let check = ladder_check(Symmetry::Pseudospin, &pot, a, b, &MomentumGrid::default()).unwrap();
            assert!(check.overlap >= 0.999, "{check:?}");
            assert!(check.labels.max() < 1e-10, "{check:?}");
        }
    }
}
