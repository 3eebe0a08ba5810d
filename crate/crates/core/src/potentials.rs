//! Circularly symmetric potentials: the sum and difference potentials
//! `V_Σ = V_v + V_s`, `V_Δ = V_v − V_s`, the azimuthal vector component `V_φ`
//! and the radial tensor component `U_ρ`, each a profile in `ρ` only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial profile families, closed under pointwise sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    #[default]
    Zero,
    Constant { c: f64 },
    /// `λρ²`
    Harmonic { lambda: f64 },
    /// `λρ`
    Linear { lambda: f64 },
    /// `−α/ρ`
    Coulomb { alpha: f64 },
    /// `V₀ / (1 + e^{(ρ−R)/a})`
    WoodsSaxon { v0: f64, r: f64, a: f64 },
    Sum { terms: Vec<Profile> },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::BadPotential(format!("{name} must be finite, got {v}")))
            }
        };
        match self {
            Profile::Zero => Ok(()),
            Profile::Constant { c } => finite("c", *c),
            Profile::Harmonic { lambda } | Profile::Linear { lambda } => finite("lambda", *lambda),
            Profile::Coulomb { alpha } => finite("alpha", *alpha),
            Profile::WoodsSaxon { v0, r, a } => {
                finite("v0", *v0)?;
                finite("r", *r)?;
                finite("a", *a)?;
                if *a <= 0.0 {
                    return Err(Error::BadPotential(format!("woods_saxon diffuseness a must be positive, got {a}")));
                }
                Ok(())
            }
            Profile::Sum { terms } => terms.iter().try_for_each(Profile::validate),
        }
    }

    /// Value at `ρ > 0` (callers check the sign of `ρ`).
    pub fn value(&self, rho: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Constant { c } => *c,
            Profile::Harmonic { lambda } => lambda * rho * rho,
            Profile::Linear { lambda } => lambda * rho,
            Profile::Coulomb { alpha } => -alpha / rho,
            Profile::WoodsSaxon { v0, r, a } => v0 / (1.0 + ((rho - r) / a).exp()),
            Profile::Sum { terms } => terms.iter().map(|t| t.value(rho)).sum(),
        }
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        match self {
            Profile::Zero | Profile::Constant { .. } => 0.0,
            Profile::Harmonic { lambda } => 2.0 * lambda * rho,
            Profile::Linear { lambda } => *lambda,
            Profile::Coulomb { alpha } => alpha / (rho * rho),
            Profile::WoodsSaxon { v0, r, a } => {
                let e = ((rho - r) / a).exp();
                if !e.is_finite() {
                    return 0.0;
                }
                -v0 * e / (a * (1.0 + e) * (1.0 + e))
            }
            Profile::Sum { terms } => terms.iter().map(|t| t.derivative(rho)).sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Constant { c } => *c == 0.0,
            Profile::Harmonic { lambda } | Profile::Linear { lambda } => *lambda == 0.0,
            Profile::Coulomb { alpha } => *alpha == 0.0,
            Profile::WoodsSaxon { v0, .. } => *v0 == 0.0,
            Profile::Sum { terms } => terms.iter().all(Profile::is_zero),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Zero | Profile::Constant { .. } => true,
            Profile::Sum { terms } => terms.iter().all(Profile::is_constant),
            other => other.is_zero(),
        }
    }

    /// `lim_{ρ→0} ρ·V(ρ)`, nonzero only for Coulomb terms.
    pub fn singular_coefficient(&self) -> f64 {
        match self {
            Profile::Coulomb { alpha } => -alpha,
            Profile::Sum { terms } => terms.iter().map(Profile::singular_coefficient).sum(),
            _ => 0.0,
        }
    }

    /// `lim_{ρ→∞} V(ρ)` when finite.
    pub fn asymptote(&self) -> Option<f64> {
        match self {
            Profile::Zero | Profile::Coulomb { .. } | Profile::WoodsSaxon { .. } => Some(0.0),
            Profile::Constant { c } => Some(*c),
            Profile::Harmonic { lambda } | Profile::Linear { lambda } => (*lambda == 0.0).then_some(0.0),
            Profile::Sum { terms } => terms.iter().map(Profile::asymptote).sum(),
        }
    }

    /// True when the profile grows without bound at large `ρ`.
    pub fn is_confining(&self) -> bool {
        self.growth() > 0.0
    }

    /// Coefficient of the leading power at large ρ, signed.
    fn growth(&self) -> f64 {
        self.leading().1
    }

    fn leading(&self) -> (u32, f64) {
        match self {
            Profile::Harmonic { lambda } if *lambda != 0.0 => (2, *lambda),
            Profile::Linear { lambda } if *lambda != 0.0 => (1, *lambda),
            Profile::Sum { terms } => {
                let top = terms.iter().map(|t| t.leading().0).max().unwrap_or(0);
                if top == 0 {
                    return (0, 0.0);
                }
                let c: f64 = terms.iter().map(|t| t.leading()).filter(|(p, _)| *p == top).map(|(_, c)| c).sum();
                (top, c)
            }
            _ => (0, 0.0),
        }
    }

    pub fn plus(self, other: Profile) -> Profile {
        match (self, other) {
            (Profile::Zero, b) => b,
            (a, Profile::Zero) => a,
            (Profile::Sum { mut terms }, Profile::Sum { terms: more }) => {
                terms.extend(more);
                Profile::Sum { terms }
            }
            (Profile::Sum { mut terms }, b) => {
                terms.push(b);
                Profile::Sum { terms }
            }
            (a, b) => Profile::Sum { terms: vec![a, b] },
        }
    }

    /// The profile multiplied by a constant factor.
    pub fn scaled(&self, factor: f64) -> Profile {
        match self {
            Profile::Zero => Profile::Zero,
            Profile::Constant { c } => Profile::Constant { c: c * factor },
            Profile::Harmonic { lambda } => Profile::Harmonic { lambda: lambda * factor },
            Profile::Linear { lambda } => Profile::Linear { lambda: lambda * factor },
            Profile::Coulomb { alpha } => Profile::Coulomb { alpha: alpha * factor },
            Profile::WoodsSaxon { v0, r, a } => Profile::WoodsSaxon { v0: v0 * factor, r: *r, a: *a },
            Profile::Sum { terms } => Profile::Sum { terms: terms.iter().map(|t| t.scaled(factor)).collect() },
        }
    }

    /// The non-constant part of the profile.
    pub fn shape(&self) -> Profile {
        match self {
            Profile::Constant { .. } => Profile::Zero,
            Profile::Sum { terms } => Profile::Sum { terms: terms.iter().map(Profile::shape).collect() },
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Sigma,
    Delta,
    Phi,
    RhoTensor,
}

/// Mass plus the four radial profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSet {
    pub mass: f64,
    pub sigma: Profile,
    pub delta: Profile,
    pub phi: Profile,
    pub tensor: Profile,
}

impl Default for PotentialSet {
    fn default() -> Self {
        PotentialSet::free(1.0)
    }
}

impl PotentialSet {
    pub fn free(mass: f64) -> Self {
        PotentialSet { mass, sigma: Profile::Zero, delta: Profile::Zero, phi: Profile::Zero, tensor: Profile::Zero }
    }

    pub fn with_sigma(mut self, p: Profile) -> Self {
        self.sigma = p;
        self
    }

    pub fn with_delta(mut self, p: Profile) -> Self {
        self.delta = p;
        self
    }

    pub fn with_phi(mut self, p: Profile) -> Self {
        self.phi = p;
        self
    }

    pub fn with_tensor(mut self, p: Profile) -> Self {
        self.tensor = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mass.is_finite() {
            return Err(Error::BadPotential(format!("mass must be finite, got {}", self.mass)));
        }
        for p in [&self.sigma, &self.delta, &self.phi, &self.tensor] {
            p.validate()?;
        }
        Ok(())
    }

    pub fn profile(&self, which: Channel) -> &Profile {
        match which {
            Channel::Sigma => &self.sigma,
            Channel::Delta => &self.delta,
            Channel::Phi => &self.phi,
            Channel::RhoTensor => &self.tensor,
        }
    }

    pub fn evaluate(&self, which: Channel, rho: f64) -> Result<f64> {
        if rho <= 0.0 || rho.is_nan() {
            return Err(Error::NonPositiveRadius(rho));
        }
        Ok(self.profile(which).value(rho))
    }

    /// `(V_v, V_s)` at `ρ`.
    pub fn vector_scalar(&self, rho: f64) -> (f64, f64) {
        let s = self.sigma.value(rho);
        let d = self.delta.value(rho);
        ((s + d) / 2.0, (s - d) / 2.0)
    }

    /// `V_Δ` constant with `V_φ = U_ρ = 0`.
    pub fn is_spin_symmetric(&self) -> bool {
        self.delta.is_constant() && self.phi.is_zero() && self.tensor.is_zero()
    }

    /// `V_Σ` constant with `V_φ = U_ρ = 0`.
    pub fn is_pseudospin_symmetric(&self) -> bool {
        self.sigma.is_constant() && self.phi.is_zero() && self.tensor.is_zero()
    }

    /// Azimuthal and tensor coupling `U_ρ + s V_φ` entering both radial equations.
    pub fn radial_coupling(&self, s: f64, rho: f64) -> f64 {
        self.tensor.value(rho) + s * self.phi.value(rho)
    }

    pub fn radial_coupling_derivative(&self, s: f64, rho: f64) -> f64 {
        self.tensor.derivative(rho) + s * self.phi.derivative(rho)
    }
}

/// Inverse of [`PotentialSet::vector_scalar`].
pub fn sum_difference(v_vector: f64, v_scalar: f64) -> (f64, f64) {
    (v_vector + v_scalar, v_vector - v_scalar)
}
