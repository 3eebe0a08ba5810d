//! Spinorial circular harmonics `h_{l,s}(φ) = e^{ilφ}/√(2π) χ_s` sampled on
//! uniform angular grids.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::quantum_numbers::Sign;

pub const DEFAULT_ANGLES: usize = 64;

/// Uniform samples `φ_j = 2πj/n` on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularGrid {
    n_angles: usize,
}

impl AngularGrid {
    pub fn new(n_angles: usize) -> Result<Self> {
        if n_angles < 8 || !n_angles.is_power_of_two() {
            return Err(Error::BadAngularGrid(n_angles));
        }
        Ok(AngularGrid { n_angles })
    }

    pub fn len(&self) -> usize {
        self.n_angles
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_angles as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_angles).map(move |j| self.angle(j))
    }

    /// Trapezoid weight, equal for every sample.
    pub fn weight(&self) -> f64 {
        2.0 * PI / self.n_angles as f64
    }

    /// Largest `|m|` whose products with another mode of the same size do
    /// not alias.
    pub fn max_safe_mode(&self) -> i64 {
        self.n_angles as i64 / 2 - 1
    }
}

impl Default for AngularGrid {
    fn default() -> Self {
        AngularGrid { n_angles: DEFAULT_ANGLES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircularHarmonic {
    pub l: i64,
    pub s: Sign,
}

impl CircularHarmonic {
    pub fn new(l: i64, s: Sign) -> Self {
        CircularHarmonic { l, s }
    }

    pub fn eval(&self, phi: f64) -> [Complex64; 2] {
        eval_h(self.l, self.s, phi)
    }

    /// Index image under σ_ρ: `(l, s) -> (l+s, -s)`.
    pub fn sigma_rho_image(&self) -> CircularHarmonic {
        CircularHarmonic { l: self.l + self.s.value(), s: -self.s }
    }
}

/// Slot of `χ_s` inside a two-component spinor.
pub fn spin_slot(s: Sign) -> usize {
    match s {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

pub fn eval_h(l: i64, s: Sign, phi: f64) -> [Complex64; 2] {
    let value = Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), l as f64 * phi);
    let mut out = [Complex64::new(0.0, 0.0); 2];
    out[spin_slot(s)] = value;
    out
}

/// A two-component spinor field sampled on an angular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSpinorField {
    grid: AngularGrid,
    slots: [Vec<Complex64>; 2],
}

impl TwoSpinorField {
    pub fn zeros(grid: AngularGrid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.len()];
        TwoSpinorField { grid, slots: [z.clone(), z] }
    }

    pub fn from_fn(grid: AngularGrid, f: impl Fn(f64) -> [Complex64; 2]) -> Self {
        let mut out = Self::zeros(grid);
        for j in 0..grid.len() {
            let v = f(grid.angle(j));
            out.slots[0][j] = v[0];
            out.slots[1][j] = v[1];
        }
        out
    }

    pub fn harmonic(grid: AngularGrid, h: CircularHarmonic) -> Self {
        Self::from_fn(grid, |phi| h.eval(phi))
    }

    pub fn from_slots(grid: AngularGrid, up: Vec<Complex64>, down: Vec<Complex64>) -> Result<Self> {
        if up.len() != grid.len() {
            return Err(Error::GridMismatch(up.len(), grid.len()));
        }
        if down.len() != grid.len() {
            return Err(Error::GridMismatch(down.len(), grid.len()));
        }
        Ok(TwoSpinorField { grid, slots: [up, down] })
    }

    pub fn grid(&self) -> AngularGrid {
        self.grid
    }

    pub fn slot(&self, i: usize) -> &[Complex64] {
        &self.slots[i]
    }

    pub fn sample(&self, j: usize) -> [Complex64; 2] {
        [self.slots[0][j], self.slots[1][j]]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.slots.iter_mut().flatten().for_each(|v| *v *= c);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.grid.len(), other.grid.len()));
        }
        let mut out = self.clone();
        for i in 0..2 {
            for (a, b) in out.slots[i].iter_mut().zip(&other.slots[i]) {
                *a += b;
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.slots
            .iter()
            .flatten()
            .zip(other.slots.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Trapezoid approximation of `∫₀^{2π} a† b dφ`.
pub fn inner_product(a: &TwoSpinorField, b: &TwoSpinorField) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(a.grid.len(), b.grid.len()));
    }
    let sum: Complex64 = (0..2)
        .flat_map(|i| a.slots[i].iter().zip(&b.slots[i]).map(|(x, y)| x.conj() * y))
        .sum();
    Ok(sum * a.grid.weight())
}

/// Pointwise multiplication by `σ·ρ̂ = [[0, e^{-iφ}], [e^{iφ}, 0]]`.
pub fn apply_sigma_rho(field: &TwoSpinorField) -> TwoSpinorField {
    let grid = field.grid;
    let mut out = TwoSpinorField::zeros(grid);
    for j in 0..grid.len() {
        let e = Complex64::from_polar(1.0, grid.angle(j));
        out.slots[0][j] = e.conj() * field.slots[1][j];
        out.slots[1][j] = e * field.slots[0][j];
    }
    out
}

/// Coefficients `c_{l,s} = ⟨h_{l,s}, field⟩` over a range of orbital labels.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoefficients {
    pub coefficients: BTreeMap<CircularHarmonic, Complex64>,
}

impl HarmonicCoefficients {
    pub fn get(&self, l: i64, s: Sign) -> Complex64 {
        self.coefficients.get(&CircularHarmonic::new(l, s)).copied().unwrap_or_default()
    }

    pub fn reconstruct(&self, grid: AngularGrid) -> TwoSpinorField {
        let mut out = TwoSpinorField::zeros(grid);
        for (h, c) in &self.coefficients {
            let slot = spin_slot(h.s);
            for j in 0..grid.len() {
                out.slots[slot][j] += c * eval_h(h.l, h.s, grid.angle(j))[slot];
            }
        }
        out
    }

    pub fn total_weight(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm_sqr()).sum()
    }
}

pub fn project_onto_harmonics(
    field: &TwoSpinorField,
    l_range: std::ops::RangeInclusive<i64>,
) -> Result<HarmonicCoefficients> {
    let grid = field.grid;
    let widest = l_range.start().abs().max(l_range.end().abs());
    if widest + 1 >= grid.len() as i64 / 2 {
        return Err(Error::Aliasing { l_max: widest, n_angles: grid.len() });
    }
    let transform = FourierTransform::new(grid.len());
    let mut coefficients = BTreeMap::new();
    for s in [Sign::Plus, Sign::Minus] {
        let modes = transform.modes(field.slot(spin_slot(s)));
        for l in l_range.clone() {
            coefficients.insert(CircularHarmonic::new(l, s), modes[mode_index(l, grid.len())]);
        }
    }
    Ok(HarmonicCoefficients { coefficients })
}

/// Storage index of signed mode `l` in an FFT of length `n`.
pub(crate) fn mode_index(l: i64, n: usize) -> usize {
    l.rem_euclid(n as i64) as usize
}

/// Signed mode number of FFT bin `i`; the Nyquist bin maps to `None`.
pub(crate) fn signed_mode(i: usize, n: usize) -> Option<i64> {
    let half = n / 2;
    match i.cmp(&half) {
        std::cmp::Ordering::Less => Some(i as i64),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(i as i64 - n as i64),
    }
}

/// Forward/inverse transforms normalised so that `modes[l] = ⟨Φ_l, samples⟩`
/// with `Φ_l = e^{ilφ}/√(2π)`.
pub(crate) struct FourierTransform {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FourierTransform {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FourierTransform { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub(crate) fn modes(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.forward.process(&mut buf);
        let scale = (2.0 * PI).sqrt() / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }

    pub(crate) fn samples(&self, modes: &[Complex64]) -> Vec<Complex64> {
        let mut buf = modes.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / (2.0 * PI).sqrt();
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }

    /// Applies `L = -i d/dφ` spectrally; the Nyquist bin is dropped.
    pub(crate) fn apply_lz(&self, samples: &mut [Complex64]) {
        self.forward.process(samples);
        for (i, v) in samples.iter_mut().enumerate() {
            match signed_mode(i, self.n) {
                Some(m) => *v *= m as f64 / self.n as f64,
                None => *v = Complex64::new(0.0, 0.0),
            }
        }
        self.inverse.process(samples);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C0: Complex64 = Complex64::new(0.0, 0.0);

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn grid_validation() {
        assert!(AngularGrid::new(4).is_err());
        assert!(AngularGrid::new(48).is_err());
        assert_eq!(AngularGrid::new(16).unwrap().len(), 16);
    }

    #[test]
    fn eval_examples() {
        let a = 1.0 / (2.0 * PI).sqrt();
        let v = eval_h(0, Sign::Plus, 0.0);
        assert!(close(v[0], Complex64::new(a, 0.0), 1e-15) && v[1] == C0);
        let v = eval_h(1, Sign::Minus, PI);
        assert!(v[0] == C0 && close(v[1], Complex64::new(-a, 0.0), 1e-15));
        let v = eval_h(2, Sign::Plus, PI / 2.0);
        assert!(close(v[0], Complex64::new(-a, 0.0), 1e-15) && v[1] == C0);
    }

    #[test]
    fn orthonormality_on_64_angles() {
        let grid = AngularGrid::new(64).unwrap();
        for l1 in -8..=8 {
            for l2 in -8..=8 {
                for s1 in [Sign::Plus, Sign::Minus] {
                    for s2 in [Sign::Plus, Sign::Minus] {
                        let a = TwoSpinorField::harmonic(grid, CircularHarmonic::new(l1, s1));
                        let b = TwoSpinorField::harmonic(grid, CircularHarmonic::new(l2, s2));
                        let ip = inner_product(&a, &b).unwrap();
                        let want = if l1 == l2 && s1 == s2 { 1.0 } else { 0.0 };
                        assert!(close(ip, Complex64::new(want, 0.0), 1e-12), "{l1} {s1:?} {l2} {s2:?}: {ip}");
                    }
                }
            }
        }
        let a = TwoSpinorField::harmonic(grid, CircularHarmonic::new(0, Sign::Plus));
        let b = TwoSpinorField::harmonic(grid, CircularHarmonic::new(0, Sign::Minus));
        assert_eq!(inner_product(&a, &b).unwrap(), C0);
        let other = TwoSpinorField::zeros(AngularGrid::new(32).unwrap());
        assert!(inner_product(&a, &other).is_err());
    }

    #[test]
    fn sigma_rho_shifts_orbital_label() {
        let grid = AngularGrid::new(64).unwrap();
        // Independent pointwise oracle: σ_ρ h_{0,+} has lower slot e^{iφ}·e^{i0φ}/√(2π).
        let img = apply_sigma_rho(&TwoSpinorField::harmonic(grid, CircularHarmonic::new(0, Sign::Plus)));
        let oracle = TwoSpinorField::from_fn(grid, |phi| {
            [C0, Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), phi + 0.0 * phi)]
        });
        assert!(img.max_abs_diff(&oracle) <= 1e-14);
        assert!(img.max_abs_diff(&TwoSpinorField::harmonic(grid, CircularHarmonic::new(1, Sign::Minus))) <= 1e-14);

        let back = apply_sigma_rho(&TwoSpinorField::harmonic(grid, CircularHarmonic::new(1, Sign::Minus)));
        assert!(back.max_abs_diff(&TwoSpinorField::harmonic(grid, CircularHarmonic::new(0, Sign::Plus))) <= 1e-14);

        for l in -5..=5 {
            for s in [Sign::Plus, Sign::Minus] {
                let h = CircularHarmonic::new(l, s);
                let img = apply_sigma_rho(&TwoSpinorField::harmonic(grid, h));
                let literal = TwoSpinorField::harmonic(grid, CircularHarmonic::new(l, -s));
                let shifted = TwoSpinorField::harmonic(grid, h.sigma_rho_image());
                assert!(img.max_abs_diff(&shifted) <= 1e-14);
                // σ_ρ h_{l,s} = h_{l,-s} does not hold for the displayed matrix.
                assert!(img.max_abs_diff(&literal) > 0.1);
            }
        }
    }

    #[test]
    fn sigma_rho_is_involution() {
        let grid = AngularGrid::new(32).unwrap();
        let field = TwoSpinorField::from_fn(grid, |phi| {
            [Complex64::new(phi.sin(), 0.3 * phi.cos()), Complex64::new(0.2 - phi * 0.01, (3.0 * phi).sin())]
        });
        let twice = apply_sigma_rho(&apply_sigma_rho(&field));
        assert!(twice.max_abs_diff(&field) <= 1e-14);
    }

    #[test]
    fn projection_examples() {
        let grid = AngularGrid::new(64).unwrap();
        let c = project_onto_harmonics(&TwoSpinorField::harmonic(grid, CircularHarmonic::new(2, Sign::Plus)), -6..=6)
            .unwrap();
        for (h, v) in &c.coefficients {
            let want = if *h == CircularHarmonic::new(2, Sign::Plus) { 1.0 } else { 0.0 };
            assert!(close(*v, Complex64::new(want, 0.0), 1e-12));
        }

        let mix = TwoSpinorField::harmonic(grid, CircularHarmonic::new(0, Sign::Plus))
            .add(&TwoSpinorField::harmonic(grid, CircularHarmonic::new(1, Sign::Minus)))
            .unwrap()
            .scale(Complex64::new(1.0 / 2f64.sqrt(), 0.0));
        let c = project_onto_harmonics(&mix, -4..=4).unwrap();
        assert!(close(c.get(0, Sign::Plus), Complex64::new(1.0 / 2f64.sqrt(), 0.0), 1e-12));
        assert!(close(c.get(1, Sign::Minus), Complex64::new(1.0 / 2f64.sqrt(), 0.0), 1e-12));
        assert!((c.total_weight() - 1.0).abs() < 1e-12);
        assert!(c.reconstruct(grid).max_abs_diff(&mix) < 1e-12);

        for l in -3..=3 {
            for s in [Sign::Plus, Sign::Minus] {
                let img = apply_sigma_rho(&TwoSpinorField::harmonic(grid, CircularHarmonic::new(l, s)));
                let c = project_onto_harmonics(&img, -6..=6).unwrap();
                let target = CircularHarmonic::new(l, s).sigma_rho_image();
                assert!(close(c.get(target.l, target.s), Complex64::new(1.0, 0.0), 1e-12));
                assert!((c.total_weight() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_rejects_aliasing_range() {
        let grid = AngularGrid::new(16).unwrap();
        let f = TwoSpinorField::zeros(grid);
        assert!(project_onto_harmonics(&f, -6..=6).is_ok());
        assert!(matches!(project_onto_harmonics(&f, -7..=7), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn spectral_lz_on_modes() {
        let n = 32;
        let t = FourierTransform::new(n);
        let grid = AngularGrid::new(n).unwrap();
        let mut v: Vec<Complex64> = grid.angles().map(|p| Complex64::from_polar(1.0, -3.0 * p)).collect();
        let orig = v.clone();
        t.apply_lz(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!(close(*a, b * -3.0, 1e-13));
        }
        let m = t.modes(&orig);
        let back = t.samples(&m);
        for (a, b) in back.iter().zip(&orig) {
            assert!(close(*a, *b, 1e-14));
        }
    }
}
