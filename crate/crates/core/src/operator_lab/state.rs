//! Four-component states sampled on angular, polar or orbital-multiplet
//! layouts.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr_free::standard_normal;

use crate::angular_basis::{mode_index, signed_mode, spin_slot, FourierTransform};
use crate::error::{Error, Result};
use crate::quantum_numbers::QuantumNumbers;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Whether angles and radii refer to position or momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Position,
    Momentum,
}

/// Sampling arena of a [`SpectralState`].
#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// Uniform angles on a single circle of fixed radius.
    Circle { space: Space, radius: f64, n_angles: usize },
    /// Uniform angles times a radial grid with quadrature weights that
    /// include the `r dr` measure.
    Polar { space: Space, radii: Vec<f64>, weights: Vec<f64>, n_angles: usize },
    /// Orbital angular momentum multiplet `|ℓ, m⟩`, `m = −ℓ … ℓ`, tensored
    /// with a four-spinor.
    Multiplet { ell: i64 },
}

impl Layout {
    pub fn circle(space: Space, radius: f64, n_angles: usize) -> Result<Arc<Layout>> {
        check_angles(n_angles)?;
        Ok(Arc::new(Layout::Circle { space, radius, n_angles }))
    }

    pub fn polar(space: Space, radii: Vec<f64>, weights: Vec<f64>, n_angles: usize) -> Result<Arc<Layout>> {
        check_angles(n_angles)?;
        if radii.len() != weights.len() || radii.is_empty() {
            return Err(Error::BadGrid(format!("{} radii but {} weights", radii.len(), weights.len())));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::BadGrid("polar radii must be positive".into()));
        }
        Ok(Arc::new(Layout::Polar { space, radii, weights, n_angles }))
    }

    pub fn multiplet(ell: i64) -> Result<Arc<Layout>> {
        if ell < 0 {
            return Err(Error::BadGrid(format!("orbital multiplet needs ell >= 0, got {ell}")));
        }
        Ok(Arc::new(Layout::Multiplet { ell }))
    }

    pub fn n_radii(&self) -> usize {
        match self {
            Layout::Polar { radii, .. } => radii.len(),
            _ => 1,
        }
    }

    /// Samples per radius and component: angles, or `2ℓ + 1` multiplet slots.
    pub fn n_angular(&self) -> usize {
        match self {
            Layout::Circle { n_angles, .. } | Layout::Polar { n_angles, .. } => *n_angles,
            Layout::Multiplet { ell } => (2 * ell + 1) as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.n_radii() * 4 * self.n_angular()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn space(&self) -> Option<Space> {
        match self {
            Layout::Circle { space, .. } | Layout::Polar { space, .. } => Some(*space),
            Layout::Multiplet { .. } => None,
        }
    }

    pub fn is_angular(&self) -> bool {
        !matches!(self, Layout::Multiplet { .. })
    }

    pub fn radius(&self, r: usize) -> f64 {
        match self {
            Layout::Circle { radius, .. } => *radius,
            Layout::Polar { radii, .. } => radii[r],
            Layout::Multiplet { .. } => 0.0,
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self {
            Layout::Circle { radius, .. } => *radius,
            Layout::Polar { radii, .. } => radii.iter().fold(0.0f64, |a, r| a.max(*r)),
            Layout::Multiplet { .. } => 0.0,
        }
    }

    pub fn angle(&self, a: usize) -> f64 {
        2.0 * PI * a as f64 / self.n_angular() as f64
    }

    /// Quadrature weight of one sample.
    pub fn weight(&self, r: usize) -> f64 {
        match self {
            Layout::Circle { n_angles, .. } => 2.0 * PI / *n_angles as f64,
            Layout::Polar { weights, n_angles, .. } => weights[r] * 2.0 * PI / *n_angles as f64,
            Layout::Multiplet { .. } => 1.0,
        }
    }

    /// `m` value of a multiplet slot.
    pub fn multiplet_m(&self, a: usize) -> i64 {
        match self {
            Layout::Multiplet { ell } => a as i64 - ell,
            _ => 0,
        }
    }

    pub fn index(&self, r: usize, c: usize, a: usize) -> usize {
        (r * 4 + c) * self.n_angular() + a
    }
}

fn check_angles(n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::BadAngularGrid(n));
    }
    Ok(())
}

mod rand_distr_free {
    use rand::Rng;

    /// Standard normal deviate by the Box–Muller transform.
    pub fn standard_normal(rng: &mut impl Rng) -> f64 {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Complex samples over (radius, spinor component, angle or multiplet slot).
#[derive(Debug, Clone)]
pub struct SpectralState {
    layout: Arc<Layout>,
    data: Vec<Complex64>,
}

impl SpectralState {
    pub fn zeros(layout: Arc<Layout>) -> Self {
        let n = layout.len();
        SpectralState { layout, data: vec![C0; n] }
    }

    pub fn from_data(layout: Arc<Layout>, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != layout.len() {
            return Err(Error::GridMismatch(layout.len(), data.len()));
        }
        Ok(SpectralState { layout, data })
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize, a: usize) -> Complex64 {
        self.data[self.layout.index(r, c, a)]
    }

    pub fn set(&mut self, r: usize, c: usize, a: usize, v: Complex64) {
        let i = self.layout.index(r, c, a);
        self.data[i] = v;
    }

    /// Samples of one component at one radius.
    pub fn line(&self, r: usize, c: usize) -> &[Complex64] {
        let n = self.layout.n_angular();
        let start = self.layout.index(r, c, 0);
        &self.data[start..start + n]
    }

    pub fn line_mut(&mut self, r: usize, c: usize) -> &mut [Complex64] {
        let n = self.layout.n_angular();
        let start = self.layout.index(r, c, 0);
        &mut self.data[start..start + n]
    }

    pub fn same_layout(&self, other: &SpectralState) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout) || *self.layout == *other.layout
    }

    fn check(&self, other: &SpectralState) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.data.len(), other.data.len()))
        }
    }

    /// `⟨self, other⟩` with the layout's quadrature weights.
    pub fn inner(&self, other: &SpectralState) -> Result<Complex64> {
        self.check(other)?;
        let l = &self.layout;
        let per_radius = 4 * l.n_angular();
        let mut acc = C0;
        for r in 0..l.n_radii() {
            let w = l.weight(r);
            let s: Complex64 = self.data[r * per_radius..(r + 1) * per_radius]
                .iter()
                .zip(&other.data[r * per_radius..(r + 1) * per_radius])
                .map(|(a, b)| a.conj() * b)
                .sum();
            acc += s * w;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    pub fn scaled(&self, c: Complex64) -> SpectralState {
        SpectralState { layout: self.layout.clone(), data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn normalized(&self) -> Result<SpectralState> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Numeric("cannot normalise a null state".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn add(&self, other: &SpectralState) -> Result<SpectralState> {
        self.check(other)?;
        Ok(SpectralState {
            layout: self.layout.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SpectralState) -> Result<SpectralState> {
        self.check(other)?;
        Ok(SpectralState {
            layout: self.layout.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Random unit state. On angular layouts each (radius, component) line
    /// is band-limited to `|l| ≤ band_limit`; on a multiplet every slot is
    /// drawn.
    pub fn random(layout: Arc<Layout>, band_limit: i64, rng: &mut impl Rng) -> Result<SpectralState> {
        let mut state = SpectralState::zeros(layout.clone());
        match &*layout {
            Layout::Multiplet { .. } => {
                for v in state.data.iter_mut() {
                    *v = Complex64::new(standard_normal(rng), standard_normal(rng));
                }
            }
            _ => {
                let n = layout.n_angular();
                if band_limit + 1 >= n as i64 / 2 {
                    return Err(Error::Aliasing { l_max: band_limit, n_angles: n });
                }
                let ft = FourierTransform::new(n);
                for r in 0..layout.n_radii() {
                    for c in 0..4 {
                        let mut modes = vec![C0; n];
                        for l in -band_limit..=band_limit {
                            modes[mode_index(l, n)] = Complex64::new(standard_normal(rng), standard_normal(rng));
                        }
                        state.line_mut(r, c).copy_from_slice(&ft.samples(&modes));
                    }
                }
            }
        }
        state.normalized()
    }

    /// The sector eigenspinor `(i g h_{l,s}, f h_{l+s,−s})` with radial
    /// amplitudes given per radius; on a circle `g` and `f` have one entry.
    pub fn sector_state(layout: Arc<Layout>, sector: &QuantumNumbers, g: &[Complex64], f: &[Complex64]) -> Result<SpectralState> {
        if !layout.is_angular() {
            return Err(Error::RepresentationMismatch {
                op: "sector_state".into(),
                reason: "needs an angular layout".into(),
            });
        }
        let nr = layout.n_radii();
        if g.len() != nr || f.len() != nr {
            return Err(Error::GridMismatch(nr, g.len().min(f.len())));
        }
        let s = sector.s();
        let (l, lower_l) = (sector.l(), sector.lower_l());
        let upper_c = spin_slot(s);
        let lower_c = 2 + spin_slot(-s);
        let mut state = SpectralState::zeros(layout.clone());
        let norm = 1.0 / (2.0 * PI).sqrt();
        let i = Complex64::new(0.0, 1.0);
        for r in 0..nr {
            for a in 0..layout.n_angular() {
                let phi = layout.angle(a);
                let up = Complex64::from_polar(norm, l as f64 * phi);
                let down = Complex64::from_polar(norm, lower_l as f64 * phi);
                state.set(r, upper_c, a, i * g[r] * up);
                state.set(r, lower_c, a, f[r] * down);
            }
        }
        Ok(state)
    }

    /// Fourier coefficients `⟨Φ_l, line⟩` of every (radius, component) line,
    /// indexed like the samples.
    pub fn modes(&self) -> Result<Vec<Complex64>> {
        if !self.layout.is_angular() {
            return Err(Error::RepresentationMismatch { op: "modes".into(), reason: "needs an angular layout".into() });
        }
        let n = self.layout.n_angular();
        let ft = FourierTransform::new(n);
        let mut out = Vec::with_capacity(self.data.len());
        for r in 0..self.layout.n_radii() {
            for c in 0..4 {
                out.extend(ft.modes(self.line(r, c)));
            }
        }
        Ok(out)
    }

    /// Relative weight outside the allowed (component, mode) pairs.
    pub fn leakage(&self, allowed: &[(usize, i64)]) -> Result<f64> {
        let modes = self.modes()?;
        let l = &self.layout;
        let n = l.n_angular();
        let (mut inside, mut outside) = (0.0, 0.0);
        for r in 0..l.n_radii() {
            let w = match &**l {
                Layout::Polar { weights, .. } => weights[r],
                _ => 1.0,
            };
            for c in 0..4 {
                for i in 0..n {
                    let v = modes[l.index(r, c, i)].norm_sqr() * w;
                    let keep = signed_mode(i, n).map(|m| allowed.contains(&(c, m))).unwrap_or(false);
                    if keep {
                        inside += v;
                    } else {
                        outside += v;
                    }
                }
            }
        }
        let total = inside + outside;
        Ok(if total == 0.0 { 0.0 } else { (outside / total).sqrt() })
    }
}
