//! Dirac matrices in the standard representation.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

pub type M4 = Matrix4<Complex64>;
pub type M2 = Matrix2<Complex64>;

const O: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cartesian axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Levi-Civita symbol.
pub fn levi_civita(i: Axis, j: Axis, k: Axis) -> f64 {
    let (i, j, k) = (i.index() as i64, j.index() as i64, k.index() as i64);
    ((j - i) * (k - i) * (k - j)) as f64 / 2.0
}

pub fn pauli(axis: Axis) -> M2 {
    match axis {
        Axis::X => M2::new(O, ONE, ONE, O),
        Axis::Y => M2::new(O, -I, I, O),
        Axis::Z => M2::new(ONE, O, O, -ONE),
    }
}

fn blocks(a: &M2, b: &M2, c: &M2, d: &M2) -> M4 {
    let mut m = M4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// The constant 4×4 matrices of the free Dirac problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracMatrices {
    pub alpha: [M4; 3],
    pub beta: M4,
    pub sigma: [M4; 3],
    pub gamma5: M4,
    pub p_plus: M4,
    pub p_minus: M4,
}

impl DiracMatrices {
    pub fn standard() -> Self {
        let z = M2::zeros();
        let id = M2::identity();
        let alpha = Axis::ALL.map(|a| blocks(&z, &pauli(a), &pauli(a), &z));
        let sigma = Axis::ALL.map(|a| blocks(&pauli(a), &z, &z, &pauli(a)));
        let beta = blocks(&id, &z, &z, &(-id));
        let gamma5 = blocks(&z, &id, &id, &z);
        let one = M4::identity();
        let half = Complex64::new(0.5, 0.0);
        DiracMatrices {
            alpha,
            beta,
            sigma,
            gamma5,
            p_plus: (one + beta) * half,
            p_minus: (one - beta) * half,
        }
    }

    pub fn alpha(&self, a: Axis) -> M4 {
        self.alpha[a.index()]
    }

    pub fn sigma(&self, a: Axis) -> M4 {
        self.sigma[a.index()]
    }

    /// `𝒮_i = βΣ_i`.
    pub fn spin(&self, a: Axis) -> M4 {
        self.beta * self.sigma(a)
    }

    /// `α · v` for a real vector.
    pub fn alpha_dot(&self, v: [f64; 3]) -> M4 {
        Axis::ALL.iter().fold(M4::zeros(), |acc, &a| acc + self.alpha(a) * Complex64::new(v[a.index()], 0.0))
    }

    /// `Σ · v` for a real vector.
    pub fn sigma_dot(&self, v: [f64; 3]) -> M4 {
        Axis::ALL.iter().fold(M4::zeros(), |acc, &a| acc + self.sigma(a) * Complex64::new(v[a.index()], 0.0))
    }
}

impl Default for DiracMatrices {
    fn default() -> Self {
        DiracMatrices::standard()
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &M4) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.norm()))
}
