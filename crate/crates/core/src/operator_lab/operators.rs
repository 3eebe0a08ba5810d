//! Linear operators acting on [`SpectralState`]s and the symmetry generators
//! of the circular Dirac Hamiltonian.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::dirac::{Axis, DiracMatrices, M4};
use super::state::{Layout, Space, SpectralState};
use crate::angular_basis::FourierTransform;
use crate::error::{Error, Result};
use crate::quantum_numbers::Sign;

/// Momentum samples below this fraction of the largest sampled momentum are
/// zeroed by direction-dependent fields; a single circle below it is refused.
pub const MOMENTUM_FLOOR: f64 = 1e-8;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Pointwise 4×4 matrix field of (radius, angle).
pub type MatrixField = Arc<dyn Fn(f64, f64) -> M4 + Send + Sync>;

#[derive(Clone)]
pub enum OperatorKind {
    /// Constant matrix on the spinor index.
    Matrix(M4),
    /// Multiplication by a matrix field. `support` restricts the layouts the
    /// field is meaningful on.
    Field { field: MatrixField, support: Option<Space> },
    /// `−i ∂/∂angle` on angular layouts, `m` on a multiplet.
    OrbitalZ,
    /// Orbital `L_x` on a multiplet.
    OrbitalX,
    /// Orbital `L_y` on a multiplet.
    OrbitalY,
    /// Fourth-order finite-difference `∂/∂r` on a uniform polar grid.
    RadialDerivative,
    Sum(Vec<(Complex64, OperatorRep)>),
    /// Factors applied right to left.
    Product(Vec<OperatorRep>),
}

/// A named linear action on spectral states.
#[derive(Clone)]
pub struct OperatorRep {
    name: String,
    kind: Arc<OperatorKind>,
}

impl fmt::Debug for OperatorRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorRep").field("name", &self.name).finish()
    }
}

impl OperatorRep {
    pub fn new(name: impl Into<String>, kind: OperatorKind) -> Self {
        OperatorRep { name: name.into(), kind: Arc::new(kind) }
    }

    pub fn matrix(name: impl Into<String>, m: M4) -> Self {
        OperatorRep::new(name, OperatorKind::Matrix(m))
    }

    pub fn identity() -> Self {
        OperatorRep::matrix("1", M4::identity())
    }

    pub fn zero() -> Self {
        OperatorRep::matrix("0", M4::zeros())
    }

    pub fn field(name: impl Into<String>, support: Option<Space>, f: impl Fn(f64, f64) -> M4 + Send + Sync + 'static) -> Self {
        OperatorRep::new(name, OperatorKind::Field { field: Arc::new(f), support })
    }

    pub fn orbital(axis: Axis) -> Self {
        match axis {
            Axis::X => OperatorRep::new("L_x", OperatorKind::OrbitalX),
            Axis::Y => OperatorRep::new("L_y", OperatorKind::OrbitalY),
            Axis::Z => OperatorRep::new("L_z", OperatorKind::OrbitalZ),
        }
    }

    pub fn radial_derivative() -> Self {
        OperatorRep::new("d/dr", OperatorKind::RadialDerivative)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        OperatorRep { name: name.into(), kind: self.kind.clone() }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        OperatorRep::new(format!("({})·{}", fmt_complex(c), self.name), OperatorKind::Sum(vec![(c, self.clone())]))
    }

    pub fn plus(&self, other: &OperatorRep) -> Self {
        OperatorRep::new(
            format!("{} + {}", self.name, other.name),
            OperatorKind::Sum(vec![(re(1.0), self.clone()), (re(1.0), other.clone())]),
        )
    }

    pub fn minus(&self, other: &OperatorRep) -> Self {
        OperatorRep::new(
            format!("{} - {}", self.name, other.name),
            OperatorKind::Sum(vec![(re(1.0), self.clone()), (re(-1.0), other.clone())]),
        )
    }

    /// `self · other`: `other` acts first.
    pub fn times(&self, other: &OperatorRep) -> Self {
        OperatorRep::new(format!("{}·{}", self.name, other.name), OperatorKind::Product(vec![self.clone(), other.clone()]))
    }

    pub fn linear_combination(name: impl Into<String>, terms: Vec<(Complex64, OperatorRep)>) -> Self {
        OperatorRep::new(name, OperatorKind::Sum(terms))
    }

    pub fn commutator(a: &OperatorRep, b: &OperatorRep) -> Self {
        a.times(b).minus(&b.times(a)).renamed(format!("[{}, {}]", a.name, b.name))
    }

    pub fn anticommutator(a: &OperatorRep, b: &OperatorRep) -> Self {
        a.times(b).plus(&b.times(a)).renamed(format!("{{{}, {}}}", a.name, b.name))
    }

    pub fn apply(&self, psi: &SpectralState) -> Result<SpectralState> {
        match &*self.kind {
            OperatorKind::Matrix(m) => Ok(apply_matrix_field(psi, |_, _| *m, false)),
            OperatorKind::Field { field, support } => {
                let layout = psi.layout();
                if let Some(required) = support {
                    if layout.space() != Some(*required) {
                        return Err(Error::RepresentationMismatch {
                            op: self.name.clone(),
                            reason: format!("needs a {required:?}-space angular layout"),
                        });
                    }
                }
                let floored = *support == Some(Space::Momentum);
                if floored {
                    if let Layout::Circle { radius, .. } = **layout {
                        if radius < MOMENTUM_FLOOR {
                            return Err(Error::BelowMomentumFloor { p: radius, floor: MOMENTUM_FLOOR });
                        }
                    }
                }
                Ok(apply_matrix_field(psi, |r, a| field(r, a), floored))
            }
            OperatorKind::OrbitalZ => apply_orbital_z(psi, &self.name),
            OperatorKind::OrbitalX | OperatorKind::OrbitalY => {
                apply_orbital_transverse(psi, matches!(&*self.kind, OperatorKind::OrbitalX), &self.name)
            }
            OperatorKind::RadialDerivative => apply_radial_derivative(psi, &self.name),
            OperatorKind::Sum(terms) => {
                let mut out = SpectralState::zeros(psi.layout().clone());
                for (c, op) in terms {
                    let image = op.apply(psi)?;
                    for (o, v) in out.data_mut().iter_mut().zip(image.data()) {
                        *o += c * v;
                    }
                }
                Ok(out)
            }
            OperatorKind::Product(factors) => {
                let mut current = psi.clone();
                for op in factors.iter().rev() {
                    current = op.apply(&current)?;
                }
                Ok(current)
            }
        }
    }

    /// `γ⁵ G γ⁵`.
    pub fn conjugate_gamma5(&self) -> OperatorRep {
        let g5 = OperatorRep::matrix("γ5", DiracMatrices::standard().gamma5);
        OperatorRep::new(format!("γ5·{}·γ5", self.name), OperatorKind::Product(vec![g5.clone(), self.clone(), g5]))
    }
}

fn fmt_complex(c: Complex64) -> String {
    match (c.re, c.im) {
        (r, 0.0) => format!("{r}"),
        (0.0, i) => format!("{i}i"),
        (r, i) => format!("{r}{i:+}i"),
    }
}

fn apply_matrix_field(psi: &SpectralState, m: impl Fn(f64, f64) -> M4, floored: bool) -> SpectralState {
    let layout = psi.layout().clone();
    let mut out = SpectralState::zeros(layout.clone());
    let floor = MOMENTUM_FLOOR * layout.max_radius();
    for r in 0..layout.n_radii() {
        let radius = layout.radius(r);
        if floored && radius < floor {
            continue;
        }
        for a in 0..layout.n_angular() {
            let mat = m(radius, layout.angle(a));
            for row in 0..4 {
                let mut acc = C0;
                for col in 0..4 {
                    let entry = mat[(row, col)];
                    if entry != C0 {
                        acc += entry * psi.get(r, col, a);
                    }
                }
                out.set(r, row, a, acc);
            }
        }
    }
    out
}

fn apply_orbital_z(psi: &SpectralState, name: &str) -> Result<SpectralState> {
    let layout = psi.layout().clone();
    let mut out = psi.clone();
    match &*layout {
        Layout::Multiplet { .. } => {
            for r in 0..layout.n_radii() {
                for c in 0..4 {
                    for a in 0..layout.n_angular() {
                        let m = layout.multiplet_m(a) as f64;
                        out.set(r, c, a, psi.get(r, c, a) * m);
                    }
                }
            }
        }
        _ => {
            if layout.n_angular() == 0 {
                return Err(Error::RepresentationMismatch { op: name.into(), reason: "empty angular grid".into() });
            }
            let ft = FourierTransform::new(layout.n_angular());
            for r in 0..layout.n_radii() {
                for c in 0..4 {
                    ft.apply_lz(out.line_mut(r, c));
                }
            }
        }
    }
    Ok(out)
}

fn apply_orbital_transverse(psi: &SpectralState, x: bool, name: &str) -> Result<SpectralState> {
    let layout = psi.layout().clone();
    let ell = match &*layout {
        Layout::Multiplet { ell } => *ell,
        _ => {
            return Err(Error::RepresentationMismatch {
                op: name.into(),
                reason: "transverse orbital components exist only on an orbital multiplet".into(),
            })
        }
    };
    let ladder = |m: i64, up: bool| -> f64 {
        let next = if up { m + 1 } else { m - 1 };
        ((ell * (ell + 1) - m * next) as f64).max(0.0).sqrt()
    };
    let n = layout.n_angular();
    let mut out = SpectralState::zeros(layout.clone());
    for c in 0..4 {
        for a in 0..n {
            let m = layout.multiplet_m(a);
            let v = psi.get(0, c, a);
            // L_± |m⟩ = ladder(m) |m±1⟩; L_x = (L_+ + L_−)/2, L_y = (L_+ − L_−)/(2i).
            if m < ell {
                let coeff = if x { re(0.5) } else { -I * 0.5 };
                let idx = a + 1;
                let cur = out.get(0, c, idx);
                out.set(0, c, idx, cur + coeff * ladder(m, true) * v);
            }
            if m > -ell {
                let coeff = if x { re(0.5) } else { I * 0.5 };
                let idx = a - 1;
                let cur = out.get(0, c, idx);
                out.set(0, c, idx, cur + coeff * ladder(m, false) * v);
            }
        }
    }
    Ok(out)
}

fn apply_radial_derivative(psi: &SpectralState, name: &str) -> Result<SpectralState> {
    let layout = psi.layout().clone();
    let radii = match &*layout {
        Layout::Polar { radii, .. } => radii.clone(),
        _ => {
            return Err(Error::RepresentationMismatch { op: name.into(), reason: "needs a polar layout".into() });
        }
    };
    let n = radii.len();
    if n < 5 {
        return Err(Error::BadGrid(format!("radial derivative needs at least 5 radii, got {n}")));
    }
    let h = (radii[n - 1] - radii[0]) / (n - 1) as f64;
    if radii.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::BadGrid("radial derivative needs uniform spacing".into()));
    }
    let stencil = |i: usize| -> ([f64; 5], usize) {
        if i < 2 {
            let one_sided = [[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0]];
            (one_sided[i], 0)
        } else if i + 2 >= n {
            let back = [[-1.0, 6.0, -18.0, 10.0, 3.0], [3.0, -16.0, 36.0, -48.0, 25.0]];
            (back[i + 2 - n], n - 5)
        } else {
            ([1.0, -8.0, 0.0, 8.0, -1.0], i - 2)
        }
    };
    let mut out = SpectralState::zeros(layout.clone());
    for i in 0..n {
        let (w, start) = stencil(i);
        for c in 0..4 {
            for a in 0..layout.n_angular() {
                let acc: Complex64 = (0..5).map(|j| psi.get(start + j, c, a) * w[j]).sum();
                out.set(i, c, a, acc / (12.0 * h));
            }
        }
    }
    Ok(out)
}

/// Named symmetry generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `𝒮_z = βΣ_z`.
    SpinZ,
    /// `𝒮_i = βΣ_i`.
    Spin(Axis),
    /// `𝓛_z = L_z + P_−Σ_z`.
    OrbitalZ,
    /// `𝓛_i = L_i + P_−Σ_i`; transverse components need an orbital multiplet.
    Orbital(Axis),
    /// `J_z = L_z + Σ_z/2`.
    TotalZ,
    /// `K = β(L_zΣ_z + 1/2)`.
    SpinOrbit,
    /// `𝒪_i = 𝒮_i − 2p̂_i(𝒮·p̂)P_−` in momentum space.
    SpinSymmetry(Axis),
    /// `𝒪̃_i = γ⁵𝒪_iγ⁵`.
    Pseudospin(Axis),
    /// `𝒪_x + i s 𝒪_y`.
    SpinLadder(Sign),
    /// `𝒪̃_x + i s 𝒪̃_y`.
    PseudospinLadder(Sign),
    Gamma5,
}

impl Generator {
    pub fn label(&self) -> String {
        match self {
            Generator::SpinZ => "S_z".into(),
            Generator::Spin(a) => format!("S_{}", a.label()),
            Generator::OrbitalZ => "Lgen_z".into(),
            Generator::Orbital(a) => format!("Lgen_{}", a.label()),
            Generator::TotalZ => "J_z".into(),
            Generator::SpinOrbit => "K".into(),
            Generator::SpinSymmetry(a) => format!("O_{}", a.label()),
            Generator::Pseudospin(a) => format!("Otilde_{}", a.label()),
            Generator::SpinLadder(s) => format!("O_{}", sign_label(*s)),
            Generator::PseudospinLadder(s) => format!("Otilde_{}", sign_label(*s)),
            Generator::Gamma5 => "gamma5".into(),
        }
    }
}

fn sign_label(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

/// Unit momentum direction in the plane.
fn unit_direction(theta: f64) -> [f64; 3] {
    [theta.cos(), theta.sin(), 0.0]
}

/// The matrix `𝒮_i − 2p̂_i(𝒮·p̂)P_−` at momentum angle `theta`.
pub fn spin_symmetry_matrix(d: &DiracMatrices, axis: Axis, theta: f64) -> M4 {
    let n = unit_direction(theta);
    let spin_dot = Axis::ALL.iter().fold(M4::zeros(), |acc, &b| acc + d.spin(b) * re(n[b.index()]));
    d.spin(axis) - spin_dot * d.p_minus * re(2.0 * n[axis.index()])
}

pub fn build_generator(generator: Generator) -> OperatorRep {
    let d = DiracMatrices::standard();
    let name = generator.label();
    match generator {
        Generator::SpinZ => OperatorRep::matrix(name, d.spin(Axis::Z)),
        Generator::Spin(a) => OperatorRep::matrix(name, d.spin(a)),
        Generator::OrbitalZ | Generator::Orbital(_) => {
            let axis = match generator {
                Generator::Orbital(a) => a,
                _ => Axis::Z,
            };
            OperatorRep::orbital(axis).plus(&OperatorRep::matrix(format!("P-Σ_{}", axis.label()), d.p_minus * d.sigma(axis))).renamed(name)
        }
        Generator::TotalZ => OperatorRep::orbital(Axis::Z)
            .plus(&OperatorRep::matrix("Σ_z/2", d.sigma(Axis::Z) * re(0.5)))
            .renamed(name),
        Generator::SpinOrbit => {
            let beta = OperatorRep::matrix("β", d.beta);
            let inner = OperatorRep::orbital(Axis::Z)
                .times(&OperatorRep::matrix("Σ_z", d.sigma(Axis::Z)))
                .plus(&OperatorRep::matrix("1/2", M4::identity() * re(0.5)));
            beta.times(&inner).renamed(name)
        }
        Generator::SpinSymmetry(a) => {
            OperatorRep::field(name, Some(Space::Momentum), move |_, theta| spin_symmetry_matrix(&d, a, theta))
        }
        Generator::Pseudospin(a) => {
            let g5 = d.gamma5;
            OperatorRep::field(name, Some(Space::Momentum), move |_, theta| g5 * spin_symmetry_matrix(&d, a, theta) * g5)
        }
        Generator::SpinLadder(s) => {
            let c = I * s.as_f64();
            OperatorRep::field(name, Some(Space::Momentum), move |_, theta| {
                spin_symmetry_matrix(&d, Axis::X, theta) + spin_symmetry_matrix(&d, Axis::Y, theta) * c
            })
        }
        Generator::PseudospinLadder(s) => {
            let c = I * s.as_f64();
            let g5 = d.gamma5;
            OperatorRep::field(name, Some(Space::Momentum), move |_, theta| {
                g5 * (spin_symmetry_matrix(&d, Axis::X, theta) + spin_symmetry_matrix(&d, Axis::Y, theta) * c) * g5
            })
        }
        Generator::Gamma5 => OperatorRep::matrix(name, d.gamma5),
    }
}

/// `‖G ψ − λ ψ‖ / ‖ψ‖`.
pub fn eigen_residual(op: &OperatorRep, psi: &SpectralState, value: f64) -> Result<f64> {
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::Numeric("eigenvalue check on a null state".into()));
    }
    let image = op.apply(psi)?;
    Ok(image.sub(&psi.scaled(re(value)))?.norm() / norm)
}

/// `⟨ψ, G ψ⟩ / ⟨ψ, ψ⟩`.
pub fn expectation(op: &OperatorRep, psi: &SpectralState) -> Result<Complex64> {
    let image = op.apply(psi)?;
    Ok(psi.inner(&image)? / psi.inner(psi)?)
}

/// `|⟨a, G b⟩ − ⟨G a, b⟩|` for unit states.
pub fn hermiticity_defect(op: &OperatorRep, a: &SpectralState, b: &SpectralState) -> Result<f64> {
    let left = a.inner(&op.apply(b)?)?;
    let right = op.apply(a)?.inner(b)?;
    Ok((left - right).norm())
}
