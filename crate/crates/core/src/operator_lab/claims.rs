//! Declarative table of operator relations and their numerical verification.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dirac::{levi_civita, Axis, DiracMatrices, M4};
use super::operators::{build_generator, hermiticity_defect, Generator, OperatorRep};
use super::state::{Layout, Space, SpectralState};
use crate::error::{Error, Result};

/// Default residual bound for relations that should hold.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Residual bound for hermiticity and operator identities of generators.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// A relation expected to fail must miss by at least this much.
pub const FAIL_MARGIN: f64 = 1e-2;
pub const MIN_TRIALS: usize = 20;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Sampling arena a claim is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arena {
    /// Single momentum circle with a random radius per trial.
    MomentumCircle,
    /// Single position circle with a random radius per trial.
    PositionCircle,
    /// Orbital multiplet tensored with a four-spinor.
    Multiplet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Holds,
    Fails,
}

type Builder = Arc<dyn Fn(&mut ChaCha8Rng) -> (OperatorRep, OperatorRep) + Send + Sync>;

#[derive(Clone)]
enum Check {
    /// `‖(lhs − rhs) ψ‖` on random unit states.
    Identity(Builder),
    /// `|⟨a, G b⟩ − ⟨G a, b⟩|` on random unit pairs.
    Hermitian(OperatorRep),
}

#[derive(Clone)]
pub struct Claim {
    pub id: String,
    pub lhs: String,
    pub rhs: String,
    pub arena: Arena,
    pub expectation: Expectation,
    pub tolerance: f64,
    check: Check,
}

impl std::fmt::Debug for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Claim").field("id", &self.id).field("lhs", &self.lhs).field("rhs", &self.rhs).finish()
    }
}

impl Claim {
    fn identity(
        id: impl Into<String>,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
        arena: Arena,
        build: impl Fn(&mut ChaCha8Rng) -> (OperatorRep, OperatorRep) + Send + Sync + 'static,
    ) -> Self {
        Claim {
            id: id.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            arena,
            expectation: Expectation::Holds,
            tolerance: DEFAULT_TOLERANCE,
            check: Check::Identity(Arc::new(build)),
        }
    }

    fn fixed(id: impl Into<String>, lhs: impl Into<String>, rhs: impl Into<String>, arena: Arena, a: OperatorRep, b: OperatorRep) -> Self {
        Claim::identity(id, lhs, rhs, arena, move |_| (a.clone(), b.clone()))
    }

    fn hermitian(op: OperatorRep, arena: Arena) -> Self {
        Claim {
            id: format!("hermitian.{}", op.name()),
            lhs: format!("<a, {} b>", op.name()),
            rhs: format!("<{} a, b>", op.name()),
            arena,
            expectation: Expectation::Holds,
            tolerance: HERMITIAN_TOLERANCE,
            check: Check::Hermitian(op),
        }
    }

    fn expect_failure(mut self) -> Self {
        self.expectation = Expectation::Fails;
        self
    }

    fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

/// Sampling parameters for claim verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgebraSettings {
    pub trials: usize,
    pub band_limit: i64,
    pub n_angles: usize,
    pub multiplet_ell: i64,
    /// Adds a deliberately false relation to the table.
    pub inject_wrong_claim: bool,
    /// Replaces every claim's own tolerance.
    #[serde(skip)]
    pub tolerance: Option<f64>,
}

impl Default for AlgebraSettings {
    fn default() -> Self {
        AlgebraSettings { trials: MIN_TRIALS, band_limit: 8, n_angles: 64, multiplet_ell: 2, inject_wrong_claim: false, tolerance: None }
    }
}

impl AlgebraSettings {
    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::Config(format!("algebra.trials must be at least {MIN_TRIALS}, got {}", self.trials)));
        }
        if self.band_limit < 1 {
            return Err(Error::Config("algebra.band_limit must be positive".into()));
        }
        if self.n_angles < 8 || !self.n_angles.is_power_of_two() {
            return Err(Error::BadAngularGrid(self.n_angles));
        }
        // Products of up to four direction fields raise the band by 8.
        if self.band_limit + 8 >= self.n_angles as i64 / 2 {
            return Err(Error::Aliasing { l_max: self.band_limit + 8, n_angles: self.n_angles });
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("tolerance must be finite and positive, got {t}")));
            }
        }
        if self.multiplet_ell < 1 {
            return Err(Error::Config("algebra.multiplet_ell must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one claim.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimRecord {
    pub claim_id: String,
    pub lhs: String,
    pub rhs: String,
    pub arena: Arena,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub trials: usize,
    pub expectation: Expectation,
    /// Whether the relation held within tolerance, independent of expectation.
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub seed: u64,
    pub trials: usize,
    pub all_pass: bool,
    pub claims: Vec<ClaimRecord>,
}

impl AlgebraReport {
    pub fn failures(&self) -> impl Iterator<Item = &ClaimRecord> {
        self.claims.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&ClaimRecord> {
        self.claims.iter().find(|c| c.claim_id == id)
    }
}

fn pairs() -> Vec<(Axis, Axis)> {
    let mut out = Vec::new();
    for i in Axis::ALL {
        for j in Axis::ALL {
            if i.index() < j.index() {
                out.push((i, j));
            }
        }
    }
    out
}

fn ordered_pairs() -> Vec<(Axis, Axis)> {
    let mut out = Vec::new();
    for i in Axis::ALL {
        for j in Axis::ALL {
            if i.index() <= j.index() {
                out.push((i, j));
            }
        }
    }
    out
}

fn third(i: Axis, j: Axis) -> Axis {
    Axis::from_index(3 - i.index() - j.index())
}

/// `Σ_k c_k X_k` with `c_k = scale·ε_{ijk}`.
fn epsilon_sum(i: Axis, j: Axis, scale: Complex64, name: &str, x: impl Fn(Axis) -> OperatorRep) -> OperatorRep {
    let terms: Vec<(Complex64, OperatorRep)> = Axis::ALL
        .iter()
        .filter(|&&k| levi_civita(i, j, k) != 0.0)
        .map(|&k| (scale * levi_civita(i, j, k), x(k)))
        .collect();
    if terms.is_empty() {
        OperatorRep::zero()
    } else {
        OperatorRep::linear_combination(name, terms)
    }
}

fn mat(name: &str, m: M4) -> OperatorRep {
    OperatorRep::matrix(name, m)
}

/// Free momentum-space Hamiltonian `p α·p̂ + βm + V_Σ P_+ + V_Δ P_−` with
/// constant sum and difference potentials.
pub fn momentum_hamiltonian(mass: f64, v_sigma: f64, v_delta: f64) -> OperatorRep {
    let d = DiracMatrices::standard();
    let constant = d.beta * re(mass) + d.p_plus * re(v_sigma) + d.p_minus * re(v_delta);
    OperatorRep::field("H", Some(Space::Momentum), move |p, theta| {
        d.alpha_dot([theta.cos(), theta.sin(), 0.0]) * re(p) + constant
    })
}

/// Every relation checked by the algebra suite.
pub fn claims_table(settings: &AlgebraSettings) -> Vec<Claim> {
    let d = DiracMatrices::standard();
    let g = build_generator;
    let mut t = Vec::new();
    let mc = Arena::MomentumCircle;
    let one = M4::identity();

    for (i, j) in ordered_pairs() {
        let want = if i == j { one * re(2.0) } else { M4::zeros() };
        let (a, b) = (mat(&format!("α_{}", i.label()), d.alpha(i)), mat(&format!("α_{}", j.label()), d.alpha(j)));
        t.push(Claim::fixed(
            format!("clifford.alpha_anticommutator.{}{}", i.label(), j.label()),
            format!("{{α_{}, α_{}}}", i.label(), j.label()),
            if i == j { "2·1" } else { "0" },
            mc,
            OperatorRep::anticommutator(&a, &b),
            mat("rhs", want),
        ));
    }
    let beta = mat("β", d.beta);
    for i in Axis::ALL {
        t.push(Claim::fixed(
            format!("clifford.alpha_beta.{}", i.label()),
            format!("{{α_{}, β}}", i.label()),
            "0",
            mc,
            OperatorRep::anticommutator(&mat("α", d.alpha(i)), &beta),
            OperatorRep::zero(),
        ));
    }
    t.push(Claim::fixed("clifford.beta_squared", "β²", "1", mc, beta.times(&beta), OperatorRep::identity()));
    let g5 = g(Generator::Gamma5);
    t.push(Claim::fixed("clifford.gamma5_squared", "γ5²", "1", mc, g5.times(&g5), OperatorRep::identity()));
    let (pp, pm) = (mat("P+", d.p_plus), mat("P-", d.p_minus));
    t.push(Claim::fixed("projector.plus_idempotent", "P+²", "P+", mc, pp.times(&pp), pp.clone()));
    t.push(Claim::fixed("projector.minus_idempotent", "P-²", "P-", mc, pm.times(&pm), pm.clone()));
    t.push(Claim::fixed("projector.orthogonal", "P+ P-", "0", mc, pp.times(&pm), OperatorRep::zero()));
    t.push(Claim::fixed("projector.complete", "P+ + P-", "1", mc, pp.plus(&pm), OperatorRep::identity()));
    t.push(Claim::identity("clifford.alpha_product_identity", "(α·A)(α·B)", "A·B + i(A×B)·Σ", mc, move |rng| {
        let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let b: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let lhs = d.alpha_dot(a) * d.alpha_dot(b);
        let rhs = one * re(dot) + d.sigma_dot(cross) * I;
        (mat("lhs", lhs), mat("rhs", rhs))
    }));

    let spin = move |a: Axis| g(Generator::Spin(a));
    let sigma = move |a: Axis| mat(&format!("Σ_{}", a.label()), d.sigma(a));
    for (i, j) in pairs() {
        let k = third(i, j);
        let lhs = format!("[S_{}, S_{}]", i.label(), j.label());
        let c = OperatorRep::commutator(&spin(i), &spin(j));
        t.push(Claim::fixed(
            format!("spin.commutator.{}{}", i.label(), j.label()),
            lhs.clone(),
            format!("2iε Σ_{}", k.label()),
            mc,
            c.clone(),
            epsilon_sum(i, j, I * 2.0, "rhs", sigma),
        ));
        t.push(
            Claim::fixed(
                format!("spin.commutator_as_angular_momentum.{}{}", i.label(), j.label()),
                lhs,
                format!("2iε S_{}", k.label()),
                mc,
                c,
                epsilon_sum(i, j, I * 2.0, "rhs", spin),
            )
            .expect_failure(),
        );
    }

    let mp = Arena::Multiplet;
    let orbital_gen = move |a: Axis| g(Generator::Orbital(a));
    let orbital = OperatorRep::orbital;
    let p_minus_sigma = move |a: Axis| mat(&format!("P-Σ_{}", a.label()), d.p_minus * d.sigma(a));
    for (i, j) in pairs() {
        let k = third(i, j);
        let lhs = format!("[Lgen_{}, Lgen_{}]", i.label(), j.label());
        let c = OperatorRep::commutator(&orbital_gen(i), &orbital_gen(j));
        t.push(
            Claim::fixed(
                format!("orbital_gen.commutator.{}{}", i.label(), j.label()),
                lhs.clone(),
                format!("iε L_{}", k.label()),
                mp,
                c.clone(),
                epsilon_sum(i, j, I, "rhs", orbital),
            )
            .expect_failure(),
        );
        t.push(Claim::fixed(
            format!("orbital_gen.commutator_with_spin_term.{}{}", i.label(), j.label()),
            lhs,
            format!("iε (L_{0} + 2 P-Σ_{0})", k.label()),
            mp,
            c,
            epsilon_sum(i, j, I, "rhs", move |a| orbital(a).plus(&p_minus_sigma(a).scaled(re(2.0)))),
        ));
    }

    let pc = Arena::PositionCircle;
    let (sz, lz, jz, kk) = (g(Generator::SpinZ), g(Generator::OrbitalZ), g(Generator::TotalZ), g(Generator::SpinOrbit));
    t.push(
        Claim::fixed("total_z.decomposition", "J_z", "Lgen_z + S_z/2", pc, jz.clone(), lz.plus(&sz.scaled(re(0.5))))
            .with_tolerance(HERMITIAN_TOLERANCE),
    );
    t.push(
        Claim::fixed("total_z.orbital_plus_sigma", "J_z", "L_z + Σ_z/2", pc, jz.clone(), orbital(Axis::Z).plus(&sigma(Axis::Z).scaled(re(0.5))))
            .with_tolerance(HERMITIAN_TOLERANCE),
    );
    t.push(
        Claim::fixed("spin_orbit.factorisation", "K", "S_z J_z", pc, kk.clone(), sz.times(&jz)).with_tolerance(HERMITIAN_TOLERANCE),
    );
    for (name, op) in [("S_z", sz.clone()), ("Lgen_z", lz.clone()), ("J_z", jz.clone()), ("K", kk.clone())] {
        for (other_name, other) in [("S_z", sz.clone()), ("Lgen_z", lz.clone()), ("J_z", jz.clone()), ("K", kk.clone())] {
            if name < other_name {
                t.push(Claim::fixed(
                    format!("commuting_set.{name}.{other_name}"),
                    format!("[{name}, {other_name}]"),
                    "0",
                    pc,
                    OperatorRep::commutator(&op, &other),
                    OperatorRep::zero(),
                ));
            }
        }
    }

    let o = move |a: Axis| g(Generator::SpinSymmetry(a));
    let ot = move |a: Axis| g(Generator::Pseudospin(a));
    for (i, j) in pairs() {
        let k = third(i, j);
        t.push(Claim::fixed(
            format!("spin_symmetry.commutator.{}{}", i.label(), j.label()),
            format!("[O_{}, O_{}]", i.label(), j.label()),
            format!("2iε O_{}", k.label()),
            mc,
            OperatorRep::commutator(&o(i), &o(j)),
            epsilon_sum(i, j, I * 2.0, "rhs", o),
        ));
        t.push(Claim::fixed(
            format!("pseudospin.commutator.{}{}", i.label(), j.label()),
            format!("[Otilde_{}, Otilde_{}]", i.label(), j.label()),
            format!("2iε Otilde_{}", k.label()),
            mc,
            OperatorRep::commutator(&ot(i), &ot(j)),
            epsilon_sum(i, j, I * 2.0, "rhs", ot),
        ));
    }
    for (i, j) in ordered_pairs() {
        let ac = OperatorRep::anticommutator(&o(i), &o(j));
        let lhs = format!("{{O_{}, O_{}}}", i.label(), j.label());
        let delta = if i == j { 2.0 } else { 0.0 };
        t.push(Claim::fixed(
            format!("spin_symmetry.anticommutator.{}{}", i.label(), j.label()),
            lhs.clone(),
            format!("{delta}·1"),
            mc,
            ac.clone(),
            OperatorRep::identity().scaled(re(delta)),
        ));
        if i == j {
            t.push(
                Claim::fixed(
                    format!("spin_symmetry.anticommutator_imaginary.{}{}", i.label(), j.label()),
                    lhs,
                    "2i·1",
                    mc,
                    ac,
                    OperatorRep::identity().scaled(I * 2.0),
                )
                .expect_failure(),
            );
        }
    }
    let z = Axis::Z;
    for i in Axis::ALL {
        let il = i.label();
        t.push(Claim::fixed(
            format!("spin_symmetry.with_spin_z.{il}"),
            format!("[O_{il}, S_z]"),
            "2iε_izk O_k",
            mc,
            OperatorRep::commutator(&o(i), &sz),
            epsilon_sum(i, z, I * 2.0, "rhs", o),
        ));
        t.push(Claim::fixed(
            format!("spin_symmetry.with_orbital_gen_z.{il}"),
            format!("[O_{il}, Lgen_z]"),
            "0",
            mc,
            OperatorRep::commutator(&o(i), &lz),
            OperatorRep::zero(),
        ));
        t.push(Claim::fixed(
            format!("spin_symmetry.with_total_z.{il}"),
            format!("[O_{il}, J_z]"),
            "iε_izj O_j",
            mc,
            OperatorRep::commutator(&o(i), &jz),
            epsilon_sum(i, z, I, "rhs", o),
        ));
        let jz_k = jz.clone();
        t.push(Claim::fixed(
            format!("spin_symmetry.with_spin_orbit.{il}"),
            format!("[O_{il}, K]"),
            "iε_izk (2 O_k J_z + O_z O_k)",
            mc,
            OperatorRep::commutator(&o(i), &kk),
            epsilon_sum(i, z, I, "rhs", move |k| o(k).times(&jz_k).scaled(re(2.0)).plus(&o(Axis::Z).times(&o(k)))),
        ));
        t.push(Claim::identity(
            format!("spin_symmetry.commutes_with_hamiltonian.{il}"),
            format!("[H(m, V_Σ, V_Δ const), O_{il}]"),
            "0",
            mc,
            move |rng| {
                let h = momentum_hamiltonian(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (OperatorRep::commutator(&h, &o(i)), OperatorRep::zero())
            },
        ));
        t.push(Claim::identity(
            format!("pseudospin.commutes_with_hamiltonian.{il}"),
            format!("[H(m, V_Σ, V_Δ const), Otilde_{il}]"),
            "0",
            mc,
            move |rng| {
                let h = momentum_hamiltonian(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (OperatorRep::commutator(&h, &ot(i)), OperatorRep::zero())
            },
        ));
        t.push(
            Claim::fixed(
                format!("gamma5.spin_symmetry_conjugate.{il}"),
                format!("γ5 O_{il} γ5"),
                format!("Otilde_{il}"),
                mc,
                o(i).conjugate_gamma5(),
                ot(i),
            )
            .with_tolerance(HERMITIAN_TOLERANCE),
        );
    }
    t.push(
        Claim::fixed("spin_symmetry.third_component", "O_z", "S_z", mc, o(Axis::Z), sz.clone()).with_tolerance(HERMITIAN_TOLERANCE),
    );
    t.push(
        Claim::fixed("pseudospin.third_component", "Otilde_z", "-S_z", mc, ot(Axis::Z), sz.scaled(re(-1.0)))
            .with_tolerance(HERMITIAN_TOLERANCE),
    );
    for s in [crate::Sign::Plus, crate::Sign::Minus] {
        let c = I * s.as_f64();
        t.push(
            Claim::fixed(
                format!("spin_symmetry.ladder_form.{}", s.value()),
                g(Generator::SpinLadder(s)).name().to_string(),
                "O_x + is O_y",
                mc,
                g(Generator::SpinLadder(s)),
                o(Axis::X).plus(&o(Axis::Y).scaled(c)),
            )
            .with_tolerance(HERMITIAN_TOLERANCE),
        );
    }

    t.push(
        Claim::fixed(
            "gamma5.orbital_gen_z",
            "γ5 Lgen_z γ5",
            "L_z + P+Σ_z",
            pc,
            lz.conjugate_gamma5(),
            orbital(Axis::Z).plus(&mat("P+Σ_z", d.p_plus * d.sigma(Axis::Z))),
        )
        .with_tolerance(HERMITIAN_TOLERANCE),
    );
    t.push(
        Claim::fixed("gamma5.spin_orbit", "γ5 K γ5", "-K", pc, kk.conjugate_gamma5(), kk.scaled(re(-1.0)))
            .with_tolerance(HERMITIAN_TOLERANCE),
    );
    for (name, op) in [("O_z", o(Axis::Z)), ("Otilde_x", ot(Axis::X)), ("K", kk.clone()), ("Lgen_z", lz.clone())] {
        t.push(
            Claim::fixed(
                format!("gamma5.involution.{name}"),
                format!("γ5 γ5 {name} γ5 γ5"),
                name.to_string(),
                mc,
                op.conjugate_gamma5().conjugate_gamma5(),
                op,
            )
            .with_tolerance(HERMITIAN_TOLERANCE),
        );
    }

    let mut hermitian: Vec<OperatorRep> = vec![sz, lz, jz, kk, g(Generator::Gamma5)];
    hermitian.extend(Axis::ALL.iter().map(|&a| g(Generator::Spin(a))));
    hermitian.extend(Axis::ALL.iter().map(|&a| o(a)));
    hermitian.extend(Axis::ALL.iter().map(|&a| ot(a)));
    t.extend(hermitian.into_iter().map(|op| Claim::hermitian(op, mc)));

    if settings.inject_wrong_claim {
        t.push(Claim::fixed(
            "injected.wrong_sign",
            "[S_x, S_y]",
            "-2i Σ_z",
            mc,
            OperatorRep::commutator(&spin(Axis::X), &spin(Axis::Y)),
            sigma(Axis::Z).scaled(I * -2.0),
        ));
    }
    t
}

fn arena_layout(arena: Arena, settings: &AlgebraSettings, rng: &mut ChaCha8Rng) -> Result<Arc<Layout>> {
    match arena {
        Arena::MomentumCircle => Layout::circle(Space::Momentum, rng.gen_range(0.3..3.0), settings.n_angles),
        Arena::PositionCircle => Layout::circle(Space::Position, rng.gen_range(0.3..3.0), settings.n_angles),
        Arena::Multiplet => Layout::multiplet(settings.multiplet_ell),
    }
}

/// Largest residual of one claim over `settings.trials` random states.
pub fn evaluate_claim(claim: &Claim, settings: &AlgebraSettings, seed: u64, stream: u64) -> Result<ClaimRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut residual = 0.0f64;
    for _ in 0..settings.trials {
        let layout = arena_layout(claim.arena, settings, &mut rng)?;
        let value = match &claim.check {
            Check::Identity(build) => {
                let (lhs, rhs) = build(&mut rng);
                let psi = SpectralState::random(layout, settings.band_limit, &mut rng)?;
                lhs.apply(&psi)?.sub(&rhs.apply(&psi)?)?.norm()
            }
            Check::Hermitian(op) => {
                let a = SpectralState::random(layout.clone(), settings.band_limit, &mut rng)?;
                let b = SpectralState::random(layout, settings.band_limit, &mut rng)?;
                hermiticity_defect(op, &a, &b)?
            }
        };
        if !value.is_finite() {
            return Err(Error::Numeric(format!("claim {} produced a non-finite residual", claim.id)));
        }
        residual = residual.max(value);
    }
    let tolerance = settings.tolerance.unwrap_or(claim.tolerance);
    let holds = residual <= tolerance;
    let pass = match claim.expectation {
        Expectation::Holds => holds,
        Expectation::Fails => residual > FAIL_MARGIN,
    };
    Ok(ClaimRecord {
        claim_id: claim.id.clone(),
        lhs: claim.lhs.clone(),
        rhs: claim.rhs.clone(),
        arena: claim.arena,
        residual,
        tolerance,
        pass,
        seed,
        trials: settings.trials,
        expectation: claim.expectation,
        holds,
    })
}

/// Verifies the whole claims table, one claim per task.
pub fn verify_algebra(settings: &AlgebraSettings, seed: u64) -> Result<AlgebraReport> {
    settings.validate()?;
    let table = claims_table(settings);
    let claims = table
        .par_iter()
        .enumerate()
        .map(|(i, c)| evaluate_claim(c, settings, seed, i as u64))
        .collect::<Result<Vec<_>>>()?;
    let all_pass = claims.iter().all(|c| c.pass);
    Ok(AlgebraReport { seed, trials: settings.trials, all_pass, claims })
}
