//! Bound states of the coupled first-order radial equations
//!
//! ```text
//! g' = ( k/ρ − W) g + (m + ε − V_Δ) f
//! f' = (−k/ρ + W) f + (m − ε + V_Σ) g,      W = U_ρ + s V_φ
//! ```
//!
//! by two-sided shooting, and of the decoupled second-order equations for
//! `g` (constant `V_Δ`) or `f` (constant `V_Σ`).
//!
//! Both integrations use an adaptive Dormand–Prince 5(4) scheme with
//! on-the-fly renormalisation. Roots of the normalised matching determinant
//! are bracketed on an energy mesh, refined where the node count jumps, and
//! polished with Brent's method.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::simpson_weights;
use crate::error::{Error, Result};
use crate::potentials::PotentialSet;
use crate::quantum_numbers::QuantumNumbers;

pub const DEFAULT_RHO_MIN: f64 = 1e-4;
pub const DEFAULT_POINTS: usize = 2000;
pub const MIN_POINTS: usize = 200;

const RTOL: f64 = 1e-11;
const DECAY_EXPONENT: f64 = 20.0;
const RHO_MAX_CAP: f64 = 400.0;
const NODE_THRESHOLD: f64 = 1e-8;
const SCAN_POINTS: usize = 600;
const MAX_SUBDIVISION: u32 = 10;
const TAIL_LIMIT: f64 = 1e-6;

/// Uniform radial grid on `[ρ_min, ρ_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    rho_min: f64,
    rho_max: f64,
    n_points: usize,
}

impl RadialGrid {
    pub fn new(rho_min: f64, rho_max: f64, n_points: usize) -> Result<Self> {
        if !(rho_min > 0.0 && rho_min.is_finite()) {
            return Err(Error::BadGrid(format!("rho_min must be positive, got {rho_min}")));
        }
        if !(rho_max.is_finite() && rho_max > 0.0) {
            return Err(Error::BadGrid(format!("rho_max must be finite and positive, got {rho_max}")));
        }
        if rho_min > 1e-3 * rho_max {
            return Err(Error::BadGrid(format!("rho_min = {rho_min} exceeds 1e-3 * rho_max = {}", 1e-3 * rho_max)));
        }
        if n_points < MIN_POINTS {
            return Err(Error::BadGrid(format!("need at least {MIN_POINTS} points, got {n_points}")));
        }
        Ok(RadialGrid { rho_min, rho_max, n_points })
    }

    /// Default `ρ_min` and point count for the given outer radius.
    pub fn with_rho_max(rho_max: f64) -> Result<Self> {
        RadialGrid::new(DEFAULT_RHO_MIN.min(1e-3 * rho_max), rho_max, DEFAULT_POINTS)
    }

    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.rho_max - self.rho_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.rho_max
        } else {
            self.rho_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Simpson quadrature weights.
    pub fn weights(&self) -> Vec<f64> {
        simpson_weights(self.n_points, self.spacing())
    }

    pub fn with_points(&self, n_points: usize) -> Result<Self> {
        RadialGrid::new(self.rho_min, self.rho_max, n_points)
    }

    /// Grid with the spacing halved.
    pub fn refined(&self) -> Self {
        RadialGrid { n_points: 2 * self.n_points - 1, ..*self }
    }

    fn nearest_index(&self, rho: f64) -> usize {
        let i = ((rho - self.rho_min) / self.spacing()).round();
        (i.max(1.0) as usize).min(self.n_points - 2)
    }
}

/// Which radial equation is being shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// The coupled first-order pair for `(g, f)`.
    Coupled,
    /// The decoupled second-order equation for `g` (constant `V_Δ`).
    UpperG,
    /// The decoupled second-order equation for `f` (constant `V_Σ`).
    LowerF,
}

/// A normalised bound state of one sector.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub sector: QuantumNumbers,
    /// Interior sign changes of `g`.
    pub n: usize,
    /// Interior sign changes of `f`.
    pub f_nodes: usize,
    pub energy: f64,
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    pub f: Vec<f64>,
    pub norm_residual: f64,
    pub match_residual: f64,
    pub equation: Equation,
}

impl RadialSolution {
    pub fn grid_points(&self) -> usize {
        self.rho.len()
    }

    /// `∫(g² + f²) dρ` with Simpson weights.
    pub fn norm(&self) -> f64 {
        let h = self.rho[1] - self.rho[0];
        simpson_weights(self.rho.len(), h)
            .iter()
            .zip(self.g.iter().zip(&self.f))
            .map(|(w, (g, f))| w * (g * g + f * f))
            .sum()
    }
}

/// Bound states found in one window, with non-fatal diagnostics.
#[derive(Debug, Clone, Default)]
pub struct ScanResult {
    pub states: Vec<RadialSolution>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy)]
struct Coefficients<'a> {
    k: f64,
    s: f64,
    m: f64,
    eps: f64,
    pot: &'a PotentialSet,
}

impl<'a> Coefficients<'a> {
    fn new(sector: &QuantumNumbers, eps: f64, pot: &'a PotentialSet) -> Self {
        Coefficients { k: sector.k().to_f64(), s: sector.s().as_f64(), m: pot.mass, eps, pot }
    }

    fn w(&self, rho: f64) -> f64 {
        self.pot.radial_coupling(self.s, rho)
    }

    fn q(&self, rho: f64) -> f64 {
        self.k / rho - self.w(rho)
    }

    fn a(&self, rho: f64) -> f64 {
        self.m + self.eps - self.pot.delta.value(rho)
    }

    fn b(&self, rho: f64) -> f64 {
        self.m - self.eps + self.pot.sigma.value(rho)
    }

    /// Squared local growth rate of the coupled system.
    fn rate2(&self, rho: f64) -> f64 {
        let q = self.q(rho);
        q * q + self.a(rho) * self.b(rho)
    }

    fn second_order(&self, rho: f64, lower: bool) -> f64 {
        let w = self.w(rho);
        let dw = self.pot.radial_coupling_derivative(self.s, rho);
        let k = self.k;
        let ab = self.a(rho) * self.b(rho);
        if lower {
            k * (k + 1.0) / (rho * rho) + dw - 2.0 * k * w / rho + w * w + ab
        } else {
            k * (k - 1.0) / (rho * rho) - dw - 2.0 * k * w / rho + w * w + ab
        }
    }

    fn matrix(&self, eq: Equation, rho: f64) -> [[f64; 2]; 2] {
        match eq {
            Equation::Coupled => {
                let q = self.q(rho);
                [[q, self.a(rho)], [self.b(rho), -q]]
            }
            Equation::UpperG => [[0.0, 1.0], [self.second_order(rho, false), 0.0]],
            Equation::LowerF => [[0.0, 1.0], [self.second_order(rho, true), 0.0]],
        }
    }

    /// `k − lim ρW` as `ρ → 0`.
    fn k_eff(&self) -> f64 {
        self.k - (self.pot.tensor.singular_coefficient() + self.s * self.pot.phi.singular_coefficient())
    }

    /// Regular solution at `ρ_min`, up to scale.
    fn origin_seed(&self, eq: Equation, rho: f64) -> Result<[f64; 2]> {
        let k_eff = self.k_eff();
        match eq {
            Equation::Coupled => {
                let big_a = -self.pot.delta.singular_coefficient();
                let big_b = self.pot.sigma.singular_coefficient();
                if big_a == 0.0 && big_b == 0.0 {
                    if k_eff > 0.0 {
                        Ok([1.0, self.b(rho) * rho / (2.0 * k_eff + 1.0)])
                    } else {
                        Ok([self.a(rho) * rho / (1.0 - 2.0 * k_eff), 1.0])
                    }
                } else {
                    let gamma2 = k_eff * k_eff + big_a * big_b;
                    if gamma2 <= 0.0 {
                        return Err(Error::Numeric(format!(
                            "no regular solution at the origin: indicial exponent squared {gamma2} is not positive"
                        )));
                    }
                    let gamma = gamma2.sqrt();
                    let v1 = [big_a, gamma - k_eff];
                    let v2 = [gamma + k_eff, big_b];
                    let n1 = v1[0].hypot(v1[1]);
                    let n2 = v2[0].hypot(v2[1]);
                    Ok(if n1 > n2 { v1 } else { v2 })
                }
            }
            Equation::UpperG => {
                let nu = 0.5 + (k_eff - 0.5).abs();
                Ok([1.0, nu / rho])
            }
            Equation::LowerF => {
                let nu = 0.5 + (k_eff + 0.5).abs();
                Ok([1.0, nu / rho])
            }
        }
    }

    /// Decaying solution at `ρ_max`, up to scale.
    fn tail_seed(&self, eq: Equation, rho: f64) -> [f64; 2] {
        match eq {
            Equation::Coupled => {
                let lam2 = self.rate2(rho);
                let q = self.q(rho);
                let lam = lam2.max(0.0).sqrt();
                let a = self.a(rho);
                // Both vectors span the decaying direction; v2 is flipped to
                // point the same way so the seed is continuous in eps.
                let flip = if a > 0.0 { -1.0 } else { 1.0 };
                let v1 = [-a, q + lam];
                let v2 = [flip * (lam - q), -flip * self.b(rho)];
                let n1 = v1[0].hypot(v1[1]);
                let n2 = v2[0].hypot(v2[1]);
                if n1.max(n2) == 0.0 {
                    [1.0, 0.0]
                } else if n1 > n2 {
                    v1
                } else {
                    v2
                }
            }
            Equation::UpperG | Equation::LowerF => {
                let q = self.second_order(rho, eq == Equation::LowerF);
                [1.0, -q.max(0.0).sqrt()]
            }
        }
    }
}

/// Right-hand sides `(dg/dρ, df/dρ)` of the first-order radial equations.
pub fn radial_rhs(
    rho: f64,
    g: f64,
    f: f64,
    sector: &QuantumNumbers,
    eps: f64,
    pot: &PotentialSet,
) -> Result<(f64, f64)> {
    if rho <= 0.0 || rho.is_nan() {
        return Err(Error::NonPositiveRadius(rho));
    }
    let c = Coefficients::new(sector, eps, pot);
    let q = c.q(rho);
    Ok((q * g + c.a(rho) * f, -q * f + c.b(rho) * g))
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive integrator for `y' = M(ρ) y` carrying a logarithmic scale.
struct Propagator<F: Fn(f64) -> [[f64; 2]; 2]> {
    matrix: F,
    rtol: f64,
    h: f64,
    log_scale: f64,
}

fn apply(m: &[[f64; 2]; 2], y: &[f64; 2]) -> [f64; 2] {
    [m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]]
}

impl<F: Fn(f64) -> [[f64; 2]; 2]> Propagator<F> {
    fn new(matrix: F, rho0: f64, rho1: f64) -> Self {
        let span = rho1 - rho0;
        let h = span.signum() * (0.01 * rho0.abs()).max(1e-6).min(span.abs());
        Propagator { matrix, rtol: RTOL, h, log_scale: 0.0 }
    }

    /// Advances `y` from `rho0` to `rho1`, calling `on_step` after each
    /// accepted step.
    fn advance(&mut self, rho0: f64, y: &mut [f64; 2], rho1: f64, on_step: &mut dyn FnMut(f64, &[f64; 2])) -> Result<()> {
        let dir = (rho1 - rho0).signum();
        if dir == 0.0 {
            return Ok(());
        }
        if self.h.signum() != dir || self.h == 0.0 {
            self.h = dir * (0.01 * rho0.abs()).max(1e-6);
        }
        let mut rho = rho0;
        let mut k1 = apply(&(self.matrix)(rho), y);
        let mut rejects = 0usize;
        loop {
            let remaining = rho1 - rho;
            if remaining * dir <= 1e-14 * rho1.abs().max(1.0) {
                break;
            }
            let last = (self.h * dir) >= (remaining * dir);
            let h = if last { remaining } else { self.h };
            let mut ks = [[0.0; 2]; 7];
            ks[0] = k1;
            for st in 1..7 {
                let mut yt = *y;
                for (j, kj) in ks.iter().enumerate().take(st) {
                    let aij = A[st][j];
                    yt[0] += h * aij * kj[0];
                    yt[1] += h * aij * kj[1];
                }
                ks[st] = apply(&(self.matrix)(rho + C[st] * h), &yt);
            }
            // Seventh stage is evaluated at the fifth-order solution (FSAL).
            let mut y5 = *y;
            for j in 0..6 {
                y5[0] += h * A[6][j] * ks[j][0];
                y5[1] += h * A[6][j] * ks[j][1];
            }
            let norm = y[0].hypot(y[1]).max(y5[0].hypot(y5[1]));
            let mut err = 0.0;
            for c in 0..2 {
                let e: f64 = (0..7).map(|j| E[j] * ks[j][c]).sum::<f64>() * h;
                let sc = self.rtol * (y[c].abs().max(y5[c].abs()) + 1e-6 * norm) + 1e-300;
                err += (e / sc) * (e / sc);
            }
            let err = (err / 2.0).sqrt();
            if !err.is_finite() {
                return Err(Error::Numeric(format!("integration diverged near rho = {rho}")));
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                rho = if last { rho1 } else { rho + h };
                *y = y5;
                k1 = ks[6];
                let n = y[0].hypot(y[1]);
                if !(1e-150..=1e150).contains(&n) {
                    if n == 0.0 || !n.is_finite() {
                        return Err(Error::Numeric(format!("renormalisation failed at rho = {rho}")));
                    }
                    y[0] /= n;
                    y[1] /= n;
                    k1[0] /= n;
                    k1[1] /= n;
                    self.log_scale += n.ln();
                }
                on_step(rho, y);
                if !last {
                    self.h = h * factor;
                } else if factor < 1.0 {
                    self.h *= factor;
                }
                rejects = 0;
            } else {
                self.h = h * factor.min(1.0);
                rejects += 1;
                if rejects > 200 || self.h.abs() < 1e-15 * rho.abs().max(1e-300) {
                    return Err(Error::Numeric(format!("step size underflow near rho = {rho}")));
                }
            }
        }
        Ok(())
    }
}

/// Propagates `(g, f)` of the first-order system from `rho0` to `rho1`.
pub fn propagate(
    sector: &QuantumNumbers,
    eps: f64,
    pot: &PotentialSet,
    rho0: f64,
    start: (f64, f64),
    rho1: f64,
) -> Result<(f64, f64)> {
    if rho0 <= 0.0 || rho1 <= 0.0 {
        return Err(Error::NonPositiveRadius(rho0.min(rho1)));
    }
    let c = Coefficients::new(sector, eps, pot);
    let mut prop = Propagator::new(|r| c.matrix(Equation::Coupled, r), rho0, rho1);
    let mut y = [start.0, start.1];
    prop.advance(rho0, &mut y, rho1, &mut |_, _| {})?;
    let scale = prop.log_scale.exp();
    Ok((y[0] * scale, y[1] * scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Outward,
    Inward,
}

/// Sampled trajectory, scaled so that its largest amplitude is one.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    pub f: Vec<f64>,
}

/// Integrates the first-order system across the whole grid, from the
/// regular seed at `ρ_min` (outward) or the decaying seed at `ρ_max` (inward).
pub fn integrate(
    direction: Direction,
    sector: &QuantumNumbers,
    eps: f64,
    pot: &PotentialSet,
    grid: &RadialGrid,
) -> Result<Trajectory> {
    let shooter = Shooter::with_match(*sector, pot, *grid, Equation::Coupled, grid.len() / 2);
    let (vals, logs) = match direction {
        Direction::Outward => shooter.sweep(eps, 0, grid.len() - 1)?,
        Direction::Inward => shooter.sweep(eps, grid.len() - 1, 0)?,
    };
    let (g, f) = rescale_to_max(&vals, &logs);
    Ok(Trajectory { rho: grid.points(), g, f })
}

fn rescale_to_max(vals: &[[f64; 2]], logs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let top = vals
        .iter()
        .zip(logs)
        .map(|(v, l)| v[0].hypot(v[1]).ln() + l)
        .fold(f64::NEG_INFINITY, f64::max);
    vals.iter()
        .zip(logs)
        .map(|(v, l)| {
            let s = (l - top).exp();
            (v[0] * s, v[1] * s)
        })
        .unzip()
}

/// Interior sign changes, ignoring samples below `1e-8 · max|v|`.
pub fn count_nodes(values: &[f64]) -> usize {
    let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let thr = NODE_THRESHOLD * top;
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v.abs() <= thr {
            continue;
        }
        if last != 0.0 && last.signum() != v.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

struct Shooter<'a> {
    sector: QuantumNumbers,
    pot: &'a PotentialSet,
    grid: RadialGrid,
    equation: Equation,
    match_index: usize,
}

struct Mismatch {
    det: f64,
    nodes: usize,
}

impl<'a> Shooter<'a> {
    fn with_match(sector: QuantumNumbers, pot: &'a PotentialSet, grid: RadialGrid, equation: Equation, match_index: usize) -> Self {
        Shooter { sector, pot, grid, equation, match_index }
    }

    fn new(sector: QuantumNumbers, pot: &'a PotentialSet, grid: RadialGrid, equation: Equation, window: (f64, f64)) -> Self {
        let c = Coefficients::new(&sector, 0.5 * (window.0 + window.1), pot);
        let lo = 0.05 * grid.rho_max();
        let hi = 0.8 * grid.rho_max();
        let samples = 400;
        let mut best = (f64::INFINITY, grid.rho_max() / 3.0);
        for i in 0..=samples {
            let r = lo + (hi - lo) * i as f64 / samples as f64;
            let v = c.rate2(r);
            if v.is_finite() && v < best.0 {
                best = (v, r);
            }
        }
        let match_index = grid.nearest_index(best.1);
        Shooter::with_match(sector, pot, grid, equation, match_index)
    }

    fn coefficients(&self, eps: f64) -> Coefficients<'a> {
        Coefficients::new(&self.sector, eps, self.pot)
    }

    /// Start of the inward integration: `e^{-40}` of decay beyond the last
    /// turning point, or the grid end if that lies further out.
    fn tail_index(&self, eps: f64) -> usize {
        let c = self.coefficients(eps);
        let n = self.grid.len();
        let h = self.grid.spacing();
        let rate2 = |i: usize| {
            let r = self.grid.point(i);
            match self.equation {
                Equation::Coupled => c.rate2(r),
                Equation::UpperG => c.second_order(r, false),
                Equation::LowerF => c.second_order(r, true),
            }
        };
        let turning = (self.match_index..n).rev().find(|&i| rate2(i) < 0.0).unwrap_or(self.match_index);
        let mut acc = 0.0;
        for i in turning + 1..n {
            acc += rate2(i).max(0.0).sqrt() * h;
            if acc > 2.0 * DECAY_EXPONENT {
                return i.max(self.match_index + 2);
            }
        }
        n - 1
    }

    fn seed(&self, c: &Coefficients, from: usize) -> Result<[f64; 2]> {
        let rho = self.grid.point(from);
        if from == 0 {
            c.origin_seed(self.equation, rho)
        } else {
            Ok(c.tail_seed(self.equation, rho))
        }
    }

    /// Free integration from one end to the matchpoint.
    fn shoot(&self, eps: f64, from: usize) -> Result<([f64; 2], usize)> {
        let c = self.coefficients(eps);
        let rho0 = self.grid.point(from);
        let rho1 = self.grid.point(self.match_index);
        let mut y = self.seed(&c, from)?;
        let eq = self.equation;
        let mut prop = Propagator::new(|r| c.matrix(eq, r), rho0, rho1);
        let mut last = y[0];
        let mut nodes = 0;
        prop.advance(rho0, &mut y, rho1, &mut |_, v| {
            if v[0] != 0.0 {
                if last != 0.0 && v[0].signum() != last.signum() {
                    nodes += 1;
                }
                last = v[0];
            }
        })?;
        Ok((y, nodes))
    }

    fn mismatch(&self, eps: f64) -> Result<Mismatch> {
        let (yo, no) = self.shoot(eps, 0)?;
        let (yi, ni) = self.shoot(eps, self.tail_index(eps))?;
        Ok(Mismatch { det: determinant(&yo, &yi), nodes: no + ni })
    }

    /// Grid-point-to-grid-point sweep between two indices, returning values
    /// and log scales in index order of traversal.
    fn sweep(&self, eps: f64, from: usize, to: usize) -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
        let c = self.coefficients(eps);
        let eq = self.equation;
        let mut y = self.seed(&c, from)?;
        let mut prop = Propagator::new(|r| c.matrix(eq, r), self.grid.point(from), self.grid.point(to));
        let mut vals = vec![y];
        let mut logs = vec![0.0];
        let step: isize = if to >= from { 1 } else { -1 };
        let mut i = from as isize;
        while i != to as isize {
            let r0 = self.grid.point(i as usize);
            let r1 = self.grid.point((i + step) as usize);
            prop.advance(r0, &mut y, r1, &mut |_, _| {})?;
            vals.push(y);
            logs.push(prop.log_scale);
            i += step;
        }
        Ok((vals, logs))
    }

    fn solution(&self, eps: f64) -> Result<RadialSolution> {
        let n = self.grid.len();
        let im = self.match_index;
        let (out_vals, out_logs) = self.sweep(eps, 0, im)?;
        let start = self.tail_index(eps);
        let (mut in_vals, mut in_logs) = self.sweep(eps, start, im)?;
        in_vals.reverse();
        in_logs.reverse();

        let lo = out_logs[im];
        let li = in_logs[0];
        let yo = out_vals[im];
        let yi = in_vals[0];
        let match_residual = determinant(&yo, &yi).abs();
        let c = (yo[0] * yi[0] + yo[1] * yi[1]) / (yi[0] * yi[0] + yi[1] * yi[1]);

        let mut y = Vec::with_capacity(n);
        for (v, l) in out_vals.iter().zip(&out_logs) {
            let s = (l - lo).exp();
            y.push([v[0] * s, v[1] * s]);
        }
        for (v, l) in in_vals.iter().zip(&in_logs).skip(1) {
            let s = c * (l - li).exp();
            y.push([v[0] * s, v[1] * s]);
        }
        y.resize(n, [0.0, 0.0]);

        let rho = self.grid.points();
        let coeff = self.coefficients(eps);
        let (mut g, mut f): (Vec<f64>, Vec<f64>) = match self.equation {
            Equation::Coupled => y.iter().map(|v| (v[0], v[1])).unzip(),
            Equation::UpperG => {
                let mut g = Vec::with_capacity(n);
                let mut f = Vec::with_capacity(n);
                for (v, &r) in y.iter().zip(&rho) {
                    let a = coeff.a(r);
                    if a.abs() < 1e-12 {
                        return Err(Error::Numeric(format!("companion f undefined: m + eps - V_delta vanishes at eps = {eps}")));
                    }
                    g.push(v[0]);
                    f.push((v[1] - coeff.q(r) * v[0]) / a);
                }
                (g, f)
            }
            Equation::LowerF => {
                let mut g = Vec::with_capacity(n);
                let mut f = Vec::with_capacity(n);
                for (v, &r) in y.iter().zip(&rho) {
                    let b = coeff.b(r);
                    if b.abs() < 1e-12 {
                        return Err(Error::Numeric(format!("companion g undefined: m - eps + V_sigma vanishes at eps = {eps}")));
                    }
                    f.push(v[0]);
                    g.push((v[1] + coeff.q(r) * v[0]) / b);
                }
                (g, f)
            }
        };

        let weights = self.grid.weights();
        let norm: f64 = weights.iter().zip(g.iter().zip(&f)).map(|(w, (a, b))| w * (a * a + b * b)).sum();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numeric(format!("cannot normalise state at eps = {eps}")));
        }
        let scale = norm.sqrt().recip();
        // Fix the overall sign so that the dominant component starts positive.
        let lead = if self.sector.k().to_f64() > 0.0 { &g } else { &f };
        let sign = lead.iter().find(|v| v.abs() > 0.0).map(|v| v.signum()).unwrap_or(1.0);
        g.iter_mut().for_each(|v| *v *= scale * sign);
        f.iter_mut().for_each(|v| *v *= scale * sign);
        let renorm: f64 = weights.iter().zip(g.iter().zip(&f)).map(|(w, (a, b))| w * (a * a + b * b)).sum();

        Ok(RadialSolution {
            sector: self.sector,
            n: count_nodes(&g),
            f_nodes: count_nodes(&f),
            energy: eps,
            rho,
            g,
            f,
            norm_residual: (renorm - 1.0).abs(),
            match_residual,
            equation: self.equation,
        })
    }
}

fn determinant(yo: &[f64; 2], yi: &[f64; 2]) -> f64 {
    let d = yo[0] * yi[1] - yi[0] * yo[1];
    let n = yo[0].hypot(yo[1]) * yi[0].hypot(yi[1]);
    if n == 0.0 {
        0.0
    } else {
        d / n
    }
}

/// Brent's method on a bracket with `f(a)·f(b) < 0`.
fn brent(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64, fa: f64, fb: f64) -> Result<f64> {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..200 {
        let tol = 1e-12 * b.abs().max(1.0);
        if fb == 0.0 || (b - a).abs() <= tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = (s > lo.min(b)) && (s < lo.max(b));
        if !between
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < tol)
            || (!mflag && (c - d).abs() < tol)
        {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

/// Outer radius beyond which every state below the window top has decayed
/// by `e^{-20}`, padded by 25 %.
pub fn auto_rho_max(sector: &QuantumNumbers, pot: &PotentialSet, window: (f64, f64)) -> f64 {
    let energies = [window.0, 0.5 * (window.0 + window.1), window.1];
    let dr = 1e-3;
    let mut best: f64 = 1.0;
    for &eps in &energies {
        let c = Coefficients::new(sector, eps, pot);
        let n_scan = (RHO_MAX_CAP / dr) as usize;
        let mut turning = 0usize;
        for i in 1..=n_scan {
            let r = i as f64 * dr;
            if c.rate2(r) < 0.0 {
                turning = i;
            }
        }
        let mut acc = 0.0;
        let mut r = (turning as f64 * dr).max(dr);
        while acc < DECAY_EXPONENT && r < RHO_MAX_CAP {
            acc += c.rate2(r).max(0.0).sqrt() * dr;
            r += dr;
        }
        best = best.max(1.25 * r);
    }
    if best > RHO_MAX_CAP {
        log::warn!("{sector}: states near the window edge extend beyond rho = {RHO_MAX_CAP}; grid truncated there");
    }
    best.min(RHO_MAX_CAP)
}

/// Grid with automatic outer radius and default resolution.
pub fn auto_grid(sector: &QuantumNumbers, pot: &PotentialSet, window: (f64, f64)) -> Result<RadialGrid> {
    RadialGrid::with_rho_max(auto_rho_max(sector, pot, window))
}

/// Grid choice for a scan: an explicit outer radius, or one chosen from the
/// decay of states in the energy window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rho_min: f64,
    pub rho_max: Option<f64>,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { rho_min: DEFAULT_RHO_MIN, rho_max: None, points: DEFAULT_POINTS }
    }
}

impl GridSpec {
    pub fn grid_for(&self, sector: &QuantumNumbers, pot: &PotentialSet, window: (f64, f64)) -> Result<RadialGrid> {
        let rho_max = match self.rho_max {
            Some(r) => r,
            None => auto_rho_max(sector, pot, window),
        };
        RadialGrid::new(self.rho_min, rho_max, self.points)
    }
}

fn check_window(window: (f64, f64)) -> Result<()> {
    if !(window.0.is_finite() && window.1.is_finite() && window.0 < window.1) {
        return Err(Error::Config(format!("energy window [{}, {}] must be finite and increasing", window.0, window.1)));
    }
    Ok(())
}

fn scan(shooter: &Shooter, window: (f64, f64), warnings: &mut Vec<String>) -> Result<Vec<f64>> {
    let mesh: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / SCAN_POINTS as f64)
        .collect();
    let values: Vec<Mismatch> = mesh.par_iter().map(|&e| shooter.mismatch(e)).collect::<Result<_>>()?;

    let brackets: Vec<Vec<(f64, f64, f64, f64)>> = (0..SCAN_POINTS)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            refine(shooter, mesh[i], &values[i], mesh[i + 1], &values[i + 1], 0, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut roots = Vec::new();
    for (a, fa, b, fb) in brackets.into_iter().flatten() {
        match brent(|e| shooter.mismatch(e).map(|m| m.det), a, b, fa, fb) {
            Ok(r) => roots.push(r),
            Err(e) => warnings.push(format!("root polish failed in [{a}, {b}]: {e}")),
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(1.0));
    Ok(roots)
}

fn refine(
    shooter: &Shooter,
    a: f64,
    ma: &Mismatch,
    b: f64,
    mb: &Mismatch,
    depth: u32,
    out: &mut Vec<(f64, f64, f64, f64)>,
) -> Result<()> {
    let sign_change = ma.det * mb.det < 0.0 || mb.det == 0.0;
    let jump = ma.nodes.abs_diff(mb.nodes);
    let suspicious = jump >= 2 || (jump == 1 && !sign_change);
    if suspicious && depth < MAX_SUBDIVISION {
        let mid = 0.5 * (a + b);
        let mm = shooter.mismatch(mid)?;
        refine(shooter, a, ma, mid, &mm, depth + 1, out)?;
        refine(shooter, mid, &mm, b, mb, depth + 1, out)?;
    } else if sign_change {
        out.push((a, ma.det, b, mb.det));
    }
    Ok(())
}

fn solve(
    sector: &QuantumNumbers,
    pot: &PotentialSet,
    window: (f64, f64),
    max_nodes: usize,
    grid: &RadialGrid,
    equation: Equation,
) -> Result<ScanResult> {
    check_window(window)?;
    pot.validate()?;
    let mut warnings = Vec::new();
    let shooter = Shooter::new(*sector, pot, *grid, equation, window);
    let roots = scan(&shooter, window, &mut warnings)?;

    let mut states = Vec::new();
    for eps in roots {
        let sol = match shooter.solution(eps) {
            Ok(s) => s,
            Err(e) => {
                warnings.push(format!("{sector}: discarded root at eps = {eps}: {e}"));
                continue;
            }
        };
        let top = sol.g.iter().chain(&sol.f).fold(0.0f64, |a, v| a.max(v.abs()));
        let edge = shooter.tail_index(eps);
        let tail = sol.g[edge].abs().max(sol.f[edge].abs());
        if tail > TAIL_LIMIT * top {
            warnings.push(format!("{sector}: discarded root at eps = {eps}: amplitude at rho_max is {:.1e} of peak", tail / top));
            continue;
        }
        if sol.n <= max_nodes {
            states.push(sol);
        }
    }

    if equation == Equation::Coupled {
        let lo = (0..grid.len()).map(|i| pot.delta.value(grid.point(i))).fold(f64::INFINITY, f64::min) - pot.mass;
        let hi = (0..grid.len()).map(|i| pot.delta.value(grid.point(i))).fold(f64::NEG_INFINITY, f64::max) - pot.mass;
        if window.0 <= hi && window.1 >= lo {
            warnings.push(format!(
                "{sector}: m + eps - V_delta changes sign on the grid for eps in [{lo}, {hi}]; the first-order system is regular there"
            ));
        }
    }

    for pair in states.windows(2) {
        if pair[1].n <= pair[0].n {
            warnings.push(format!(
                "{sector}: node counts not increasing with energy ({} at {}, {} at {}); a root may be missing",
                pair[0].n, pair[0].energy, pair[1].n, pair[1].energy
            ));
        }
    }
    Ok(ScanResult { states, warnings })
}

/// Bound states of the coupled first-order system in `window` with at most
/// `max_nodes` nodes in `g`.
pub fn find_bound_states(
    sector: &QuantumNumbers,
    pot: &PotentialSet,
    window: (f64, f64),
    max_nodes: usize,
    grid: &RadialGrid,
) -> Result<ScanResult> {
    solve(sector, pot, window, max_nodes, grid, Equation::Coupled)
}

/// Which decoupled second-order equation to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoupled {
    UpperG,
    LowerF,
}

/// Bound states from the decoupled second-order equation for `g` (requires
/// constant `V_Δ`) or `f` (requires constant `V_Σ`); the companion amplitude
/// is recovered from the first-order relation.
pub fn second_order_solve(
    sector: &QuantumNumbers,
    pot: &PotentialSet,
    which: Decoupled,
    window: (f64, f64),
    max_nodes: usize,
    grid: &RadialGrid,
) -> Result<ScanResult> {
    let equation = match which {
        Decoupled::UpperG => {
            if !pot.delta.is_constant() {
                return Err(Error::SymmetryViolated(
                    "the g equation decouples only for constant V_delta; a dV_delta/drho coupling term would remain".into(),
                ));
            }
            Equation::UpperG
        }
        Decoupled::LowerF => {
            if !pot.sigma.is_constant() {
                return Err(Error::SymmetryViolated(
                    "the f equation decouples only for constant V_sigma; a dV_sigma/drho coupling term would remain".into(),
                ));
            }
            Equation::LowerF
        }
    };
    solve(sector, pot, window, max_nodes, grid, equation)
}

/// Largest pointwise deviation of `(g', f')` from the first-order right-hand
/// sides, relative to the solution's peak amplitude. Derivatives use
/// sixth-order central differences on points at least 40 spacings from
/// either end.
pub fn first_order_residual(sol: &RadialSolution, pot: &PotentialSet) -> Result<f64> {
    const D: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    let n = sol.rho.len();
    let h = sol.rho[1] - sol.rho[0];
    let scale = sol.g.iter().chain(&sol.f).fold(0.0f64, |a, v| a.max(v.abs()));
    let margin = 40;
    let mut worst = 0.0f64;
    for i in margin..n.saturating_sub(margin) {
        let deriv = |v: &[f64]| (0..3).map(|j| D[j] * (v[i + j + 1] - v[i - j - 1])).sum::<f64>() / h;
        let (dg, df) = radial_rhs(sol.rho[i], sol.g[i], sol.f[i], &sol.sector, sol.energy, pot)?;
        worst = worst.max((deriv(&sol.g) - dg).abs()).max((deriv(&sol.f) - df).abs());
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Profile;
    use crate::quantum_numbers::{HalfInt, Sign};

    fn sector(k2: i64, mj2: i64) -> QuantumNumbers {
        QuantumNumbers::from_kmj(HalfInt::from_twice(k2), HalfInt::from_twice(mj2)).unwrap()
    }

    fn oscillator() -> PotentialSet {
        PotentialSet::free(1.0).with_tensor(Profile::Linear { lambda: 1.0 })
    }

    fn spin_harmonic() -> PotentialSet {
        PotentialSet::free(1.0).with_sigma(Profile::Harmonic { lambda: 1.0 }).with_delta(Profile::Constant { c: 0.0 })
    }

    #[test]
    fn rhs_free_threshold() {
        let q = sector(1, 1);
        let (dg, df) = radial_rhs(0.5, 2.0, 3.0, &q, 1.0, &PotentialSet::free(1.0)).unwrap();
        assert!((dg - (2.0 / (2.0 * 0.5) + 2.0 * 3.0)).abs() < 1e-15);
        assert!((df - (-3.0 / (2.0 * 0.5))).abs() < 1e-15);
        assert!(radial_rhs(0.0, 1.0, 1.0, &q, 1.0, &PotentialSet::free(1.0)).is_err());
    }

    #[test]
    fn rhs_tensor_enters_with_opposite_signs() {
        let q = sector(3, 3);
        let pot = PotentialSet::free(1.0).with_tensor(Profile::Linear { lambda: 2.0 });
        let free = PotentialSet::free(1.0);
        let (g1, f1) = radial_rhs(0.7, 1.0, 1.0, &q, 0.3, &pot).unwrap();
        let (g0, f0) = radial_rhs(0.7, 1.0, 1.0, &q, 0.3, &free).unwrap();
        assert!(((g1 - g0) + 1.4).abs() < 1e-14);
        assert!(((f1 - f0) - 1.4).abs() < 1e-14);
    }

    #[test]
    fn rhs_phi_scaled_by_s() {
        let pot = PotentialSet::free(1.0).with_phi(Profile::Constant { c: 0.5 });
        let free = PotentialSet::free(1.0);
        for (q, s) in [(sector(3, 3), 1.0), (sector(-3, 3), -1.0)] {
            let (g1, _) = radial_rhs(1.0, 1.0, 0.0, &q, 0.0, &pot).unwrap();
            let (g0, _) = radial_rhs(1.0, 1.0, 0.0, &q, 0.0, &free).unwrap();
            assert!(((g1 - g0) + 0.5 * s).abs() < 1e-15);
            assert_eq!(q.s().as_f64(), s);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(1e-4, 10.0, 2000).is_ok());
        assert!(RadialGrid::new(0.1, 10.0, 2000).is_err());
        assert!(RadialGrid::new(1e-4, 10.0, 100).is_err());
        assert!(RadialGrid::new(0.0, 10.0, 2000).is_err());
        let g = RadialGrid::new(1e-4, 10.0, 2000).unwrap();
        assert_eq!(g.point(1999), 10.0);
        assert_eq!(g.refined().len(), 3999);
    }

    #[test]
    fn reversibility() {
        let pot = spin_harmonic();
        let q = sector(3, 3);
        let (g, f) = propagate(&q, 3.3, &pot, 0.5, (1.0, 0.2), 2.5).unwrap();
        let (g0, f0) = propagate(&q, 3.3, &pot, 2.5, (g, f), 0.5).unwrap();
        assert!((g0 - 1.0).abs() < 1e-8 && (f0 - 0.2).abs() < 1e-8, "{g0} {f0}");
    }

    #[test]
    fn free_outward_grows() {
        let grid = RadialGrid::new(1e-4, 10.0, 400).unwrap();
        let t = integrate(Direction::Outward, &sector(1, 1), 0.5, &PotentialSet::free(1.0), &grid).unwrap();
        let env: Vec<f64> = t.g.iter().zip(&t.f).map(|(g, f)| g.hypot(*f)).collect();
        assert!(env.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn harmonic_outward_oscillates_in_well() {
        let grid = RadialGrid::new(1e-4, 6.0, 600).unwrap();
        let t = integrate(Direction::Outward, &sector(3, 3), 6.0, &spin_harmonic(), &grid).unwrap();
        let inside: Vec<f64> = t.rho.iter().zip(&t.g).filter(|(r, _)| **r < 2.0).map(|(_, g)| *g).collect();
        assert!(count_nodes(&inside) >= 1);
    }

    #[test]
    fn oscillator_ground_state() {
        let pot = oscillator();
        let q = sector(1, 1);
        let grid = auto_grid(&q, &pot, (0.5, 2.0)).unwrap();
        let res = find_bound_states(&q, &pot, (0.5, 2.0), 5, &grid).unwrap();
        assert_eq!(res.states.len(), 1, "{:?}", res.warnings);
        let s = &res.states[0];
        assert!((s.energy - 1.0).abs() < 1e-9);
        assert_eq!(s.n, 0);
        assert!(s.norm_residual < 1e-10);
        // g = C √ρ e^{−ρ²/2}, f = 0
        let i = s.rho.iter().position(|r| *r > 1.0).unwrap();
        let ratio = s.g[i] / (s.rho[i].sqrt() * (-s.rho[i] * s.rho[i] / 2.0).exp());
        let j = s.rho.iter().position(|r| *r > 2.0).unwrap();
        let ratio2 = s.g[j] / (s.rho[j].sqrt() * (-s.rho[j] * s.rho[j] / 2.0).exp());
        assert!((ratio / ratio2 - 1.0).abs() < 1e-7);
        assert!(s.f.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn free_particle_has_no_gap_states() {
        let pot = PotentialSet::free(1.0);
        for (k2, mj2) in [(1, 1), (-1, 1), (3, 3)] {
            let q = sector(k2, mj2);
            let window = (-0.95, 0.95);
            let grid = auto_grid(&q, &pot, window).unwrap();
            let found = find_bound_states(&q, &pot, window, 2, &grid).unwrap();
            assert!(found.states.is_empty(), "{q}: {:?}", found.states.iter().map(|s| s.energy).collect::<Vec<_>>());
        }
    }

    #[test]
    fn empty_window() {
        let pot = oscillator();
        let q = sector(1, 1);
        let grid = auto_grid(&q, &pot, (1.2, 2.0)).unwrap();
        let res = find_bound_states(&q, &pot, (1.2, 2.0), 5, &grid).unwrap();
        assert!(res.states.is_empty());
        assert!(find_bound_states(&q, &pot, (2.0, 1.0), 5, &grid).is_err());
    }

    #[test]
    fn residual_and_normalisation() {
        let pot = spin_harmonic();
        let q = sector(3, 3);
        let grid = auto_grid(&q, &pot, (1.5, 5.0)).unwrap();
        let res = find_bound_states(&q, &pot, (1.5, 5.0), 5, &grid).unwrap();
        assert_eq!(res.states.len(), 2);
        for s in &res.states {
            assert!(s.norm_residual < 1e-10);
            assert!((s.norm() - 1.0).abs() < 1e-10);
            let r = first_order_residual(s, &pot).unwrap();
            assert!(r < 1e-7, "residual {r}");
        }
        assert_eq!(res.states[0].n, 0);
        assert_eq!(res.states[1].n, 1);
    }

    #[test]
    fn second_order_matches_coupled() {
        let pot = spin_harmonic();
        let q = sector(3, 3);
        let grid = auto_grid(&q, &pot, (1.5, 6.0)).unwrap();
        let a = find_bound_states(&q, &pot, (1.5, 6.0), 5, &grid).unwrap();
        let b = second_order_solve(&q, &pot, Decoupled::UpperG, (1.5, 6.0), 5, &grid).unwrap();
        assert_eq!(a.states.len(), b.states.len());
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((x.energy - y.energy).abs() <= 1e-8 * x.energy.abs());
            assert_eq!(x.n, y.n);
        }
        let broken = pot.clone().with_delta(Profile::Harmonic { lambda: 0.1 });
        assert!(matches!(
            second_order_solve(&q, &broken, Decoupled::UpperG, (1.5, 6.0), 5, &grid),
            Err(Error::SymmetryViolated(_))
        ));
    }

    #[test]
    fn centrifugal_invariance() {
        for k2 in (-9..=9).step_by(2) {
            let k = k2 as f64 / 2.0;
            let kp = -k + 1.0;
            assert_eq!(k * (k - 1.0), kp * (kp - 1.0));
            let kt = -k - 1.0;
            assert_eq!(k * (k + 1.0), kt * (kt + 1.0));
        }
    }

    #[test]
    fn spectrum_independent_of_mj_sign() {
        let pot = spin_harmonic();
        let window = (1.5, 5.0);
        let a = sector(3, 3);
        let b = sector(3, -3);
        assert_eq!(b.s(), Sign::Minus);
        let grid = auto_grid(&a, &pot, window).unwrap();
        let ea = find_bound_states(&a, &pot, window, 5, &grid).unwrap();
        let eb = find_bound_states(&b, &pot, window, 5, &grid).unwrap();
        for (x, y) in ea.states.iter().zip(&eb.states) {
            assert!((x.energy - y.energy).abs() < 1e-10);
        }
    }

    #[test]
    fn node_counter_ignores_noise() {
        assert_eq!(count_nodes(&[0.0, 1.0, 2.0, -1.0, -2.0, 1e-12, -1e-12, -1.0, 3.0]), 2);
        assert_eq!(count_nodes(&[]), 0);
    }
}
