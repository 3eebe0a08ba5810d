//! Staggered-grid finite-difference eigensolver for the first-order radial
//! system, independent of the shooting code.
//!
//! With `h = ρ_max / N` the unknowns sit at `x_j = (j + 1) h / 2`,
//! `j = 0 … 2N − 1`. The component that dominates at the origin (`g` for
//! `k > 0`, `f` for `k < 0`) lives on the half nodes, the other on the
//! integer nodes. The coupling is discretised in the factored form
//! `ρ^k d/dρ ρ^{−k} + W`, which keeps the matrix symmetric tridiagonal and
//! reproduces the regular power law at the origin. Both ends carry Dirichlet
//! conditions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::PotentialSet;
use crate::quantum_numbers::QuantumNumbers;
use crate::radial_solver::{count_nodes, find_bound_states, RadialGrid};

/// Largest supported number of intervals.
pub const MAX_INTERVALS: usize = 2000;

/// Symmetric tridiagonal discretisation of one sector.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub sector: QuantumNumbers,
    pub intervals: usize,
    pub rho: Vec<f64>,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    g_on_half_nodes: bool,
}

/// One eigenpair of the oracle.
#[derive(Debug, Clone, Serialize)]
pub struct OracleLevel {
    pub energy: f64,
    pub nodes: usize,
    pub f_nodes: usize,
    #[serde(skip)]
    pub g: Vec<f64>,
    #[serde(skip)]
    pub f: Vec<f64>,
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn is_g(&self, j: usize) -> bool {
        j.is_multiple_of(2) == self.g_on_half_nodes
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for j in 0..self.dim() {
            let e2 = if j == 0 { 0.0 } else { self.off[j - 1] * self.off[j - 1] };
            q = self.diag[j] - x - if j == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[j].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th eigenvalue (zero-based), known to lie in `[lo, hi]`.
    fn bisect_eigenvalue(&self, index: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for eigenvalue `lambda` by inverse iteration.
    fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let shift = lambda + 1e-10 * lambda.abs().max(1.0);
        let mut x: Vec<f64> = (0..n).map(|j| 1.0 + 0.1 * ((j * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            x = solve_tridiagonal(&self.off, &self.diag, shift, &x)?;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::Numeric(format!("inverse iteration failed at eigenvalue {lambda}")));
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(x)
    }

    fn split(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut g = Vec::with_capacity(self.intervals);
        let mut f = Vec::with_capacity(self.intervals);
        for (j, &x) in v.iter().enumerate() {
            if self.is_g(j) {
                g.push(x);
            } else {
                f.push(x);
            }
        }
        (g, f)
    }

    /// Radii of the `g` and `f` samples.
    pub fn component_radii(&self) -> (Vec<f64>, Vec<f64>) {
        self.split(&self.rho)
    }
}

/// Solves `(T − σ) x = b` for symmetric tridiagonal `T` by Gaussian
/// elimination with partial pivoting.
fn solve_tridiagonal(off: &[f64], diag: &[f64], sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut dl: Vec<f64> = off.to_vec();
    let mut d: Vec<f64> = diag.iter().map(|v| v - sigma).collect();
    let mut du: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut x = b.to_vec();
    let tiny = f64::EPSILON * diag.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            x[i + 1] -= fact * x[i];
            if i + 2 < n {
                du2[i] = 0.0;
            }
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            x.swap(i, i + 1);
            x[i + 1] -= fact * x[i];
        }
        dl[i] = 0.0;
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    x[n - 1] /= d[n - 1];
    if n > 1 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("singular tridiagonal system".into()));
    }
    Ok(x)
}

/// Discretises the sector on `N = grid.len()` intervals of `[0, ρ_max]`.
pub fn assemble(sector: &QuantumNumbers, pot: &PotentialSet, grid: &RadialGrid) -> Result<SectorMatrix> {
    assemble_with(sector, pot, grid.rho_max(), grid.len())
}

pub fn assemble_with(sector: &QuantumNumbers, pot: &PotentialSet, rho_max: f64, intervals: usize) -> Result<SectorMatrix> {
    if intervals > MAX_INTERVALS {
        return Err(Error::OracleTooLarge { requested: intervals, max: MAX_INTERVALS });
    }
    if intervals < 2 || !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(Error::BadGrid(format!("oracle needs rho_max > 0 and at least 2 intervals, got {rho_max}, {intervals}")));
    }
    pot.validate()?;
    let k = sector.k().to_f64();
    let s = sector.s().as_f64();
    let m = pot.mass;
    let h = rho_max / intervals as f64;
    let n = 2 * intervals;
    let rho: Vec<f64> = (0..n).map(|j| (j + 1) as f64 * h / 2.0).collect();
    let g_on_half_nodes = k > 0.0;
    let is_g = |j: usize| j.is_multiple_of(2) == g_on_half_nodes;

    let diag: Vec<f64> = rho
        .iter()
        .enumerate()
        .map(|(j, &r)| if is_g(j) { m + pot.sigma.value(r) } else { -m + pot.delta.value(r) })
        .collect();
    let off: Vec<f64> = (0..n - 1)
        .map(|j| {
            let (a, b) = (rho[j], rho[j + 1]);
            // `g` to the left of `f` contributes −(ρ_f/ρ_g)^k / h, to the right +.
            let (rf, rg, sign) = if is_g(j) { (b, a, -1.0) } else { (a, b, 1.0) };
            sign * (rf / rg).powf(k) / h + pot.radial_coupling(s, rf) / 2.0
        })
        .collect();
    Ok(SectorMatrix { sector: *sector, intervals, rho, diag, off, g_on_half_nodes })
}

/// All eigenvalues in `window`, ascending, with node counts from the
/// eigenvector components.
pub fn eigen_in_window(matrix: &SectorMatrix, window: (f64, f64)) -> Result<Vec<OracleLevel>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!("energy window [{lo}, {hi}] must be finite and increasing")));
    }
    let c_lo = matrix.count_below(lo);
    let c_hi = matrix.count_below(hi);
    let mut out = Vec::with_capacity(c_hi.saturating_sub(c_lo));
    for index in c_lo..c_hi {
        let energy = matrix.bisect_eigenvalue(index, lo, hi);
        let v = matrix.eigenvector(energy)?;
        let (g, f) = matrix.split(&v);
        out.push(OracleLevel { energy, nodes: count_nodes(&g), f_nodes: count_nodes(&f), g, f });
    }
    Ok(out)
}

/// Eigenvalues on `N` and `N/2` intervals combined as `(4 ε_N − ε_{N/2}) / 3`,
/// pairing levels by node counts.
pub fn richardson(
    sector: &QuantumNumbers,
    pot: &PotentialSet,
    rho_max: f64,
    intervals: usize,
    window: (f64, f64),
) -> Result<Vec<OracleLevel>> {
    let fine = eigen_in_window(&assemble_with(sector, pot, rho_max, intervals)?, window)?;
    let pad = 0.05 * (window.1 - window.0);
    let coarse = eigen_in_window(&assemble_with(sector, pot, rho_max, intervals / 2)?, (window.0 - pad, window.1 + pad))?;
    let mut out = Vec::with_capacity(fine.len());
    for level in fine {
        let partner = coarse
            .iter()
            .filter(|c| c.nodes == level.nodes)
            .min_by(|a, b| {
                let key = |c: &OracleLevel| (c.f_nodes != level.f_nodes, (c.energy - level.energy).abs());
                let (ka, kb) = (key(a), key(b));
                ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
            });
        let energy = match partner {
            Some(c) => (4.0 * level.energy - c.energy) / 3.0,
            None => {
                log::warn!("{sector}: no coarse-grid partner for level at {}; not extrapolated", level.energy);
                level.energy
            }
        };
        out.push(OracleLevel { energy, ..level });
    }
    Ok(out)
}

/// Shooting state paired with the oracle level of equal `g` node count,
/// preferring equal `f` node count. A vanishing `f` has an arbitrary count.
#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub sector: String,
    pub k: f64,
    pub mj: f64,
    pub n: usize,
    pub f_nodes: usize,
    pub shooting: Option<f64>,
    pub oracle: Option<f64>,
    pub relative_difference: Option<f64>,
}

impl OracleComparison {
    pub fn within(&self, tol: f64) -> bool {
        self.relative_difference.is_some_and(|d| d <= tol)
    }
}

/// Solves one sector by shooting and by the oracle on the same outer radius,
/// with `N = grid.len()` oracle intervals.
pub fn compare_sector(
    sector: &QuantumNumbers,
    pot: &PotentialSet,
    window: (f64, f64),
    max_nodes: usize,
    grid: &RadialGrid,
) -> Result<Vec<OracleComparison>> {
    let shot = find_bound_states(sector, pot, window, max_nodes, grid)?.states;
    let levels = richardson(sector, pot, grid.rho_max(), grid.len(), window)?;
    let mut used = vec![false; levels.len()];
    let mut out = Vec::new();
    let row = |n, f_nodes, shooting: Option<f64>, oracle: Option<f64>| OracleComparison {
        sector: sector.to_string(),
        k: sector.k().to_f64(),
        mj: sector.mj().to_f64(),
        n,
        f_nodes,
        shooting,
        oracle,
        relative_difference: match (shooting, oracle) {
            (Some(a), Some(b)) => Some((a - b).abs() / a.abs().max(b.abs())),
            _ => None,
        },
    };
    for s in &shot {
        let found = levels
            .iter()
            .enumerate()
            .filter(|(i, l)| !used[*i] && l.nodes == s.n)
            .min_by(|a, b| {
                let key = |l: &OracleLevel| (l.f_nodes != s.f_nodes, (l.energy - s.energy).abs());
                let (ka, kb) = (key(a.1), key(b.1));
                ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
            });
        match found {
            Some((i, l)) => {
                used[i] = true;
                out.push(row(s.n, s.f_nodes, Some(s.energy), Some(l.energy)));
            }
            None => out.push(row(s.n, s.f_nodes, Some(s.energy), None)),
        }
    }
    for (i, l) in levels.iter().enumerate() {
        if !used[i] && l.nodes <= max_nodes {
            out.push(row(l.nodes, l.f_nodes, None, Some(l.energy)));
        }
    }
    Ok(out)
}
