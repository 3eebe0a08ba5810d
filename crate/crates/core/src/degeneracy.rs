//! Multi-sector spectra and the spin and pseudospin degeneracy pairings.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator_lab::ladder::{ladder_check, pseudospin_target, spin_target, LadderCheck, MomentumGrid, Symmetry};
use crate::potentials::PotentialSet;
use crate::quantum_numbers::QuantumNumbers;
use crate::radial_solver::{find_bound_states, GridSpec, RadialSolution};

/// Relative tolerance for shooting-versus-shooting pairs.
pub const SHOOTING_TOLERANCE: f64 = 1e-8;
/// Relative tolerance when one side comes from the finite-difference oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-6;
/// Smallest splitting the broken-symmetry control must show.
pub const CONTROL_LIFT: f64 = 1e-3;
/// Strength of the symmetry-breaking term added in the control run.
pub const CONTROL_STRENGTH: f64 = 0.2;

/// `(k, m_j, s) → (−k+1, m_j−s, −s)`.
pub fn spin_partner(sector: &QuantumNumbers) -> QuantumNumbers {
    spin_target(sector)
}

/// `(k, m_j, s) → (−k−1, m_j+s, −s)`.
pub fn pseudospin_partner(sector: &QuantumNumbers) -> QuantumNumbers {
    pseudospin_target(sector)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Spin,
    Pseudospin,
}

impl Mode {
    pub fn partner(self, sector: &QuantumNumbers) -> QuantumNumbers {
        match self {
            Mode::Spin => spin_partner(sector),
            Mode::Pseudospin => pseudospin_partner(sector),
        }
    }

    /// Node count used to match partners: `g` for spin, `f` for pseudospin.
    pub fn pairing_key(self, sol: &RadialSolution) -> usize {
        match self {
            Mode::Spin => sol.n,
            Mode::Pseudospin => sol.f_nodes,
        }
    }

    pub fn predicate(self, pot: &PotentialSet) -> bool {
        match self {
            Mode::Spin => pot.is_spin_symmetric(),
            Mode::Pseudospin => pot.is_pseudospin_symmetric(),
        }
    }

    fn symmetry(self) -> Symmetry {
        match self {
            Mode::Spin => Symmetry::Spin,
            Mode::Pseudospin => Symmetry::Pseudospin,
        }
    }

    /// Potentials with the symmetry broken by a term proportional to the
    /// confining profile, added with the sign that keeps states bound.
    pub fn broken(self, pot: &PotentialSet) -> PotentialSet {
        let mut out = pot.clone();
        match self {
            Mode::Spin => out.delta = out.delta.clone().plus(pot.sigma.shape().scaled(-CONTROL_STRENGTH)),
            Mode::Pseudospin => out.sigma = out.sigma.clone().plus(pot.delta.shape().scaled(-CONTROL_STRENGTH)),
        }
        out
    }
}

/// Scan parameters shared by every sector.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyOptions {
    pub window: (f64, f64),
    pub max_nodes: usize,
    pub tolerance: f64,
    pub grid: GridSpec,
    /// Run even if the symmetry predicate is false.
    pub allow_broken: bool,
    /// Also solve the broken-symmetry control.
    pub control: bool,
    /// Ladder overlaps computed for at most this many pairs.
    pub ladder_checks: usize,
    pub momentum_grid: MomentumGrid,
}

impl Default for DegeneracyOptions {
    fn default() -> Self {
        DegeneracyOptions {
            window: (0.0, 10.0),
            max_nodes: 4,
            tolerance: SHOOTING_TOLERANCE,
            grid: GridSpec::default(),
            allow_broken: false,
            control: true,
            ladder_checks: 0,
            momentum_grid: MomentumGrid::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StateRow {
    pub n: usize,
    pub f_nodes: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorTable {
    pub sector: String,
    pub k: f64,
    pub mj: f64,
    pub states: Vec<StateRow>,
}

/// One matched pair of partner states. Also the CSV row layout.
#[derive(Debug, Clone, Serialize)]
pub struct PairingRecord {
    pub k_a: f64,
    pub mj_a: f64,
    pub k_b: f64,
    pub mj_b: f64,
    pub n: usize,
    pub eps_a: f64,
    pub eps_b: f64,
    pub abs_delta: f64,
    pub pass: bool,
}

impl PairingRecord {
    fn new(a: &RadialSolution, b: &RadialSolution, key: usize, tol: f64) -> Self {
        let abs_delta = (a.energy - b.energy).abs();
        PairingRecord {
            k_a: a.sector.k().to_f64(),
            mj_a: a.sector.mj().to_f64(),
            k_b: b.sector.k().to_f64(),
            mj_b: b.sector.mj().to_f64(),
            n: key,
            eps_a: a.energy,
            eps_b: b.energy,
            abs_delta,
            pass: abs_delta <= tol * a.energy.abs().max(b.energy.abs()),
        }
    }

    pub fn relative_delta(&self) -> f64 {
        self.abs_delta / self.eps_a.abs().max(self.eps_b.abs())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ControlReport {
    pub potentials: PotentialSet,
    pub pairs: Vec<PairingRecord>,
    pub min_abs_delta: Option<f64>,
    /// Every pair split by at least [`CONTROL_LIFT`].
    pub lifted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub config_digest: Option<String>,
    pub mode: Mode,
    pub symmetry_predicate: bool,
    pub tolerance: f64,
    pub window: (f64, f64),
    pub sectors: Vec<SectorTable>,
    pub pairs: Vec<PairingRecord>,
    /// States whose partner with the same node count was not found.
    pub unpaired: Vec<String>,
    pub control: Option<ControlReport>,
    pub ladder: Vec<LadderCheck>,
    pub warnings: Vec<String>,
    /// Where the operator-algebra verification for this run is reported.
    pub algebra_report: Option<String>,
    pub all_pass: bool,
}

/// A sector, its bound states and the solver warnings.
pub type SectorSolution = (QuantumNumbers, Vec<RadialSolution>, Vec<String>);

/// Solves every sector in parallel; results keep the input order.
pub fn solve_sectors(
    sectors: &[QuantumNumbers],
    pot: &PotentialSet,
    window: (f64, f64),
    max_nodes: usize,
    grid: &GridSpec,
) -> Result<Vec<SectorSolution>> {
    sectors
        .par_iter()
        .map(|q| {
            let g = grid.grid_for(q, pot, window)?;
            let res = find_bound_states(q, pot, window, max_nodes, &g)?;
            Ok((*q, res.states, res.warnings))
        })
        .collect()
}

fn pair_up(
    mode: Mode,
    sectors: &[QuantumNumbers],
    solved: &HashMap<QuantumNumbers, Vec<RadialSolution>>,
    max_nodes: usize,
    tol: f64,
) -> (Vec<PairingRecord>, Vec<String>, Vec<(RadialSolution, RadialSolution)>) {
    let mut pairs = Vec::new();
    let mut unpaired = Vec::new();
    let mut matched = Vec::new();
    for q in sectors {
        let partner = mode.partner(q);
        let empty = Vec::new();
        let (ours, theirs) = (solved.get(q).unwrap_or(&empty), solved.get(&partner).unwrap_or(&empty));
        for a in ours.iter().filter(|a| mode.pairing_key(a) <= max_nodes) {
            let key = mode.pairing_key(a);
            match theirs.iter().find(|b| mode.pairing_key(b) == key) {
                Some(b) => {
                    pairs.push(PairingRecord::new(a, b, key, tol));
                    matched.push((a.clone(), b.clone()));
                }
                None => unpaired.push(format!("{q} n={key} eps={:.12} has no partner in {partner}", a.energy)),
            }
        }
    }
    (pairs, unpaired, matched)
}

fn solve_with_partners(
    mode: Mode,
    pot: &PotentialSet,
    sectors: &[QuantumNumbers],
    options: &DegeneracyOptions,
    warnings: &mut Vec<String>,
) -> Result<HashMap<QuantumNumbers, Vec<RadialSolution>>> {
    let mut all: Vec<QuantumNumbers> = Vec::new();
    for q in sectors {
        for s in [*q, mode.partner(q)] {
            if !all.contains(&s) {
                all.push(s);
            }
        }
    }
    // The pseudospin key counts nodes of f, which may exceed those of g by one.
    let node_cap = options.max_nodes + 2;
    let mut out = HashMap::new();
    for (q, states, w) in solve_sectors(&all, pot, options.window, node_cap, &options.grid)? {
        warnings.extend(w);
        out.insert(q, states);
    }
    Ok(out)
}

/// Solves the listed sectors and their partners, pairs states by node count
/// and records the splitting of each pair.
pub fn verify_degeneracy(
    pot: &PotentialSet,
    sectors: &[QuantumNumbers],
    mode: Mode,
    options: &DegeneracyOptions,
) -> Result<SpectrumReport> {
    pot.validate()?;
    let predicate = mode.predicate(pot);
    if !predicate && !options.allow_broken {
        return Err(Error::SymmetryViolated(format!(
            "{} symmetry requires V_phi = U_rho = 0 and constant {}",
            match mode {
                Mode::Spin => "spin",
                Mode::Pseudospin => "pseudospin",
            },
            match mode {
                Mode::Spin => "V_delta",
                Mode::Pseudospin => "V_sigma",
            }
        )));
    }
    let mut warnings = Vec::new();
    if !predicate {
        warnings.push("symmetry predicate is false; degeneracy is not expected".into());
    }
    if mode == Mode::Pseudospin && !pot.delta.is_confining() && options.window.0 >= 0.0 {
        warnings.push(format!(
            "V_delta does not confine, so pseudospin doublets lie at negative energy, outside the window [{}, {}]",
            options.window.0, options.window.1
        ));
    }

    let solved = solve_with_partners(mode, pot, sectors, options, &mut warnings)?;
    let (pairs, unpaired, matched) = pair_up(mode, sectors, &solved, options.max_nodes, options.tolerance);

    let ladder = if predicate && options.ladder_checks > 0 {
        matched
            .par_iter()
            .take(options.ladder_checks)
            .map(|(a, b)| ladder_check(mode.symmetry(), pot, a, b, &options.momentum_grid))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let control = if options.control && predicate {
        let broken = mode.broken(pot);
        let mut control_warnings = Vec::new();
        let solved = solve_with_partners(mode, &broken, sectors, options, &mut control_warnings)?;
        let (pairs, _, _) = pair_up(mode, sectors, &solved, options.max_nodes, options.tolerance);
        let min_abs_delta = pairs.iter().map(|p| p.abs_delta).reduce(f64::min);
        if pairs.is_empty() {
            warnings.push("broken-symmetry control produced no pairs".into());
        }
        Some(ControlReport {
            lifted: min_abs_delta.is_some_and(|d| d >= CONTROL_LIFT),
            potentials: broken,
            pairs,
            min_abs_delta,
        })
    } else {
        None
    };

    let mut tables: Vec<SectorTable> = solved
        .iter()
        .map(|(q, states)| SectorTable {
            sector: q.to_string(),
            k: q.k().to_f64(),
            mj: q.mj().to_f64(),
            states: states.iter().map(|s| StateRow { n: s.n, f_nodes: s.f_nodes, energy: s.energy }).collect(),
        })
        .collect();
    tables.sort_by(|a, b| (a.k, a.mj).partial_cmp(&(b.k, b.mj)).unwrap_or(std::cmp::Ordering::Equal));

    let all_pass = !pairs.is_empty()
        && pairs.iter().all(|p| p.pass)
        && unpaired.is_empty()
        && control.as_ref().is_none_or(|c| c.lifted);
    Ok(SpectrumReport {
        config_digest: None,
        mode,
        symmetry_predicate: predicate,
        tolerance: options.tolerance,
        window: options.window,
        sectors: tables,
        pairs,
        unpaired,
        control,
        ladder,
        warnings,
        algebra_report: None,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Profile;
    use crate::quantum_numbers::{enumerate_sectors, parse_sector};

    #[test]
    fn partner_examples() {
        let q = parse_sector("3/2,3/2").unwrap();
        assert_eq!(spin_partner(&q), parse_sector("-1/2,1/2").unwrap());
        let q = parse_sector("1/2,1/2").unwrap();
        let p = spin_partner(&q);
        assert_eq!(p, parse_sector("1/2,-1/2").unwrap());
        assert_eq!(p.k(), q.k());
        assert_eq!(pseudospin_partner(&q).k(), parse_sector("-3/2,3/2").unwrap().k());
        let q = parse_sector("-1/2,1/2").unwrap();
        assert_eq!(pseudospin_partner(&q).k(), q.k());
    }

    #[test]
    fn partners_are_involutions_preserving_centrifugal_terms() {
        for q in enumerate_sectors(4) {
            assert_eq!(spin_partner(&spin_partner(&q)), q);
            assert_eq!(pseudospin_partner(&pseudospin_partner(&q)), q);
            let k2 = q.k().twice();
            let (ks, kp) = (spin_partner(&q).k().twice(), pseudospin_partner(&q).k().twice());
            // 4k(k−1) and 4k(k+1) in doubled units.
            assert_eq!(k2 * (k2 - 2), ks * (ks - 2));
            assert_eq!(k2 * (k2 + 2), kp * (kp + 2));
        }
    }

    #[test]
    fn broken_controls_keep_confinement() {
        let spin = PotentialSet::free(1.0).with_sigma(Profile::Harmonic { lambda: 1.0 });
        let b = Mode::Spin.broken(&spin);
        assert!(!b.is_spin_symmetric());
        assert_eq!(b.delta.value(2.0), -0.8);
        let pseudo = PotentialSet::free(1.0).with_delta(Profile::Harmonic { lambda: 1.0 });
        let b = Mode::Pseudospin.broken(&pseudo);
        assert!(!b.is_pseudospin_symmetric());
        assert_eq!(b.sigma.value(2.0), -0.8);
    }

    #[test]
    fn predicate_is_enforced() {
        let pot = PotentialSet::free(1.0).with_delta(Profile::Harmonic { lambda: 1.0 });
        let q = [parse_sector("3/2,3/2").unwrap()];
        let err = verify_degeneracy(&pot, &q, Mode::Spin, &DegeneracyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolated(_)));
    }

    #[test]
    fn spin_harmonic_pairs_degenerate_and_control_lifts() {
        let pot = PotentialSet::free(1.0).with_sigma(Profile::Harmonic { lambda: 1.0 });
        let q = [parse_sector("3/2,3/2").unwrap()];
        let options = DegeneracyOptions { window: (1.2, 6.5), max_nodes: 2, ..Default::default() };
        let report = verify_degeneracy(&pot, &q, Mode::Spin, &options).unwrap();
        assert_eq!(report.pairs.len(), 3, "{report:?}");
        assert!(report.all_pass, "{report:?}");
        let control = report.control.unwrap();
        assert_eq!(control.pairs.len(), 3);
        assert!(control.lifted, "{:?}", control.min_abs_delta);
    }

    #[test]
    fn pseudospin_caveat_warns() {
        let pot = PotentialSet::free(1.0).with_delta(Profile::Coulomb { alpha: 0.5 });
        let q = [parse_sector("1/2,1/2").unwrap()];
        let options = DegeneracyOptions { window: (0.1, 0.99), max_nodes: 1, control: false, ..Default::default() };
        let report = verify_degeneracy(&pot, &q, Mode::Pseudospin, &options).unwrap();
        assert!(report.warnings.iter().any(|w| w.contains("negative energy")));
        assert!(!report.all_pass);
    }
}
