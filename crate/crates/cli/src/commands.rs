//! The four subcommands. Each returns `Ok(pass)` once its outputs are written.

use std::path::PathBuf;

use log::{info, warn};
use planar_dirac::config::RunConfig;
use planar_dirac::degeneracy::{solve_sectors, verify_degeneracy, DegeneracyOptions, Mode, PairingRecord, SHOOTING_TOLERANCE};
use planar_dirac::fd_oracle::{compare_sector, OracleComparison};
use planar_dirac::operator_lab::verify_algebra as run_claims;
use planar_dirac::quantum_numbers::QuantumNumbers;
use planar_dirac::radial_solver::GridSpec;
use planar_dirac::{HalfInt, RadialSolution};
use serde::Serialize;

use crate::output::{ensure_dir, float, write_csv, write_json, Stamp};
use crate::Failure;

/// Default pass threshold of `oracle-compare`.
pub const ORACLE_TOLERANCE: f64 = planar_dirac::degeneracy::ORACLE_TOLERANCE;

#[derive(Debug, Clone)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub dump_wavefunctions: bool,
    pub tol: Option<f64>,
    pub grid_points: Option<usize>,
}

impl Options {
    fn tolerance(&self, default: f64) -> Result<f64, Failure> {
        match self.tol {
            None => Ok(default),
            Some(t) if t.is_finite() && t > 0.0 => Ok(t),
            Some(t) => Err(Failure::Usage(format!("--tol must be finite and positive, got {t}"))),
        }
    }

    fn load(&self, optional: bool) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None if optional => RunConfig::parse("")?,
            None => return Err(Failure::Usage("--config PATH is required for this command".into())),
        };
        if let Some(n) = self.grid_points {
            cfg.problem.grid_points = Some(n);
        }
        Ok(cfg)
    }
}

fn sorted_sectors(cfg: &RunConfig) -> Result<Vec<QuantumNumbers>, Failure> {
    let mut sectors = cfg.sectors()?;
    sectors.sort_by_key(|q| (q.k().twice(), q.mj().twice()));
    sectors.dedup();
    Ok(sectors)
}

fn label(x: f64) -> String {
    HalfInt::from_twice((2.0 * x).round() as i64).to_string()
}

pub fn verify_algebra(opts: &Options) -> Result<bool, Failure> {
    let cfg = opts.load(true)?;
    let mut settings = cfg.algebra.clone();
    settings.tolerance = opts.tol;
    let report = run_claims(&settings, opts.seed)?;

    ensure_dir(&opts.out)?;
    let stamp = Stamp { command: "verify-algebra", config_digest: &cfg.digest, seed: opts.seed };
    let path = opts.out.join("algebra.json");
    write_json(&path, &stamp.wrap(&report))?;

    for c in report.failures() {
        println!("FAIL {}  {} = {}  residual {:e} (tolerance {:e})", c.claim_id, c.lhs, c.rhs, c.residual, c.tolerance);
    }
    let failed = report.failures().count();
    println!("verify-algebra: {} claims, {failed} failed -> {}", report.claims.len(), path.display());
    Ok(report.all_pass)
}

fn spectrum_row(sol: &RadialSolution) -> Vec<String> {
    vec![
        sol.sector.k().to_string(),
        sol.sector.mj().to_string(),
        sol.n.to_string(),
        float(sol.energy),
        float(sol.norm_residual),
        float(sol.match_residual),
        sol.grid_points().to_string(),
    ]
}

pub fn spectrum(opts: &Options) -> Result<bool, Failure> {
    let cfg = opts.load(false)?;
    if opts.tol.is_some() {
        warn!("--tol has no effect on spectrum");
    }
    let pot = cfg.potentials()?;
    let scan = cfg.scan()?;
    let sectors = sorted_sectors(&cfg)?;
    let solved = solve_sectors(&sectors, &pot, cfg.window()?, scan.max_nodes, &cfg.grid_spec())?;

    ensure_dir(&opts.out)?;
    let stamp = Stamp { command: "spectrum", config_digest: &cfg.digest, seed: opts.seed };
    let mut rows = Vec::new();
    let mut states: Vec<&RadialSolution> = Vec::new();
    for (q, sols, warnings) in &solved {
        for w in warnings {
            warn!("{q}: {w}");
        }
        let mut sols: Vec<&RadialSolution> = sols.iter().collect();
        sols.sort_by(|a, b| a.n.cmp(&b.n).then(a.energy.total_cmp(&b.energy)));
        states.extend(sols);
    }
    if states.is_empty() {
        warn!("no bound states found in the energy window");
    }
    for sol in &states {
        rows.push(spectrum_row(sol));
        info!("{} n={} energy={}", sol.sector, sol.n, sol.energy);
    }
    let path = opts.out.join("spectrum.csv");
    let header = ["k", "mj", "n", "energy", "norm_residual", "match_residual", "grid_points"];
    write_csv(&path, &stamp, &header, &rows)?;

    if opts.dump_wavefunctions {
        let dir = opts.out.join("wavefunctions");
        ensure_dir(&dir)?;
        for sol in &states {
            let name = format!("k{}_mj{}_n{}.csv", sol.sector.k().twice(), sol.sector.mj().twice(), sol.n);
            let rows: Vec<Vec<String>> = (0..sol.rho.len())
                .map(|i| vec![float(sol.rho[i]), float(sol.g[i]), float(sol.f[i])])
                .collect();
            write_csv(&dir.join(name), &stamp, &["rho", "g", "f"], &rows)?;
        }
    }
    println!("spectrum: {} states in {} sectors -> {}", states.len(), sectors.len(), path.display());
    Ok(true)
}

fn pairing_row(p: &PairingRecord) -> Vec<String> {
    vec![
        label(p.k_a),
        label(p.mj_a),
        label(p.k_b),
        label(p.mj_b),
        p.n.to_string(),
        float(p.eps_a),
        float(p.eps_b),
        float(p.abs_delta),
        p.pass.to_string(),
    ]
}

pub fn degeneracy(opts: &Options, mode: Mode) -> Result<bool, Failure> {
    let cfg = opts.load(false)?;
    let pot = cfg.potentials()?;
    let scan = cfg.scan()?;
    let sectors = sorted_sectors(&cfg)?;
    let options = DegeneracyOptions {
        window: cfg.window()?,
        max_nodes: scan.max_nodes,
        tolerance: opts.tolerance(SHOOTING_TOLERANCE)?,
        grid: cfg.grid_spec(),
        allow_broken: scan.allow_broken_symmetry,
        control: true,
        ladder_checks: scan.ladder_checks,
        ..Default::default()
    };
    let mut report = verify_degeneracy(&pot, &sectors, mode, &options)?;
    report.config_digest = Some(cfg.digest.clone());
    report.algebra_report = Some("algebra.json".into());
    for w in &report.warnings {
        warn!("{w}");
    }

    let name = match mode {
        Mode::Spin => "spin",
        Mode::Pseudospin => "pseudospin",
    };
    ensure_dir(&opts.out)?;
    let stamp = Stamp { command: "degeneracy", config_digest: &cfg.digest, seed: opts.seed };
    let json = opts.out.join(format!("degeneracy_{name}.json"));
    write_json(&json, &stamp.wrap(&report))?;
    let rows: Vec<Vec<String>> = report.pairs.iter().map(pairing_row).collect();
    let header = ["k_a", "mj_a", "k_b", "mj_b", "n", "eps_a", "eps_b", "abs_delta", "pass"];
    write_csv(&opts.out.join(format!("degeneracy_{name}.csv")), &stamp, &header, &rows)?;

    for p in &report.pairs {
        println!(
            "{} ({},{}) <-> ({},{}) n={}  eps {:.12} {:.12}  |delta| {:e}",
            if p.pass { "PAIR" } else { "LIFTED" },
            label(p.k_a),
            label(p.mj_a),
            label(p.k_b),
            label(p.mj_b),
            p.n,
            p.eps_a,
            p.eps_b,
            p.abs_delta
        );
    }
    for u in &report.unpaired {
        println!("UNPAIRED {u}");
    }
    if let Some(c) = &report.control {
        println!("control: min |delta| {:?}, lifted {}", c.min_abs_delta, c.lifted);
    }
    println!("degeneracy {name}: {} pairs, all pass {} -> {}", report.pairs.len(), report.all_pass, json.display());
    Ok(report.all_pass)
}

#[derive(Debug, Serialize)]
struct OracleReport {
    tolerance: f64,
    window: (f64, f64),
    grid: GridSpec,
    rows: Vec<OracleComparison>,
    max_relative_difference: Option<f64>,
    all_pass: bool,
}

pub fn oracle_compare(opts: &Options) -> Result<bool, Failure> {
    let cfg = opts.load(false)?;
    let tolerance = opts.tolerance(ORACLE_TOLERANCE)?;
    let pot = cfg.potentials()?;
    let scan = cfg.scan()?;
    let window = cfg.window()?;
    let spec = cfg.grid_spec();
    let mut rows = Vec::new();
    for q in sorted_sectors(&cfg)? {
        let grid = spec.grid_for(&q, &pot, window)?;
        rows.extend(compare_sector(&q, &pot, window, scan.max_nodes, &grid)?);
    }
    let max_relative_difference = rows.iter().filter_map(|r| r.relative_difference).reduce(f64::max);
    let all_pass = rows.iter().all(|r| r.within(tolerance));
    let report = OracleReport { tolerance, window, grid: spec, rows, max_relative_difference, all_pass };

    ensure_dir(&opts.out)?;
    let stamp = Stamp { command: "oracle-compare", config_digest: &cfg.digest, seed: opts.seed };
    let path = opts.out.join("oracle.json");
    write_json(&path, &stamp.wrap(&report))?;

    for r in &report.rows {
        let verdict = if r.within(tolerance) { "OK  " } else { "DIFF" };
        println!("{verdict} {} n={} shooting {:?} oracle {:?} rel {:?}", r.sector, r.n, r.shooting, r.oracle, r.relative_difference);
    }
    println!("oracle-compare: {} states, all within {tolerance:e}: {} -> {}", report.rows.len(), all_pass, path.display());
    Ok(all_pass)
}
