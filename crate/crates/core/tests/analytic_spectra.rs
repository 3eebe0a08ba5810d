//! Shooting spectra against closed-form spectra of exactly solvable
//! configurations.

use planar_dirac::quantum_numbers::parse_sector;
use planar_dirac::radial_solver::{auto_grid, find_bound_states, second_order_solve, Decoupled};
use planar_dirac::{PotentialSet, Profile, QuantumNumbers};

fn sector(text: &str) -> QuantumNumbers {
    parse_sector(text).unwrap()
}

/// Root of a monotone function on `[lo, hi]` by plain bisection.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(ε + m − c)(ε − m) = √((ε + m − c)λ) (4n + 2ℓ + 2)`, `ℓ = |k − 1/2|`.
fn spin_harmonic_level(k: f64, n: usize, m: f64, lambda: f64, c: f64) -> f64 {
    let ell = (k - 0.5).abs();
    let q = 4.0 * n as f64 + 2.0 * ell + 2.0;
    bisect(|e| (e + m - c) * (e - m) - ((e + m - c) * lambda).sqrt() * q, m + 1e-12, m + 1e3)
}

/// `(m + ε)(ε − m − c) = √(λ(ε − m − c)) (4n + 2ℓ̃ + 2)`, `ℓ̃ = |k + 1/2|`.
fn pseudospin_harmonic_level(k: f64, n: usize, m: f64, lambda: f64, c: f64) -> f64 {
    let ell = (k + 0.5).abs();
    let q = 4.0 * n as f64 + 2.0 * ell + 2.0;
    bisect(|e| (m + e) * (e - m - c) - (lambda * (e - m - c)).sqrt() * q, m + c + 1e-12, m + c + 1e3)
}

#[test]
fn dirac_oscillator_levels() {
    let pot = PotentialSet::free(1.0).with_tensor(Profile::Linear { lambda: 1.0 });
    for (label, expected, top) in [("1/2,1/2", [0.0, 4.0, 8.0], 3.3), ("-1/2,1/2", [4.0, 8.0, 12.0], 3.9)] {
        let q = sector(label);
        let window = (0.5, top);
        let grid = auto_grid(&q, &pot, window).unwrap();
        let res = find_bound_states(&q, &pot, window, 10, &grid).unwrap();
        let got: Vec<f64> = res.states.iter().map(|s| s.energy * s.energy - 1.0).collect();
        assert_eq!(got.len(), 3, "{label}: {got:?} {:?}", res.warnings);
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-8, "{label}: {g} vs {e}");
        }
        for (n, s) in res.states.iter().enumerate() {
            assert_eq!(s.n, n);
        }
    }
}

#[test]
fn dirac_oscillator_second_order_agrees() {
    let pot = PotentialSet::free(1.0).with_tensor(Profile::Linear { lambda: 1.0 });
    let q = sector("-1/2,-1/2");
    let window = (1.5, 3.9);
    let grid = auto_grid(&q, &pot, window).unwrap();
    let res = second_order_solve(&q, &pot, Decoupled::UpperG, window, 10, &grid).unwrap();
    let got: Vec<f64> = res.states.iter().map(|s| s.energy * s.energy - 1.0).collect();
    assert_eq!(got.len(), 3, "{got:?}");
    for (g, e) in got.iter().zip([4.0, 8.0, 12.0]) {
        assert!((g - e).abs() < 1e-8, "{g} vs {e}");
    }
}

#[test]
fn spin_symmetric_harmonic_levels() {
    let (m, lambda, c) = (1.0, 1.0, 0.0);
    let pot = PotentialSet::free(m).with_sigma(Profile::Harmonic { lambda }).with_delta(Profile::Constant { c });
    for label in ["3/2,3/2", "-1/2,1/2", "5/2,5/2", "-3/2,3/2"] {
        let q = sector(label);
        let k = q.k().to_f64();
        let window = (1.2, 9.0);
        let grid = auto_grid(&q, &pot, window).unwrap();
        let res = find_bound_states(&q, &pot, window, 4, &grid).unwrap();
        assert_eq!(res.states.len(), 5, "{label}: {:?}", res.warnings);
        for (n, s) in res.states.iter().enumerate() {
            let want = spin_harmonic_level(k, n, m, lambda, c);
            assert_eq!(s.n, n);
            assert!((s.energy - want).abs() <= 1e-9 * want, "{label} n={n}: {} vs {want}", s.energy);
        }
    }
}

#[test]
fn spin_symmetric_with_constant_delta() {
    let (m, lambda, c) = (1.0, 0.5, 0.8);
    let pot = PotentialSet::free(m).with_sigma(Profile::Harmonic { lambda }).with_delta(Profile::Constant { c });
    let q = sector("3/2,-3/2");
    let window = (1.05, 5.0);
    let grid = auto_grid(&q, &pot, window).unwrap();
    let res = find_bound_states(&q, &pot, window, 2, &grid).unwrap();
    assert_eq!(res.states.len(), 3);
    for (n, s) in res.states.iter().enumerate() {
        let want = spin_harmonic_level(1.5, n, m, lambda, c);
        assert!((s.energy - want).abs() <= 1e-9 * want, "n={n}: {} vs {want}", s.energy);
    }
}

#[test]
fn pseudospin_harmonic_levels() {
    let (m, lambda, c) = (1.0, 1.0, 0.0);
    let pot = PotentialSet::free(m).with_delta(Profile::Harmonic { lambda }).with_sigma(Profile::Constant { c });
    for label in ["1/2,1/2", "-3/2,3/2", "3/2,3/2", "-5/2,5/2"] {
        let q = sector(label);
        let k = q.k().to_f64();
        let window = (1.5, 9.0);
        let grid = auto_grid(&q, &pot, window).unwrap();
        let res = second_order_solve(&q, &pot, Decoupled::LowerF, window, 12, &grid).unwrap();
        let coupled = find_bound_states(&q, &pot, window, 12, &grid).unwrap();
        assert!(res.states.len() >= 3, "{label}: {:?}", res.warnings);
        assert_eq!(res.states.len(), coupled.states.len(), "{label}: {:?}", coupled.warnings);
        for (s, t) in res.states.iter().zip(&coupled.states) {
            let want = pseudospin_harmonic_level(k, s.f_nodes, m, lambda, c);
            assert!((s.energy - want).abs() <= 1e-9 * want, "{label}: {} vs {want}", s.energy);
            assert!((t.energy - want).abs() <= 1e-9 * want, "{label}: {} vs {want}", t.energy);
            assert_eq!(s.f_nodes, t.f_nodes);
        }
    }
}
