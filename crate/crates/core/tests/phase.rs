mod common;

use std::f64::consts::PI;

use common::*;
use jnr_core::hermitian::{eig_hermitian, HermitianOperator, DEFAULT_GAP_TOL};
use jnr_core::phase::*;
use jnr_core::random::{random_hermitian, rng_for};
use jnr_core::JnrError;
use rand::Rng;

const TOL: f64 = DEFAULT_GAP_TOL;

fn qubit() -> (HermitianOperator, HermitianOperator) {
    (HermitianOperator::pauli_z(), HermitianOperator::pauli_x())
}

fn knowns(h0: &HermitianOperator, h1: &HermitianOperator, at: &[f64]) -> Vec<KnownEnergy> {
    at.iter().map(|&a| known_energy(h0, h1, a, TOL).unwrap()).collect()
}

#[test]
fn cusp_pair_levels_in_closed_form() {
    let (h0, h1) = cusp_pair();
    let sweep = spectrum_sweep(&h0, &h1, 720).unwrap();
    assert_eq!(sweep.thetas.len(), 720);
    assert!(sweep.thetas.windows(2).all(|w| w[0] < w[1]));
    for (t, levels) in sweep.thetas.iter().zip(&sweep.levels) {
        let mut want = vec![1.0, -1.0, -2.0 * t.cos()];
        want.sort_by(f64::total_cmp);
        assert!(close(levels, &want, 1e-12), "theta {t}: {levels:?}");
    }
    let first = eig_hermitian(&h0).unwrap().eigenvalues;
    assert_eq!(sweep.levels[0], first);
}

#[test]
fn qubit_levels_are_constant() {
    let (z, x) = qubit();
    let sweep = spectrum_sweep(&z, &x, 64).unwrap();
    for l in &sweep.levels {
        assert!(close(l, &[-1.0, 1.0], 1e-12));
    }
    assert!(sweep.ground_gap.iter().all(|g| (g - 2.0).abs() <= 1e-12));
    let report = detect_ground_crossings(&z, &x, &sweep, TOL).unwrap();
    assert!(report.crossings.is_empty());
    assert!(report.flat_faces.is_empty());
    assert!(spectrum_sweep(&z, &x, 7).is_err());
}

#[test]
fn cusp_pair_crossings_at_third_turns() {
    let (h0, h1) = cusp_pair();
    for n in [72, 360, 721] {
        let sweep = spectrum_sweep(&h0, &h1, n).unwrap();
        let report = detect_ground_crossings(&h0, &h1, &sweep, TOL).unwrap();
        let thetas: Vec<f64> = report.crossings.iter().map(|c| c.theta).collect();
        assert!(close(&thetas, &[-PI / 3.0, PI / 3.0], 1e-6), "{n}: {thetas:?}");
        for c in &report.crossings {
            assert!(c.bracket.1 - c.bracket.0 <= CROSSING_WIDTH);
            assert!(c.bracket.0 <= c.theta && c.theta <= c.bracket.1);
        }
    }
}

#[test]
fn face_pair_gap_closes_only_on_its_flat_face() {
    let (h0, h1) = face_pair();
    let sweep = spectrum_sweep(&h0, &h1, 360).unwrap();
    let report = detect_ground_crossings(&h0, &h1, &sweep, TOL).unwrap();
    assert_eq!(report.flat_faces.len(), 1);
    let face = &report.flat_faces[0];
    for p in face.sample_points(5) {
        assert!(p[0].abs() <= 1e-9, "{p:?}");
    }
    // the ground level is -|sin theta| near 0, so its only kink is the face direction
    assert_eq!(report.crossings.len(), 1, "{:?}", report.crossings);
    assert!(report.crossings[0].theta.abs() <= 1e-6);
    let n = face.direction.as_ref().unwrap().as_slice();
    assert!(close(n, &[-1.0, 0.0], 1e-9), "{n:?}");
}

#[test]
fn ground_energy_examples() {
    let (z, x) = qubit();
    for a in [-2.0, -0.5, 0.0, 0.3, 1.0, 4.0] {
        assert!((ground_energy(&z, &x, a).unwrap() + (1.0 + a * a).sqrt()).abs() <= 1e-12);
    }
    let (h0, h1) = cusp_pair();
    assert_eq!(ground_energy(&h0, &h1, 0.0).unwrap(), eig_hermitian(&h0).unwrap().min());
    for a in [-1.0, -0.5, 0.0, 2.0] {
        let e = ground_energy(&h0, &h0, a).unwrap();
        assert!((e - (1.0 + a) * -2.0).abs() <= 1e-12);
    }
}

#[test]
fn qubit_bound_example() {
    let (z, x) = qubit();
    let known = knowns(&z, &x, &[0.0, 1.0]);
    let b = energy_bounds(&known, 0.5).unwrap();
    let truth = -(1.25f64).sqrt();
    assert!((b.lower + (1.0 + 2f64.sqrt()) / 2.0).abs() <= 1e-12);
    assert!(b.lower <= truth && truth <= b.upper);
    assert!(b.upper <= -1.0 + 1e-12);

    let at = energy_bounds(&known, 1.0).unwrap();
    assert_eq!(at.lower, at.upper);
    assert_eq!(at.lower, known[1].energy);

    assert!(matches!(
        energy_bounds(&known, 2.0),
        Err(JnrError::QueryOutsideBracket { .. })
    ));
    assert!(energy_bounds(&[], 0.0).is_err());
}

#[test]
fn affine_family_chord_is_exact() {
    let (h0, _) = cusp_pair();
    let id = HermitianOperator::identity(3);
    let known = knowns(&h0, &id, &[-1.0, 2.0]);
    for q in [-0.5, 0.0, 1.7] {
        let b = energy_bounds(&known, q).unwrap();
        let e = ground_energy(&h0, &id, q).unwrap();
        assert!((b.lower - e).abs() <= 1e-12 && (b.upper - e).abs() <= 1e-12);
    }
}

#[test]
fn random_families_are_concave_and_sandwiched() {
    let mut rng = rng_for(21, "test_concavity", 0);
    for i in 0..50 {
        let d = 2 + i % 5;
        let h0 = random_hermitian(&mut rng, d);
        let h1 = random_hermitian(&mut rng, d);
        let a: f64 = rng.random_range(-3.0..3.0);
        let b: f64 = a + rng.random_range(0.01..3.0);
        let e = |t: f64| ground_energy(&h0, &h1, t).unwrap();
        assert!(e(0.5 * (a + b)) >= 0.5 * (e(a) + e(b)) - 1e-10);

        let grid: Vec<f64> = (0..5).map(|j| -2.0 + j as f64).collect();
        let known = knowns(&h0, &h1, &grid);
        for _ in 0..10 {
            let q = rng.random_range(-2.0..2.0);
            let bounds = energy_bounds(&known, q).unwrap();
            let truth = e(q);
            assert!(bounds.lower <= truth + 1e-10, "pair {i}, q {q}");
            assert!(truth <= bounds.upper + 1e-10, "pair {i}, q {q}");
        }
    }
}

#[test]
fn hellmann_feynman_derivative() {
    let mut rng = rng_for(22, "test_hf", 0);
    let h = 1e-5;
    let mut checked = 0;
    for i in 0..50 {
        let d = 2 + i % 5;
        let h0 = random_hermitian(&mut rng, d);
        let h1 = random_hermitian(&mut rng, d);
        let a: f64 = rng.random_range(-2.0..2.0);
        let k = known_energy(&h0, &h1, a, TOL).unwrap();
        let levels = eig_hermitian(&h0.add(&h1.scale(a)).unwrap()).unwrap().eigenvalues;
        // away from crossings
        if levels[1] - levels[0] < 1e-2 {
            continue;
        }
        let e = |t: f64| ground_energy(&h0, &h1, t).unwrap();
        let fd = (e(a + h) - e(a - h)) / (2.0 * h);
        let slope = k.slope.expect("gapped ground state has a slope");
        assert!((fd - slope).abs() <= 1e-6, "pair {i}: {fd} vs {slope}");
        checked += 1;
    }
    assert!(checked >= 40);
}

#[test]
fn slope_is_withheld_at_a_crossing() {
    // H0 + a H1 with H1 = diag(1,-1) and H0 = 0 is degenerate at a = 0
    let h0 = HermitianOperator::diagonal(&[0.0, 0.0]);
    let k = known_energy(&h0, &HermitianOperator::pauli_z(), 0.0, TOL).unwrap();
    assert_eq!(k.slope, None);
    let k = known_energy(&h0, &HermitianOperator::pauli_z(), 0.5, TOL).unwrap();
    assert_eq!(k.slope, Some(-1.0));
}
