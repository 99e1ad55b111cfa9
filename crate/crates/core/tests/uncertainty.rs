mod common;

use common::*;
use jnr_core::boundary::{sample_directions, Direction, Strategy};
use jnr_core::hermitian::{eig_hermitian, HermitianOperator};
use jnr_core::random::{random_hermitian, rng_for};
use jnr_core::uncertainty::*;

#[test]
fn complex_pair_bracket_contains_known_bound() {
    let (x, y) = complex_pair();
    let b = maccone_pati_bounds(&x, &y, 1082, 1e-8, 0).unwrap();
    assert!(b.contains(15.0 / 32.0), "{b:?}");
    assert!(b.width() <= 3e-3, "{b:?}");
    assert!(b.lower <= b.upper);
    assert_eq!(b.argmin_side, ArgminSide::InnerVertices);
}

#[test]
fn complex_pair_bracket_across_seeds() {
    let (x, y) = complex_pair();
    for seed in 1..4 {
        let b = maccone_pati_bounds(&x, &y, 1082, 1e-8, seed).unwrap();
        assert!(b.contains(15.0 / 32.0), "seed {seed}: {b:?}");
        assert!(b.width() <= 3e-3, "seed {seed}: {b:?}");
    }
}

#[test]
fn shared_eigenvector_gives_trivial_bound() {
    let (x, y) = shared_eigvec_pair();
    let b = maccone_pati_bounds(&x, &y, 500, 1e-8, 0).unwrap();
    assert!(b.upper <= 1e-9, "{b:?}");
    assert!(b.lower <= 0.0 + 1e-12);
    assert!(close(&b.argmin_point, &[0.0, -1.0, 1.0], 1e-9), "{:?}", b.argmin_point);
    assert!(close(&b.argmin_variances, &[0.0, 0.0], 1e-9));

    let problem = uncertainty_lifted(&[x, y], VarianceKind::SumOfVariances).unwrap();
    let m = min_uncertainty_point(&problem, &b);
    assert!(close(&m.variances, &[0.0, 0.0], 1e-9));
    assert!(m.value.abs() <= 1e-9);
}

#[test]
fn min_point_lies_in_bracket() {
    let (x, y) = complex_pair();
    let problem = uncertainty_lifted(&[x, y], VarianceKind::SumOfVariances).unwrap();
    let b = uncertainty_bracket(&problem, 1082, 1e-8, 0).unwrap();
    let m = min_uncertainty_point(&problem, &b);
    assert!(b.lower <= m.value && m.value <= b.upper + 1e-12, "{m:?} {b:?}");
}

#[test]
fn qubit_pair_bound_matches_sphere_oracle() {
    let (x, z) = (HermitianOperator::pauli_x(), HermitianOperator::pauli_z());
    let b = maccone_pati_bounds(&x, &z, 200, 1e-8, 0).unwrap();
    let oracle = sampled_variance_sum(&x, &z, 200_000, 3).unwrap();
    assert!((oracle - 1.0).abs() < 1e-3);
    assert!(b.lower <= oracle + 1e-9);
    assert!((b.upper - 1.0).abs() < 1e-12);
}

#[test]
fn random_state_oracle_respects_bracket() {
    let mut rng = rng_for(11, "test_oracle", 0);
    let mut pairs = vec![complex_pair()];
    for d in [2usize, 3, 4] {
        pairs.push((random_hermitian(&mut rng, d), random_hermitian(&mut rng, d)));
    }
    for (i, (x, y)) in pairs.iter().enumerate() {
        let b = maccone_pati_bounds(x, y, 500, 1e-8, 0).unwrap();
        let oracle = sampled_variance_sum(x, y, 1_000_000, i as u64).unwrap();
        // objective scale: squared spectral widths
        let spread: f64 = [x, y]
            .iter()
            .map(|f| eig_hermitian(f).unwrap().width().powi(2))
            .sum();
        assert!(oracle >= b.lower - 1e-9, "pair {i}: oracle {oracle} below {b:?}");
        assert!(oracle <= b.upper + 1e-3 * spread, "pair {i}: oracle {oracle} above {b:?}");
    }
}

#[test]
fn nested_direction_sets_never_widen() {
    let (x, y) = complex_pair();
    let coarse = sample_directions(3, 150, Strategy::Fibonacci3d, 0).unwrap();
    let extra = sample_directions(3, 250, Strategy::SeededUniform, 9).unwrap();
    let fine: Vec<Direction> = coarse.iter().chain(&extra).cloned().collect();
    let with = |dirs: Vec<Direction>| {
        maccone_pati_bracket(&x, &y, &move |_| Ok(dirs.clone()), 1e-8).unwrap()
    };
    let a = with(coarse);
    let b = with(fine);
    assert!(b.lower >= a.lower - 1e-12, "{a:?} {b:?}");
    assert!(b.upper <= a.upper + 1e-12, "{a:?} {b:?}");
}

#[test]
fn identity_shift_leaves_bracket_unchanged() {
    let (x, y) = complex_pair();
    let shifted = x.shift(2.5);
    let dirs = sample_directions(3, 300, Strategy::Fibonacci3d, 0).unwrap();
    let plan = |_: usize| Ok(dirs.clone());
    let a = maccone_pati_bracket(&x, &y, &plan, 1e-8).unwrap();
    let b = maccone_pati_bracket(&shifted, &y, &plan, 1e-8).unwrap();
    assert!((a.lower - b.lower).abs() <= 1e-8);
    assert!((a.upper - b.upper).abs() <= 1e-8);
    assert!(close(&a.argmin_variances, &b.argmin_variances, 1e-8));
    assert!((b.argmin_point[0] - a.argmin_point[0] - 2.5).abs() <= 1e-8);

    let a = maccone_pati_bounds(&x, &y, 1082, 1e-8, 0).unwrap();
    let b = maccone_pati_bounds(&shifted, &y, 1082, 1e-8, 0).unwrap();
    assert!((a.lower - b.lower).abs() <= 1e-8);
    assert!((a.upper - b.upper).abs() <= 1e-8);
}

#[test]
fn sum_objective_is_concave() {
    let mut rng = rng_for(5, "test_hessian", 0);
    use rand::Rng;
    let u = |p: &[f64]| -> f64 { variance_map(p).unwrap().iter().sum() };
    let h = 1e-4;
    for _ in 0..20 {
        let base: Vec<f64> = (0..2)
            .flat_map(|_| {
                let m: f64 = rng.random_range(-1.0..1.0);
                [m, m * m + rng.random_range(0.1..1.0)]
            })
            .collect();
        // finite-difference Hessian along random directions
        for _ in 0..10 {
            let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let at = |t: f64| -> Vec<f64> { base.iter().zip(&v).map(|(b, d)| b + t * d).collect() };
            let second = (u(&at(h)) - 2.0 * u(&base) + u(&at(-h))) / (h * h);
            assert!(second <= 1e-6, "{second}");
        }
    }
}

#[test]
fn product_kind_brackets_oracle() {
    let (x, z) = (HermitianOperator::pauli_x(), HermitianOperator::pauli_z());
    let problem = uncertainty_lifted(&[x.clone(), z.clone()], VarianceKind::ProductOfVariances).unwrap();
    assert_eq!(problem.lifted_set.k(), 4);
    let b = uncertainty_bracket(&problem, 400, 1e-8, 0).unwrap();
    // an eigenstate of either observable makes the product vanish
    assert!(b.lower <= 0.0 + 1e-12);
    assert!(b.upper <= 1e-2, "{b:?}");
    assert!(b.lower <= b.upper);
}

#[test]
fn rejects_bad_inputs() {
    let (x, _) = complex_pair();
    let z = HermitianOperator::pauli_z();
    assert!(maccone_pati_bounds(&x, &z, 500, 1e-8, 0).is_err());
    assert!(maccone_pati_bounds(&z, &z, 49, 1e-8, 0).is_err());
    assert!(uncertainty_lifted(&[], VarianceKind::SumOfVariances).is_err());
    assert!("mean".parse::<VarianceKind>().is_err());
    assert_eq!("product".parse::<VarianceKind>().unwrap(), VarianceKind::ProductOfVariances);
}
