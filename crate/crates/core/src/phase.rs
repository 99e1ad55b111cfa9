//! Spectra of `H(theta) = cos(theta) H0 + sin(theta) H1`, ground-level
//! crossings, and concavity bounds on `E(a) = lambda_min(H0 + a H1)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{grid2d, ObservableSet};
use crate::classify::{detect_flat_parts, FlatPart, K2_GRID};
use crate::error::{JnrError, Result};
use crate::hermitian::{check_dim, eig_hermitian, HermitianOperator};

/// Final bracket width for refined crossings.
pub const CROSSING_WIDTH: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub thetas: Vec<f64>,
    /// Ascending spectrum per angle.
    pub levels: Vec<Vec<f64>>,
    /// `lambda_2 - lambda_1` per angle.
    pub ground_gap: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Crossing angle in `(-pi, pi]`.
    pub theta: f64,
    /// Angular interval containing the gap minimum, in the same branch as `theta`.
    pub bracket: (f64, f64),
    /// Ground gap at `theta`.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitionReport {
    pub crossings: Vec<Crossing>,
    pub flat_faces: Vec<FlatPart>,
}

fn h_theta(h0: &HermitianOperator, h1: &HermitianOperator, theta: f64) -> Result<HermitianOperator> {
    HermitianOperator::linear_combination(&[theta.cos(), theta.sin()], &[h0.clone(), h1.clone()])
}

fn gap_of(levels: &[f64]) -> f64 {
    if levels.len() < 2 {
        f64::INFINITY
    } else {
        levels[1] - levels[0]
    }
}

pub fn spectrum_sweep(
    h0: &HermitianOperator,
    h1: &HermitianOperator,
    num_thetas: usize,
) -> Result<SpectrumSweep> {
    check_dim("Hamiltonian pair", h0.dim(), h1.dim())?;
    if num_thetas < 8 {
        return Err(JnrError::InvalidArgument(format!(
            "spectrum sweep needs at least 8 angles, got {num_thetas}"
        )));
    }
    let thetas: Vec<f64> = (0..num_thetas)
        .map(|j| 2.0 * PI * j as f64 / num_thetas as f64)
        .collect();
    let levels: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&t| {
            let h = if t == 0.0 { h0.clone() } else { h_theta(h0, h1, t)? };
            Ok(eig_hermitian(&h)?.eigenvalues)
        })
        .collect::<Result<_>>()?;
    let ground_gap = levels.iter().map(|l| gap_of(l)).collect();
    Ok(SpectrumSweep {
        thetas,
        levels,
        ground_gap,
    })
}

fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Golden-section minimization of the ground gap on `[lo, hi]`.
fn minimize_gap(
    h0: &HermitianOperator,
    h1: &HermitianOperator,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64, f64)> {
    let g = |t: f64| -> Result<f64> { Ok(gap_of(&eig_hermitian(&h_theta(h0, h1, t)?)?.eigenvalues)) };
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let mut ga = g(a)?;
    let mut gb = g(b)?;
    while hi - lo > 1e-3 * CROSSING_WIDTH {
        if ga <= gb {
            hi = b;
            b = a;
            gb = ga;
            a = hi - r * (hi - lo);
            ga = g(a)?;
        } else {
            lo = a;
            a = b;
            ga = gb;
            b = lo + r * (hi - lo);
            gb = g(b)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, g(mid)?, hi - lo))
}

/// Angles where the two lowest levels of `H(theta)` meet, plus the flat
/// boundary parts of `L(H0, H1)`.
pub fn detect_ground_crossings(
    h0: &HermitianOperator,
    h1: &HermitianOperator,
    sweep: &SpectrumSweep,
    gap_tol: f64,
) -> Result<TransitionReport> {
    check_dim("Hamiltonian pair", h0.dim(), h1.dim())?;
    let n = sweep.thetas.len();
    if n < 3 || sweep.ground_gap.len() != n {
        return Err(JnrError::InvalidArgument("malformed spectrum sweep".into()));
    }
    let width = |i: usize| {
        let l = &sweep.levels[i];
        l[l.len() - 1] - l[0]
    };
    let step = 2.0 * PI / n as f64;
    let g = &sweep.ground_gap;
    let mut crossings = Vec::new();
    for i in 0..n {
        let (p, q) = ((i + n - 1) % n, (i + 1) % n);
        let key = |j: usize| (g[j], j);
        if !(key(i) < key(p) && key(i) < key(q)) {
            continue;
        }
        let threshold = gap_tol * (1.0 + width(i));
        // a gap that stays closed on both neighbours is a persistent degeneracy
        if g[p] <= threshold && g[q] <= threshold {
            continue;
        }
        let t0 = sweep.thetas[i];
        let (t, gap, w) = minimize_gap(h0, h1, t0 - step, t0 + step)?;
        if gap <= threshold {
            let theta = wrap(t);
            crossings.push(Crossing {
                theta,
                bracket: (theta - 0.5 * w, theta + 0.5 * w),
                gap,
            });
        }
    }
    crossings.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    crossings.dedup_by(|a, b| (a.theta - b.theta).abs() <= CROSSING_WIDTH);
    let set = ObservableSet::new(vec![h0.clone(), h1.clone()])?;
    let flat_faces = detect_flat_parts(&set, &grid2d(K2_GRID), gap_tol)?;
    Ok(TransitionReport {
        crossings,
        flat_faces,
    })
}

/// `lambda_min(H0 + a H1)`.
pub fn ground_energy(h0: &HermitianOperator, h1: &HermitianOperator, a: f64) -> Result<f64> {
    let h = h0.add(&h1.scale(a))?;
    Ok(eig_hermitian(&h)?.min())
}

/// A sample of `E(a)` with its optional derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownEnergy {
    pub a: f64,
    pub energy: f64,
    pub slope: Option<f64>,
}

/// Evaluates `E(a)`; the slope `<H1>` on the ground state is included only
/// when the ground level is separated by more than `10 gap_tol`.
pub fn known_energy(
    h0: &HermitianOperator,
    h1: &HermitianOperator,
    a: f64,
    gap_tol: f64,
) -> Result<KnownEnergy> {
    let h = h0.add(&h1.scale(a))?;
    let eig = eig_hermitian(&h)?;
    let gap = gap_of(&eig.eigenvalues);
    let slope =
        (gap > 10.0 * gap_tol * (1.0 + eig.width())).then(|| h1.expectation_in(&eig.vector(0)));
    Ok(KnownEnergy {
        a,
        energy: eig.min(),
        slope,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBounds {
    pub query: f64,
    /// Chord between the bracketing samples.
    pub lower: f64,
    /// Best tangent or outer secant line; `+inf` when none applies.
    pub upper: f64,
}

/// Two-sided bounds on `E(query)` from concavity of `E`.
pub fn energy_bounds(known: &[KnownEnergy], query: f64) -> Result<EnergyBounds> {
    if known.is_empty() {
        return Err(JnrError::InvalidArgument("no known energies".into()));
    }
    if let Some(k) = known.iter().find(|k| k.a == query) {
        return Ok(EnergyBounds {
            query,
            lower: k.energy,
            upper: k.energy,
        });
    }
    let min = known.iter().map(|k| k.a).fold(f64::INFINITY, f64::min);
    let max = known.iter().map(|k| k.a).fold(f64::NEG_INFINITY, f64::max);
    let left = known
        .iter()
        .filter(|k| k.a < query)
        .max_by(|x, y| x.a.total_cmp(&y.a));
    let right = known
        .iter()
        .filter(|k| k.a > query)
        .min_by(|x, y| x.a.total_cmp(&y.a));
    let (Some(l), Some(r)) = (left, right) else {
        return Err(JnrError::QueryOutsideBracket { query, min, max });
    };
    let t = (query - l.a) / (r.a - l.a);
    let lower = (1.0 - t) * l.energy + t * r.energy;

    let mut upper = f64::INFINITY;
    for k in known {
        if let Some(s) = k.slope {
            upper = upper.min(k.energy + s * (query - k.a));
        }
    }
    // secants through two samples on the same side of the query
    for (i, p) in known.iter().enumerate() {
        for q in &known[i + 1..] {
            let same_side = (p.a < query && q.a < query) || (p.a > query && q.a > query);
            if same_side && p.a != q.a {
                let s = (q.energy - p.energy) / (q.a - p.a);
                upper = upper.min(p.energy + s * (query - p.a));
            }
        }
    }
    Ok(EnergyBounds {
        query,
        lower,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_ground_energy() {
        let (z, x) = (HermitianOperator::pauli_z(), HermitianOperator::pauli_x());
        for a in [-2.0, -0.3, 0.0, 0.7, 3.0] {
            let e = ground_energy(&z, &x, a).unwrap();
            assert!((e + (1.0 + a * a).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_bounds_sandwich() {
        let (z, x) = (HermitianOperator::pauli_z(), HermitianOperator::pauli_x());
        let known: Vec<_> = [0.0, 1.0]
            .iter()
            .map(|&a| known_energy(&z, &x, a, 1e-8).unwrap())
            .collect();
        let b = energy_bounds(&known, 0.5).unwrap();
        assert!((b.lower + (1.0 + 2f64.sqrt()) / 2.0).abs() < 1e-12);
        let e = ground_energy(&z, &x, 0.5).unwrap();
        assert!(b.lower <= e && e <= b.upper);
        assert!(b.upper <= -1.0);
        let at = energy_bounds(&known, 1.0).unwrap();
        assert_eq!(at.lower, at.upper);
        assert!(matches!(
            energy_bounds(&known, 2.0),
            Err(JnrError::QueryOutsideBracket { .. })
        ));
    }

    #[test]
    fn affine_family_chord_is_exact() {
        let h0 = HermitianOperator::diagonal(&[0.5, -1.5, 2.0]);
        let h1 = HermitianOperator::identity(3);
        let known: Vec<_> = [-1.0, 2.0]
            .iter()
            .map(|&a| known_energy(&h0, &h1, a, 1e-8).unwrap())
            .collect();
        let b = energy_bounds(&known, 0.25).unwrap();
        assert!((b.lower - (-1.5 + 0.25)).abs() < 1e-12);
        assert!((b.upper - b.lower).abs() < 1e-12);
    }

    #[test]
    fn qubit_sweep_has_no_crossings() {
        let (z, x) = (HermitianOperator::pauli_z(), HermitianOperator::pauli_x());
        let sw = spectrum_sweep(&z, &x, 64).unwrap();
        for l in &sw.levels {
            assert!((l[0] + 1.0).abs() < 1e-12 && (l[1] - 1.0).abs() < 1e-12);
        }
        let rep = detect_ground_crossings(&z, &x, &sw, 1e-8).unwrap();
        assert!(rep.crossings.is_empty());
        assert!(rep.flat_faces.is_empty());
        assert!(spectrum_sweep(&z, &x, 7).is_err());
    }
}
