use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{JnrError, Result};
use crate::random::rng_for;

const UNIT_TOL: f64 = 1e-12;

/// A unit vector in R^k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `v`; fails on zero or non-finite input.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(JnrError::InvalidArgument(format!(
                "cannot normalize direction {v:?}"
            )));
        }
        Ok(Self(v.into_iter().map(|x| x / norm).collect()))
    }

    /// Accepts an already normalized vector.
    pub fn from_unit(v: Vec<f64>) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(JnrError::InvalidArgument(format!(
                "direction has norm {norm}, expected 1"
            )));
        }
        Ok(Self(v))
    }

    pub fn angle(theta: f64) -> Self {
        Self(vec![theta.cos(), theta.sin()])
    }

    pub fn axis(k: usize, i: usize, sign: f64) -> Self {
        let mut v = vec![0.0; k];
        v[i] = sign.signum();
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.clone()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }
}

impl std::ops::Index<usize> for Direction {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Uniform angles `2 pi j / count`, k = 2 only.
    Grid2d,
    /// Golden-angle spiral on S^2, k = 3 only.
    Fibonacci3d,
    /// Normalized Gaussian vectors from a seeded generator, any k.
    SeededUniform,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Grid2d => "grid2d",
            Strategy::Fibonacci3d => "fibonacci3d",
            Strategy::SeededUniform => "seeded_uniform",
        }
    }

    /// The natural deterministic strategy for dimension `k`.
    pub fn default_for(k: usize) -> Self {
        match k {
            2 => Strategy::Grid2d,
            3 => Strategy::Fibonacci3d,
            _ => Strategy::SeededUniform,
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = JnrError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid2d" => Ok(Strategy::Grid2d),
            "fibonacci3d" => Ok(Strategy::Fibonacci3d),
            "seeded_uniform" => Ok(Strategy::SeededUniform),
            other => Err(JnrError::InvalidArgument(format!(
                "unknown direction strategy {other:?}"
            ))),
        }
    }
}

pub fn sample_directions(
    k: usize,
    count: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<Vec<Direction>> {
    if count == 0 || k == 0 {
        return Err(JnrError::InvalidArgument(
            "need at least one direction in at least one dimension".into(),
        ));
    }
    match strategy {
        Strategy::Grid2d => {
            if k != 2 {
                return Err(JnrError::StrategyDimensionMismatch {
                    strategy: strategy.name(),
                    k,
                });
            }
            Ok(grid2d(count))
        }
        Strategy::Fibonacci3d => {
            if k != 3 {
                return Err(JnrError::StrategyDimensionMismatch {
                    strategy: strategy.name(),
                    k,
                });
            }
            Ok(fibonacci_sphere(count))
        }
        Strategy::SeededUniform => {
            let mut rng = rng_for(seed, "directions", k as u64);
            Ok((0..count)
                .map(|_| loop {
                    let v: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
                    if let Ok(d) = Direction::new(v) {
                        break d;
                    }
                })
                .collect())
        }
    }
}

pub(crate) fn grid2d(count: usize) -> Vec<Direction> {
    (0..count)
        .map(|j| Direction::angle(2.0 * PI * j as f64 / count as f64))
        .collect()
}

pub(crate) fn fibonacci_sphere(count: usize) -> Vec<Direction> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Direction::new(vec![r * phi.cos(), r * phi.sin(), z]).expect("nonzero")
        })
        .collect()
}

/// Orthonormal basis of the complement of the span of `normals` in R^k,
/// obtained by Gram-Schmidt against the coordinate axes.
pub(crate) fn orthogonal_complement(normals: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut spanned: Vec<Vec<f64>> = Vec::new();
    for n in normals {
        if let Some(u) = orthogonalize(n, &spanned) {
            spanned.push(u);
        }
    }
    for i in 0..k {
        let mut e = vec![0.0; k];
        e[i] = 1.0;
        if let Some(u) = orthogonalize(&e, &spanned) {
            spanned.push(u.clone());
            basis.push(u);
        }
    }
    basis
}

pub(crate) fn orthogonalize(v: &[f64], against: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut w = v.to_vec();
    // two passes for numerical orthogonality
    for _ in 0..2 {
        for u in against {
            let p: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= p * ui;
            }
        }
    }
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    (norm > 1e-10 * scale).then(|| w.into_iter().map(|x| x / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_of_four() {
        let d = sample_directions(2, 4, Strategy::Grid2d, 0).unwrap();
        let want = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (got, w) in d.iter().zip(want) {
            assert!((got[0] - w[0]).abs() < 1e-15 && (got[1] - w[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn fibonacci_unit_and_distinct() {
        let d = sample_directions(3, 100, Strategy::Fibonacci3d, 0).unwrap();
        assert_eq!(d.len(), 100);
        for (i, a) in d.iter().enumerate() {
            assert!((a.dot(a.as_slice()) - 1.0).abs() < 1e-12);
            for b in &d[i + 1..] {
                let dist: f64 = a
                    .as_slice()
                    .iter()
                    .zip(b.as_slice())
                    .map(|(x, y)| (x - y).powi(2))
                    .sum();
                assert!(dist > 1e-6);
            }
        }
    }

    #[test]
    fn seeded_is_deterministic() {
        let a = sample_directions(5, 50, Strategy::SeededUniform, 7).unwrap();
        let b = sample_directions(5, 50, Strategy::SeededUniform, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_directions(5, 50, Strategy::SeededUniform, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn strategy_dimension_checks() {
        assert!(matches!(
            sample_directions(3, 4, Strategy::Grid2d, 0),
            Err(JnrError::StrategyDimensionMismatch { .. })
        ));
        assert!(matches!(
            sample_directions(2, 4, Strategy::Fibonacci3d, 0),
            Err(JnrError::StrategyDimensionMismatch { .. })
        ));
    }

    #[test]
    fn complement_is_orthonormal() {
        let n = Direction::new(vec![1.0, 2.0, 3.0]).unwrap();
        let basis = orthogonal_complement(&[n.to_vec()], 3);
        assert_eq!(basis.len(), 2);
        for u in &basis {
            assert!(n.dot(u).abs() < 1e-14);
        }
        let cross: f64 = basis[0].iter().zip(&basis[1]).map(|(a, b)| a * b).sum();
        assert!(cross.abs() < 1e-14);
    }
}
