//! Thermal range: expectation values of Gibbs states of `n . F`, each tagged
//! with the generating direction `n` (its fake normal).
//!
//! `exp(-beta n . F)` concentrates on the lowest level, so the zero-temperature
//! limit `b_inf(n)` is the minimizing face of `n`, i.e. the support point of
//! the JNR in direction `-n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{Direction, ObservableSet};
use crate::error::{JnrError, Result};
use crate::hermitian::{
    bottom_eigenspace, boltzmann_weights, eig_hermitian, DensityMatrix, DEFAULT_GAP_TOL,
};

/// Inverse temperature, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(JnrError::InvalidArgument(format!(
                "inverse temperature must be nonnegative, got {value}"
            )));
        }
        Ok(if value.is_infinite() {
            Beta::Infinite
        } else {
            Beta::Finite(value)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Beta {
    type Err = JnrError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "+inf") {
            return Ok(Beta::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| JnrError::InvalidArgument(format!("bad inverse temperature {t:?}")))?;
        Beta::new(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalPoint {
    pub point: Vec<f64>,
    pub fake_normal: Direction,
    pub beta: Beta,
}

/// Gibbs state of `n . F` at `beta`; the equal mixture over the ground
/// eigenspace when `beta` is infinite.
pub fn thermal_state(set: &ObservableSet, n: &Direction, beta: Beta) -> Result<DensityMatrix> {
    set.check_direction(n)?;
    if beta == Beta::Finite(0.0) {
        return Ok(DensityMatrix::maximally_mixed(set.dim()));
    }
    let eig = eig_hermitian(&set.combination(n.as_slice())?)?;
    match beta {
        Beta::Infinite => {
            let ground = bottom_eigenspace(&eig, DEFAULT_GAP_TOL);
            Ok(DensityMatrix::uniform_over(&ground.basis))
        }
        Beta::Finite(b) => {
            Beta::new(b)?;
            let weights = boltzmann_weights(&eig.eigenvalues, b);
            let mut scaled = eig.eigenvectors.clone();
            for (j, &w) in weights.iter().enumerate() {
                scaled.column_mut(j).scale_mut(w);
            }
            Ok(DensityMatrix::from_trusted(
                scaled * eig.eigenvectors.adjoint(),
            ))
        }
    }
}

pub fn thermal_point(set: &ObservableSet, n: &Direction, beta: Beta) -> Result<ThermalPoint> {
    let rho = thermal_state(set, n, beta)?;
    Ok(ThermalPoint {
        point: set.expectations(&rho)?,
        fake_normal: n.clone(),
        beta,
    })
}

/// All `(beta, n)` pairs, beta-major and direction-minor.
pub fn thermal_range_sweep(
    set: &ObservableSet,
    betas: &[Beta],
    directions: &[Direction],
) -> Result<Vec<ThermalPoint>> {
    if betas.is_empty() || directions.is_empty() {
        return Err(JnrError::InvalidArgument(
            "thermal sweep needs at least one beta and one direction".into(),
        ));
    }
    let pairs: Vec<(Beta, &Direction)> = betas
        .iter()
        .flat_map(|&b| directions.iter().map(move |n| (b, n)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(b, n)| thermal_point(set, n, b))
        .collect()
}
