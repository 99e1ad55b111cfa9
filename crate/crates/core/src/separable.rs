//! Product-state optimization for the separable numerical range.
//!
//! The seesaw fixes one factor of `|alpha> (x) |beta>`, maximizes over the
//! other with a top eigenvector, and alternates. Every returned value is
//! attained by the returned product state, so it is a lower bound on the
//! product-state maximum; no claim of global optimality is made.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryPoint, Direction, ObservableSet};
use crate::error::{JnrError, Result};
use crate::hermitian::{
    c, check_dim, eig_hermitian, partial_transpose, CMatrix, CVector, DensityMatrix,
    HermitianOperator, Subsystem, C64,
};
use crate::random::{random_unit_vector, rng_for};

const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    pub alpha: CVector,
    pub beta: CVector,
}

impl ProductState {
    pub fn vector(&self) -> CVector {
        self.alpha.kronecker(&self.beta)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::pure(&self.vector())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawParams {
    pub restarts: usize,
    pub max_iters: usize,
    pub conv_tol: f64,
    pub seed: u64,
}

impl Default for SeesawParams {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 500,
            conv_tol: 1e-11,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    pub state: ProductState,
    pub iterations: usize,
    pub restarts_used: usize,
    /// Objective after each full iteration of the winning restart.
    pub trace: Vec<f64>,
}

/// `A_eff[i][j] = sum_{k,l} conj(b_k) H[(i,k),(j,l)] b_l`.
fn reduce_on_b(h: &CMatrix, dims: (usize, usize), b: &CVector) -> HermitianOperator {
    let (da, db) = dims;
    let m = CMatrix::from_fn(da, da, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..db {
            for l in 0..db {
                acc += b[k].conj() * h[(i * db + k, j * db + l)] * b[l];
            }
        }
        acc
    });
    HermitianOperator::from_hermitian_parts(m)
}

/// `B_eff[k][l] = sum_{i,j} conj(a_i) H[(i,k),(j,l)] a_j`.
fn reduce_on_a(h: &CMatrix, dims: (usize, usize), a: &CVector) -> HermitianOperator {
    let (da, db) = dims;
    let m = CMatrix::from_fn(db, db, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..da {
            for j in 0..da {
                acc += a[i].conj() * h[(i * db + k, j * db + l)] * a[j];
            }
        }
        acc
    });
    HermitianOperator::from_hermitian_parts(m)
}

fn top_vector(op: &HermitianOperator) -> Result<(f64, CVector)> {
    let eig = eig_hermitian(op)?;
    let last = eig.eigenvalues.len() - 1;
    Ok((eig.max(), eig.vector(last)))
}

struct Run {
    value: f64,
    state: ProductState,
    iterations: usize,
    trace: Vec<f64>,
}

fn seesaw_once(
    h: &HermitianOperator,
    dims: (usize, usize),
    max_iters: usize,
    conv_tol: f64,
    seed: u64,
    restart: usize,
) -> Result<Run> {
    let mut rng = rng_for(seed, "separable", restart as u64);
    let mut alpha = random_unit_vector(&mut rng, dims.0);
    let mut beta = random_unit_vector(&mut rng, dims.1);
    let m = h.matrix();
    let mut trace = Vec::new();
    let mut value = f64::NEG_INFINITY;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        let (_, a) = top_vector(&reduce_on_b(m, dims, &beta))?;
        alpha = a;
        let (v, b) = top_vector(&reduce_on_a(m, dims, &alpha))?;
        beta = b;
        trace.push(v);
        let gain = v - value;
        value = v;
        if gain < conv_tol {
            break;
        }
    }
    let state = ProductState { alpha, beta };
    let attained = h.expectation_in(&state.vector());
    Ok(Run {
        value: attained,
        state,
        iterations,
        trace,
    })
}

/// Best product-state value of `<H>` found by seeded seesaw restarts.
pub fn max_product_expectation(
    h: &HermitianOperator,
    dims: (usize, usize),
    params: &SeesawParams,
) -> Result<SeesawResult> {
    check_dim("bipartite dimensions", h.dim(), dims.0 * dims.1)?;
    if params.restarts == 0 || params.max_iters == 0 {
        return Err(JnrError::InvalidArgument(
            "seesaw needs at least one restart and one iteration".into(),
        ));
    }
    let runs: Vec<Run> = (0..params.restarts)
        .into_par_iter()
        .map(|r| seesaw_once(h, dims, params.max_iters, params.conv_tol, params.seed, r))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let run = runs.into_iter().nth(best).expect("at least one restart");
    Ok(SeesawResult {
        value: run.value,
        state: run.state,
        iterations: run.iterations,
        restarts_used: params.restarts,
        trace: run.trace,
    })
}

/// Seesaw maximizers of `n . F` over product states, one point per direction.
pub fn separable_boundary(
    set: &ObservableSet,
    dims: (usize, usize),
    directions: &[Direction],
    params: &SeesawParams,
) -> Result<Vec<BoundaryPoint>> {
    check_dim("bipartite dimensions", set.dim(), dims.0 * dims.1)?;
    for n in directions {
        set.check_direction(n)?;
    }
    directions
        .par_iter()
        .enumerate()
        .map(|(i, n)| -> Result<BoundaryPoint> {
            let h = set.combination(n.as_slice())?;
            let p = SeesawParams {
                seed: crate::random::derive_seed(params.seed, "separable_boundary", i as u64),
                ..params.clone()
            };
            let res = max_product_expectation(&h, dims, &p)?;
            let v = res.state.vector();
            Ok(BoundaryPoint {
                point: set.expectations_of_vector(&v),
                direction: n.clone(),
                support_value: res.value,
                multiplicity: 1,
                depth: 0,
            })
        })
        .collect()
}

/// Partial transposes of the maximally entangled projector and of its local
/// rotation by `U (x) 1`.
pub fn bell_witness_pair(u: &CMatrix) -> Result<(HermitianOperator, HermitianOperator)> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(JnrError::DimensionMismatch {
            context: "witness unitary",
            expected: 2,
            found: u.nrows().max(u.ncols()),
        });
    }
    let defect = (u.adjoint() * u - CMatrix::identity(2, 2))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if defect > UNITARY_TOL {
        return Err(JnrError::NonUnitaryInput { deviation: defect });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = CVector::from_vec(vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]);
    let proj = &psi * psi.adjoint();
    let x = partial_transpose(
        &HermitianOperator::from_hermitian_parts(proj.clone()),
        (2, 2),
        Subsystem::B,
    )?;
    let local = u.kronecker(&CMatrix::identity(2, 2));
    let rotated = &local * proj * local.adjoint();
    let xu = partial_transpose(
        &HermitianOperator::from_hermitian_parts(rotated),
        (2, 2),
        Subsystem::B,
    )?;
    Ok((x, xu))
}
