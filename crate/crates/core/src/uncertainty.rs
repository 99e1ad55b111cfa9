//! Two-sided bounds on variance-based uncertainty functions.
//!
//! Variances are concave functions of the lifted expectations
//! `(<F_1>, <F_1^2>, ...)`. For the sum of two variances the lifted range
//! reduces to `L(X, Y, X^2 + Y^2)` with `u(x, y, z) = z - x^2 - y^2`. A concave
//! function attains its minimum over a polytope at a vertex, so:
//!
//! * sampled boundary points are attainable, and their minimum is an upper
//!   bound on the true minimum (it equals the minimum over the inner hull);
//! * the outer halfspace polytope contains the range, so the minimum over its
//!   vertices is a lower bound.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{
    boundary_with_states, fibonacci_sphere, grid2d, outer_polytope, support_function, Direction,
    ObservableSet, DEFAULT_MAX_DEPTH,
};
use crate::error::{JnrError, Result};
use crate::hermitian::{CVector, HermitianOperator};
use crate::random::{random_unit_vector, rng_for};

/// Negative `<F^2> - <F>^2` down to this slack is clamped to zero; below it
/// the moment pair is rejected.
pub const MOMENT_CLAMP: f64 = 1e-9;
/// Smallest accepted direction count for the sum-of-variances bracket.
pub const MIN_DIRECTIONS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceKind {
    SumOfVariances,
    ProductOfVariances,
}

impl std::str::FromStr for VarianceKind {
    type Err = JnrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" | "sum_of_variances" => Ok(VarianceKind::SumOfVariances),
            "product" | "product_of_variances" => Ok(VarianceKind::ProductOfVariances),
            other => Err(JnrError::InvalidArgument(format!(
                "unknown uncertainty kind {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct UncertaintyProblem {
    pub observables: Vec<HermitianOperator>,
    pub kind: VarianceKind,
    /// `(X, Y, X^2 + Y^2)` for two-observable sums, otherwise `(F_1, F_1^2, ...)`.
    pub lifted_set: ObservableSet,
}

impl UncertaintyProblem {
    /// Whether the lifted set is the reduced `(X, Y, X^2 + Y^2)` triple.
    pub fn is_reduced_sum(&self) -> bool {
        self.kind == VarianceKind::SumOfVariances && self.observables.len() == 2
    }

    /// Variances `<F_i^2> - <F_i>^2` of a pure state.
    pub fn variances_of(&self, psi: &CVector) -> Vec<f64> {
        self.observables
            .iter()
            .map(|f| {
                let m = f.expectation_in(psi);
                let m2 = f.square().expectation_in(psi);
                (m2 - m * m).max(0.0)
            })
            .collect()
    }

    /// The objective evaluated on variances.
    pub fn objective(&self, variances: &[f64]) -> f64 {
        match self.kind {
            VarianceKind::SumOfVariances => variances.iter().sum(),
            VarianceKind::ProductOfVariances => variances.iter().product(),
        }
    }
}

pub fn uncertainty_lifted(
    observables: &[HermitianOperator],
    kind: VarianceKind,
) -> Result<UncertaintyProblem> {
    let first = observables
        .first()
        .ok_or_else(|| JnrError::InvalidArgument("need at least one observable".into()))?;
    let (ops, labels): (Vec<HermitianOperator>, Vec<String>) =
        if kind == VarianceKind::SumOfVariances && observables.len() == 2 {
            let (x, y) = (&observables[0], &observables[1]);
            let z = x.square().add(&y.square())?;
            (
                vec![x.clone(), y.clone(), z],
                vec!["X".into(), "Y".into(), "X^2+Y^2".into()],
            )
        } else {
            let mut ops = Vec::new();
            let mut labels = Vec::new();
            for (i, f) in observables.iter().enumerate() {
                crate::hermitian::check_dim("uncertainty observables", first.dim(), f.dim())?;
                ops.push(f.clone());
                ops.push(f.square());
                labels.push(format!("F{}", i + 1));
                labels.push(format!("F{}^2", i + 1));
            }
            (ops, labels)
        };
    Ok(UncertaintyProblem {
        observables: observables.to_vec(),
        kind,
        lifted_set: ObservableSet::with_labels(ops, labels)?,
    })
}

/// `(f_1, f'_1, ..., f_k, f'_k) -> (f'_1 - f_1^2, ..., f'_k - f_k^2)`.
pub fn variance_map(point: &[f64]) -> Result<Vec<f64>> {
    if !point.len().is_multiple_of(2) || point.is_empty() {
        return Err(JnrError::InvalidArgument(format!(
            "variance map needs an even-length point, got {}",
            point.len()
        )));
    }
    point
        .chunks(2)
        .enumerate()
        .map(|(i, p)| {
            let v = p[1] - p[0] * p[0];
            if v < -MOMENT_CLAMP {
                Err(JnrError::InvalidMomentPair {
                    index: i,
                    second_moment: p[1],
                    mean_squared: p[0] * p[0],
                })
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgminSide {
    InnerVertices,
    OuterVertices,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundBracket {
    pub lower: f64,
    pub upper: f64,
    pub num_directions: usize,
    /// Lifted expectation point attaining `upper`.
    pub argmin_point: Vec<f64>,
    pub argmin_side: ArgminSide,
    /// Variances of the state attaining `upper`.
    pub argmin_variances: Vec<f64>,
    /// Outer-polytope vertex attaining `lower`.
    pub lower_argmin_point: Vec<f64>,
    #[serde(skip)]
    argmin_state: Option<CVector>,
}

impl BoundBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    /// Pure state attaining the upper bound.
    pub fn argmin_state(&self) -> Option<&CVector> {
        self.argmin_state.as_ref()
    }
}

/// Affine parametrization `x = center + basis . y` of the span of a range.
struct ReducedRange {
    center: Vec<f64>,
    /// k x r, orthonormal columns.
    basis: DMatrix<f64>,
    set: Option<ObservableSet>,
}

impl ReducedRange {
    fn new(set: &ObservableSet) -> Result<Self> {
        let k = set.k();
        let d = set.dim();
        let center = set.center();
        let traceless: Vec<HermitianOperator> = set
            .operators()
            .iter()
            .zip(&center)
            .map(|(f, c)| f.shift(-c))
            .collect();
        let gram = DMatrix::from_fn(k, k, |i, j| {
            traceless[i].matrix().dotc(traceless[j].matrix()).re / d as f64
        });
        let eig = SymmetricEigen::new(gram);
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..k)
            .filter(|&i| top > 0.0 && eig.eigenvalues[i] > 1e-12 * top)
            .collect();
        let basis = if keep.len() == k {
            DMatrix::identity(k, k)
        } else {
            let mut cols = keep.clone();
            cols.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            DMatrix::from_fn(k, cols.len(), |r, c| eig.eigenvectors[(r, cols[c])])
        };
        let r = basis.ncols();
        let set = if r == 0 {
            None
        } else {
            let ops = (0..r)
                .map(|j| {
                    let coeffs: Vec<f64> = (0..k).map(|i| basis[(i, j)]).collect();
                    HermitianOperator::linear_combination(&coeffs, &traceless)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(ObservableSet::new(ops)?)
        };
        Ok(Self { center, basis, set })
    }

    fn lift(&self, y: &[f64]) -> Vec<f64> {
        (0..self.center.len())
            .map(|i| self.center[i] + (0..y.len()).map(|j| self.basis[(i, j)] * y[j]).sum::<f64>())
            .collect()
    }

    fn rank(&self) -> usize {
        self.basis.ncols()
    }
}

/// Direction sample on `S^{r-1}`; Fibonacci points are rotated by a seeded
/// random rotation when `seed != 0`.
fn reduced_directions(r: usize, count: usize, seed: u64) -> Result<Vec<Direction>> {
    Ok(match r {
        0 => Vec::new(),
        1 => vec![Direction::axis(1, 0, 1.0), Direction::axis(1, 0, -1.0)],
        2 => grid2d(count),
        3 => {
            let base = fibonacci_sphere(count);
            if seed == 0 {
                base
            } else {
                let mut rng = rng_for(seed, "uncertainty", 0);
                let u = crate::random::random_unitary(&mut rng, 3);
                // a real orthogonal matrix from the real part of a unitary's QR
                let q = DMatrix::from_fn(3, 3, |i, j| u[(i, j)].re).qr().q();
                base.iter()
                    .map(|n| {
                        let v = &q * nalgebra::DVector::from_column_slice(n.as_slice());
                        Direction::new(v.iter().copied().collect())
                    })
                    .collect::<Result<_>>()?
            }
        }
        _ => crate::boundary::sample_directions(
            r,
            count,
            crate::boundary::Strategy::SeededUniform,
            seed,
        )?,
    })
}

struct SideMin {
    value: f64,
    point: Vec<f64>,
    state: Option<CVector>,
}

/// Minimum of `u` over sampled boundary points (attainable, so an upper bound).
fn inner_min(
    set: &ObservableSet,
    reduced: &ReducedRange,
    dirs: &[Direction],
    gap_tol: f64,
    u: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> Result<SideMin> {
    let Some(rset) = &reduced.set else {
        let p = reduced.center.clone();
        return Ok(SideMin {
            value: u(&p),
            point: p,
            state: None,
        });
    };
    let (points, _) = boundary_with_states(rset, dirs, gap_tol, DEFAULT_MAX_DEPTH)?;
    let mut best = SideMin {
        value: f64::INFINITY,
        point: Vec::new(),
        state: None,
    };
    for sp in points {
        let x = set.expectations_of_vector(&sp.state);
        let v = u(&x);
        if v < best.value {
            best = SideMin {
                value: v,
                point: x,
                state: Some(sp.state),
            };
        }
    }
    Ok(best)
}

/// Minimum of `u` over vertices of the outer polytope (a lower bound).
fn outer_min(
    reduced: &ReducedRange,
    dirs: &[Direction],
    gap_tol: f64,
    u: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> Result<SideMin> {
    let Some(rset) = &reduced.set else {
        let p = reduced.center.clone();
        return Ok(SideMin {
            value: u(&p),
            point: p,
            state: None,
        });
    };
    let supports: Vec<(Direction, f64)> = dirs
        .par_iter()
        .map(|n| Ok((n.clone(), support_function(rset, n, gap_tol)?.0)))
        .collect::<Result<_>>()?;
    let poly = outer_polytope(&supports, &vec![0.0; reduced.rank()])?;
    let mut best = SideMin {
        value: f64::INFINITY,
        point: Vec::new(),
        state: None,
    };
    for y in &poly.vertices {
        let x = reduced.lift(y);
        let v = u(&x);
        if v < best.value {
            best = SideMin {
                value: v,
                point: x,
                state: None,
            };
        }
    }
    Ok(best)
}

fn centered(op: &HermitianOperator) -> HermitianOperator {
    op.shift(-op.trace() / op.dim() as f64)
}

/// Bracket on `min (Var X + Var Y)` for explicit reduced-space directions.
///
/// Both observables are centered first; variances do not change, and the
/// result becomes independent of identity shifts.
pub fn maccone_pati_bracket(
    x: &HermitianOperator,
    y: &HermitianOperator,
    directions_per_rank: &dyn Fn(usize) -> Result<Vec<Direction>>,
    gap_tol: f64,
) -> Result<BoundBracket> {
    sum_bracket(x, y, &|reduced, _| directions_per_rank(reduced.rank()), gap_tol)
}

type DirectionPlan<'a> =
    dyn Fn(&ReducedRange, &(dyn Fn(&[f64]) -> f64 + Sync)) -> Result<Vec<Direction>> + 'a;

fn sum_bracket(
    x: &HermitianOperator,
    y: &HermitianOperator,
    plan: &DirectionPlan<'_>,
    gap_tol: f64,
) -> Result<BoundBracket> {
    crate::hermitian::check_dim("uncertainty pair", x.dim(), y.dim())?;
    let problem = uncertainty_lifted(&[centered(x), centered(y)], VarianceKind::SumOfVariances)?;
    let set = &problem.lifted_set;
    let reduced = ReducedRange::new(set)?;
    let u = |p: &[f64]| p[2] - p[0] * p[0] - p[1] * p[1];
    let dirs = plan(&reduced, &u)?;
    let inner = inner_min(set, &reduced, &dirs, gap_tol, &u)?;
    let outer = outer_min(&reduced, &dirs, gap_tol, &u)?;
    let original = uncertainty_lifted(&[x.clone(), y.clone()], VarianceKind::SumOfVariances)?;
    let (argmin_point, argmin_variances) = match &inner.state {
        Some(psi) => (
            original.lifted_set.expectations_of_vector(psi),
            original.variances_of(psi),
        ),
        None => {
            let v = inner.value.max(0.0);
            let mut p = inner.point.clone();
            p[0] += x.trace() / x.dim() as f64;
            p[1] += y.trace() / y.dim() as f64;
            (p, vec![v / 2.0, v / 2.0])
        }
    };
    let mut lower_point = outer.point.clone();
    if lower_point.len() == 3 {
        let (cx, cy) = (x.trace() / x.dim() as f64, y.trace() / y.dim() as f64);
        lower_point[2] += 2.0 * (cx * lower_point[0] + cy * lower_point[1]) + cx * cx + cy * cy;
        lower_point[0] += cx;
        lower_point[1] += cy;
    }
    Ok(BoundBracket {
        lower: outer.value.min(inner.value),
        upper: inner.value,
        num_directions: dirs.len(),
        argmin_point,
        argmin_side: ArgminSide::InnerVertices,
        argmin_variances,
        lower_argmin_point: lower_point,
        argmin_state: inner.state,
    })
}

/// Bracket on `c_+ = min (Var X + Var Y)` from `num_directions` support
/// directions of `L(X, Y, X^2 + Y^2)`. For a full-rank triple half of the
/// budget is a uniform sphere sample and the rest refines the outer polytope
/// where it undercuts the current upper bound.
pub fn maccone_pati_bounds(
    x: &HermitianOperator,
    y: &HermitianOperator,
    num_directions: usize,
    gap_tol: f64,
    seed: u64,
) -> Result<BoundBracket> {
    if num_directions < MIN_DIRECTIONS {
        return Err(JnrError::InvalidArgument(format!(
            "need at least {MIN_DIRECTIONS} directions, got {num_directions}"
        )));
    }
    let plan = |reduced: &ReducedRange, u: &(dyn Fn(&[f64]) -> f64 + Sync)| {
        if reduced.rank() != 3 {
            return reduced_directions(reduced.rank(), num_directions, seed);
        }
        let base = reduced_directions(3, (num_directions / 2).max(MIN_DIRECTIONS), seed)?;
        refine_directions(reduced, base, num_directions, gap_tol, u)
    };
    sum_bracket(x, y, &plan, gap_tol)
}

const REFINE_ROUNDS: usize = 8;

/// Cutting-plane refinement up to `total` directions. Each round cuts off
/// the outer vertices with the lowest objective, using the normalized sum of
/// the facet normals tight at each vertex.
fn refine_directions(
    reduced: &ReducedRange,
    mut dirs: Vec<Direction>,
    total: usize,
    gap_tol: f64,
    u: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> Result<Vec<Direction>> {
    let Some(rset) = &reduced.set else {
        return Ok(dirs);
    };
    let mut supports: Vec<(Direction, f64)> = dirs
        .par_iter()
        .map(|n| Ok((n.clone(), support_function(rset, n, gap_tol)?.0)))
        .collect::<Result<_>>()?;
    for round in 0..REFINE_ROUNDS {
        let remaining = total.saturating_sub(dirs.len());
        if remaining == 0 {
            break;
        }
        let poly = outer_polytope(&supports, &vec![0.0; reduced.rank()])?;
        let mut candidates: Vec<(f64, &Vec<f64>)> = poly
            .vertices
            .iter()
            .map(|v| (u(&reduced.lift(v)), v))
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        let batch = remaining.div_ceil(REFINE_ROUNDS - round);
        let mut added = Vec::new();
        for (_, v) in candidates {
            if added.len() == batch {
                break;
            }
            let mut sum = vec![0.0; v.len()];
            for (n, h) in &supports {
                if (n.dot(v) - h).abs() <= 1e-9 * (1.0 + h.abs()) {
                    sum.iter_mut().zip(n.as_slice()).for_each(|(s, x)| *s += x);
                }
            }
            let Ok(cut) = Direction::new(sum) else {
                continue;
            };
            let fresh = |d: &Direction| d.dot(cut.as_slice()) < 1.0 - 1e-12;
            if dirs.iter().all(fresh) && added.iter().all(fresh) {
                added.push(cut);
            }
        }
        if added.is_empty() {
            break;
        }
        let new_supports: Vec<(Direction, f64)> = added
            .par_iter()
            .map(|n| Ok((n.clone(), support_function(rset, n, gap_tol)?.0)))
            .collect::<Result<_>>()?;
        supports.extend(new_supports);
        dirs.extend(added);
    }
    Ok(dirs)
}

/// Bracket for any lifted problem. Two-observable sums use the reduced
/// triple; other problems bound each variance separately from below on the
/// planar range `L(F_i, F_i^2)` and take the minimum of the objective over
/// sampled boundary points of the full lift from above.
pub fn uncertainty_bracket(
    problem: &UncertaintyProblem,
    num_directions: usize,
    gap_tol: f64,
    seed: u64,
) -> Result<BoundBracket> {
    if problem.is_reduced_sum() {
        return maccone_pati_bounds(
            &problem.observables[0],
            &problem.observables[1],
            num_directions,
            gap_tol,
            seed,
        );
    }
    if num_directions < MIN_DIRECTIONS {
        return Err(JnrError::InvalidArgument(format!(
            "need at least {MIN_DIRECTIONS} directions, got {num_directions}"
        )));
    }
    let objective = |p: &[f64]| -> f64 {
        let vars: Vec<f64> = p.chunks(2).map(|c| (c[1] - c[0] * c[0]).max(0.0)).collect();
        problem.objective(&vars)
    };
    let set = &problem.lifted_set;
    let reduced = ReducedRange::new(set)?;
    let dirs = reduced_directions(reduced.rank(), num_directions, seed)?;
    let inner = inner_min(set, &reduced, &dirs, gap_tol, &objective)?;

    let mut per_component = Vec::new();
    let mut lower_point = Vec::new();
    for f in &problem.observables {
        let c = centered(f);
        let pair = ObservableSet::new(vec![c.clone(), c.square()])?;
        let red = ReducedRange::new(&pair)?;
        let d2 = reduced_directions(red.rank(), num_directions, seed)?;
        let var = |p: &[f64]| p[1] - p[0] * p[0];
        let m = outer_min(&red, &d2, gap_tol, &var)?;
        per_component.push(m.value.max(0.0));
        let shift = f.trace() / f.dim() as f64;
        lower_point.push(m.point[0] + shift);
        lower_point.push(m.point[1] + 2.0 * shift * m.point[0] + shift * shift);
    }
    let lower = problem.objective(&per_component).min(inner.value);
    let (argmin_point, argmin_variances) = match &inner.state {
        Some(psi) => (set.expectations_of_vector(psi), problem.variances_of(psi)),
        None => (inner.point.clone(), variance_map(&inner.point)?),
    };
    Ok(BoundBracket {
        lower,
        upper: inner.value,
        num_directions: dirs.len(),
        argmin_point,
        argmin_side: ArgminSide::InnerVertices,
        argmin_variances,
        lower_argmin_point: lower_point,
        argmin_state: inner.state,
    })
}

/// Variances at the bracket's attaining point and their objective value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinUncertainty {
    pub variances: Vec<f64>,
    pub value: f64,
}

pub fn min_uncertainty_point(problem: &UncertaintyProblem, bracket: &BoundBracket) -> MinUncertainty {
    let variances = match bracket.argmin_state() {
        Some(psi) => problem.variances_of(psi),
        None => bracket.argmin_variances.clone(),
    };
    let value = problem.objective(&variances);
    MinUncertainty { variances, value }
}

/// Smallest `Var X + Var Y` over `samples` seeded random pure states. Half
/// are Haar-random; the other half are drawn in shrinking neighborhoods of
/// the best state so far. Always an upper bound on the true minimum.
pub fn sampled_variance_sum(
    x: &HermitianOperator,
    y: &HermitianOperator,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    crate::hermitian::check_dim("uncertainty pair", x.dim(), y.dim())?;
    let (x2, y2) = (x.square(), y.square());
    let value = |psi: &CVector| {
        let (mx, my) = (x.expectation_in(psi), y.expectation_in(psi));
        x2.expectation_in(psi) - mx * mx + y2.expectation_in(psi) - my * my
    };
    const CHUNK: usize = 4096;
    const ROUNDS: usize = 24;
    let best_of = |count: usize, stream: u64, draw: &(dyn Fn(&mut crate::random::SeededRng) -> CVector + Sync)| {
        (0..count.div_ceil(CHUNK))
            .into_par_iter()
            .map(|ci| {
                let mut rng = rng_for(seed, "variance_oracle", stream * 1_000_003 + ci as u64);
                let mut best = (f64::INFINITY, None);
                for _ in 0..CHUNK.min(count - ci * CHUNK) {
                    let psi = draw(&mut rng);
                    let v = value(&psi);
                    if v < best.0 {
                        best = (v, Some(psi));
                    }
                }
                best
            })
            .reduce(|| (f64::INFINITY, None), |a, b| if b.0 < a.0 { b } else { a })
    };
    let dim = x.dim();
    let uniform = samples.div_ceil(2);
    let (mut best, mut state) = best_of(uniform, 0, &|rng| random_unit_vector(rng, dim));
    let per_round = (samples - uniform) / ROUNDS;
    for round in 0..ROUNDS {
        let Some(center) = state.clone() else { break };
        let scale = 0.5 * 0.6f64.powi(round as i32);
        let (v, psi) = best_of(per_round, 1 + round as u64, &|rng| {
            let step = random_unit_vector(rng, dim).scale(scale);
            let w = &center + step;
            let n = w.norm();
            w.unscale(n)
        });
        if v < best {
            best = v;
            state = psi;
        }
    }
    Ok(best)
}
