//! Inner (vertex) and outer (halfspace) polytope approximations of a
//! convex body known through boundary samples and support values.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::directions::Direction;
use super::hull::{convex_hull, extent};
use crate::error::{JnrError, Result};

/// Vertices closer than this (relative to the point cloud extent) are merged.
pub const VERTEX_MERGE_TOL: f64 = 1e-9;
const HULL_REL_TOL: f64 = 1e-12;
const INTERIOR_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Direction,
    pub offset: f64,
}

impl Facet {
    /// `normal . x - offset`; nonpositive inside.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
    /// Dimension of the affine hull of the vertices.
    pub affine_dim: usize,
    /// Set when `affine_dim` is smaller than the ambient dimension.
    pub degenerate: bool,
}

impl Polytope {
    pub fn ambient_dim(&self) -> usize {
        self.vertices.first().map_or(0, |v| v.len())
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|f| f.violation(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.max_violation(x) <= tol
    }
}

fn dedup_points(points: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut window_start = 0;
    for p in sorted {
        while window_start < out.len() && out[window_start][0] < p[0] - tol {
            window_start += 1;
        }
        let dup = out[window_start..].iter().any(|q| {
            q.iter()
                .zip(p.iter())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
                <= tol
        });
        if !dup {
            out.push(p.clone());
        }
    }
    out
}

fn validate_points(points: &[Vec<f64>]) -> Result<usize> {
    let k = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| JnrError::InvalidArgument("empty point set".into()))?;
    if k == 0 {
        return Err(JnrError::InvalidArgument("zero-dimensional points".into()));
    }
    for p in points {
        if p.len() != k {
            return Err(JnrError::DimensionMismatch {
                context: "polytope point",
                expected: k,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(JnrError::InvalidArgument("non-finite point".into()));
        }
    }
    Ok(k)
}

/// Convex hull of the given points. For k >= 4 the hull is not enumerated:
/// the (deduplicated) points are returned as the vertex set with no facets.
pub fn inner_polytope(points: &[Vec<f64>]) -> Result<Polytope> {
    let k = validate_points(points)?;
    let scale = extent(points);
    let pts = dedup_points(points, VERTEX_MERGE_TOL * scale);
    if k > 3 {
        return Ok(Polytope {
            vertices: pts,
            facets: Vec::new(),
            affine_dim: k,
            degenerate: false,
        });
    }
    let hull = convex_hull(&pts, HULL_REL_TOL);
    let vertices = hull.vertices.iter().map(|&i| pts[i].clone()).collect();
    let facets = hull
        .facets
        .into_iter()
        .map(|f| Facet {
            normal: Direction::new(f.normal).expect("unit facet normal"),
            offset: f.offset,
        })
        .collect();
    Ok(Polytope {
        vertices,
        facets,
        affine_dim: hull.affine_dim,
        degenerate: hull.affine_dim < k,
    })
}

/// Intersection of the halfspaces `n_i . x <= h_i`, enumerated through the
/// polar dual about `interior`: facets of `conv{n_i / (h_i - n_i . interior)}`
/// correspond to vertices of the intersection.
pub fn outer_polytope(supports: &[(Direction, f64)], interior: &[f64]) -> Result<Polytope> {
    let k = interior.len();
    if supports.is_empty() {
        return Err(JnrError::UnboundedIntersection { k });
    }
    for (n, h) in supports {
        if n.dim() != k {
            return Err(JnrError::DimensionMismatch {
                context: "support direction",
                expected: k,
                found: n.dim(),
            });
        }
        if !h.is_finite() {
            return Err(JnrError::InvalidArgument("non-finite support value".into()));
        }
    }
    if k > 3 {
        return Err(JnrError::InvalidArgument(format!(
            "halfspace vertex enumeration supports k <= 3, got k = {k}"
        )));
    }
    let slacks: Vec<f64> = supports.iter().map(|(n, h)| h - n.dot(interior)).collect();
    let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    if min_slack <= INTERIOR_MARGIN {
        return Err(JnrError::InteriorPointInvalid { margin: min_slack });
    }
    let dual: Vec<Vec<f64>> = supports
        .iter()
        .zip(&slacks)
        .map(|((n, _), b)| n.as_slice().iter().map(|x| x / b).collect())
        .collect();

    let hull = convex_hull(&dual, HULL_REL_TOL);
    if hull.affine_dim < k {
        return Err(JnrError::UnboundedIntersection { k });
    }
    let dual_scale = extent(&dual);
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(hull.facets.len());
    for f in &hull.facets {
        if f.offset <= 1e-12 * dual_scale {
            return Err(JnrError::UnboundedIntersection { k });
        }
        let guess: Vec<f64> = f
            .normal
            .iter()
            .zip(interior)
            .map(|(u, c)| u / f.offset + c)
            .collect();
        vertices.push(refine_vertex(supports, &f.points, guess));
    }
    let scale = extent(&vertices).max(1.0);
    let vertices = dedup_points(&vertices, VERTEX_MERGE_TOL * scale);

    let mut active: Vec<usize> = hull.vertices.clone();
    active.sort_unstable();
    let mut facets: Vec<Facet> = Vec::with_capacity(active.len());
    for i in active {
        let (n, h) = &supports[i];
        if !facets
            .iter()
            .any(|f| f.normal == *n && (f.offset - h).abs() <= 0.0)
        {
            facets.push(Facet {
                normal: n.clone(),
                offset: *h,
            });
        }
    }
    Ok(Polytope {
        vertices,
        facets,
        affine_dim: k,
        degenerate: false,
    })
}

/// Least-squares solve of the active constraints `n_i . x = h_i`; falls back
/// to the dual-facet estimate when the system is rank deficient.
fn refine_vertex(supports: &[(Direction, f64)], active: &[usize], guess: Vec<f64>) -> Vec<f64> {
    let k = guess.len();
    if active.len() < k {
        return guess;
    }
    let a = DMatrix::from_fn(active.len(), k, |r, c| supports[active[r]].0[c]);
    let b = DVector::from_fn(active.len(), |r, _| supports[active[r]].1);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-8 * smax {
        return guess;
    }
    match svd.solve(&b, 0.0) {
        Ok(x) => {
            let x: Vec<f64> = x.iter().copied().collect();
            let err: f64 = x
                .iter()
                .zip(&guess)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            // guard against a facet whose constraint set was mis-assembled
            if err <= 1e-6 * (1.0 + guess.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
                x
            } else {
                guess
            }
        }
        Err(_) => guess,
    }
}
