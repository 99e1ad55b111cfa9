//! Boundary points of joint numerical ranges from support-function
//! evaluations, with recursive resolution of degenerate exposed faces.

mod directions;
pub(crate) mod hull;
mod polytope;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{JnrError, Result};
use crate::hermitian::{
    compress_unchecked, eig_hermitian, top_eigenspace, CMatrix, CVector, DensityMatrix,
    EigenspaceProjector, HermitianOperator,
};

pub use directions::{sample_directions, Direction, Strategy};
pub(crate) use directions::{fibonacci_sphere, grid2d, orthogonal_complement};
pub use polytope::{inner_polytope, outer_polytope, Facet, Polytope, VERTEX_MERGE_TOL};

/// Default number of nested degenerate-face refinements.
pub const DEFAULT_MAX_DEPTH: usize = 2;

/// Ordered collection of same-dimension Hermitian operators `(F_1, ..., F_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet {
    operators: Vec<HermitianOperator>,
    labels: Vec<String>,
}

impl ObservableSet {
    pub fn new(operators: Vec<HermitianOperator>) -> Result<Self> {
        let labels = (1..=operators.len()).map(|i| format!("F{i}")).collect();
        Self::with_labels(operators, labels)
    }

    pub fn with_labels(operators: Vec<HermitianOperator>, labels: Vec<String>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| JnrError::InvalidArgument("observable set needs k >= 1".into()))?;
        let d = first.dim();
        for op in &operators {
            if op.dim() != d {
                return Err(JnrError::DimensionMismatch {
                    context: "observable set",
                    expected: d,
                    found: op.dim(),
                });
            }
        }
        if labels.len() != operators.len() {
            return Err(JnrError::DimensionMismatch {
                context: "observable labels",
                expected: operators.len(),
                found: labels.len(),
            });
        }
        Ok(Self { operators, labels })
    }

    pub fn k(&self) -> usize {
        self.operators.len()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn operators(&self) -> &[HermitianOperator] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `sum_i n_i F_i`.
    pub fn combination(&self, coeffs: &[f64]) -> Result<HermitianOperator> {
        HermitianOperator::linear_combination(coeffs, &self.operators)
    }

    /// Expectation vector of a (normalized) pure state.
    pub fn expectations_of_vector(&self, v: &CVector) -> Vec<f64> {
        self.operators.iter().map(|f| f.expectation_in(v)).collect()
    }

    pub fn expectations(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.operators
            .iter()
            .map(|f| crate::hermitian::expectation(f, rho))
            .collect()
    }

    /// Image of the maximally mixed state, `(Tr F_i / d)_i`.
    pub fn center(&self) -> Vec<f64> {
        let d = self.dim() as f64;
        self.operators.iter().map(|f| f.trace() / d).collect()
    }

    /// Operators restricted to the span of orthonormal `basis` columns.
    pub fn compress(&self, basis: &CMatrix) -> Result<Self> {
        let ops = self
            .operators
            .iter()
            .map(|f| crate::hermitian::compress(f, basis))
            .collect::<Result<Vec<_>>>()?;
        Self::with_labels(ops, self.labels.clone())
    }

    fn compress_trusted(&self, basis: &CMatrix) -> Vec<HermitianOperator> {
        self.operators
            .iter()
            .map(|f| compress_unchecked(f, basis))
            .collect()
    }

    pub fn check_direction(&self, n: &Direction) -> Result<()> {
        if n.dim() == self.k() {
            Ok(())
        } else {
            Err(JnrError::DimensionMismatch {
                context: "direction",
                expected: self.k(),
                found: n.dim(),
            })
        }
    }
}

/// A point of the JNR boundary together with the direction that exposed it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub point: Vec<f64>,
    pub direction: Direction,
    /// `lambda_max(n . F)`.
    pub support_value: f64,
    /// Multiplicity of `lambda_max(n . F)`.
    pub multiplicity: usize,
    /// Number of face refinements used to reach the point (0 for exposed points).
    pub depth: usize,
}

/// Returns `lambda_max(n . F)` and its eigenspace projector.
pub fn support_function(
    set: &ObservableSet,
    n: &Direction,
    gap_tol: f64,
) -> Result<(f64, EigenspaceProjector)> {
    set.check_direction(n)?;
    let h = set.combination(n.as_slice())?;
    let eig = eig_hermitian(&h)?;
    let proj = top_eigenspace(&eig, gap_tol);
    Ok((proj.eigenvalue, proj))
}

/// Two-operator sweep over `num_angles` uniform angles. Degenerate top
/// eigenspaces contribute the two endpoints of their image segment, ordered
/// along the counterclockwise tangent.
pub fn boundary_sweep_2d(
    x: &HermitianOperator,
    y: &HermitianOperator,
    num_angles: usize,
    gap_tol: f64,
) -> Result<Vec<BoundaryPoint>> {
    if num_angles < 3 {
        return Err(JnrError::InvalidArgument(format!(
            "sweep needs at least 3 angles, got {num_angles}"
        )));
    }
    let set = ObservableSet::new(vec![x.clone(), y.clone()])?;
    let chunks: Vec<Vec<BoundaryPoint>> = grid2d(num_angles)
        .into_par_iter()
        .map(|n| -> Result<Vec<BoundaryPoint>> {
            let (value, proj) = support_function(&set, &n, gap_tol)?;
            let base = |point: Vec<f64>, depth| BoundaryPoint {
                point,
                direction: n.clone(),
                support_value: value,
                multiplicity: proj.multiplicity,
                depth,
            };
            if proj.multiplicity == 1 {
                let v = proj.basis.column(0).into_owned();
                return Ok(vec![base(set.expectations_of_vector(&v), 0)]);
            }
            let compressed = set.compress_trusted(&proj.basis);
            let tangent = [-n[1], n[0]];
            let t = HermitianOperator::linear_combination(&tangent, &compressed)?;
            let eig = eig_hermitian(&t)?;
            let ends = [eig.vector(0), eig.vector(eig.eigenvalues.len() - 1)];
            let mut pts: Vec<BoundaryPoint> = ends
                .iter()
                .map(|w| base(compressed.iter().map(|c| c.expectation_in(w)).collect(), 1))
                .collect();
            if eig.width() <= gap_tol * (1.0 + value.abs()) {
                pts.truncate(1);
            }
            Ok(pts)
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Result of the general-k boundary scan.
#[derive(Clone, Debug)]
pub struct GeneralBoundary {
    pub points: Vec<BoundaryPoint>,
    /// Indices of top-level directions whose face could not be fully resolved
    /// within the depth budget.
    pub budget_exceeded: Vec<usize>,
}

/// A boundary point together with the pure state producing it.
#[derive(Clone, Debug)]
pub(crate) struct StatePoint {
    pub point: BoundaryPoint,
    pub state: CVector,
}

pub fn boundary_general(
    set: &ObservableSet,
    directions: &[Direction],
    gap_tol: f64,
    max_depth: usize,
) -> Result<GeneralBoundary> {
    let (pts, exceeded) = boundary_with_states(set, directions, gap_tol, max_depth)?;
    Ok(GeneralBoundary {
        points: pts.into_iter().map(|s| s.point).collect(),
        budget_exceeded: exceeded,
    })
}

/// Number of sub-directions sampled on a degenerate face of dimension >= 2.
pub fn face_sample_count(top_level: usize) -> usize {
    (top_level / 4).max(8)
}

pub(crate) fn boundary_with_states(
    set: &ObservableSet,
    directions: &[Direction],
    gap_tol: f64,
    max_depth: usize,
) -> Result<(Vec<StatePoint>, Vec<usize>)> {
    if max_depth < 1 {
        return Err(JnrError::InvalidArgument("max_depth must be at least 1".into()));
    }
    for n in directions {
        set.check_direction(n)?;
    }
    let sub_count = face_sample_count(directions.len());
    let per_dir: Vec<(Vec<StatePoint>, bool)> = directions
        .par_iter()
        .map(|n| -> Result<(Vec<StatePoint>, bool)> {
            let (value, proj) = support_function(set, n, gap_tol)?;
            let mut out = Vec::new();
            let mut exceeded = false;
            if proj.multiplicity == 1 {
                out.push((proj.basis.column(0).into_owned(), 0));
            } else {
                let face = FaceSearch {
                    set,
                    gap_tol,
                    max_depth,
                    sub_count,
                };
                exceeded = face.resolve(&proj.basis, vec![n.to_vec()], 1, &mut out)?;
            }
            let states = out
                .into_iter()
                .map(|(state, depth)| StatePoint {
                    point: BoundaryPoint {
                        point: set.expectations_of_vector(&state),
                        direction: n.clone(),
                        support_value: value,
                        multiplicity: proj.multiplicity,
                        depth,
                    },
                    state,
                })
                .collect();
            Ok((states, exceeded))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::new();
    let mut exceeded = Vec::new();
    for (i, (pts, ex)) in per_dir.into_iter().enumerate() {
        points.extend(pts);
        if ex {
            exceeded.push(i);
        }
    }
    Ok((points, exceeded))
}

struct FaceSearch<'a> {
    set: &'a ObservableSet,
    gap_tol: f64,
    max_depth: usize,
    sub_count: usize,
}

impl FaceSearch<'_> {
    /// Emits states spanning the image of the face with eigenspace `basis`
    /// (d x m columns), exposed by `normals`. Returns true when some
    /// sub-face remained degenerate at the depth limit.
    fn resolve(
        &self,
        basis: &CMatrix,
        normals: Vec<Vec<f64>>,
        depth: usize,
        out: &mut Vec<(CVector, usize)>,
    ) -> Result<bool> {
        let k = self.set.k();
        let tangents = self.tangent_directions(&normals, depth);
        if tangents.is_empty() {
            out.push((basis.column(0).into_owned(), depth));
            return Ok(false);
        }
        let compressed = self.set.compress_trusted(basis);
        let mut exceeded = false;
        for t in tangents {
            let op = HermitianOperator::linear_combination(&t, &compressed)?;
            let eig = eig_hermitian(&op)?;
            let sub = top_eigenspace(&eig, self.gap_tol);
            let lifted = basis * &sub.basis;
            if sub.multiplicity == 1 {
                out.push((lifted.column(0).into_owned(), depth));
            } else if depth < self.max_depth && normals.len() + 1 < k {
                let mut nn = normals.clone();
                nn.push(t);
                exceeded |= self.resolve(&lifted, nn, depth + 1, out)?;
            } else if normals.len() + 1 >= k {
                // all directions exhausted: the sub-face is a single point
                out.push((lifted.column(0).into_owned(), depth));
            } else {
                out.push((lifted.column(0).into_owned(), depth));
                exceeded = true;
            }
        }
        Ok(exceeded)
    }

    fn tangent_directions(&self, normals: &[Vec<f64>], depth: usize) -> Vec<Vec<f64>> {
        let k = self.set.k();
        if k == 2 && normals.len() == 1 {
            let n = &normals[0];
            let t = vec![-n[1], n[0]];
            return vec![t.iter().map(|x| -x).collect(), t];
        }
        let comp = orthogonal_complement(normals, k);
        let combine = |coeffs: &[f64]| -> Vec<f64> {
            let mut v = vec![0.0; k];
            for (c, u) in coeffs.iter().zip(&comp) {
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi += c * ui;
                }
            }
            v
        };
        match comp.len() {
            0 => Vec::new(),
            1 => vec![comp[0].iter().map(|x| -x).collect(), comp[0].clone()],
            2 => grid2d(self.sub_count)
                .iter()
                .map(|a| combine(a.as_slice()))
                .collect(),
            c => {
                let seed = crate::random::derive_seed(0, "face-directions", depth as u64);
                sample_directions(c, self.sub_count, Strategy::SeededUniform, seed)
                    .expect("valid sampling request")
                    .iter()
                    .map(|a| combine(a.as_slice()))
                    .collect()
            }
        }
    }
}
