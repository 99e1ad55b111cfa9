//! Flat boundary parts and the qutrit classification of joint numerical ranges.
//!
//! A flat part is the image of a degenerate top eigenspace. For a
//! two-dimensional eigenspace the image of its Bloch ball is an affine image
//! of a ball: a filled ellipse, or a segment when the linear part has rank one.
//!
//! Degenerate directions are isolated points (or curves) on the sphere of
//! directions, so a finite grid generally misses them. Detection therefore
//! seeds from grid-local minima of the top spectral gap and refines each seed
//! with a first-order degenerate perturbation step, which drives the two top
//! levels together when a genuine crossing exists.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::boundary::{fibonacci_sphere, grid2d, orthogonal_complement, Direction, ObservableSet};
use crate::error::{JnrError, Result};
use crate::hermitian::{
    compress, compress_unchecked, eig_hermitian, CMatrix, EigenDecomposition, HermitianOperator,
};

/// Singular values of the Bloch-image map below this (times the operator
/// scale) count as zero.
pub const SEGMENT_RANK_TOL: f64 = 1e-7;
/// Flat parts whose carriers agree to this (times the operator scale) are merged.
pub const DEDUP_TOL: f64 = 1e-7;
/// Default direction grid for two observables.
pub const K2_GRID: usize = 2048;
/// Default direction count for three observables.
pub const K3_GRID: usize = 8192;

const DEGENERATE_GAP: f64 = 1e-9;
const COMMUTING_TOL: f64 = 1e-10;
const NEWTON_ITERS: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatKind {
    Segment,
    Ellipse,
    /// Image of an eigenspace of dimension three or more with a
    /// two-dimensional (or larger) affine span.
    FilledEllipseDegenerate,
}

/// Affine subspace `point + span(spanning)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Carrier {
    pub point: Vec<f64>,
    pub spanning: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Extent {
    Segment { endpoints: [Vec<f64>; 2] },
    /// Filled ellipse `center + sum_j t_j a_j`, `|t| <= 1`, semi-axis vectors `a_j`.
    Ellipse { center: Vec<f64>, semi_axes: Vec<Vec<f64>> },
    /// Bounding half-widths of a higher-multiplicity face along its carrier.
    Region {
        center: Vec<f64>,
        half_widths: Vec<(f64, f64)>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatPart {
    pub kind: FlatKind,
    pub carrier: Carrier,
    pub extent: Extent,
    /// Supporting direction; unknown when built from a bare eigenspace.
    pub direction: Option<Direction>,
    #[serde(skip)]
    shape: Vec<f64>,
}

impl FlatPart {
    /// Sample points covering the flat part (endpoints, or rim and center).
    pub fn sample_points(&self, count: usize) -> Vec<Vec<f64>> {
        match &self.extent {
            Extent::Segment { endpoints } => {
                let n = count.max(2);
                (0..n)
                    .map(|i| {
                        let t = i as f64 / (n - 1) as f64;
                        endpoints[0]
                            .iter()
                            .zip(&endpoints[1])
                            .map(|(a, b)| a + t * (b - a))
                            .collect()
                    })
                    .collect()
            }
            Extent::Ellipse { center, semi_axes } => {
                let mut pts = vec![center.clone()];
                for i in 0..count.max(4) {
                    let phi = 2.0 * std::f64::consts::PI * i as f64 / count.max(4) as f64;
                    let coeffs = [phi.cos(), phi.sin()];
                    let mut p = center.clone();
                    for (c, a) in coeffs.iter().zip(semi_axes) {
                        for (pi, ai) in p.iter_mut().zip(a) {
                            *pi += c * ai;
                        }
                    }
                    pts.push(p);
                }
                pts
            }
            Extent::Region { center, .. } => vec![center.clone()],
        }
    }

    fn center(&self) -> &[f64] {
        match &self.extent {
            Extent::Segment { .. } => &self.carrier.point,
            Extent::Ellipse { center, .. } | Extent::Region { center, .. } => center,
        }
    }

    fn same_carrier(&self, other: &FlatPart, tol: f64) -> bool {
        if self.kind != other.kind || self.shape.len() != other.shape.len() {
            return false;
        }
        let dc = dist(self.center(), other.center());
        let ds = self
            .shape
            .iter()
            .zip(&other.shape)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        dc <= tol && ds <= tol
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Largest spectral width among the operators, floored at a tiny positive value.
fn operator_scale(set: &ObservableSet) -> Result<f64> {
    let mut s: f64 = 0.0;
    for f in set.operators() {
        s = s.max(eig_hermitian(f)?.width());
    }
    Ok(if s > 0.0 { s } else { 1.0 })
}

/// Bloch components `(a_x, a_y, a_z)` of the traceless part of a 2x2 Hermitian matrix.
fn bloch(c: &CMatrix) -> [f64; 3] {
    [c[(0, 1)].re, -c[(0, 1)].im, 0.5 * (c[(0, 0)].re - c[(1, 1)].re)]
}

/// Image of the Bloch ball of span(`basis`) under the expectation map.
pub fn ellipse_from_eigenspace(set: &ObservableSet, basis: &CMatrix) -> Result<FlatPart> {
    if basis.ncols() != 2 {
        return Err(JnrError::InvalidArgument(format!(
            "eigenspace basis must have 2 columns, got {}",
            basis.ncols()
        )));
    }
    let compressed = set
        .operators()
        .iter()
        .map(|f| compress(f, basis))
        .collect::<Result<Vec<_>>>()?;
    let scale = operator_scale(set)?;
    bloch_image(&compressed, scale)
}

fn bloch_image(compressed: &[HermitianOperator], scale: f64) -> Result<FlatPart> {
    let k = compressed.len();
    let center: Vec<f64> = compressed.iter().map(|c| c.trace() / 2.0).collect();
    let lin = DMatrix::from_fn(k, 3, |i, j| bloch(compressed[i].matrix())[j]);
    let svd = lin.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut sv: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    sv.sort_by(|a, b| b.0.total_cmp(&a.0));
    let rank = sv.iter().filter(|(s, _)| *s > SEGMENT_RANK_TOL * scale).count();
    let axis = |j: usize| -> Vec<f64> {
        let (s, col) = sv[j];
        (0..k).map(|r| s * u[(r, col)]).collect()
    };
    let shape_m = &lin * lin.transpose();
    let shape: Vec<f64> = shape_m.iter().copied().collect();
    let unit = |v: &[f64]| -> Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect()
    };
    match rank {
        1 => {
            let a = axis(0);
            let p0: Vec<f64> = center.iter().zip(&a).map(|(c, x)| c - x).collect();
            let p1: Vec<f64> = center.iter().zip(&a).map(|(c, x)| c + x).collect();
            Ok(FlatPart {
                kind: FlatKind::Segment,
                carrier: Carrier {
                    point: center.clone(),
                    spanning: vec![unit(&a)],
                },
                extent: Extent::Segment {
                    endpoints: [p0, p1],
                },
                direction: None,
                shape,
            })
        }
        2 => {
            let axes = vec![axis(0), axis(1)];
            Ok(FlatPart {
                kind: FlatKind::Ellipse,
                carrier: Carrier {
                    point: center.clone(),
                    spanning: axes.iter().map(|a| unit(a)).collect(),
                },
                extent: Extent::Ellipse {
                    center,
                    semi_axes: axes,
                },
                direction: None,
                shape,
            })
        }
        r => Err(JnrError::NotAFlatPart { rank: r }),
    }
}

/// Face image for an eigenspace of dimension m > 2: carrier from the
/// principal directions of the traceless parts, extent from the numerical
/// range of the compressed operators along each of them.
fn region_image(compressed: &[HermitianOperator], scale: f64) -> Result<Option<FlatPart>> {
    let k = compressed.len();
    let m = compressed[0].dim();
    let center: Vec<f64> = compressed.iter().map(|c| c.trace() / m as f64).collect();
    // rows: traceless parts flattened to real coordinates
    let cols = 2 * m * m;
    let lin = DMatrix::from_fn(k, cols, |i, j| {
        let mat = compressed[i].shift(-center[i]);
        let idx = j / 2;
        let z = mat.matrix()[(idx % m, idx / m)];
        if j % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let svd = lin.svd(true, false);
    let u = svd.u.expect("requested U");
    let mut spanning = Vec::new();
    for (col, s) in svd.singular_values.iter().enumerate() {
        if *s > SEGMENT_RANK_TOL * scale {
            spanning.push((0..k).map(|r| u[(r, col)]).collect::<Vec<f64>>());
        }
    }
    if spanning.is_empty() {
        return Ok(None);
    }
    let mut half_widths = Vec::new();
    for dirv in &spanning {
        let op = HermitianOperator::linear_combination(dirv, compressed)?;
        let eig = eig_hermitian(&op)?;
        let c0: f64 = dirv.iter().zip(&center).map(|(a, b)| a * b).sum();
        half_widths.push((eig.min() - c0, eig.max() - c0));
    }
    let kind = if spanning.len() == 1 {
        FlatKind::Segment
    } else {
        FlatKind::FilledEllipseDegenerate
    };
    let extent = if spanning.len() == 1 {
        let (lo, hi) = half_widths[0];
        let at = |t: f64| -> Vec<f64> {
            center.iter().zip(&spanning[0]).map(|(c, u)| c + t * u).collect()
        };
        Extent::Segment {
            endpoints: [at(lo), at(hi)],
        }
    } else {
        Extent::Region {
            center: center.clone(),
            half_widths,
        }
    };
    let mut shape: Vec<f64> = Vec::new();
    if let Extent::Segment { endpoints } = &extent {
        let a: Vec<f64> = endpoints[1]
            .iter()
            .zip(&endpoints[0])
            .map(|(x, y)| 0.5 * (x - y))
            .collect();
        for i in 0..k {
            for j in 0..k {
                shape.push(a[i] * a[j]);
            }
        }
    } else {
        for s in &spanning {
            shape.extend_from_slice(s);
        }
    }
    let point = match &extent {
        Extent::Segment { endpoints } => endpoints[0]
            .iter()
            .zip(&endpoints[1])
            .map(|(a, b)| 0.5 * (a + b))
            .collect(),
        _ => center.clone(),
    };
    Ok(Some(FlatPart {
        kind,
        carrier: Carrier { point, spanning },
        extent,
        direction: None,
        shape,
    }))
}

/// Relative gap between the two largest eigenvalues.
fn top_gap(eig: &EigenDecomposition) -> f64 {
    let n = eig.eigenvalues.len();
    if n < 2 {
        return f64::INFINITY;
    }
    (eig.eigenvalues[n - 1] - eig.eigenvalues[n - 2]) / (1.0 + eig.width())
}

/// Indices of the `count` nearest neighbours of every direction.
fn neighbours(dirs: &[Direction], count: usize) -> Vec<Vec<usize>> {
    let n = dirs.len();
    let k = dirs.first().map_or(0, |d| d.dim());
    if n <= count + 1 {
        return (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dirs[a][k - 1].total_cmp(&dirs[b][k - 1]));
    let keys: Vec<f64> = order.iter().map(|&i| dirs[i][k - 1]).collect();
    // typical spacing on S^{k-1}
    let spacing = (4.0 * std::f64::consts::PI / n as f64).powf(1.0 / (k as f64 - 1.0).max(1.0));
    (0..n)
        .map(|i| {
            let mut radius = 3.0 * spacing;
            loop {
                let z = dirs[i][k - 1];
                let lo = keys.partition_point(|&v| v < z - radius);
                let hi = keys.partition_point(|&v| v <= z + radius);
                let mut cand: Vec<(f64, usize)> = order[lo..hi]
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| (dist(dirs[i].as_slice(), dirs[j].as_slice()), j))
                    .filter(|(d, _)| *d <= radius)
                    .collect();
                if cand.len() >= count || radius > 4.0 {
                    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    return cand.into_iter().take(count).map(|(_, j)| j).collect();
                }
                radius *= 2.0;
            }
        })
        .collect()
}

/// Drives the top two levels of `n . F` together. Returns the refined
/// direction and its relative top gap.
fn refine_degenerate(set: &ObservableSet, start: &Direction) -> Result<(Direction, f64)> {
    let k = set.k();
    let mut n = start.clone();
    let mut eig = eig_hermitian(&set.combination(n.as_slice())?)?;
    let mut gap = top_gap(&eig);
    for _ in 0..NEWTON_ITERS {
        if gap <= 1e-15 {
            break;
        }
        let d = eig.eigenvalues.len();
        let basis = CMatrix::from_fn(d, 2, |r, c| eig.eigenvectors[(r, d - 1 - c)]);
        let blochs: Vec<[f64; 3]> = set
            .operators()
            .iter()
            .map(|f| bloch(compress_unchecked(f, &basis).matrix()))
            .collect();
        let tangents = orthogonal_complement(&[n.to_vec()], k);
        let jac = DMatrix::from_fn(3, tangents.len(), |row, col| {
            (0..k).map(|i| tangents[col][i] * blochs[i][row]).sum::<f64>()
        });
        let level_split = 0.5 * (eig.eigenvalues[d - 1] - eig.eigenvalues[d - 2]);
        let rhs = DVector::from_vec(vec![0.0, 0.0, -level_split]);
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        if smax <= 0.0 {
            break;
        }
        let step = match svd.solve(&rhs, 1e-12 * smax) {
            Ok(s) => s,
            Err(_) => break,
        };
        let mut improved = false;
        let mut alpha = 1.0;
        for _ in 0..30 {
            let mut cand = n.to_vec();
            for (j, t) in tangents.iter().enumerate() {
                for (ci, ti) in cand.iter_mut().zip(t) {
                    *ci += alpha * step[j] * ti;
                }
            }
            let cand = Direction::new(cand)?;
            let ce = eig_hermitian(&set.combination(cand.as_slice())?)?;
            let cg = top_gap(&ce);
            if cg < gap {
                n = cand;
                eig = ce;
                gap = cg;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((n, gap))
}

/// Flat parts of the boundary of `L(set)` found from the given directions.
pub fn detect_flat_parts(
    set: &ObservableSet,
    directions: &[Direction],
    gap_tol: f64,
) -> Result<Vec<FlatPart>> {
    use rayon::prelude::*;
    let k = set.k();
    if k < 2 || set.dim() < 2 || directions.is_empty() {
        return Ok(Vec::new());
    }
    for n in directions {
        set.check_direction(n)?;
    }
    let scale = operator_scale(set)?;
    let gaps: Vec<f64> = directions
        .par_iter()
        .map(|n| -> Result<f64> { Ok(top_gap(&eig_hermitian(&set.combination(n.as_slice())?)?)) })
        .collect::<Result<_>>()?;
    let nbrs = neighbours(directions, if k == 2 { 2 } else { 2 * k });
    let seeds: Vec<usize> = (0..directions.len())
        .filter(|&i| {
            nbrs[i]
                .iter()
                .all(|&j| (gaps[i], i) < (gaps[j], j) || gaps[i] <= gap_tol)
        })
        .collect();

    let candidates: Vec<Option<FlatPart>> = seeds
        .par_iter()
        .map(|&i| -> Result<Option<FlatPart>> {
            let (n, gap) = refine_degenerate(set, &directions[i])?;
            if gap > DEGENERATE_GAP.max(gap_tol) {
                return Ok(None);
            }
            let eig = eig_hermitian(&set.combination(n.as_slice())?)?;
            let d = eig.eigenvalues.len();
            let threshold = eig.max() - 1e3 * DEGENERATE_GAP.max(gap_tol) * (1.0 + eig.width());
            let m = eig.eigenvalues.iter().filter(|&&l| l >= threshold).count().max(2);
            let basis = CMatrix::from_fn(d, m, |r, c| eig.eigenvectors[(r, d - m + c)]);
            let compressed: Vec<HermitianOperator> = set
                .operators()
                .iter()
                .map(|f| compress_unchecked(f, &basis))
                .collect();
            let part = if m == 2 {
                match bloch_image(&compressed, scale) {
                    Ok(p) => Some(p),
                    Err(JnrError::NotAFlatPart { .. }) => None,
                    Err(e) => return Err(e),
                }
            } else {
                region_image(&compressed, scale)?
            };
            Ok(part.map(|mut p| {
                p.direction = Some(n);
                p
            }))
        })
        .collect::<Result<_>>()?;

    let mut parts: Vec<FlatPart> = Vec::new();
    for part in candidates.into_iter().flatten() {
        if !parts.iter().any(|q| q.same_carrier(&part, DEDUP_TOL * scale)) {
            parts.push(part);
        }
    }
    Ok(parts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum K2Class {
    /// No flat parts.
    OvalClass0,
    /// One segment.
    OneFlatClass1,
    /// Hull of an ellipse and an outside point: two segments.
    TwoSegmentsClass2,
    /// Commuting pair: a (possibly degenerate) triangle.
    TriangleClass3,
}

impl K2Class {
    pub fn index(self) -> usize {
        match self {
            K2Class::OvalClass0 => 0,
            K2Class::OneFlatClass1 => 1,
            K2Class::TwoSegmentsClass2 => 2,
            K2Class::TriangleClass3 => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JnrClass {
    K2 { label: K2Class },
    K3 { e: usize, s: usize, infinite_segments: bool },
    PolytopeDegenerate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub class: JnrClass,
    pub e: usize,
    pub s: usize,
    pub flat_parts: Vec<FlatPart>,
}

fn commute(a: &HermitianOperator, b: &HermitianOperator) -> bool {
    let scale = 1.0 + a.matrix().norm() * b.matrix().norm();
    a.commutator_norm(b) <= COMMUTING_TOL * scale
}

fn require_qutrit(ops: &[&HermitianOperator]) -> Result<()> {
    for op in ops {
        if op.dim() != 3 {
            return Err(JnrError::WrongDimension {
                expected: 3,
                found: op.dim(),
            });
        }
    }
    Ok(())
}

pub fn classify_k2_qutrit(x: &HermitianOperator, y: &HermitianOperator) -> Result<Classification> {
    require_qutrit(&[x, y])?;
    if commute(x, y) {
        return Ok(Classification {
            class: JnrClass::K2 {
                label: K2Class::TriangleClass3,
            },
            e: 0,
            s: 3,
            flat_parts: Vec::new(),
        });
    }
    let set = ObservableSet::new(vec![x.clone(), y.clone()])?;
    let parts = detect_flat_parts(&set, &grid2d(K2_GRID), crate::hermitian::DEFAULT_GAP_TOL)?;
    let s = parts.iter().filter(|p| p.kind == FlatKind::Segment).count();
    let label = match s {
        0 => K2Class::OvalClass0,
        1 => K2Class::OneFlatClass1,
        2 => K2Class::TwoSegmentsClass2,
        _ => K2Class::TriangleClass3,
    };
    Ok(Classification {
        class: JnrClass::K2 { label },
        e: 0,
        s,
        flat_parts: parts,
    })
}

pub fn classify_k3_qutrit(
    f1: &HermitianOperator,
    f2: &HermitianOperator,
    f3: &HermitianOperator,
) -> Result<Classification> {
    require_qutrit(&[f1, f2, f3])?;
    if commute(f1, f2) && commute(f1, f3) && commute(f2, f3) {
        return Ok(Classification {
            class: JnrClass::PolytopeDegenerate,
            e: 0,
            s: 0,
            flat_parts: Vec::new(),
        });
    }
    let set = ObservableSet::new(vec![f1.clone(), f2.clone(), f3.clone()])?;
    let parts = detect_flat_parts(
        &set,
        &fibonacci_sphere(K3_GRID),
        crate::hermitian::DEFAULT_GAP_TOL,
    )?;
    let e = parts.iter().filter(|p| p.kind == FlatKind::Ellipse).count();
    let segments = parts.iter().filter(|p| p.kind == FlatKind::Segment).count();
    let infinite_segments = segments >= 2;
    let mut s = segments.min(1);
    if e >= 3 && s > 0 {
        log::warn!("found {segments} segment(s) next to {e} ellipses; reporting s = 0");
        s = 0;
    }
    Ok(Classification {
        class: JnrClass::K3 {
            e,
            s,
            infinite_segments: infinite_segments && s > 0,
        },
        e,
        s,
        flat_parts: parts,
    })
}
