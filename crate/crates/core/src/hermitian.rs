//! Dense complex Hermitian linear algebra: eigendecomposition, eigenspace
//! projectors, density matrices, Gibbs states and bipartite tensor utilities.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{JnrError, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance of the Hermiticity gate.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Default relative gap below which eigenvalues are treated as degenerate.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

const ORTHONORMAL_TOL: f64 = 1e-10;
const DENSITY_TRACE_TOL: f64 = 1e-12;
const DENSITY_POSITIVITY_TOL: f64 = 1e-10;
const EXPECTATION_IMAG_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A dense Hermitian operator. Construction goes through the Hermiticity
/// gate; accepted input is symmetrized to exactly `(H + H^dagger)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(JnrError::DimensionMismatch {
                context: "square operator",
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(JnrError::InvalidArgument(
                "operator dimension must be at least 1".into(),
            ));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(JnrError::InvalidArgument(
                "operator has non-finite entries".into(),
            ));
        }
        let deviation = max_abs(&(&matrix - matrix.adjoint()));
        let tolerance = HERMITICITY_TOL * (1.0 + max_abs(&matrix));
        if deviation > tolerance {
            return Err(JnrError::NonHermitianInput {
                max_deviation: deviation,
                tolerance,
            });
        }
        Ok(Self {
            matrix: symmetrize(&matrix),
        })
    }

    /// Wraps a matrix that is Hermitian by construction (sums, products of
    /// commuting factors, conjugations); only symmetrizes.
    pub(crate) fn from_hermitian_parts(matrix: CMatrix) -> Self {
        Self {
            matrix: symmetrize(&matrix),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(JnrError::DimensionMismatch {
                    context: "operator row",
                    expected: d,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = c(v, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let d = re.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, row) in re.iter().enumerate() {
            if row.len() != d {
                return Err(JnrError::DimensionMismatch {
                    context: "re row",
                    expected: d,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)].re = v;
            }
        }
        if let Some(im) = im {
            if im.len() != d {
                return Err(JnrError::DimensionMismatch {
                    context: "im rows",
                    expected: d,
                    found: im.len(),
                });
            }
            for (i, row) in im.iter().enumerate() {
                if row.len() != d {
                    return Err(JnrError::DimensionMismatch {
                        context: "im row",
                        expected: d,
                        found: row.len(),
                    });
                }
                for (j, &v) in row.iter().enumerate() {
                    m[(i, j)].im = v;
                }
            }
        }
        Self::new(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        Self { matrix: m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self::diagonal(&[0.0, 0.0]).with_entries(&[((0, 1), c(1.0, 0.0)), ((1, 0), c(1.0, 0.0))])
    }

    /// `[[0, i], [-i, 0]]`, the sign convention used throughout this crate.
    pub fn pauli_y() -> Self {
        Self::diagonal(&[0.0, 0.0]).with_entries(&[((0, 1), c(0.0, 1.0)), ((1, 0), c(0.0, -1.0))])
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    fn with_entries(mut self, entries: &[((usize, usize), C64)]) -> Self {
        for &(idx, v) in entries {
            self.matrix[idx] = v;
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            matrix: self.matrix.scale(alpha),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim("operator sum", self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn shift(&self, offset: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)].re += offset;
        }
        Self { matrix: m }
    }

    /// `H^2`, Hermitian for any Hermitian `H`.
    pub fn square(&self) -> Self {
        Self::from_hermitian_parts(&self.matrix * &self.matrix)
    }

    /// `U H U^dagger`.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Result<Self> {
        check_dim("unitary conjugation", self.dim(), unitary.nrows())?;
        Ok(Self::from_hermitian_parts(
            unitary * &self.matrix * unitary.adjoint(),
        ))
    }

    /// `sum_i coeffs[i] * ops[i]`.
    pub fn linear_combination(coeffs: &[f64], ops: &[HermitianOperator]) -> Result<Self> {
        if coeffs.len() != ops.len() {
            return Err(JnrError::DimensionMismatch {
                context: "linear combination",
                expected: ops.len(),
                found: coeffs.len(),
            });
        }
        let d = ops.first().map(|o| o.dim()).ok_or_else(|| {
            JnrError::InvalidArgument("linear combination of zero operators".into())
        })?;
        let mut m = CMatrix::zeros(d, d);
        for (&a, op) in coeffs.iter().zip(ops) {
            check_dim("linear combination", d, op.dim())?;
            if a != 0.0 {
                m += op.matrix.scale(a);
            }
        }
        Ok(Self { matrix: m })
    }

    /// Frobenius norm of `[A, B]`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        (ab - ba).norm()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// Largest entry modulus.
    pub fn max_entry(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && max_abs(&(&self.matrix - &other.matrix)) <= tol
    }

    /// `<v|H|v>` for a (not necessarily normalized) vector.
    pub fn expectation_in(&self, v: &CVector) -> f64 {
        let hv = &self.matrix * v;
        v.dotc(&hv).re
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(JnrError::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}

/// Full spectrum in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn width(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        scaled * self.eigenvectors.adjoint()
    }
}

pub fn eig_hermitian(h: &HermitianOperator) -> Result<EigenDecomposition> {
    let d = h.dim();
    let budget = 1000 + 60 * d;
    let eig = SymmetricEigen::try_new(h.matrix.clone(), f64::EPSILON, budget)
        .ok_or(JnrError::NoConvergence { dim: d })?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(d, d, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Projector onto the eigenspace of an extremal eigenvalue.
#[derive(Clone, Debug)]
pub struct EigenspaceProjector {
    pub projector: HermitianOperator,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// Orthonormal columns spanning the range of `projector`.
    pub basis: CMatrix,
}

impl EigenspaceProjector {
    fn from_columns(eig: &EigenDecomposition, columns: &[usize], eigenvalue: f64) -> Self {
        let d = eig.eigenvectors.nrows();
        let basis = CMatrix::from_fn(d, columns.len(), |r, c| eig.eigenvectors[(r, columns[c])]);
        let projector = HermitianOperator::from_hermitian_parts(&basis * basis.adjoint());
        Self {
            projector,
            eigenvalue,
            multiplicity: columns.len(),
            basis,
        }
    }
}

/// Number of eigenvalues within `gap_tol * (1 + width)` of the top one.
pub fn top_multiplicity(eig: &EigenDecomposition, gap_tol: f64) -> usize {
    let threshold = eig.max() - gap_tol * (1.0 + eig.width());
    eig.eigenvalues.iter().filter(|&&l| l >= threshold).count()
}

pub fn lambda_max_projector(h: &HermitianOperator, gap_tol: f64) -> Result<EigenspaceProjector> {
    let eig = eig_hermitian(h)?;
    Ok(top_eigenspace(&eig, gap_tol))
}

pub(crate) fn top_eigenspace(eig: &EigenDecomposition, gap_tol: f64) -> EigenspaceProjector {
    let d = eig.eigenvalues.len();
    let m = top_multiplicity(eig, gap_tol);
    let columns: Vec<usize> = (d - m..d).collect();
    EigenspaceProjector::from_columns(eig, &columns, eig.max())
}

pub(crate) fn bottom_eigenspace(eig: &EigenDecomposition, gap_tol: f64) -> EigenspaceProjector {
    let threshold = eig.min() + gap_tol * (1.0 + eig.width());
    let columns: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] <= threshold)
        .collect();
    EigenspaceProjector::from_columns(eig, &columns, eig.min())
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let h = HermitianOperator::new(matrix)?;
        let tr = h.trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(JnrError::InvalidDensityMatrix(format!(
                "trace {tr} differs from 1"
            )));
        }
        let eig = eig_hermitian(&h)?;
        if eig.min() < -DENSITY_POSITIVITY_TOL {
            return Err(JnrError::InvalidDensityMatrix(format!(
                "minimum eigenvalue {} is negative",
                eig.min()
            )));
        }
        Ok(Self { matrix: h.matrix })
    }

    /// `|v><v| / <v|v>`.
    pub fn pure(v: &CVector) -> Self {
        let n = v.norm_squared();
        Self {
            matrix: symmetrize(&(v * v.adjoint()).unscale(n)),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// Equal-weight mixture over the columns of an orthonormal basis.
    pub fn uniform_over(basis: &CMatrix) -> Self {
        let m = basis.ncols() as f64;
        Self {
            matrix: symmetrize(&(basis * basis.adjoint()).unscale(m)),
        }
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self {
            matrix: symmetrize(&matrix),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Trace distance `||a - b||_1 / 2`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        check_dim("trace distance", self.dim(), other.dim())?;
        let diff = HermitianOperator::from_hermitian_parts(&self.matrix - &other.matrix);
        let eig = eig_hermitian(&diff)?;
        Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
    }
}

pub fn expectation(f: &HermitianOperator, rho: &DensityMatrix) -> Result<f64> {
    check_dim("expectation", f.dim(), rho.dim())?;
    let d = f.dim();
    let mut acc = c(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += rho.matrix[(i, j)] * f.matrix[(j, i)];
        }
    }
    let scale = 1.0 + max_abs(&f.matrix) * d as f64;
    if acc.im.abs() > EXPECTATION_IMAG_TOL * scale {
        return Err(JnrError::InvalidArgument(format!(
            "expectation has imaginary part {:e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// `exp(-beta H) / Tr exp(-beta H)`, evaluated in the eigenbasis with the
/// ground energy factored out.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> Result<DensityMatrix> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(JnrError::InvalidArgument(format!(
            "inverse temperature must be finite and nonnegative, got {beta}"
        )));
    }
    let eig = eig_hermitian(h)?;
    let weights = boltzmann_weights(&eig.eigenvalues, beta);
    let mut scaled = eig.eigenvectors.clone();
    for (j, &w) in weights.iter().enumerate() {
        scaled.column_mut(j).scale_mut(w);
    }
    Ok(DensityMatrix::from_trusted(
        scaled * eig.eigenvectors.adjoint(),
    ))
}

/// Normalized Boltzmann weights for an ascending spectrum.
pub(crate) fn boltzmann_weights(levels: &[f64], beta: f64) -> Vec<f64> {
    let ground = levels[0];
    let raw: Vec<f64> = levels
        .iter()
        .map(|&l| if beta == 0.0 { 1.0 } else { (-beta * (l - ground)).exp() })
        .collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

fn check_bipartite(dim: usize, dims: (usize, usize)) -> Result<()> {
    check_dim("bipartite dimensions", dim, dims.0 * dims.1)
}

/// Reduced state on `keep`.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    check_bipartite(rho.dim(), dims)?;
    let (da, db) = dims;
    let m = &rho.matrix;
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    };
    Ok(DensityMatrix::from_trusted(out))
}

/// Transposes the indices of one tensor factor.
pub fn partial_transpose(
    x: &HermitianOperator,
    dims: (usize, usize),
    which: Subsystem,
) -> Result<HermitianOperator> {
    check_bipartite(x.dim(), dims)?;
    let (da, db) = dims;
    let d = da * db;
    let m = &x.matrix;
    let out = CMatrix::from_fn(d, d, |r, col| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (col / db, col % db);
        match which {
            Subsystem::A => m[(j * db + k, i * db + l)],
            Subsystem::B => m[(i * db + l, j * db + k)],
        }
    });
    Ok(HermitianOperator { matrix: out })
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Max deviation of `B^dagger B` from the identity.
pub fn orthonormality_defect(basis: &CMatrix) -> f64 {
    let gram = basis.adjoint() * basis;
    max_abs(&(gram - CMatrix::identity(basis.ncols(), basis.ncols())))
}

/// Matrix of `f` restricted to the span of `basis`: entries `<b_i|F|b_j>`.
pub fn compress(f: &HermitianOperator, basis: &CMatrix) -> Result<HermitianOperator> {
    check_dim("compression basis", f.dim(), basis.nrows())?;
    let deviation = orthonormality_defect(basis);
    if deviation > ORTHONORMAL_TOL {
        return Err(JnrError::NonOrthonormalBasis { deviation });
    }
    Ok(compress_unchecked(f, basis))
}

pub(crate) fn compress_unchecked(f: &HermitianOperator, basis: &CMatrix) -> HermitianOperator {
    HermitianOperator::from_hermitian_parts(basis.adjoint() * &f.matrix * basis)
}

/// Serialized operator: `{"d": int, "re": [[...]], "im": [[...]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorJson {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl HermitianOperator {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: OperatorJson = serde_json::from_str(text).map_err(|e| JnrError::Parse {
            context: format!("operator JSON (line {}, column {})", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if parsed.re.len() != parsed.d {
            return Err(JnrError::Parse {
                context: "field \"re\"".into(),
                message: format!("has {} rows, \"d\" is {}", parsed.re.len(), parsed.d),
            });
        }
        for (field, rows) in [("re", Some(&parsed.re)), ("im", parsed.im.as_ref())] {
            if let Some(rows) = rows {
                if rows.len() != parsed.d {
                    return Err(JnrError::Parse {
                        context: format!("field \"{field}\""),
                        message: format!("has {} rows, \"d\" is {}", rows.len(), parsed.d),
                    });
                }
                if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != parsed.d) {
                    return Err(JnrError::Parse {
                        context: format!("field \"{field}\" row {i}"),
                        message: format!("has {} entries, \"d\" is {}", row.len(), parsed.d),
                    });
                }
            }
        }
        Self::from_parts(&parsed.re, parsed.im.as_deref())
    }

    pub fn to_json(&self) -> OperatorJson {
        let d = self.dim();
        let re = (0..d)
            .map(|i| (0..d).map(|j| self.matrix[(i, j)].re).collect())
            .collect();
        let has_im = self.matrix.iter().any(|z| z.im != 0.0);
        let im = has_im.then(|| {
            (0..d)
                .map(|i| (0..d).map(|j| self.matrix[(i, j)].im).collect())
                .collect()
        });
        OperatorJson { d, re, im }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("operator serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ch2snd_h1() -> HermitianOperator {
        HermitianOperator::from_real_rows(&[&[0., 1., 0.], &[1., 0., 1.], &[0., 1., 0.]]).unwrap()
    }

    fn bell_projector() -> HermitianOperator {
        let s = 0.5f64.sqrt();
        let v = CVector::from_vec(vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]);
        HermitianOperator::from_hermitian_parts(&v * v.adjoint())
    }

    #[test]
    fn eig_pauli_z() {
        let e = eig_hermitian(&HermitianOperator::pauli_z()).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);
    }

    #[test]
    fn eig_tridiagonal_roots() {
        let e = eig_hermitian(&ch2snd_h1()).unwrap();
        let r2 = 2f64.sqrt();
        for (got, want) in e.eigenvalues.iter().zip([-r2, 0.0, r2]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn eig_identity() {
        let e = eig_hermitian(&HermitianOperator::identity(3)).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-14));
        assert!(orthonormality_defect(&e.eigenvectors) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = HermitianOperator::from_real_rows(&[&[0., 1.], &[2., 0.]]).unwrap_err();
        assert!(matches!(err, JnrError::NonHermitianInput { .. }));
    }

    #[test]
    fn tolerates_rounding_and_symmetrizes() {
        let h = HermitianOperator::from_real_rows(&[&[0., 1.0], &[1.0 + 1e-12, 0.]]).unwrap();
        assert_eq!(h.matrix()[(0, 1)], h.matrix()[(1, 0)]);
    }

    #[test]
    fn degenerate_top_projector() {
        let p = lambda_max_projector(&HermitianOperator::diagonal(&[0., 0., -1.]), DEFAULT_GAP_TOL)
            .unwrap();
        assert_eq!(p.multiplicity, 2);
        assert_abs_diff_eq!(p.eigenvalue, 0.0);
        assert!(p.projector.approx_eq(&HermitianOperator::diagonal(&[1., 1., 0.]), 1e-12));
    }

    #[test]
    fn pauli_x_top_projector() {
        let p = lambda_max_projector(&HermitianOperator::pauli_x(), DEFAULT_GAP_TOL).unwrap();
        assert_eq!(p.multiplicity, 1);
        assert_abs_diff_eq!(p.eigenvalue, 1.0, epsilon = 1e-14);
        let plus = HermitianOperator::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(p.projector.approx_eq(&plus, 1e-12));
    }

    #[test]
    fn ch2fst_h0_top() {
        let h0 = HermitianOperator::from_real_rows(&[&[0., 1., 0.], &[1., 0., 0.], &[0., 0., -2.]])
            .unwrap();
        let p = lambda_max_projector(&h0, DEFAULT_GAP_TOL).unwrap();
        assert_eq!(p.multiplicity, 1);
        assert_abs_diff_eq!(p.eigenvalue, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let zero = DensityMatrix::pure(&CVector::from_vec(vec![c(1., 0.), c(0., 0.)]));
        assert_eq!(expectation(&HermitianOperator::pauli_z(), &zero).unwrap(), 1.0);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(expectation(&HermitianOperator::pauli_x(), &mixed).unwrap(), 0.0);
        let h0 = HermitianOperator::from_real_rows(&[&[1., 0., 0.], &[0., -1., 0.], &[0., 0., 0.]])
            .unwrap();
        let e1 = DensityMatrix::new(HermitianOperator::diagonal(&[1., 0., 0.]).into_matrix())
            .unwrap();
        assert_eq!(expectation(&h0, &e1).unwrap(), 1.0);
        assert!(matches!(
            expectation(&h0, &mixed),
            Err(JnrError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gibbs_examples() {
        let rho = gibbs_state(&ch2snd_h1(), 0.0).unwrap();
        assert!(HermitianOperator::from_hermitian_parts(rho.matrix().clone())
            .approx_eq(&HermitianOperator::identity(3).scale(1.0 / 3.0), 1e-15));

        for beta in [0.1, 1.0, 3.0, 10.0] {
            let rho = gibbs_state(&HermitianOperator::pauli_z(), beta).unwrap();
            let z = 2.0 * f64::cosh(beta);
            assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, (-beta).exp() / z, epsilon = 1e-14);
            let ez = expectation(&HermitianOperator::pauli_z(), &rho).unwrap();
            assert_abs_diff_eq!(ez, -beta.tanh(), epsilon = 1e-14);
        }

        // no overflow at large beta
        let rho = gibbs_state(&ch2snd_h1(), 1e4).unwrap();
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);

        assert!(gibbs_state(&ch2snd_h1(), -1.0).is_err());
        assert!(gibbs_state(&ch2snd_h1(), f64::INFINITY).is_err());
    }

    #[test]
    fn gibbs_low_temperature_limit() {
        let h = ch2snd_h1();
        let eig = eig_hermitian(&h).unwrap();
        let beta = 50.0 / eig.width() * 1e12f64.ln();
        let rho = gibbs_state(&h, beta).unwrap();
        let ground = DensityMatrix::pure(&eig.vector(0));
        assert!(rho.trace_distance(&ground).unwrap() < 1e-9);
    }

    #[test]
    fn partial_trace_examples() {
        let bell = DensityMatrix::new(bell_projector().into_matrix()).unwrap();
        let ra = partial_trace(&bell, (2, 2), Subsystem::A).unwrap();
        assert!(HermitianOperator::from_hermitian_parts(ra.matrix().clone())
            .approx_eq(&HermitianOperator::identity(2).scale(0.5), 1e-15));

        let mixed4 = DensityMatrix::maximally_mixed(4);
        let rb = partial_trace(&mixed4, (2, 2), Subsystem::B).unwrap();
        assert_abs_diff_eq!(rb.matrix()[(0, 0)].re, 0.5);
        assert_abs_diff_eq!(rb.matrix()[(0, 1)].norm(), 0.0);

        assert!(partial_trace(&mixed4, (3, 2), Subsystem::A).is_err());
    }

    #[test]
    fn partial_transpose_bell_spectrum() {
        let x = partial_transpose(&bell_projector(), (2, 2), Subsystem::B).unwrap();
        let e = eig_hermitian(&x).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let back = partial_transpose(&x, (2, 2), Subsystem::B).unwrap();
        assert_eq!(back, bell_projector());
    }

    #[test]
    fn partial_transpose_of_product() {
        let a = HermitianOperator::pauli_x();
        let b = HermitianOperator::pauli_y();
        let pt = partial_transpose(&a.kron(&b), (2, 2), Subsystem::B).unwrap();
        let bt = HermitianOperator::new(b.matrix().transpose()).unwrap();
        assert_eq!(pt, a.kron(&bt));
    }

    #[test]
    fn compress_examples() {
        let e12 = CMatrix::from_fn(3, 2, |r, col| if r == col { c(1., 0.) } else { c(0., 0.) });
        let got = compress(&HermitianOperator::diagonal(&[1., 2., 3.]), &e12).unwrap();
        assert_eq!(got, HermitianOperator::diagonal(&[1., 2.]));
        let got = compress(&ch2snd_h1(), &e12).unwrap();
        assert_eq!(got, HermitianOperator::pauli_x());

        let bad = e12.scale(2.0);
        assert!(matches!(
            compress(&ch2snd_h1(), &bad),
            Err(JnrError::NonOrthonormalBasis { .. })
        ));
    }

    #[test]
    fn kron_sigma_z_identity() {
        let k = HermitianOperator::pauli_z().kron(&HermitianOperator::identity(2));
        assert_eq!(k, HermitianOperator::diagonal(&[1., 1., -1., -1.]));
    }

    #[test]
    fn json_formats() {
        let z = HermitianOperator::from_json_str(r#"{"d":2,"re":[[1,0],[0,-1]]}"#).unwrap();
        assert_eq!(z, HermitianOperator::pauli_z());
        let y = HermitianOperator::from_json_str(
            r#"{"d":2,"re":[[0,0],[0,0]],"im":[[0,1],[-1,0]]}"#,
        )
        .unwrap();
        assert_eq!(y, HermitianOperator::pauli_y());
        let err = HermitianOperator::from_json_str(r#"{"d":2,"re":[[0,1],[2,0]]}"#).unwrap_err();
        assert!(matches!(err, JnrError::NonHermitianInput { .. }));
        let err = HermitianOperator::from_json_str(r#"{"d":2,"re":[[0,1,3],[1,0]]}"#).unwrap_err();
        assert!(matches!(err, JnrError::Parse { .. }));
        let err = HermitianOperator::from_json_str(r#"{"d":2,"re":[[0,1],[1,0]"#).unwrap_err();
        assert!(matches!(err, JnrError::Parse { .. }));
    }
}
