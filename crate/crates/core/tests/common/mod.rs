#![allow(dead_code)]

use jnr_core::hermitian::{c, CMatrix, HermitianOperator};

pub fn real3(rows: [[f64; 3]; 3]) -> HermitianOperator {
    HermitianOperator::from_real_rows(&[&rows[0], &rows[1], &rows[2]]).unwrap()
}

/// Qutrit pair with a cusp at negative `<H0>`.
pub fn cusp_pair() -> (HermitianOperator, HermitianOperator) {
    (
        real3([[0., 1., 0.], [1., 0., 0.], [0., 0., -2.]]),
        real3([[1., 0., 0.], [0., -1., 0.], [0., 0., 0.]]),
    )
}

/// Qutrit pair with a single flat face.
pub fn face_pair() -> (HermitianOperator, HermitianOperator) {
    (
        real3([[0., 0., 0.], [0., 0., 0.], [0., 0., 1.]]),
        real3([[0., 1., 0.], [1., 0., 1.], [0., 1., 0.]]),
    )
}

/// Pair sharing the eigenvector e3.
pub fn shared_eigvec_pair() -> (HermitianOperator, HermitianOperator) {
    (
        real3([[0., 1., 0.], [1., 0., 0.], [0., 0., 0.]]),
        HermitianOperator::diagonal(&[1., 0., -1.]),
    )
}

/// Pair without a common eigenvector; its sum-of-variances bound is 15/32.
pub fn complex_pair() -> (HermitianOperator, HermitianOperator) {
    let z = c(0., 0.);
    let one = c(1., 0.);
    let x = CMatrix::from_row_slice(3, 3, &[z, one, z, one, z, c(0., 1.), z, c(0., -1.), z]);
    (
        HermitianOperator::new(x).unwrap(),
        HermitianOperator::diagonal(&[1., 0., -1.]),
    )
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}
