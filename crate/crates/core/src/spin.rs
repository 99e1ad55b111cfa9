//! Spin-1/2 chain Hamiltonians on periodic rings and small two-qubit models.
//!
//! Site 1 is the leftmost tensor factor (most significant bit of the basis
//! index). `sigma_y` is `[[0, i], [-i, 0]]`, matching
//! [`HermitianOperator::pauli_y`]. Operators are assembled from Pauli strings
//! directly on the computational basis, which avoids dense Kronecker chains.

use serde::{Deserialize, Serialize};

use crate::boundary::ObservableSet;
use crate::error::{JnrError, Result};
use crate::hermitian::{c, CMatrix, HermitianOperator, C64};

/// Largest supported ring (4096 x 4096 dense matrices).
pub const MAX_SITES: usize = 12;
const SHIFT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = JnrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(JnrError::InvalidArgument(format!("unknown axis {other:?}"))),
        }
    }
}

/// Translation-invariant ring Hamiltonian terms.
#[derive(Clone, Debug)]
pub struct SpinChainSpec {
    pub sites: usize,
    pub periodic: bool,
    pub terms: Vec<(String, HermitianOperator)>,
}

impl SpinChainSpec {
    pub fn observables(&self) -> Result<ObservableSet> {
        let (labels, ops) = self.terms.iter().cloned().unzip();
        ObservableSet::with_labels(ops, labels)
    }
}

fn check_sites(n: usize, min: usize) -> Result<()> {
    if n > MAX_SITES {
        return Err(JnrError::TooManySites {
            sites: n,
            max: MAX_SITES,
        });
    }
    if n < min {
        return Err(JnrError::InvalidArgument(format!(
            "a ring needs at least {min} sites, got {n}"
        )));
    }
    Ok(())
}

/// Adds `coef * prod sigma_axis^(site)` (sites 1-based) to `m`.
fn add_pauli_string(m: &mut CMatrix, n: usize, factors: &[(usize, Axis)], coef: f64) {
    let dim = 1usize << n;
    for col in 0..dim {
        let mut row = col;
        let mut phase = c(coef, 0.0);
        for &(site, axis) in factors {
            let bit = 1usize << (n - site);
            let up = row & bit == 0;
            match axis {
                Axis::X => row ^= bit,
                Axis::Y => {
                    phase *= if up { c(0.0, -1.0) } else { c(0.0, 1.0) };
                    row ^= bit;
                }
                Axis::Z => {
                    if !up {
                        phase = -phase;
                    }
                }
            }
        }
        m[(row, col)] += phase;
    }
}

fn zeros(n: usize) -> CMatrix {
    let dim = 1usize << n;
    CMatrix::from_element(dim, dim, C64::new(0.0, 0.0))
}

/// `1 (x) ... (x) sigma_axis (x) ... (x) 1` with the Pauli at site `i` (1-based).
pub fn site_operator(n: usize, i: usize, axis: Axis) -> Result<HermitianOperator> {
    check_sites(n, 1)?;
    if i == 0 || i > n {
        return Err(JnrError::IndexOutOfRange { index: i, len: n });
    }
    let mut m = zeros(n);
    add_pauli_string(&mut m, n, &[(i, axis)], 1.0);
    Ok(HermitianOperator::from_hermitian_parts(m))
}

/// `(1/N) sum_i s_a^(i+1) s_a^(i)` on the ring.
fn bond_sum(n: usize, axis: Axis) -> HermitianOperator {
    let mut m = zeros(n);
    for i in 1..=n {
        let j = i % n + 1;
        if i == j {
            continue;
        }
        add_pauli_string(&mut m, n, &[(j, axis), (i, axis)], 1.0);
    }
    per_site(m, n)
}

// dividing once keeps integer sums exact
fn per_site(mut m: CMatrix, n: usize) -> HermitianOperator {
    m.apply(|z| *z /= n as f64);
    HermitianOperator::from_hermitian_parts(m)
}

fn field_sum(n: usize, axis: Axis) -> HermitianOperator {
    let mut m = zeros(n);
    for i in 1..=n {
        add_pauli_string(&mut m, n, &[(i, axis)], 1.0);
    }
    per_site(m, n)
}

/// Ising ring with ZZ coupling, longitudinal and transverse fields.
pub fn ising_chain(n: usize) -> Result<SpinChainSpec> {
    check_sites(n, 2)?;
    Ok(SpinChainSpec {
        sites: n,
        periodic: true,
        terms: vec![
            ("H1".into(), bond_sum(n, Axis::Z)),
            ("H2".into(), field_sum(n, Axis::Z)),
            ("H3".into(), field_sum(n, Axis::X)),
        ],
    })
}

pub fn ising_observables(n: usize) -> Result<ObservableSet> {
    ising_chain(n)?.observables()
}

/// Ring with XX and ZZ couplings plus the normalized total spin `S^2 / (N (N+1))`.
pub fn xxzz_chain(n: usize) -> Result<SpinChainSpec> {
    check_sites(n, 2)?;
    // S_a^2 = N + sum_{i != j} s_a^(i) s_a^(j); the y factors square away
    let mut s2 = zeros(n);
    let dim = 1usize << n;
    for d in 0..dim {
        s2[(d, d)] += c(3.0 * n as f64, 0.0);
    }
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    add_pauli_string(&mut s2, n, &[(i, axis), (j, axis)], 1.0);
                }
            }
        }
    }
    let h3 = HermitianOperator::from_hermitian_parts(s2).scale(1.0 / (n * (n + 1)) as f64);
    Ok(SpinChainSpec {
        sites: n,
        periodic: true,
        terms: vec![
            ("H1".into(), bond_sum(n, Axis::X)),
            ("H2".into(), bond_sum(n, Axis::Z)),
            ("H3".into(), h3),
        ],
    })
}

pub fn xxzz_spin_observables(n: usize) -> Result<ObservableSet> {
    xxzz_chain(n)?.observables()
}

/// The two-qubit interaction families.
#[derive(Clone, Debug)]
pub struct TwoQubitExamples {
    /// Third operator `sigma_y (x) sigma_y`.
    pub bicone: ObservableSet,
    /// Third operator `sigma_z (x) sigma_z`.
    pub ellipse_segment: ObservableSet,
}

pub fn two_qubit_examples() -> TwoQubitExamples {
    let pair = |axis| {
        let mut m = zeros(2);
        add_pauli_string(&mut m, 2, &[(1, axis), (2, axis)], 1.0);
        m
    };
    let (xx, yy, zz) = (pair(Axis::X), pair(Axis::Y), pair(Axis::Z));
    let h1 = HermitianOperator::from_hermitian_parts(xx.scale(3.0) - &xx - &yy - &zz);
    let mut field = zeros(2);
    add_pauli_string(&mut field, 2, &[(1, Axis::Z)], 1.0);
    add_pauli_string(&mut field, 2, &[(2, Axis::Z)], 1.0);
    let h2 = HermitianOperator::from_hermitian_parts(field);
    let labels = || vec!["H1".to_string(), "H2".to_string(), "H3".to_string()];
    let build = |third: CMatrix| {
        ObservableSet::with_labels(
            vec![h1.clone(), h2.clone(), HermitianOperator::from_hermitian_parts(third)],
            labels(),
        )
        .expect("three 4x4 operators")
    };
    TwoQubitExamples {
        bicone: build(yy.clone()),
        ellipse_segment: build(zz.clone()),
    }
}

/// Permutation `|x_1 ... x_N> -> |x_N x_1 ... x_{N-1}>`.
pub fn cyclic_shift(n: usize) -> Result<CMatrix> {
    check_sites(n, 1)?;
    let dim = 1usize << n;
    let mut m = zeros(n);
    for col in 0..dim {
        let row = (col >> 1) | ((col & 1) << (n - 1));
        m[(row, col)] = c(1.0, 0.0);
    }
    Ok(m)
}

/// Whether `op` commutes with the cyclic shift of an `n`-site ring.
pub fn is_translation_invariant(op: &HermitianOperator, n: usize) -> Result<bool> {
    crate::hermitian::check_dim("ring operator", 1usize << n, op.dim())?;
    let t = cyclic_shift(n)?;
    let comm = &t * op.matrix() - op.matrix() * &t;
    let dev = comm.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(dev <= SHIFT_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Ising,
    Xxzz,
    Bicone,
    EllipseSegment,
}

impl std::str::FromStr for Model {
    type Err = JnrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ising" => Ok(Model::Ising),
            "xxzz" => Ok(Model::Xxzz),
            "bicone" => Ok(Model::Bicone),
            "ellipse-segment" => Ok(Model::EllipseSegment),
            other => Err(JnrError::InvalidArgument(format!("unknown model {other:?}"))),
        }
    }
}

/// Observables of `model`; `sites` is ignored by the two-qubit models.
pub fn build_model(model: Model, sites: usize) -> Result<ObservableSet> {
    match model {
        Model::Ising => ising_observables(sites),
        Model::Xxzz => xxzz_spin_observables(sites),
        Model::Bicone => Ok(two_qubit_examples().bicone),
        Model::EllipseSegment => Ok(two_qubit_examples().ellipse_segment),
    }
}
