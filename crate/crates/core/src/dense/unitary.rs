use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::state::apply_period;
use crate::circuit::FloquetCircuit;
use crate::error::{Error, Result};

pub const MAX_UNITARY_QUBITS: usize = 12;

/// Generic mixing weight for the Hermitian eigenproblem in [`DenseUnitary::eigenphases`].
const ALPHA: f64 = 0.618_033_988_749_895;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    n: usize,
    matrix: DMatrix<Complex64>,
}

/// One Floquet period as a `2^n × 2^n` matrix, built column by column with the
/// same gate kernels as [`super::StateVector`].
pub fn build_unitary(c: &FloquetCircuit) -> Result<DenseUnitary> {
    let n = c.n();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::ResourceGuard(format!(
            "dense unitaries need n <= {MAX_UNITARY_QUBITS}, got {n}"
        )));
    }
    let d = 1usize << n;
    let mut matrix = DMatrix::<Complex64>::identity(d, d);
    for j in 0..d {
        let mut col = matrix.column_mut(j);
        apply_period(col.as_mut_slice(), c);
    }
    Ok(DenseUnitary { n, matrix })
}

impl DenseUnitary {
    /// Wraps a square matrix of side `2^n`; unitarity is checked where it matters.
    pub fn from_matrix(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = 1usize << n;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "expected {d}x{d}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { n, matrix })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `max ‖U†U x − x‖` over `probes` Gaussian unit vectors.
    pub fn unitarity_defect<R: Rng + ?Sized>(&self, probes: usize, rng: &mut R) -> f64 {
        let d = self.dim();
        (0..probes)
            .map(|_| {
                let x = DVector::<Complex64>::from_fn(d, |_, _| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                let x = &x / Complex64::from(x.norm());
                let y = self.matrix.ad_mul(&(&self.matrix * &x));
                (y - x).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Eigenphases in `(−π, π]`.
    ///
    /// The eigenvectors of a unitary also diagonalise the Hermitian matrix
    /// `Re U + α Im U`, which is cheaper to solve than a complex Schur form. If two
    /// distinct phases happen to collide there the Rayleigh quotients fall off the
    /// unit circle and the Schur path is used instead.
    pub fn eigenphases(&self) -> Result<Vec<f64>> {
        let u = &self.matrix;
        let ud = u.adjoint();
        let half = Complex64::new(0.5, 0.0);
        let h = (u + &ud) * half + (u - &ud) * Complex64::new(0.0, -0.5 * ALPHA);
        let v = h.symmetric_eigen().eigenvectors;
        let w = u * &v;
        let lambdas: Vec<Complex64> = (0..self.dim())
            .map(|a| v.column(a).dotc(&w.column(a)))
            .collect();
        if lambdas.iter().all(|l| (l.norm() - 1.0).abs() < 1e-8) {
            return Ok(lambdas.iter().map(|l| l.arg()).collect());
        }
        let eig = u
            .clone()
            .schur()
            .eigenvalues()
            .ok_or_else(|| Error::NonUnitary("Schur decomposition failed".into()))?;
        if let Some(l) = eig.iter().find(|l| (l.norm() - 1.0).abs() > 1e-8) {
            return Err(Error::NonUnitary(format!("eigenvalue of modulus {}", l.norm())));
        }
        Ok(eig.iter().map(|l| l.arg()).collect())
    }

    /// `Tr[U^t]` by repeated squaring.
    pub fn trace_power(&self, t: usize) -> Complex64 {
        let d = self.dim();
        let mut acc = DMatrix::<Complex64>::identity(d, d);
        let mut base = self.matrix.clone();
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc.trace()
    }
}

/// Operator-Schmidt spectrum of `U` across the cut after `cut` sites.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorSchmidt {
    pub singular_values: Vec<f64>,
    pub is_product: bool,
    /// `(Σσ²)² − Σσ⁴`, zero exactly for products.
    pub gap: f64,
}

/// Reshuffles `U[(l, r), (l', r')]` into `M[(l, l'), (r, r')]` and takes its SVD.
pub fn otoc_product_test(u: &DenseUnitary, cut: usize) -> Result<OperatorSchmidt> {
    let n = u.n;
    if cut == 0 || cut >= n {
        return Err(Error::InvalidParameter(format!(
            "cut {cut} does not split {n} qubits in two"
        )));
    }
    let dl = 1usize << cut;
    let dr = 1usize << (n - cut);
    let m = DMatrix::from_fn(dl * dl, dr * dr, |i, j| {
        let (l, lp) = (i / dl, i % dl);
        let (r, rp) = (j / dr, j % dr);
        u.matrix[(l * dr + r, lp * dr + rp)]
    });
    let mut singular_values: Vec<f64> = m.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let top = singular_values[0];
    let nonzero = singular_values.iter().filter(|&&s| s > 1e-9 * top).count();
    let s2: f64 = singular_values.iter().map(|s| s * s).sum();
    let s4: f64 = singular_values.iter().map(|s| s.powi(4)).sum();
    Ok(OperatorSchmidt {
        singular_values,
        is_product: nonzero == 1,
        gap: s2 * s2 - s4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Bricking;
    use crate::clifford::{SingleQubitClifford, TwoQubitClifford};
    use crate::rng::stream;

    fn two_qubit(g: &TwoQubitClifford) -> DenseUnitary {
        let m = g.dense();
        DenseUnitary::from_matrix(2, DMatrix::from_fn(4, 4, |i, j| m[(i, j)])).unwrap()
    }

    #[test]
    fn identity_layers_give_identity() {
        let c = FloquetCircuit::from_gates(vec![TwoQubitClifford::identity(); 4], Bricking::EvenFirst).unwrap();
        let u = build_unitary(&c).unwrap();
        assert!((u.matrix() - DMatrix::identity(32, 32)).norm() < 1e-12);
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let c = FloquetCircuit::build(7, 0.5, 11).unwrap();
        let u = build_unitary(&c).unwrap();
        assert!(u.unitarity_defect(4, &mut stream(0, 0)) < 1e-9);
        assert!(build_unitary(&FloquetCircuit::build(13, 0.5, 1).unwrap()).is_err());
    }

    #[test]
    fn eigenphases_match_matrix_powers() {
        for (p, seed) in [(0.0, 1), (0.5, 2), (1.0, 3)] {
            let u = build_unitary(&FloquetCircuit::build(6, p, seed).unwrap()).unwrap();
            let phases = u.eigenphases().unwrap();
            for t in [1, 7, 40] {
                let spec: Complex64 = phases.iter().map(|&th| Complex64::from_polar(1.0, th * t as f64)).sum();
                let pow = u.trace_power(t);
                assert!((spec - pow).norm() < 1e-6 * pow.norm().max(1.0), "p={p} t={t}");
            }
        }
    }

    #[test]
    fn non_unitary_spectrum_is_rejected() {
        let m = DMatrix::from_diagonal_element(4, 4, Complex64::new(1.1, 0.0));
        assert!(DenseUnitary::from_matrix(2, m).unwrap().eigenphases().is_err());
    }

    #[test]
    fn schmidt_spectra_of_named_gates() {
        let h = SingleQubitClifford::hadamard().dense();
        let s = SingleQubitClifford::from_index(5).unwrap().dense();
        let prod = DMatrix::from_fn(4, 4, |i, j| h[(i / 2, j / 2)] * s[(i % 2, j % 2)]);
        let r = otoc_product_test(&DenseUnitary::from_matrix(2, prod).unwrap(), 1).unwrap();
        assert!(r.is_product && r.gap.abs() < 1e-9);

        let r = otoc_product_test(&two_qubit(&TwoQubitClifford::cz()), 1).unwrap();
        assert!(!r.is_product);
        assert!((r.singular_values[0] - r.singular_values[1]).abs() < 1e-12);
        assert!(r.singular_values[2] < 1e-12);

        let r = otoc_product_test(&two_qubit(&TwoQubitClifford::swap()), 1).unwrap();
        assert!(r.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }
}
