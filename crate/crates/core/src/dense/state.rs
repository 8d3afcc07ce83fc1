use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;

use crate::circuit::FloquetCircuit;
use crate::error::{Error, Result};
use crate::rng::quaternion_matrix;

pub const MAX_STATE_QUBITS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Site `i` is amplitude bit `n - 1 - i`, so site 0 is the most significant.
#[inline]
fn bit_of(n: usize, site: usize) -> usize {
    n - 1 - site
}

pub(crate) fn apply_one(amps: &mut [Complex64], n: usize, site: usize, m: &Matrix2<Complex64>) {
    let stride = 1usize << bit_of(n, site);
    for base in 0..amps.len() {
        if base & stride != 0 {
            continue;
        }
        let (a0, a1) = (amps[base], amps[base | stride]);
        amps[base] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
        amps[base | stride] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
    }
}

/// Local basis index `2·b_a + b_b`.
pub(crate) fn apply_two(amps: &mut [Complex64], n: usize, a: usize, b: usize, m: &Matrix4<Complex64>) {
    let sa = 1usize << bit_of(n, a);
    let sb = 1usize << bit_of(n, b);
    let idx = |base: usize, l: usize| base | if l & 2 != 0 { sa } else { 0 } | if l & 1 != 0 { sb } else { 0 };
    for base in 0..amps.len() {
        if base & (sa | sb) != 0 {
            continue;
        }
        let v = [0, 1, 2, 3].map(|l| amps[idx(base, l)]);
        for r in 0..4 {
            amps[idx(base, r)] = (0..4).map(|c| m[(r, c)] * v[c]).sum();
        }
    }
}

/// Applies one period `R · C_second · C_first` in place.
pub(crate) fn apply_period(amps: &mut [Complex64], c: &FloquetCircuit) {
    let n = c.n();
    for layer in 0..2 {
        for bond in c.layer_bonds(layer) {
            apply_two(amps, n, bond, bond + 1, &c.gate(bond).dense());
        }
        for e in c.edges().iter().filter(|e| e.layer == layer) {
            apply_one(amps, n, e.site, &e.gate.dense());
        }
    }
    for r in c.rotations() {
        apply_one(amps, n, r.site, &quaternion_matrix(&r.q));
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::ResourceGuard(format!(
                "state vectors need 1 <= n <= {MAX_STATE_QUBITS}, got {n}"
            )));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let s = Self { n, amps };
        if (s.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter("state is not normalised".into()));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn evolve(&mut self, c: &FloquetCircuit) -> Result<()> {
        if c.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: c.n(),
            });
        }
        apply_period(&mut self.amps, c);
        Ok(())
    }

    pub fn apply_two(&mut self, a: usize, b: usize, m: &Matrix4<Complex64>) {
        apply_two(&mut self.amps, self.n, a, b, m);
    }

    pub fn apply_one(&mut self, site: usize, m: &Matrix2<Complex64>) {
        apply_one(&mut self.amps, self.n, site, m);
    }

    /// Von Neumann entropy in bits of sites `0..cut`.
    pub fn vn_entropy(&self, cut: usize) -> Result<f64> {
        if cut == 0 || cut >= self.n {
            return Err(Error::InvalidParameter(format!(
                "cut {cut} leaves an empty side of a {}-qubit state",
                self.n
            )));
        }
        let cols = 1usize << (self.n - cut);
        let m = DMatrix::from_fn(1 << cut, cols, |i, j| self.amps[i * cols + j]);
        Ok(entropy_from_singular_values(m.singular_values().iter().copied()))
    }
}

/// `−Σ p log₂ p` over `p = σ²`, dropping `p < 1e-14`.
pub(crate) fn entropy_from_singular_values(sv: impl Iterator<Item = f64>) -> f64 {
    sv.map(|s| s * s)
        .filter(|&p| p >= 1e-14)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}
