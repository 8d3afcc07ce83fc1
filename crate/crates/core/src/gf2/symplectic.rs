use std::collections::VecDeque;
use std::fmt;

use super::bits::BitVector;
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// Something that acts linearly on `GF(2)^dimension`.
pub trait LinearAction {
    fn dimension(&self) -> usize;
    fn act(&self, v: &BitVector) -> BitVector;
}

/// Square matrix over GF(2) that preserves the interleaved symplectic form.
///
/// Stored by rows: output coordinate `i` of `M·v` is the parity of `rows[i] & v`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    n: usize,
    rows: Vec<BitVector>,
}

/// Result of [`matrix_order`]: either the exact order or a saturation report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(u64),
    ExceedsCap(u64),
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(t) => Some(t),
            Order::ExceedsCap(_) => None,
        }
    }
}

pub const DEFAULT_ORDER_CAP: u64 = 1 << 16;

/// Checks `S·J·Sᵀ = J` for a candidate given as rows.
///
/// Entry `(i, j)` of `S·J·Sᵀ` is the symplectic product of rows `i` and `j`, and
/// `J` has ones exactly where `i ^ 1 == j`.
pub fn symplectic_check(rows: &[BitVector]) -> Result<bool> {
    let dim = rows.len();
    if dim % 2 == 1 {
        return Err(Error::Shape(format!("odd dimension {dim}")));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::Shape(format!(
            "row of width {} in a {dim}x{dim} matrix",
            bad.len()
        )));
    }
    for i in 0..dim {
        for j in i..dim {
            if rows[i].symplectic_product(&rows[j]) != (i ^ 1 == j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl SymplecticMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            rows: (0..2 * n).map(|i| BitVector::unit(2 * n, i)).collect(),
        }
    }

    /// The form matrix `J` itself (one `X` block per site).
    pub fn j(n: usize) -> Self {
        Self {
            n,
            rows: (0..2 * n).map(|i| BitVector::unit(2 * n, i ^ 1)).collect(),
        }
    }

    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self> {
        if !symplectic_check(&rows)? {
            return Err(Error::NotSymplectic);
        }
        Ok(Self {
            n: rows.len() / 2,
            rows,
        })
    }

    /// Builds the matrix whose column `j` is `images[j]`, the image of `e_j`.
    pub fn from_column_images(images: &[BitVector]) -> Result<Self> {
        let dim = images.len();
        let mut rows = vec![BitVector::zeros(dim); dim];
        for (j, col) in images.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::Shape(format!(
                    "column of length {} in a {dim}x{dim} matrix",
                    col.len()
                )));
            }
            for i in col.iter_ones() {
                rows[i].set(j, true);
            }
        }
        Self::from_rows(rows)
    }

    /// Packs a matrix on at most 32 bits: column `j` is given as an integer.
    pub fn from_column_words(dim: usize, cols: &[u64]) -> Result<Self> {
        let images: Vec<BitVector> = cols.iter().map(|&c| BitVector::from_u64(dim, c)).collect();
        Self::from_column_images(&images)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut c = BitVector::zeros(self.dim());
        for (i, row) in self.rows.iter().enumerate() {
            if row.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn is_identity(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.count_ones() == 1 && r.get(i))
    }

    pub fn apply(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(self.apply_unchecked(v))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, v: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.dim());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn mul(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVector::zeros(self.dim());
                for k in row.iter_ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(SymplecticMatrix { n: self.n, rows })
    }

    /// Inverse via `S⁻¹ = J Sᵀ J`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let d = self.dim();
        let mut rows = vec![BitVector::zeros(d); d];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..d {
                if self.rows[j ^ 1].get(i ^ 1) {
                    row.set(j, true);
                }
            }
        }
        SymplecticMatrix { n: self.n, rows }
    }

    /// Places a matrix acting on `local.n` consecutive qubits at `offset` inside `n` qubits.
    pub fn embed(&self, n: usize, offset: usize) -> Result<SymplecticMatrix> {
        if offset + self.n > n {
            return Err(Error::SiteOutOfRange {
                site: offset + self.n - 1,
                n,
            });
        }
        let mut full = SymplecticMatrix::identity(n);
        let base = 2 * offset;
        for (i, row) in self.rows.iter().enumerate() {
            full.rows[base + i] = row.embed(2 * n, base);
        }
        Ok(full)
    }

    /// Packs a matrix of dimension ≤ 16 into a `u64`-per-column key.
    pub fn key(&self) -> Vec<u64> {
        (0..self.dim()).map(|j| self.column(j).to_u64()).collect()
    }
}

impl LinearAction for SymplecticMatrix {
    fn dimension(&self) -> usize {
        self.dim()
    }

    fn act(&self, v: &BitVector) -> BitVector {
        self.apply_unchecked(v)
    }
}

impl fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymplecticMatrix(n={})", self.n)?;
        for row in &self.rows {
            for j in 0..self.dim() {
                write!(f, "{}", u8::from(row.get(j)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Smallest `M`-invariant subspace containing `v0`.
///
/// Every vector that enlarges the span is queued once and its image inserted, so
/// the spanning set ends up closed under `M`.
pub fn closure<A: LinearAction + ?Sized>(m: &A, v0: &Subspace) -> Result<Subspace> {
    if m.dimension() != v0.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dimension(),
            found: v0.ambient_dim(),
        });
    }
    let mut span = v0.clone();
    let mut queue: VecDeque<BitVector> = v0.basis().iter().cloned().collect();
    while let Some(w) = queue.pop_front() {
        let image = m.act(&w);
        if span.insert(image.clone()) {
            queue.push_back(image);
        }
    }
    Ok(span)
}

/// Smallest `τ ≥ 1` with `M^τ = 1`, or saturation at `cap`.
pub fn matrix_order(m: &SymplecticMatrix, cap: u64) -> Order {
    let basis: Vec<BitVector> = (0..m.dim()).map(|i| BitVector::unit(m.dim(), i)).collect();
    order_on(m, &basis, cap)
}

/// Smallest `τ ≥ 1` with `M^τ v = v` for every listed `v`.
pub fn order_on<A: LinearAction + ?Sized>(m: &A, vectors: &[BitVector], cap: u64) -> Order {
    let mut current: Vec<BitVector> = vectors.to_vec();
    for t in 1..=cap {
        for v in current.iter_mut() {
            *v = m.act(v);
        }
        if current.iter().zip(vectors).all(|(a, b)| a == b) {
            return Order::Finite(t);
        }
    }
    Order::ExceedsCap(cap)
}
