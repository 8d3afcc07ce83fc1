use super::bits::BitVector;
use crate::error::{Error, Result};

/// A subspace of GF(2)^{2n} held in reduced row-echelon form.
///
/// Each basis row has a distinct pivot (its lowest set bit) that is cleared in
/// every other row, and rows are sorted by pivot, so two subspaces are equal
/// iff their bases are bitwise equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    n: usize,
    basis: Vec<BitVector>,
}

impl Subspace {
    /// The zero subspace of the `2n`-dimensional space of `n` qubits.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            basis: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self::span(n, (0..2 * n).map(|i| BitVector::unit(2 * n, i)))
    }

    pub fn span<I>(n: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = BitVector>,
    {
        let mut s = Self::zero(n);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn try_span<I>(n: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = BitVector>,
    {
        let mut s = Self::zero(n);
        for v in vectors {
            if v.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    found: v.len(),
                });
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Both generators `x_i, z_i` of each listed site.
    pub fn sites(n: usize, sites: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::zero(n);
        for site in sites {
            if site >= n {
                return Err(Error::SiteOutOfRange { site, n });
            }
            s.insert(BitVector::unit(2 * n, 2 * site));
            s.insert(BitVector::unit(2 * n, 2 * site + 1));
        }
        Ok(s)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        2 * self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    fn pivot_position(&self, pivot: usize) -> std::result::Result<usize, usize> {
        self.basis
            .binary_search_by_key(&pivot, |row| row.first_one().expect("basis rows are non-zero"))
    }

    /// Residual of `v` after elimination against the basis; zero iff `v` is a member.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut r = v.clone();
        self.reduce_in_place(&mut r);
        r
    }

    fn reduce_in_place(&self, r: &mut BitVector) {
        for row in &self.basis {
            let pivot = row.first_one().expect("basis rows are non-zero");
            if r.get(pivot) {
                r.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        v.len() == self.ambient_dim() && self.reduce(v).is_zero()
    }

    /// Adds `v` to the span, returning `true` if the dimension grew.
    pub fn insert(&mut self, v: BitVector) -> bool {
        debug_assert_eq!(v.len(), self.ambient_dim());
        let mut r = v;
        self.reduce_in_place(&mut r);
        let Some(pivot) = r.first_one() else {
            return false;
        };
        for row in &mut self.basis {
            if row.get(pivot) {
                row.xor_assign(&r);
            }
        }
        let pos = match self.pivot_position(pivot) {
            Ok(_) => unreachable!("pivot already present after reduction"),
            Err(pos) => pos,
        };
        self.basis.insert(pos, r);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(v.clone());
        }
        Ok(s)
    }

    /// Intersection via the Zassenhaus stacking `[u | u]`, `[v | 0]`.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let d = self.ambient_dim();
        let zero = BitVector::zeros(d);
        let mut stacked = Subspace::zero(2 * self.n);
        for u in &self.basis {
            stacked.insert(u.concat(u));
        }
        for v in &other.basis {
            stacked.insert(v.concat(&zero));
        }
        // Rows with no bits in the first half carry the intersection in the second.
        let vectors = stacked
            .basis
            .iter()
            .filter(|row| row.first_one().is_some_and(|p| p >= d))
            .map(|row| row.slice(d, d));
        Ok(Subspace::span(self.n, vectors))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.n == other.n && self.basis.iter().all(|v| other.contains(v))
    }

    /// Zero every coordinate outside `sites` and re-reduce (ambient space unchanged).
    pub fn project_to_sites(&self, sites: &[usize]) -> Result<Subspace> {
        let mask = self.site_mask(sites)?;
        Ok(Subspace::span(
            self.n,
            self.basis.iter().map(|v| {
                let mut w = v.clone();
                w.and_assign(&mask);
                w
            }),
        ))
    }

    /// Projection onto the contiguous block `[start, start + len)`, re-expressed on
    /// `len` qubits.
    pub fn restrict_to_block(&self, start: usize, len: usize) -> Result<Subspace> {
        if start + len > self.n {
            return Err(Error::SiteOutOfRange {
                site: start + len - 1,
                n: self.n,
            });
        }
        Ok(Subspace::span(
            len,
            self.basis.iter().map(|v| v.slice(2 * start, 2 * len)),
        ))
    }

    /// Vectors in the span that are supported on `sites` only.
    pub fn supported_on(&self, sites: &[usize]) -> Result<Subspace> {
        let coord = Subspace::sites(self.n, sites.iter().copied())?;
        self.intersection(&coord)
    }

    /// Lowest and highest site touched by any vector of the subspace.
    pub fn site_range(&self) -> Option<(usize, usize)> {
        let lo = self.basis.iter().filter_map(|v| v.first_one()).min()?;
        let hi = self.basis.iter().filter_map(|v| v.last_one()).max()?;
        Some((lo / 2, hi / 2))
    }

    /// Sites where some vector of the subspace acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        let mut touched = vec![false; self.n];
        for v in &self.basis {
            for b in v.iter_ones() {
                touched[b / 2] = true;
            }
        }
        (0..self.n).filter(|&i| touched[i]).collect()
    }

    /// `true` iff every pair of vectors has vanishing symplectic product.
    pub fn is_j_orthogonal_to(&self, other: &Subspace) -> bool {
        self.basis
            .iter()
            .all(|u| other.basis.iter().all(|v| !u.symplectic_product(v)))
    }

    /// `true` iff the subspace equals the direct sum of its single-site pieces.
    pub fn factors_per_site(&self) -> bool {
        let mut pieces = Subspace::zero(self.n);
        for site in 0..self.n {
            let local = self
                .supported_on(&[site])
                .expect("site index is in range");
            for v in local.basis {
                pieces.insert(v);
            }
        }
        pieces.dim() == self.dim()
    }

    /// All `2^dim` elements; only sensible for small dimensions.
    pub fn elements(&self) -> Vec<BitVector> {
        assert!(self.dim() <= 20, "refusing to enumerate a large subspace");
        let mut out = Vec::with_capacity(1 << self.dim());
        for mask in 0u32..(1 << self.dim()) {
            let mut v = BitVector::zeros(self.ambient_dim());
            for (i, row) in self.basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v.xor_assign(row);
                }
            }
            out.push(v);
        }
        out
    }

    fn site_mask(&self, sites: &[usize]) -> Result<BitVector> {
        let mut mask = BitVector::zeros(self.ambient_dim());
        for &s in sites {
            if s >= self.n {
                return Err(Error::SiteOutOfRange { site: s, n: self.n });
            }
            mask.set(2 * s, true);
            mask.set(2 * s + 1, true);
        }
        Ok(mask)
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: other.ambient_dim(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> BitVector {
        BitVector::unit(2 * n, 2 * i)
    }

    fn z(n: usize, i: usize) -> BitVector {
        BitVector::unit(2 * n, 2 * i + 1)
    }

    #[test]
    fn self_intersection_is_identity() {
        let v = Subspace::span(3, [x(3, 0).xor(&z(3, 1)), z(3, 2), x(3, 1)]);
        assert_eq!(v.intersection(&v).unwrap(), v);
    }

    #[test]
    fn disjoint_lines_meet_in_zero() {
        let a = Subspace::span(1, [x(1, 0)]);
        let b = Subspace::span(1, [z(1, 0)]);
        assert!(a.intersection(&b).unwrap().is_zero());
    }

    #[test]
    fn projection_zeroes_other_sites() {
        let v = Subspace::span(2, [x(2, 0).xor(&x(2, 1))]);
        let p = v.project_to_sites(&[1]).unwrap();
        assert_eq!(p, Subspace::span(2, [x(2, 1)]));
    }

    #[test]
    fn projection_rejects_bad_site() {
        let v = Subspace::zero(2);
        assert_eq!(
            v.project_to_sites(&[2]),
            Err(Error::SiteOutOfRange { site: 2, n: 2 })
        );
    }

    #[test]
    fn canonical_form_is_order_independent() {
        let a = Subspace::span(2, [x(2, 0).xor(&z(2, 1)), z(2, 1)]);
        let b = Subspace::span(2, [z(2, 1), x(2, 0)]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn factorisation_test() {
        let product = Subspace::span(2, [z(2, 0), x(2, 1)]);
        assert!(product.factors_per_site());
        let entangled = Subspace::span(2, [z(2, 0).xor(&z(2, 1))]);
        assert!(!entangled.factors_per_site());
    }

    #[test]
    fn intersection_matches_enumeration() {
        // brute-force check on a few random-ish pairs in GF(2)^6
        let n = 3;
        let pool: Vec<BitVector> = (1u64..64).map(|v| BitVector::from_u64(6, v)).collect();
        for seed in 0..40usize {
            let a = Subspace::span(n, (0..3).map(|j| pool[(seed * 7 + j * 13) % 63].clone()));
            let b = Subspace::span(n, (0..3).map(|j| pool[(seed * 11 + j * 5 + 3) % 63].clone()));
            let brute = Subspace::span(
                n,
                a.elements().into_iter().filter(|v| b.contains(v)),
            );
            assert_eq!(a.intersection(&b).unwrap(), brute);
        }
    }
}
