use super::floquet::FloquetCircuit;
use crate::clifford::TwoQubitClifford;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, LinearAction, PauliString, SymplecticMatrix};

/// `k + 1` gates on `k + 2` local sites, gate `j` acting on `(j, j + 1)` and the
/// gates applied in order `0, 1, …, k` (the staircase slicing).
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedCircuit {
    k: usize,
    gates: Vec<TwoQubitClifford>,
    symp: SymplecticMatrix,
}

impl ReducedCircuit {
    pub fn new(gates: Vec<TwoQubitClifford>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::InvalidParameter("a reduced circuit needs at least one gate".into()));
        }
        let k = gates.len() - 1;
        let mut rc = Self {
            k,
            gates,
            symp: SymplecticMatrix::identity(k + 2),
        };
        let cols: Vec<BitVector> = (0..2 * (k + 2))
            .map(|j| rc.act(&BitVector::unit(2 * (k + 2), j)))
            .collect();
        rc.symp = SymplecticMatrix::from_column_images(&cols)?;
        Ok(rc)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn num_sites(&self) -> usize {
        self.k + 2
    }

    pub fn gates(&self) -> &[TwoQubitClifford] {
        &self.gates
    }

    pub fn symp(&self) -> &SymplecticMatrix {
        &self.symp
    }

    /// Sub-window of gates `first..first + k' + 1`.
    pub fn window(&self, first: usize, k: usize) -> Result<ReducedCircuit> {
        if first + k + 1 > self.gates.len() {
            return Err(Error::WindowOutOfRange {
                start: first,
                k,
                n: self.num_sites(),
            });
        }
        ReducedCircuit::new(self.gates[first..first + k + 1].to_vec())
    }

    /// One period with phases, `p ↦ U p U†`.
    pub fn conjugate(&self, p: &mut PauliString) {
        for (j, g) in self.gates.iter().enumerate() {
            g.conjugate_at(p, j, j + 1);
        }
    }

    /// Interleaved-site code path used by the hot loops: one 4-bit lookup per gate.
    #[inline]
    pub(crate) fn act_words(&self, v: u64) -> u64 {
        staircase_words(&self.gates, v)
    }
}

/// Phase-blind staircase action on a packed register of at most 32 sites.
#[inline]
pub(crate) fn staircase_words(gates: &[TwoQubitClifford], v: u64) -> u64 {
    let mut v = v;
    for (j, g) in gates.iter().enumerate() {
        let shift = 2 * j;
        let code = ((v >> shift) & 0xF) as u8;
        v = (v & !(0xF << shift)) | ((g.apply_code(code) as u64) << shift);
    }
    v
}

impl LinearAction for ReducedCircuit {
    fn dimension(&self) -> usize {
        2 * (self.k + 2)
    }

    fn act(&self, v: &BitVector) -> BitVector {
        if self.dimension() <= 64 {
            return BitVector::from_u64(v.len(), self.act_words(v.to_u64()));
        }
        let mut p = PauliString::from_bits(self.k + 2, v.clone(), 0).expect("dimension checked");
        self.conjugate(&mut p);
        p.into_bits()
    }
}

/// Brickwork ordering of the same window: gates whose bond has the circuit's
/// first-layer parity act first.
#[derive(Clone, Debug)]
pub struct BrickWindow {
    gates: Vec<TwoQubitClifford>,
    first_parity: usize,
}

impl BrickWindow {
    pub fn new(gates: Vec<TwoQubitClifford>, first_parity: usize) -> Self {
        Self {
            gates,
            first_parity,
        }
    }
}

impl LinearAction for BrickWindow {
    fn dimension(&self) -> usize {
        2 * (self.gates.len() + 1)
    }

    fn act(&self, v: &BitVector) -> BitVector {
        let mut p = PauliString::from_bits(self.gates.len() + 1, v.clone(), 0).expect("dimension checked");
        for parity in [self.first_parity, 1 - self.first_parity] {
            for (j, g) in self.gates.iter().enumerate().filter(|(j, _)| j % 2 == parity) {
                g.conjugate_at(&mut p, j, j + 1);
            }
        }
        p.into_bits()
    }
}

/// Gates on bonds `start..=start + k`, i.e. the window of sites
/// `start..=start + k + 1`, in staircase order.
pub fn reduce_staircase(c: &FloquetCircuit, start: usize, k: usize) -> Result<ReducedCircuit> {
    if start + k + 1 > c.n() - 1 {
        return Err(Error::WindowOutOfRange { start, k, n: c.n() });
    }
    ReducedCircuit::new((start..=start + k).map(|b| *c.gate(b)).collect())
}

/// The same window in its brickwork ordering; bond `start + j` is local gate `j`.
pub fn brick_window(c: &FloquetCircuit, start: usize, k: usize) -> Result<BrickWindow> {
    if start + k + 1 > c.n() - 1 {
        return Err(Error::WindowOutOfRange { start, k, n: c.n() });
    }
    let first_parity = (c.bricking().parity(0) + start) % 2;
    Ok(BrickWindow::new(
        (start..=start + k).map(|b| *c.gate(b)).collect(),
        first_parity,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Bricking;
    use crate::gf2::symplectic_check;

    #[test]
    fn symp_is_ordered_product() {
        let c = FloquetCircuit::build(8, 0.0, 9).unwrap();
        let rc = reduce_staircase(&c, 2, 3).unwrap();
        assert!(symplectic_check(rc.symp().rows()).unwrap());
        let mut prod = SymplecticMatrix::identity(5);
        for (j, g) in rc.gates().iter().enumerate() {
            prod = g.symp().embed(5, j).unwrap().mul(&prod).unwrap();
        }
        assert_eq!(&prod, rc.symp());
    }

    #[test]
    fn window_bounds() {
        let c = FloquetCircuit::build(6, 0.0, 1).unwrap();
        assert!(reduce_staircase(&c, 0, 4).is_ok());
        assert!(matches!(
            reduce_staircase(&c, 1, 4),
            Err(Error::WindowOutOfRange { .. })
        ));
        let rc = reduce_staircase(&c, 3, 0).unwrap();
        assert_eq!(rc.k(), 0);
        assert_eq!(rc.num_sites(), 2);
    }

    #[test]
    fn word_path_matches_pauli_path() {
        let c = FloquetCircuit::build(12, 0.0, 5).unwrap();
        let rc = reduce_staircase(&c, 1, 4).unwrap();
        for v in 0u64..(1 << 12) {
            let bv = BitVector::from_u64(12, v);
            let mut p = PauliString::from_bits(6, bv, 0).unwrap();
            rc.conjugate(&mut p);
            assert_eq!(p.bits().to_u64(), rc.act_words(v));
        }
        let _ = Bricking::default();
    }
}
