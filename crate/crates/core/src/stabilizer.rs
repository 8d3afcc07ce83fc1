//! Stabilizer states of the Clifford-only circuit and their entanglement.

use serde::Serialize;

use crate::circuit::FloquetCircuit;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Pauli, PauliString, Subspace};

/// `n` commuting, independent signed Paulis fixing a pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerTableau {
    n: usize,
    generators: Vec<PauliString>,
}

impl StabilizerTableau {
    /// `|0…0⟩`, stabilized by `+Z_i`.
    pub fn init_zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one qubit".into()));
        }
        Ok(Self {
            n,
            generators: (0..n).map(|i| PauliString::single(n, i, Pauli::Z)).collect(),
        })
    }

    pub fn from_generators(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one generator".into()));
        }
        if generators.iter().any(|g| g.num_qubits() != n || !g.is_hermitian()) {
            return Err(Error::InvalidParameter(
                "generators must be n Hermitian n-qubit Paulis".into(),
            ));
        }
        for (i, a) in generators.iter().enumerate() {
            if generators[i + 1..].iter().any(|b| !a.commutes_with(b)) {
                return Err(Error::InvalidParameter("generators do not commute".into()));
            }
        }
        let span = Subspace::span(n, generators.iter().map(|g| g.bits().clone()));
        if span.dim() != n {
            return Err(Error::InvalidParameter("generators are dependent".into()));
        }
        Ok(Self { n, generators })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// One Floquet period of a rotation-free circuit.
    pub fn evolve(&mut self, c: &FloquetCircuit) -> Result<()> {
        if c.has_rotations() {
            return Err(Error::NonClifford);
        }
        if c.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: c.n(),
            });
        }
        for g in &mut self.generators {
            c.conjugate_clifford(g);
        }
        Ok(())
    }

    /// `S = |L| − N_L` in bits for `L = 0..cut`, where `N_L` counts independent
    /// stabilizers supported on `L`, i.e. `n − rank` of the projection onto `R`.
    pub fn entropy(&self, cut: usize) -> Result<usize> {
        if cut == 0 || cut >= self.n {
            return Err(Error::InvalidParameter(format!(
                "cut {cut} leaves an empty side of a {}-qubit chain",
                self.n
            )));
        }
        let right_len = self.n - cut;
        let projected = Subspace::span(
            right_len,
            self.generators.iter().map(|g| g.bits().slice(2 * cut, 2 * right_len)),
        );
        let n_l = self.n - projected.dim();
        Ok(cut - n_l)
    }

    /// Group elements supported on `sites`, as a subspace of the full register.
    pub fn supported_on(&self, sites: &[usize]) -> Result<Subspace> {
        Subspace::span(self.n, self.generators.iter().map(|g| g.bits().clone())).supported_on(sites)
    }
}

/// Half-chain cut for the wall experiments: the left part has `ceil(n / 2)` sites.
pub fn half_cut(n: usize) -> usize {
    n.div_ceil(2)
}

/// Entropy across `cut` at `t = 0..=tmax`, starting from `|0…0⟩`.
pub fn entropy_trace(c: &FloquetCircuit, tmax: usize, cut: usize) -> Result<Vec<usize>> {
    let mut tab = StabilizerTableau::init_zero(c.n())?;
    let mut out = Vec::with_capacity(tmax + 1);
    out.push(tab.entropy(cut)?);
    for _ in 0..tmax {
        tab.evolve(c)?;
        out.push(tab.entropy(cut)?);
    }
    Ok(out)
}

/// One CSV row of an entropy trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub realization: u64,
    pub t: usize,
    pub cut: usize,
    #[serde(rename = "S")]
    pub s: usize,
}

/// Bits with a single Pauli on `site`, useful for building product stabilizers.
pub fn site_bits(n: usize, site: usize, letter: Pauli) -> BitVector {
    PauliString::single(n, site, letter).into_bits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{setup_circuit, wall_centre, Bricking, Setup};
    use crate::clifford::TwoQubitClifford;

    fn bell() -> StabilizerTableau {
        StabilizerTableau::from_generators(vec!["+XX".parse().unwrap(), "+ZZ".parse().unwrap()]).unwrap()
    }

    #[test]
    fn zero_state() {
        let t = StabilizerTableau::init_zero(3).unwrap();
        let s: Vec<String> = t.generators().iter().map(|g| g.to_string()).collect();
        assert_eq!(s, ["+ZII", "+IZI", "+IIZ"]);
        assert_eq!(t.entropy(1).unwrap(), 0);
        assert_eq!(t.entropy(2).unwrap(), 0);
        assert!(StabilizerTableau::init_zero(0).is_err());
        assert!(t.entropy(0).is_err() && t.entropy(3).is_err());
    }

    #[test]
    fn bell_pair_has_one_bit() {
        assert_eq!(bell().entropy(1).unwrap(), 1);
        assert!(StabilizerTableau::from_generators(vec!["+XI".parse().unwrap(), "+ZI".parse().unwrap()]).is_err());
    }

    #[test]
    fn cz_fixes_the_zero_state() {
        let c = FloquetCircuit::from_gates(vec![TwoQubitClifford::cz()], Bricking::EvenFirst).unwrap();
        let mut t = StabilizerTableau::init_zero(2).unwrap();
        t.evolve(&c).unwrap();
        assert_eq!(t, StabilizerTableau::init_zero(2).unwrap());
    }

    #[test]
    fn rotations_are_rejected() {
        let c = FloquetCircuit::build(4, 1.0, 0).unwrap();
        let mut t = StabilizerTableau::init_zero(4).unwrap();
        assert_eq!(t.evolve(&c), Err(Error::NonClifford));
    }

    #[test]
    fn entropy_is_symmetric_and_bounded() {
        for seed in 0..30 {
            let c = FloquetCircuit::build(7, 0.0, seed).unwrap();
            let mut t = StabilizerTableau::init_zero(7).unwrap();
            for _ in 0..20 {
                t.evolve(&c).unwrap();
                for cut in 1..7 {
                    let s = t.entropy(cut).unwrap();
                    assert!(s <= cut.min(7 - cut));
                    let left = Subspace::span(
                        cut,
                        t.generators().iter().map(|g| g.bits().slice(0, 2 * cut)),
                    );
                    let s_right = (7 - cut) - (7 - left.dim());
                    assert_eq!(s_right, s);
                }
            }
        }
    }

    #[test]
    fn wall_bounds_entropy_by_one() {
        for r in 0..200 {
            let c = setup_circuit(Setup::Localisation, 9, 0.0, 11, r).unwrap();
            let trace = entropy_trace(&c, 200, half_cut(9)).unwrap();
            assert!(trace.iter().all(|&s| s <= 1), "realization {r}");
            assert_eq!(half_cut(9), wall_centre(9) + 1);
        }
    }
}
