use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{SingleQubitClifford, TwoQubitClifford};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, LinearAction, PauliString, SymplecticMatrix};
use crate::rng::{haar_quaternion, stream};

/// Which bond parity is applied first within a period.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bricking {
    #[default]
    EvenFirst,
    OddFirst,
}

impl Bricking {
    /// Parity of the bonds in layer `layer` (0 = applied first).
    pub fn parity(self, layer: usize) -> usize {
        match self {
            Bricking::EvenFirst => layer & 1,
            Bricking::OddFirst => (layer + 1) & 1,
        }
    }

    /// Layer (0 or 1) in which bond `bond` acts.
    pub fn layer_of(self, bond: usize) -> usize {
        match self {
            Bricking::EvenFirst => bond & 1,
            Bricking::OddFirst => (bond + 1) & 1,
        }
    }
}

/// Single-qubit Clifford completing a layer at an uncovered chain end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeGate {
    pub layer: usize,
    pub site: usize,
    #[serde(with = "c1_index")]
    pub gate: SingleQubitClifford,
}

mod c1_index {
    use super::SingleQubitClifford;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(g: &SingleQubitClifford, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(g.index() as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SingleQubitClifford, D::Error> {
        let idx = u8::deserialize(d)?;
        SingleQubitClifford::from_index(idx as usize).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BondGate {
    pub bond: usize,
    pub gate: TwoQubitClifford,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub site: usize,
    pub q: [f64; 4],
}

/// One Floquet period `U = R · C_second · C_first` on an open chain of `n` sites.
///
/// Bond `b` couples sites `b` and `b + 1`. The rotation layer `R` acts on the
/// masked sites only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloquetCircuit {
    n: usize,
    p: f64,
    seed: u64,
    #[serde(default)]
    first: Bricking,
    gates: Vec<BondGate>,
    edges: Vec<EdgeGate>,
    mask: Vec<bool>,
    quaternions: Vec<Rotation>,
}

/// Sites left uncovered by the bonds of one parity.
fn uncovered(n: usize, parity: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if parity == 1 {
        out.push(0);
    }
    // the last site is covered iff bond n-2 has this parity
    if (n - 2) % 2 != parity {
        out.push(n - 1);
    }
    out
}

impl FloquetCircuit {
    /// Samples realization 0 of `(n, p, seed)` with even bonds first.
    pub fn build(n: usize, p: f64, seed: u64) -> Result<Self> {
        Self::build_realization(n, p, seed, 0, Bricking::EvenFirst)
    }

    /// Samples in a fixed order: bond gates, edge gates, mask, then rotations.
    pub fn build_realization(
        n: usize,
        p: f64,
        seed: u64,
        realization: u64,
        first: Bricking,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
        }
        Ok(Self::sample_from(n, p, seed, first, &mut stream(seed, realization)))
    }

    /// Draws one circuit from `rng`; `seed` is only recorded.
    pub(crate) fn sample_from<R: Rng + ?Sized>(
        n: usize,
        p: f64,
        seed: u64,
        first: Bricking,
        rng: &mut R,
    ) -> Self {
        let gates = (0..n - 1)
            .map(|bond| BondGate {
                bond,
                gate: TwoQubitClifford::sample_nonproduct(rng),
            })
            .collect();
        let mut edges = Vec::new();
        for layer in 0..2 {
            for site in uncovered(n, first.parity(layer)) {
                edges.push(EdgeGate {
                    layer,
                    site,
                    gate: SingleQubitClifford::sample(rng),
                });
            }
        }
        let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(p)).collect();
        let quaternions = mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(site, _)| Rotation {
                site,
                q: haar_quaternion(rng),
            })
            .collect();
        Self {
            n,
            p,
            seed,
            first,
            gates,
            edges,
            mask,
            quaternions,
        }
    }

    /// Deterministic circuit with the given bond gates, trivial edges and no mask.
    pub fn from_gates(gates: Vec<TwoQubitClifford>, first: Bricking) -> Result<Self> {
        let n = gates.len() + 1;
        if n < 2 {
            return Err(Error::InvalidParameter("need at least one bond".into()));
        }
        let mut edges = Vec::new();
        for layer in 0..2 {
            for site in uncovered(n, first.parity(layer)) {
                edges.push(EdgeGate {
                    layer,
                    site,
                    gate: SingleQubitClifford::identity(),
                });
            }
        }
        Ok(Self {
            n,
            p: 0.0,
            seed: 0,
            first,
            gates: gates
                .into_iter()
                .enumerate()
                .map(|(bond, gate)| BondGate { bond, gate })
                .collect(),
            edges,
            mask: vec![false; n],
            quaternions: Vec::new(),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: FloquetCircuit =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuits serialize")
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 2 || self.gates.len() != n - 1 || self.mask.len() != n {
            return Err(Error::Parse("inconsistent circuit sizes".into()));
        }
        if self.gates.iter().enumerate().any(|(i, g)| g.bond != i) {
            return Err(Error::Parse("bond gates must be listed in bond order".into()));
        }
        let masked: Vec<usize> = (0..n).filter(|&i| self.mask[i]).collect();
        let rotated: Vec<usize> = self.quaternions.iter().map(|r| r.site).collect();
        if masked != rotated {
            return Err(Error::Parse("rotations must match the mask".into()));
        }
        for r in &self.quaternions {
            let norm: f64 = r.q.iter().map(|x| x * x).sum();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::Parse(format!("non-unit quaternion at site {}", r.site)));
            }
        }
        for e in &self.edges {
            if e.layer > 1 || e.site >= n {
                return Err(Error::Parse("edge gate out of range".into()));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bricking(&self) -> Bricking {
        self.first
    }

    #[inline]
    pub fn gate(&self, bond: usize) -> &TwoQubitClifford {
        &self.gates[bond].gate
    }

    pub fn gates(&self) -> impl Iterator<Item = &TwoQubitClifford> {
        self.gates.iter().map(|g| &g.gate)
    }

    pub fn set_gate(&mut self, bond: usize, gate: TwoQubitClifford) {
        self.gates[bond].gate = gate;
    }

    pub fn edges(&self) -> &[EdgeGate] {
        &self.edges
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn is_masked(&self, site: usize) -> bool {
        self.mask[site]
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.quaternions
    }

    pub fn has_rotations(&self) -> bool {
        !self.quaternions.is_empty()
    }

    /// Puts a rotation on `site` (or removes it with `None`).
    pub fn set_rotation(&mut self, site: usize, q: Option<[f64; 4]>) {
        self.quaternions.retain(|r| r.site != site);
        self.mask[site] = q.is_some();
        if let Some(q) = q {
            let pos = self.quaternions.partition_point(|r| r.site < site);
            self.quaternions.insert(pos, Rotation { site, q });
        }
    }

    /// Bonds of layer `layer` (0 = applied first).
    pub fn layer_bonds(&self, layer: usize) -> impl Iterator<Item = usize> + '_ {
        let parity = self.first.parity(layer);
        (parity..self.n - 1).step_by(2)
    }

    /// Conjugates `p` by the Clifford part `C_second · C_first`, phases included.
    pub fn conjugate_clifford(&self, p: &mut PauliString) {
        for layer in 0..2 {
            for bond in self.layer_bonds(layer) {
                self.gates[bond].gate.conjugate_at(p, bond, bond + 1);
            }
            for e in self.edges.iter().filter(|e| e.layer == layer) {
                e.gate.conjugate_at(p, e.site);
            }
        }
    }

    /// The full `2n × 2n` symplectic image of the Clifford part.
    pub fn symplectic_image(&self) -> SymplecticMatrix {
        let cols: Vec<BitVector> = (0..2 * self.n)
            .map(|j| self.act(&BitVector::unit(2 * self.n, j)))
            .collect();
        SymplecticMatrix::from_column_images(&cols).expect("Clifford circuits are symplectic")
    }

    /// Images of the `2n` generators under the Clifford part, with signs.
    pub fn generator_images(&self) -> Vec<PauliString> {
        (0..2 * self.n)
            .map(|j| {
                let mut p = PauliString::hermitian(BitVector::unit(2 * self.n, j), false);
                self.conjugate_clifford(&mut p);
                p
            })
            .collect()
    }
}

/// Phase-blind action of the Clifford part on support vectors.
impl LinearAction for FloquetCircuit {
    fn dimension(&self) -> usize {
        2 * self.n
    }

    fn act(&self, v: &BitVector) -> BitVector {
        let mut p = PauliString::from_bits(self.n, v.clone(), 0).expect("dimension checked");
        self.conjugate_clifford(&mut p);
        p.into_bits()
    }
}
