use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{staircase_words, ReducedCircuit};
use crate::clifford::{CliffordClass, TwoQubitClifford};
use crate::error::{Error, Result};
use crate::gf2::{
    closure, matrix_order, BitVector, LinearAction, Pauli, PauliString, Subspace, WordSpan,
    DEFAULT_ORDER_CAP,
};

/// Which environment injects operators into the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    fn source_site(self, sites: usize) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => sites - 1,
        }
    }
}

/// Staircase gates viewed as a linear map, for windows too wide for one word.
struct GateSlice<'a>(&'a [TwoQubitClifford]);

impl LinearAction for GateSlice<'_> {
    fn dimension(&self) -> usize {
        2 * (self.0.len() + 1)
    }

    fn act(&self, v: &BitVector) -> BitVector {
        let mut p = PauliString::from_bits(self.0.len() + 1, v.clone(), 0).expect("dimension checked");
        for (j, g) in self.0.iter().enumerate() {
            g.conjugate_at(&mut p, j, j + 1);
        }
        p.into_bits()
    }
}

/// Closure of the source boundary's generators, returned as a spanning set.
fn reach(gates: &[TwoQubitClifford], side: Side) -> Vec<BitVector> {
    let sites = gates.len() + 1;
    let src = side.source_site(sites);
    if sites <= 32 {
        let seeds = [1u64 << (2 * src), 1u64 << (2 * src + 1)];
        let span = WordSpan::closure(&seeds, |v| staircase_words(gates, v));
        return span.basis().map(|w| BitVector::from_u64(2 * sites, w)).collect();
    }
    let start = Subspace::sites(sites, [src]).expect("boundary site is in range");
    closure(&GateSlice(gates), &start)
        .expect("dimensions agree")
        .basis()
        .to_vec()
}

/// Wall test on a bare gate list, gate `j` on local sites `(j, j + 1)`.
pub(crate) fn is_wall_gates(gates: &[TwoQubitClifford], side: Side) -> bool {
    let sites = gates.len() + 1;
    let src = side.source_site(sites);
    let dst = side.opposite().source_site(sites);
    if sites <= 32 {
        let seeds = [1u64 << (2 * src), 1u64 << (2 * src + 1)];
        let span = WordSpan::closure(&seeds, |v| staircase_words(gates, v));
        return span.support() >> (2 * dst) & 0b11 == 0;
    }
    reach(gates, side)
        .iter()
        .all(|v| !v.get(2 * dst) && !v.get(2 * dst + 1))
}

/// No proper contiguous sub-window, single gates included, is a wall.
pub(crate) fn is_irreducible_gates(gates: &[TwoQubitClifford]) -> bool {
    let len = gates.len();
    (1..len).all(|w| (0..=len - w).all(|first| !is_wall_gates(&gates[first..first + w], Side::Left)))
}

/// `true` iff operators injected on the `side` boundary never reach the other one.
pub fn is_wall(rc: &ReducedCircuit, side: Side) -> bool {
    is_wall_gates(rc.gates(), side)
}

/// Both one-sided conditions at once.
pub fn two_sided_check(rc: &ReducedCircuit) -> bool {
    is_wall(rc, Side::Left) && is_wall(rc, Side::Right)
}

/// Projections of the left and right reaches onto the `k` central sites.
pub fn internal_subspaces(rc: &ReducedCircuit) -> (Subspace, Subspace) {
    let k = rc.k();
    let central = |side| {
        Subspace::span(
            k,
            reach(rc.gates(), side).iter().map(|v| v.slice(2, 2 * k)),
        )
    };
    (central(Side::Left), central(Side::Right))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedCharge {
    pub tau: u64,
    /// `0` or `π`: the sign picked up after one full orbit.
    pub theta: f64,
    /// Signed Paulis on the central sites, `orbit[t]` being the image after `t` periods.
    pub orbit: Vec<PauliString>,
}

impl ConservedCharge {
    /// Coefficients `e^{-iθt/τ}` of `Q = Σ_t e^{-iθt/τ} M(t)`.
    pub fn weights(&self) -> Vec<num_complex::Complex64> {
        (0..self.tau)
            .map(|t| num_complex::Complex64::from_polar(1.0, -self.theta * t as f64 / self.tau as f64))
            .collect()
    }
}

/// Orbits of the Paulis in `G_left ∩ G_right`, one per independent orbit.
///
/// Candidates are taken lightest first, so the charges come out as local as the
/// intersection allows.
pub fn conserved_charges(rc: &ReducedCircuit) -> Result<Vec<ConservedCharge>> {
    let (gl, gr) = internal_subspaces(rc);
    charges_from(rc, &gl.intersection(&gr)?)
}

fn charges_from(rc: &ReducedCircuit, inter: &Subspace) -> Result<Vec<ConservedCharge>> {
    let k = rc.k();
    let sites = rc.num_sites();
    let mut candidates: Vec<BitVector> = if inter.dim() <= 16 {
        inter.elements().into_iter().filter(|v| !v.is_zero()).collect()
    } else {
        inter.basis().to_vec()
    };
    candidates.sort_by_key(|v| {
        let p = PauliString::hermitian(v.clone(), false);
        (p.weight(), v.iter_ones().collect::<Vec<_>>())
    });

    let mut covered = Subspace::zero(k);
    let mut charges = Vec::new();
    for g in candidates {
        if covered.contains(&g) {
            continue;
        }
        let start = PauliString::hermitian(g.embed(2 * sites, 2), false);
        let mut p = start.clone();
        let mut orbit = vec![start.restrict(1, k)];
        let mut tau = 0;
        for t in 1..=DEFAULT_ORDER_CAP {
            rc.conjugate(&mut p);
            let outside = [0, sites - 1].iter().any(|&s| p.site(s) != Pauli::I);
            if outside {
                return Err(Error::Consistency(format!(
                    "orbit of {} leaves the central sites after {t} periods",
                    orbit[0]
                )));
            }
            if p.bits() == start.bits() {
                tau = t;
                break;
            }
            orbit.push(p.restrict(1, k));
        }
        if tau == 0 {
            return Err(Error::Consistency("charge orbit exceeds the order cap".into()));
        }
        let theta = if p.phase_exp() == start.phase_exp() { 0.0 } else { PI };
        for m in &orbit {
            covered.insert(m.bits().clone());
        }
        charges.push(ConservedCharge { tau, theta, orbit });
    }
    Ok(charges)
}

/// `true` iff no proper sub-window of width `k' < k` (single gates included) is a wall.
pub fn is_irreducible(rc: &ReducedCircuit) -> bool {
    is_irreducible_gates(rc.gates())
}

/// Time-iteration oracle: evolves `X`, `Y`, `Z` on the source boundary for
/// `4 · ord(M)` periods with signed strings and watches the far boundary.
pub fn is_wall_bruteforce(rc: &ReducedCircuit, side: Side) -> bool {
    let sites = rc.num_sites();
    let src = side.source_site(sites);
    let dst = side.opposite().source_site(sites);
    let order = matrix_order(rc.symp(), DEFAULT_ORDER_CAP)
        .finite()
        .unwrap_or(DEFAULT_ORDER_CAP);
    let horizon = 4 * order;
    [Pauli::X, Pauli::Y, Pauli::Z].iter().all(|&letter| {
        let mut p = PauliString::single(sites, src, letter);
        (0..horizon).all(|_| {
            rc.conjugate(&mut p);
            p.site(dst) == Pauli::I
        })
    })
}

/// Everything known about one wall window.
#[derive(Clone, Debug, PartialEq)]
pub struct WallReport {
    /// Leftmost central site in circuit coordinates.
    pub position: usize,
    pub k: usize,
    pub is_left_wall: bool,
    pub is_right_wall: bool,
    pub irreducible: bool,
    pub g_left: Subspace,
    pub g_right: Subspace,
    pub charges: Vec<ConservedCharge>,
    pub interfering: bool,
    pub unperturbed: bool,
}

#[derive(Serialize)]
struct ReportLine<'a> {
    pos: usize,
    k: usize,
    irreducible: bool,
    interfering: bool,
    unperturbed: bool,
    charges: &'a [ConservedCharge],
}

impl WallReport {
    /// Analyses `rc` if it is a left wall; `position` and `unperturbed` are
    /// supplied by the caller, who knows where the window sits.
    pub fn analyse(rc: &ReducedCircuit, position: usize, unperturbed: bool) -> Result<Option<WallReport>> {
        if !is_wall(rc, Side::Left) {
            return Ok(None);
        }
        let (g_left, g_right) = internal_subspaces(rc);
        let charges = charges_from(rc, &g_left.intersection(&g_right)?)?;
        Ok(Some(WallReport {
            position,
            k: rc.k(),
            is_left_wall: true,
            is_right_wall: is_wall(rc, Side::Right),
            irreducible: is_irreducible(rc),
            interfering: !(g_left.factors_per_site() && g_right.factors_per_site()),
            g_left,
            g_right,
            charges,
            unperturbed,
        }))
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&ReportLine {
            pos: self.position,
            k: self.k,
            irreducible: self.irreducible,
            interfering: self.interfering,
            unperturbed: self.unperturbed,
            charges: &self.charges,
        })
        .expect("reports serialize")
    }

    /// The end gates of an irreducible wall are CZ-like, the interior ones dual-unitary.
    pub fn class_pattern_holds(rc: &ReducedCircuit) -> bool {
        let gates = rc.gates();
        let last = gates.len() - 1;
        gates.iter().enumerate().all(|(j, g)| {
            if j == 0 || j == last {
                g.class() == CliffordClass::Cz
            } else {
                matches!(g.class(), CliffordClass::Swap | CliffordClass::Fswap)
            }
        })
    }
}
