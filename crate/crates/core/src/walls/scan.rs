use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use super::detect::{is_irreducible_gates, is_wall_gates, Side, WallReport};
use crate::circuit::{FloquetCircuit, ReducedCircuit};
use crate::clifford::TwoQubitClifford;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, LinearAction, Subspace};

/// All irreducible walls of width `1..=k_max`, sorted by `(position, k)`.
///
/// A window starting at bond `s` with width `k` uses bonds `s..=s+k`; its central
/// sites are `s+1..=s+k`.
pub fn scan_circuit(c: &FloquetCircuit, k_max: usize) -> Result<Vec<WallReport>> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let n = c.n();
    let windows: Vec<(usize, usize)> = (1..=k_max)
        .flat_map(|k| (0..n.saturating_sub(k + 1)).map(move |s| (s, k)))
        .collect();
    let found: Vec<Option<WallReport>> = windows
        .par_iter()
        .map(|&(s, k)| {
            let gates: Vec<TwoQubitClifford> = (s..=s + k).map(|b| *c.gate(b)).collect();
            if !is_wall_gates(&gates, Side::Left) || !is_irreducible_gates(&gates) {
                return Ok(None);
            }
            let unperturbed = (s + 1..=s + k).all(|site| !c.is_masked(site));
            WallReport::analyse(&ReducedCircuit::new(gates)?, s + 1, unperturbed)
        })
        .collect::<Result<_>>()?;
    let mut reports: Vec<WallReport> = found.into_iter().flatten().collect();
    reports.sort_by_key(|r| (r.position, r.k));
    Ok(reports)
}

/// Inclusive site interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fragment {
    pub start: usize,
    pub end: usize,
}

impl Fragment {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, site: usize) -> bool {
        (self.start..=self.end).contains(&site)
    }
}

/// A boundary found by the sweep: operators from sites `< start` stay at or left
/// of `end`, and operators from sites `> end` stay at or right of `start`.
/// `start > end` marks a product cut between `end` and `start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SweepWall {
    pub start: usize,
    pub end: usize,
    /// Dimension of the left reach projected onto the wall sites.
    pub left_dim: usize,
    /// Same for the right reach.
    pub right_dim: usize,
}

impl SweepWall {
    pub fn width(&self) -> usize {
        (self.end + 1).saturating_sub(self.start)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FragmentDecomposition {
    pub n: usize,
    pub fragments: Vec<Fragment>,
    pub walls: Vec<SweepWall>,
}

impl FragmentDecomposition {
    /// Distances between the first sites of consecutive walls.
    pub fn wall_spacings(&self) -> Vec<usize> {
        self.walls.windows(2).map(|w| w[1].start - w[0].start).collect()
    }

    /// Fragment holding `site` away from any wall, if the site is not a wall site.
    pub fn fragment_of(&self, site: usize) -> Option<Fragment> {
        let mut hits = self.fragments.iter().filter(|f| f.contains(site));
        let first = hits.next()?;
        if hits.next().is_some() {
            return None;
        }
        Some(*first)
    }
}

/// Incremental closure under the Clifford part, saturating masked sites: a generic
/// rotation turns any Pauli on its site into a mixture of all three.
struct Sweep<'a> {
    c: &'a FloquetCircuit,
    span: Subspace,
    saturated: Vec<bool>,
    lo: usize,
    hi: usize,
}

impl<'a> Sweep<'a> {
    fn new(c: &'a FloquetCircuit) -> Self {
        Self {
            c,
            span: Subspace::zero(c.n()),
            saturated: vec![false; c.n()],
            lo: usize::MAX,
            hi: 0,
        }
    }

    fn add_site(&mut self, site: usize) {
        let mut pending = Vec::new();
        let mut queue = VecDeque::new();
        self.saturate(site, &mut pending);
        loop {
            while let Some(v) = pending.pop() {
                self.push(v, &mut pending, &mut queue);
            }
            let Some(w) = queue.pop_front() else { break };
            pending.push(self.c.act(&w));
        }
    }

    fn saturate(&mut self, site: usize, pending: &mut Vec<BitVector>) {
        let dim = 2 * self.c.n();
        self.saturated[site] = true;
        pending.push(BitVector::unit(dim, 2 * site));
        pending.push(BitVector::unit(dim, 2 * site + 1));
    }

    fn push(&mut self, v: BitVector, pending: &mut Vec<BitVector>, queue: &mut VecDeque<BitVector>) {
        if !self.span.insert(v.clone()) {
            return;
        }
        let (Some(first), Some(last)) = (v.first_one(), v.last_one()) else {
            return;
        };
        self.lo = self.lo.min(first / 2);
        self.hi = self.hi.max(last / 2);
        for b in v.iter_ones() {
            let site = b / 2;
            if self.c.is_masked(site) && !self.saturated[site] {
                self.saturate(site, pending);
            }
        }
        queue.push_back(v);
    }

    fn block_dim(&self, start: usize, end: usize) -> usize {
        if start > end {
            return 0;
        }
        self.span
            .restrict_to_block(start, end + 1 - start)
            .expect("block lies inside the chain")
            .dim()
    }
}

/// `(start, end, dim)` per boundary of a one-directional sweep.
fn prefix_boundaries(c: &FloquetCircuit) -> Vec<(usize, usize, usize)> {
    let n = c.n();
    let mut sweep = Sweep::new(c);
    let mut reach = Vec::with_capacity(n);
    let mut dims = Vec::with_capacity(n);
    for b in 0..n {
        sweep.add_site(b);
        reach.push(sweep.hi);
        dims.push(sweep.block_dim(b + 1, sweep.hi));
    }
    (0..n - 1)
        .filter(|&b| reach[b] < n - 1 && reach[b + 1] != reach[b])
        .map(|b| (b + 1, reach[b], dims[b]))
        .collect()
}

fn suffix_boundaries(c: &FloquetCircuit) -> Vec<(usize, usize, usize)> {
    let n = c.n();
    let mut sweep = Sweep::new(c);
    let mut reach = vec![0; n];
    let mut dims = vec![0; n];
    for b in (0..n).rev() {
        sweep.add_site(b);
        reach[b] = sweep.lo;
        dims[b] = if b == 0 { 0 } else { sweep.block_dim(sweep.lo, b - 1) };
    }
    let mut out: Vec<(usize, usize, usize)> = (1..n)
        .filter(|&b| reach[b] > 0 && reach[b - 1] != reach[b])
        .map(|b| (reach[b], b - 1, dims[b]))
        .collect();
    out.sort();
    out
}

/// Splits the chain at every place operator spreading stops, counting all
/// walls (any width) and product cuts. Neighbouring fragments share the wall
/// sites between them.
pub fn fragment_decomposition(c: &FloquetCircuit) -> Result<FragmentDecomposition> {
    let n = c.n();
    let left = prefix_boundaries(c);
    let right = suffix_boundaries(c);
    let same = left.len() == right.len()
        && left.iter().zip(&right).all(|(l, r)| (l.0, l.1) == (r.0, r.1));
    if !same {
        return Err(Error::Consistency(format!(
            "left and right sweeps disagree: {:?} vs {:?}",
            left.iter().map(|l| (l.0, l.1)).collect::<Vec<_>>(),
            right.iter().map(|r| (r.0, r.1)).collect::<Vec<_>>()
        )));
    }
    let walls: Vec<SweepWall> = left
        .iter()
        .zip(&right)
        .map(|(l, r)| SweepWall {
            start: l.0,
            end: l.1,
            left_dim: l.2,
            right_dim: r.2,
        })
        .collect();
    let mut fragments = Vec::with_capacity(walls.len() + 1);
    let mut a = 0;
    for w in &walls {
        fragments.push(Fragment { start: a, end: w.end });
        a = w.start;
    }
    fragments.push(Fragment { start: a, end: n - 1 });
    Ok(FragmentDecomposition { n, fragments, walls })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Bricking;
    use crate::clifford::SingleQubitClifford;
    use crate::gf2::PauliString;

    fn planted(n: usize, centre: usize, seed: u64) -> FloquetCircuit {
        // dual-unitary background so nothing else stops spreading
        let mut gates = vec![TwoQubitClifford::fswap(); n - 1];
        let mut rng = crate::rng::stream(seed, 0);
        for g in gates.iter_mut() {
            let legs = [(); 4].map(|_| SingleQubitClifford::sample(&mut rng));
            *g = TwoQubitClifford::from_dressing(crate::clifford::Dressing {
                class: crate::clifford::CliffordClass::Swap,
                legs,
            });
        }
        gates[centre - 1] = TwoQubitClifford::cz();
        gates[centre] = TwoQubitClifford::cz();
        FloquetCircuit::from_gates(gates, Bricking::EvenFirst).unwrap()
    }

    #[test]
    fn planted_wall_is_found_by_scan() {
        let c = planted(12, 6, 3);
        let reports = scan_circuit(&c, 3).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!((reports[0].position, reports[0].k), (6, 1));
        assert!(reports[0].unperturbed);
    }

    #[test]
    fn all_swap_circuit_has_no_walls() {
        let c = FloquetCircuit::from_gates(vec![TwoQubitClifford::swap(); 9], Bricking::EvenFirst)
            .unwrap();
        assert!(scan_circuit(&c, 3).unwrap().is_empty());
        let d = fragment_decomposition(&c).unwrap();
        assert_eq!(d.fragments, vec![Fragment { start: 0, end: 9 }]);
    }

    #[test]
    fn planted_wall_splits_into_two_fragments() {
        let c = planted(12, 6, 8);
        let d = fragment_decomposition(&c).unwrap();
        assert_eq!(
            d.fragments,
            vec![Fragment { start: 0, end: 6 }, Fragment { start: 6, end: 11 }]
        );
        assert_eq!(d.walls[0].left_dim, 1);
        assert_eq!(d.walls[0].right_dim, 1);
    }

    #[test]
    fn masking_the_wall_centre_removes_the_boundary() {
        let mut c = planted(12, 6, 8);
        c.set_rotation(6, Some([1.0, 0.0, 0.0, 0.0]));
        let d = fragment_decomposition(&c).unwrap();
        assert_eq!(d.fragments.len(), 1);
        let reports = scan_circuit(&c, 2).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(!reports[0].unperturbed);
    }

    #[test]
    fn product_circuit_gives_singletons() {
        let h = SingleQubitClifford::hadamard();
        let c = FloquetCircuit::from_gates(
            vec![TwoQubitClifford::product(h, h); 5],
            Bricking::EvenFirst,
        )
        .unwrap();
        let d = fragment_decomposition(&c).unwrap();
        assert_eq!(d.fragments.len(), 6);
        assert!(d.fragments.iter().all(|f| f.len() == 1));
    }

    #[test]
    fn interior_operators_stay_inside_their_fragment() {
        for seed in 0..20 {
            let c = FloquetCircuit::build(60, 0.0, seed).unwrap();
            let d = fragment_decomposition(&c).unwrap();
            for (i, f) in d.fragments.iter().enumerate() {
                let lo = if i == 0 { 0 } else { d.walls[i - 1].end + 1 };
                let hi = if i + 1 == d.fragments.len() {
                    c.n()
                } else {
                    d.walls[i].start
                };
                for site in lo..hi {
                    for letter in [crate::gf2::Pauli::X, crate::gf2::Pauli::Z] {
                        let mut p = PauliString::single(c.n(), site, letter);
                        for _ in 0..100 {
                            c.conjugate_clifford(&mut p);
                            assert!(p.support().iter().all(|&s| f.contains(s)), "seed {seed}");
                        }
                    }
                }
            }
        }
    }
}
