//! Exact dressing censuses for 1- and 2-walls and Monte Carlo wall probabilities.
//!
//! A wall template fixes the gate classes and enumerates the symplectic part of
//! the single-qubit Cliffords on the central wire segments. Between consecutive
//! periods each central site carries two segments, so a width-`k` template has
//! `2k` free legs and `6^{2k}` configurations.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::ReducedCircuit;
use crate::clifford::{CliffordClass, Dressing, SingleQubitClifford, TwoQubitClifford};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::walls::{is_irreducible_gates, is_wall_gates, kwall_bounds, Side, WallReport};

/// Result of enumerating one template.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DressingCensus {
    pub hits: u64,
    pub total: u64,
}

impl DressingCensus {
    pub fn fraction(&self) -> Ratio<i64> {
        Ratio::new(self.hits as i64, self.total as i64)
    }
}

fn sp2(s: usize) -> SingleQubitClifford {
    SingleQubitClifford::from_parts(s, 0)
}

fn dressed(class: CliffordClass, legs: [usize; 4]) -> TwoQubitClifford {
    TwoQubitClifford::from_dressing(Dressing {
        class,
        legs: legs.map(sp2),
    })
}

fn legs_of(idx: usize) -> [usize; 4] {
    [idx % 6, idx / 6 % 6, idx / 36 % 6, idx / 216]
}

/// CZ–CZ staircase with the central segments set by `legs`: the first gate's
/// outgoing and incoming legs on the centre.
fn one_wall_template(legs: [usize; 4]) -> Vec<TwoQubitClifford> {
    vec![
        dressed(CliffordClass::Cz, [0, legs[0], 0, legs[1]]),
        dressed(CliffordClass::Cz, [legs[2], 0, legs[3], 0]),
    ]
}

/// CZ–`mid`–CZ staircase; legs 0, 1 sit on the first central site and legs 2, 3
/// on the second.
fn two_wall_template(mid: CliffordClass, legs: [usize; 4]) -> Vec<TwoQubitClifford> {
    vec![
        dressed(CliffordClass::Cz, [0, legs[0], 0, legs[1]]),
        dressed(mid, [0, legs[2], 0, legs[3]]),
        dressed(CliffordClass::Cz, [0; 4]),
    ]
}

fn census(template: impl Fn(usize) -> Vec<TwoQubitClifford> + Sync) -> DressingCensus {
    let hits = (0..1296usize)
        .into_par_iter()
        .filter(|&idx| {
            let gates = template(idx);
            is_wall_gates(&gates, Side::Left) && is_irreducible_gates(&gates)
        })
        .count();
    DressingCensus {
        hits: hits as u64,
        total: 1296,
    }
}

/// All `6^4` central dressings of the CZ–CZ pair; exactly 144 are walls.
pub fn one_wall_census() -> DressingCensus {
    census(|idx| one_wall_template(legs_of(idx)))
}

/// Central dressings of CZ–`mid`–CZ that form irreducible 2-walls.
pub fn two_wall_census(mid: CliffordClass) -> DressingCensus {
    census(|idx| two_wall_template(mid, legs_of(idx)))
}

fn end_probability() -> Ratio<i64> {
    Ratio::new(9, 19) * Ratio::new(9, 19)
}

fn class_probability(class: CliffordClass) -> Ratio<i64> {
    match class {
        CliffordClass::Identity => Ratio::new(0, 1),
        CliffordClass::Cz | CliffordClass::Fswap => Ratio::new(9, 19),
        CliffordClass::Swap => Ratio::new(1, 19),
    }
}

/// `P(1-wall)` from the census: `(9/19)²` for the end gates times the consistent fraction.
pub fn exact_1wall_probability() -> Ratio<i64> {
    end_probability() * one_wall_census().fraction()
}

/// SWAP and FSWAP branches of `P(2-wall)`.
pub fn exact_2wall_branches() -> (Ratio<i64>, Ratio<i64>) {
    let branch = |mid| end_probability() * class_probability(mid) * two_wall_census(mid).fraction();
    (branch(CliffordClass::Swap), branch(CliffordClass::Fswap))
}

pub fn exact_2wall_probability() -> Ratio<i64> {
    let (swap, fswap) = exact_2wall_branches();
    swap + fswap
}

/// FSWAP-interior 2-walls split by whether the internal subspaces factor per site.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FswapSplit {
    pub interference_free: u64,
    pub interfering: u64,
    pub total: u64,
    /// Interfering walls that still carry a charge; expected empty.
    pub interfering_with_charges: u64,
}

impl FswapSplit {
    /// Fractions in units of `1/81`, i.e. the number of consistent Pauli
    /// assignments out of `3^4`.
    pub fn assignment_counts(&self) -> (Ratio<i64>, Ratio<i64>) {
        let scale = |h: u64| Ratio::new(h as i64 * 81, self.total as i64);
        (scale(self.interference_free), scale(self.interfering))
    }

    pub fn consistency(&self) -> Ratio<i64> {
        Ratio::new((self.interference_free + self.interfering) as i64, self.total as i64)
    }
}

pub fn enumerate_fswap_2walls() -> Result<FswapSplit> {
    let reports: Vec<Option<WallReport>> = (0..1296usize)
        .into_par_iter()
        .map(|idx| {
            let gates = two_wall_template(CliffordClass::Fswap, legs_of(idx));
            if !is_wall_gates(&gates, Side::Left) || !is_irreducible_gates(&gates) {
                return Ok(None);
            }
            WallReport::analyse(&ReducedCircuit::new(gates)?, 1, true)
        })
        .collect::<Result<_>>()?;
    let mut split = FswapSplit {
        interference_free: 0,
        interfering: 0,
        total: 1296,
        interfering_with_charges: 0,
    };
    for r in reports.into_iter().flatten() {
        if r.interfering {
            split.interfering += 1;
            if !r.charges.is_empty() {
                split.interfering_with_charges += 1;
            }
        } else {
            split.interference_free += 1;
        }
    }
    Ok(split)
}

/// Monte Carlo estimate of the probability that a random staircase is an irreducible wall.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WallCensus {
    pub k: usize,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub exact: Option<f64>,
    pub stderr: f64,
    /// `(lower, upper)` from the k-wall bounds.
    pub bounds: (f64, f64),
}

impl WallCensus {
    /// `(estimate − exact) / stderr` when a closed form exists.
    pub fn sigma_deviation(&self) -> Option<f64> {
        let exact = self.exact?;
        let se = if self.stderr > 0.0 {
            self.stderr
        } else {
            (exact * (1.0 - exact) / self.samples as f64).sqrt()
        };
        Some((self.estimate - exact) / se)
    }

    pub fn within_bounds(&self) -> bool {
        (self.bounds.0..=self.bounds.1).contains(&self.estimate)
    }

    pub const CSV_HEADER: [&'static str; 7] =
        ["k", "samples", "hits", "estimate", "stderr", "exact", "sigma_deviation"];

    pub fn csv_record(&self) -> [String; 7] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.k.to_string(),
            self.samples.to_string(),
            self.hits.to_string(),
            self.estimate.to_string(),
            self.stderr.to_string(),
            opt(self.exact),
            opt(self.sigma_deviation()),
        ]
    }
}

/// Closed-form probability for widths 1 and 2.
pub fn exact_wall_probability(k: usize) -> Option<Ratio<i64>> {
    match k {
        1 => Some(crate::walls::exact_rationals().0),
        2 => Some(crate::walls::exact_rationals().1),
        _ => None,
    }
}

const BLOCK: u64 = 1 << 14;

/// Samples `(k+1)`-gate staircases of non-product gates; block `b` of `2^14`
/// samples uses substream `b` of `seed`, so the result does not depend on the
/// thread count.
pub fn montecarlo_wall_prob(k: usize, samples: u64, seed: u64) -> Result<WallCensus> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(format!("Monte Carlo width k = {k} not in 1..=3")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let blocks = samples.div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut gates = vec![TwoQubitClifford::identity(); k + 1];
            let mut hits = 0;
            for _ in 0..count {
                for g in gates.iter_mut() {
                    *g = TwoQubitClifford::sample_nonproduct(&mut rng);
                }
                if is_wall_gates(&gates, Side::Left) && is_irreducible_gates(&gates) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let estimate = hits as f64 / samples as f64;
    let exact = exact_wall_probability(k).map(crate::walls::ratio_f64);
    Ok(WallCensus {
        k,
        samples,
        hits,
        estimate,
        exact,
        stderr: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        bounds: kwall_bounds(k)?,
    })
}

/// The hit staircases themselves, for re-checking with an independent oracle.
pub fn montecarlo_hits(k: usize, samples: u64, seed: u64) -> Vec<Vec<TwoQubitClifford>> {
    let mut rng = stream(seed, u64::MAX);
    let mut out = Vec::new();
    for _ in 0..samples {
        let gates: Vec<TwoQubitClifford> =
            (0..=k).map(|_| TwoQubitClifford::sample_nonproduct(&mut rng)).collect();
        if is_wall_gates(&gates, Side::Left) && is_irreducible_gates(&gates) {
            out.push(gates);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_wall_census_is_one_ninth() {
        let c = one_wall_census();
        assert_eq!((c.hits, c.total), (144, 1296));
        assert_eq!(exact_1wall_probability(), Ratio::new(9, 361));
        let bare = one_wall_template([0; 4]);
        assert!(is_wall_gates(&bare, Side::Left));
    }

    #[test]
    fn two_wall_branches() {
        let (swap, fswap) = exact_2wall_branches();
        let end = Ratio::new(81, 361);
        assert_eq!(swap, Ratio::new(1, 9) * Ratio::new(1, 19) * end);
        assert_eq!(fswap, Ratio::new(1, 9) * Ratio::new(9, 19) * end);
        assert_eq!(exact_2wall_probability(), Ratio::new(90, 6859));
    }

    #[test]
    fn fswap_split_is_five_and_four() {
        let s = enumerate_fswap_2walls().unwrap();
        assert_eq!((s.interference_free, s.interfering), (80, 64));
        assert_eq!(s.assignment_counts(), (Ratio::from(5), Ratio::from(4)));
        assert_eq!(s.consistency(), Ratio::new(1, 9));
        assert_eq!(s.interfering_with_charges, 0);
    }

    #[test]
    fn censuses_are_deterministic() {
        assert_eq!(two_wall_census(CliffordClass::Swap), two_wall_census(CliffordClass::Swap));
    }

    #[test]
    fn montecarlo_is_thread_independent_and_checked() {
        let a = montecarlo_wall_prob(1, 50_000, 3).unwrap();
        let b = montecarlo_wall_prob(1, 50_000, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.sigma_deviation().unwrap().abs() < 5.0);
        assert!(montecarlo_wall_prob(4, 10, 0).is_err());
        let row = a.csv_record();
        assert_eq!(row.len(), WallCensus::CSV_HEADER.len());
    }
}
