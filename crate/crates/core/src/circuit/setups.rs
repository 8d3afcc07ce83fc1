use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::floquet::{Bricking, FloquetCircuit};
use crate::clifford::TwoQubitClifford;
use crate::error::{Error, Result};
use crate::rng::{haar_quaternion, stream};
use crate::walls::{is_wall_gates, Side};

/// The three circuit regions used in the entanglement and spectral experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setup {
    /// A sampled 1-wall at half chain with an unmasked centre.
    Localisation,
    /// The same wall with its centre always rotated.
    PerturbedWall,
    /// No adjacent pair of gates forms a 1-wall.
    Transport,
}

impl Setup {
    pub const ALL: [Setup; 3] = [Setup::Localisation, Setup::PerturbedWall, Setup::Transport];

    pub fn tag(self) -> &'static str {
        match self {
            Setup::Localisation => "localisation",
            Setup::PerturbedWall => "perturbed_wall",
            Setup::Transport => "transport",
        }
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Setup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "localisation" | "localization" => Ok(Setup::Localisation),
            "perturbed_wall" | "perturbed-wall" => Ok(Setup::PerturbedWall),
            "transport" => Ok(Setup::Transport),
            other => Err(Error::InvalidParameter(format!("unknown setup {other:?}"))),
        }
    }
}

/// Central site of the half-chain wall; the cut sits just right of it, so the
/// left part holds `ceil(n / 2)` sites.
pub fn wall_centre(n: usize) -> usize {
    n.div_ceil(2) - 1
}

fn has_adjacent_one_wall(c: &FloquetCircuit) -> bool {
    (0..c.n().saturating_sub(2)).any(|b| is_wall_gates(&[*c.gate(b), *c.gate(b + 1)], Side::Left))
}

/// Realization `realization` of `setup`.
///
/// Wall setups overwrite the two bonds around the centre with a rejection-sampled
/// 1-wall, then fix the centre's mask. Transport redraws whole circuits until no
/// adjacent pair is a 1-wall.
pub fn setup_circuit(setup: Setup, n: usize, p: f64, seed: u64, realization: u64) -> Result<FloquetCircuit> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("setups need n >= 3, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let mut rng = stream(seed, realization);
    let first = Bricking::EvenFirst;
    if setup == Setup::Transport {
        loop {
            let c = FloquetCircuit::sample_from(n, p, seed, first, &mut rng);
            if !has_adjacent_one_wall(&c) {
                return Ok(c);
            }
        }
    }
    let mut c = FloquetCircuit::sample_from(n, p, seed, first, &mut rng);
    let centre = wall_centre(n);
    let pair = loop {
        let pair = [
            TwoQubitClifford::sample_nonproduct(&mut rng),
            TwoQubitClifford::sample_nonproduct(&mut rng),
        ];
        if is_wall_gates(&pair, Side::Left) {
            break pair;
        }
    };
    c.set_gate(centre - 1, pair[0]);
    c.set_gate(centre, pair[1]);
    match setup {
        Setup::Localisation => c.set_rotation(centre, None),
        Setup::PerturbedWall => {
            if !c.is_masked(centre) {
                c.set_rotation(centre, Some(haar_quaternion(&mut rng)));
            }
        }
        Setup::Transport => unreachable!(),
    }
    Ok(c)
}
