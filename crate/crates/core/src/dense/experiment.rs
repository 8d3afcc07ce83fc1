use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::state::StateVector;
use crate::circuit::{setup_circuit, FloquetCircuit, Setup};
use crate::error::{Error, Result};
use crate::rng::{haar_quaternion, quaternion_matrix};
use crate::stabilizer::{entropy_trace, half_cut};

/// Entropy of sites `0..cut` after `t = 0..=tmax` periods, by state-vector evolution.
pub fn dense_entropy_trace(c: &FloquetCircuit, tmax: usize, cut: usize) -> Result<Vec<f64>> {
    let mut s = StateVector::zero(c.n())?;
    let mut out = Vec::with_capacity(tmax + 1);
    out.push(s.vn_entropy(cut)?);
    for _ in 0..tmax {
        s.evolve(c)?;
        out.push(s.vn_entropy(cut)?);
    }
    Ok(out)
}

/// Ensemble statistics of half-chain entropy traces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyTraces {
    pub setup: Setup,
    pub n: usize,
    pub p: f64,
    pub cut: usize,
    pub realizations: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Largest single-realization entropy at each time.
    pub max: Vec<f64>,
    /// Realizations evolved exactly with the stabilizer tableau.
    pub stabilizer_realizations: usize,
}

impl EntropyTraces {
    /// Time averages of `⟨S⟩(t)` and `δS(t)` over the second half of the trace.
    pub fn steady_state(&self) -> (f64, f64) {
        let from = self.mean.len() / 2;
        let avg = |v: &[f64]| v[from..].iter().sum::<f64>() / (v.len() - from) as f64;
        (avg(&self.mean), avg(&self.std))
    }

    /// Accumulates in the order given, so the result does not depend on threading.
    pub fn from_realizations(setup: Setup, n: usize, p: f64, traces: &[EntropyRealization]) -> Result<Self> {
        let Some(first) = traces.first() else {
            return Err(Error::InvalidParameter("empty ensemble".into()));
        };
        let len = first.s.len();
        let mut m1 = vec![0.0; len];
        let mut m2 = vec![0.0; len];
        let mut max = vec![0.0f64; len];
        for tr in traces {
            if tr.s.len() != len {
                return Err(Error::DimensionMismatch { expected: len, found: tr.s.len() });
            }
            for t in 0..len {
                m1[t] += tr.s[t];
                m2[t] += tr.s[t] * tr.s[t];
                max[t] = max[t].max(tr.s[t]);
            }
        }
        let r = traces.len() as f64;
        let mean: Vec<f64> = m1.iter().map(|s| s / r).collect();
        let std = m2.iter().zip(&mean).map(|(s, m)| (s / r - m * m).max(0.0).sqrt()).collect();
        Ok(Self {
            setup,
            n,
            p,
            cut: half_cut(n),
            realizations: traces.len(),
            mean,
            std,
            max,
            stabilizer_realizations: traces.iter().filter(|t| t.clifford).count(),
        })
    }

    pub fn max_entropy(&self) -> f64 {
        self.max.iter().copied().fold(0.0, f64::max)
    }

    pub const CSV_HEADER: [&'static str; 7] = ["t", "mean", "std", "n", "p", "setup", "realizations"];

    pub fn csv_records(&self) -> Vec<[String; 7]> {
        (0..self.mean.len())
            .map(|t| {
                [
                    t.to_string(),
                    self.mean[t].to_string(),
                    self.std[t].to_string(),
                    self.n.to_string(),
                    self.p.to_string(),
                    self.setup.to_string(),
                    self.realizations.to_string(),
                ]
            })
            .collect()
    }
}

/// Entropy trace of one realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRealization {
    pub realization: u64,
    /// Evolved with the stabilizer tableau, so every entry is an integer.
    pub clifford: bool,
    pub s: Vec<f64>,
}

/// Per-realization traces at the cut just right of the wall centre.
///
/// Clifford-only realizations use the stabilizer tableau; the rest are evolved
/// as state vectors.
pub fn entropy_realizations(
    setup: Setup,
    n: usize,
    p: f64,
    realizations: usize,
    tmax: usize,
    seed: u64,
) -> Result<Vec<EntropyRealization>> {
    if realizations == 0 {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    }
    let cut = half_cut(n);
    (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let c = setup_circuit(setup, n, p, seed, r)?;
            let (s, clifford) = if c.has_rotations() {
                (dense_entropy_trace(&c, tmax, cut)?, false)
            } else {
                let s = entropy_trace(&c, tmax, cut)?;
                (s.into_iter().map(|x| x as f64).collect(), true)
            };
            Ok(EntropyRealization {
                realization: r,
                clifford,
                s,
            })
        })
        .collect()
}

/// `⟨S⟩(t)` and `δS(t)` over [`entropy_realizations`].
pub fn entropy_experiment(
    setup: Setup,
    n: usize,
    p: f64,
    realizations: usize,
    tmax: usize,
    seed: u64,
) -> Result<EntropyTraces> {
    let traces = entropy_realizations(setup, n, p, realizations, tmax, seed)?;
    EntropyTraces::from_realizations(setup, n, p, &traces)
}

/// `|Tr[U σ U† σ]|² / 4`.
pub fn autocorrelator(u: &Matrix2<Complex64>, sigma: &Matrix2<Complex64>) -> f64 {
    (u * sigma * u.adjoint() * sigma).trace().norm_sqr() / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AutocorrelatorEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Haar average of [`autocorrelator`] with `σ = Z`. A global phase drops out, so
/// SU(2) samples suffice.
pub fn rotation_autocorrelator<R: Rng + ?Sized>(samples: u64, rng: &mut R) -> Result<AutocorrelatorEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let z = Matrix2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-1.0, 0.0),
    );
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let v = autocorrelator(&quaternion_matrix(&haar_quaternion(rng)), &z);
        s1 += v;
        s2 += v * v;
    }
    let m = samples as f64;
    let mean = s1 / m;
    let var = (s2 / m - mean * mean).max(0.0);
    Ok(AutocorrelatorEstimate {
        mean,
        stderr: (var / m).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::SingleQubitClifford;
    use crate::rng::stream;

    #[test]
    fn autocorrelator_fixed_points() {
        let z = SingleQubitClifford::pauli(false, true).dense();
        let x = SingleQubitClifford::pauli(true, false).dense();
        assert!((autocorrelator(&Matrix2::identity(), &z) - 1.0).abs() < 1e-12);
        assert!((autocorrelator(&x, &z) - 1.0).abs() < 1e-12);
        let h = SingleQubitClifford::hadamard().dense();
        assert!(autocorrelator(&h, &z).abs() < 1e-12);
    }

    #[test]
    fn haar_autocorrelator_is_a_third() {
        let est = rotation_autocorrelator(200_000, &mut stream(5, 0)).unwrap();
        assert!((est.mean - 1.0 / 3.0).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn clifford_realizations_use_the_tableau() {
        let e = entropy_experiment(Setup::Localisation, 6, 0.0, 10, 30, 1).unwrap();
        assert_eq!(e.stabilizer_realizations, 10);
        assert!(e.max_entropy() <= 1.0);
        let e = entropy_experiment(Setup::Transport, 6, 1.0, 4, 10, 1).unwrap();
        assert_eq!(e.stabilizer_realizations, 0);
        assert_eq!(e.mean[0], 0.0);
    }
}
