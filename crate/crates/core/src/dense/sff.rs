use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::unitary::{build_unitary, DenseUnitary};
use crate::circuit::{setup_circuit, Setup};
use crate::error::{Error, Result};
use crate::rng::stream;

/// Ensemble spectral form factor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SffTrace {
    pub t: Vec<usize>,
    pub k: Vec<f64>,
    pub dk: Vec<f64>,
    /// Empty until [`SffTrace::smear`] is called.
    pub smeared: Vec<f64>,
    pub realizations: usize,
    pub d: usize,
}

/// `|Tr U^t|²` for `t = 0..=tmax` from the eigenphases.
pub fn trace_moduli(phases: &[f64], tmax: usize) -> Vec<f64> {
    let mut z: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); phases.len()];
    let steps: Vec<Complex64> = phases.iter().map(|&th| Complex64::from_polar(1.0, th)).collect();
    let mut out = Vec::with_capacity(tmax + 1);
    for t in 0..=tmax {
        if t > 0 {
            for (zi, s) in z.iter_mut().zip(&steps) {
                *zi *= s;
            }
        }
        // exact at t = 0, since every term is 1 + 0i
        out.push(z.iter().sum::<Complex64>().norm_sqr());
    }
    out
}

/// Averages per-realization `|Tr U^t|²` traces in order.
pub fn sff_from_traces(traces: &[Vec<f64>], d: usize) -> Result<SffTrace> {
    let Some(first) = traces.first() else {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    };
    let len = first.len();
    let mut m1 = vec![0.0; len];
    let mut m2 = vec![0.0; len];
    for tr in traces {
        if tr.len() != len {
            return Err(Error::DimensionMismatch { expected: len, found: tr.len() });
        }
        for t in 0..len {
            m1[t] += tr[t];
            m2[t] += tr[t] * tr[t];
        }
    }
    let r = traces.len() as f64;
    let k: Vec<f64> = m1.iter().map(|s| s / r).collect();
    let dk = m2.iter().zip(&k).map(|(s, k)| (s / r - k * k).max(0.0).sqrt()).collect();
    Ok(SffTrace {
        t: (0..len).collect(),
        k,
        dk,
        smeared: Vec::new(),
        realizations: traces.len(),
        d,
    })
}

/// `K(t)` and `δK(t)` of an explicit ensemble.
pub fn sff(ensemble: &[DenseUnitary], tmax: usize) -> Result<SffTrace> {
    let d = ensemble.first().map(DenseUnitary::dim).unwrap_or(0);
    let traces = ensemble
        .par_iter()
        .map(|u| Ok(trace_moduli(&u.eigenphases()?, tmax)))
        .collect::<Result<Vec<_>>>()?;
    sff_from_traces(&traces, d)
}

/// Compares the spectral and the matrix-power traces at `ts`.
pub fn power_cross_check(u: &DenseUnitary, phases: &[f64], ts: &[usize]) -> Result<()> {
    let floor = (u.dim() as f64).sqrt();
    for &t in ts {
        let spec: Complex64 = phases.iter().map(|&th| Complex64::from_polar(1.0, th * t as f64)).sum();
        let pow = u.trace_power(t);
        if (spec - pow).norm() > 1e-6 * pow.norm().max(floor) {
            return Err(Error::Consistency(format!(
                "Tr U^{t}: spectral {spec} vs power {pow}"
            )));
        }
    }
    Ok(())
}

/// First-period SFF of `realizations` circuits of `setup`.
///
/// Realization 0 is also checked against matrix powers at three random times.
pub fn sff_experiment(
    setup: Setup,
    n: usize,
    p: f64,
    realizations: usize,
    tmax: usize,
    seed: u64,
) -> Result<SffTrace> {
    if realizations == 0 {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    }
    let traces = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let u = build_unitary(&setup_circuit(setup, n, p, seed, r)?)?;
            let phases = u.eigenphases()?;
            if r == 0 {
                let mut rng = stream(seed, u64::MAX - 1);
                let ts: Vec<usize> = (0..3).map(|_| rng.random_range(1..=tmax.max(1))).collect();
                power_cross_check(&u, &phases, &ts)?;
            }
            Ok(trace_moduli(&phases, tmax))
        })
        .collect::<Result<Vec<_>>>()?;
    sff_from_traces(&traces, 1 << n)
}

impl SffTrace {
    /// Fills `smeared` with [`gaussian_smear`] drawn from substream `u64::MAX` of `seed`.
    ///
    /// Only `t ≥ 1` is smeared. `K(0) = D²` is exact and would otherwise set the
    /// window spread for `t = 1, 2` orders of magnitude above `K` there.
    pub fn smear(&mut self, dt: usize, seed: u64) {
        let Some((&k0, rest)) = self.k.split_first() else {
            self.smeared.clear();
            return;
        };
        self.smeared = std::iter::once(k0)
            .chain(gaussian_smear(rest, dt, &mut stream(seed, u64::MAX)))
            .collect();
    }

    pub const CSV_HEADER: [&'static str; 6] = ["t", "K", "dK", "K_smeared", "K_cue", "dK_cue"];

    pub fn csv_records(&self) -> Vec<[String; 6]> {
        let (kc, dkc) = cue_reference(self.d, self.t.len().saturating_sub(1));
        (0..self.t.len())
            .map(|i| {
                [
                    self.t[i].to_string(),
                    self.k[i].to_string(),
                    self.dk[i].to_string(),
                    self.smeared.get(i).map(|x| x.to_string()).unwrap_or_default(),
                    kc[i].to_string(),
                    dkc[i].to_string(),
                ]
            })
            .collect()
    }
}

/// CUE curves `K(t)` and `δK(t)` for `t = 0..=tmax`.
pub fn cue_reference(d: usize, tmax: usize) -> (Vec<f64>, Vec<f64>) {
    let df = d as f64;
    let k = (0..=tmax)
        .map(|t| match t {
            0 => df * df,
            t if t <= d => t as f64,
            _ => df,
        })
        .collect();
    let dk = (0..=tmax)
        .map(|t| {
            let tf = t as f64;
            if tf < df / 2.0 {
                tf
            } else if t < d {
                (tf * tf - 2.0 * tf + df).sqrt()
            } else {
                (df * df - df).sqrt()
            }
        })
        .collect();
    (k, dk)
}

pub fn fragmentation_ansatz(t: f64) -> f64 {
    t * t + 4.0 * t
}

/// `K̃(t) = ½K(t) + ½ ⟨K(t') N(t')⟩` averaged over the window `|t' − t| ≤ Δt`,
/// clipped at the ends of the trace.
///
/// `N(t') = G/K(t)` with `G` normal of mean `K(t)` and standard deviation equal
/// to the spread of `K` over the window around `t'`, so `N` has unit mean.
pub fn gaussian_smear<R: Rng + ?Sized>(k: &[f64], dt: usize, rng: &mut R) -> Vec<f64> {
    let len = k.len();
    let window = |c: usize| c.saturating_sub(dt)..(c + dt + 1).min(len);
    let spread: Vec<f64> = (0..len)
        .map(|c| {
            let w = &k[window(c)];
            let m = w.iter().sum::<f64>() / w.len() as f64;
            (w.iter().map(|x| (x - m).powi(2)).sum::<f64>() / w.len() as f64).sqrt()
        })
        .collect();
    (0..len)
        .map(|t| {
            let sum: f64 = window(t)
                .map(|tp| {
                    let n = if k[t] == 0.0 || spread[tp] == 0.0 {
                        1.0
                    } else {
                        Normal::new(k[t], spread[tp]).expect("finite spread").sample(rng) / k[t]
                    };
                    k[tp] * n
                })
                .sum();
            0.5 * k[t] + 0.5 * sum / window(t).len() as f64
        })
        .collect()
}

/// Least-squares slope of `ln K` against `ln t` over `t ∈ [lo, hi]`.
pub fn fit_exponent(k: &[f64], lo: usize, hi: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> = (lo.max(1)..=hi.min(k.len().saturating_sub(1)))
        .filter(|&t| k[t] > 0.0)
        .map(|t| ((t as f64).ln(), k[t].ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(format!("fit window [{lo}, {hi}] has too few points")));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let cov: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(cov / var)
}
