use num_rational::Ratio;

use crate::error::{Error, Result};

/// Probabilities that a given position hosts a 1-wall or a 2-wall at `p = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WallProbabilities {
    pub one: f64,
    pub two: f64,
}

impl WallProbabilities {
    /// `P(1) = (1/9)(9/19)²` and `P(2) = (1/9)(10/19)(9/19)²`.
    pub fn exact() -> Self {
        let (one, two) = exact_rationals();
        Self {
            one: ratio_f64(one),
            two: ratio_f64(two),
        }
    }

    /// Drops the 2-wall term.
    pub fn one_wall_only(self) -> Self {
        Self { one: self.one, two: 0.0 }
    }
}

pub(crate) fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Closed forms as exact rationals: `(9/361, 90/6859)`.
pub fn exact_rationals() -> (Ratio<i64>, Ratio<i64>) {
    let r = |a, b| Ratio::new(a, b);
    let end = r(9, 19) * r(9, 19);
    (r(1, 9) * end, r(1, 9) * r(10, 19) * end)
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// `s(p) = P(1)(1 − p) + P(2)(1 − p)²`.
pub fn stopping_probability(p: f64, probs: WallProbabilities) -> Result<f64> {
    check_p(p)?;
    let q = 1.0 - p;
    Ok(probs.one * q + probs.two * q * q)
}

/// `μ = 1 / |ln(1 − s)|`, infinite when nothing stops (`p = 1`).
pub fn localisation_length_with(p: f64, probs: WallProbabilities) -> Result<f64> {
    let s = stopping_probability(p, probs)?;
    if s <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (1.0 - s).ln().abs())
}

/// `μ(p)` with the exact 1- and 2-wall probabilities; `μ(0) ≈ 25.8`.
pub fn localisation_length(p: f64) -> Result<f64> {
    localisation_length_with(p, WallProbabilities::exact())
}

/// `μ(p)` counting 1-walls only; `μ(0) ≈ 39.6`.
pub fn localisation_length_one_wall(p: f64) -> Result<f64> {
    localisation_length_with(p, WallProbabilities::exact().one_wall_only())
}

/// `((9/19)²(1/9)(6/19)^{k−1}, (9/19)²(10/19)^{k−1})`.
pub fn kwall_bounds(k: usize) -> Result<(f64, f64)> {
    if k < 1 {
        return Err(Error::InvalidParameter("k-wall bounds need k >= 1".into()));
    }
    let end = (9.0f64 / 19.0).powi(2);
    let e = (k - 1) as i32;
    Ok((end / 9.0 * (6.0f64 / 19.0).powi(e), end * (10.0f64 / 19.0).powi(e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopping_probability_at_zero() {
        let (one, two) = exact_rationals();
        assert_eq!(one + two, Ratio::new(261, 6859));
        let s = stopping_probability(0.0, WallProbabilities::exact()).unwrap();
        assert!((s - 261.0 / 6859.0).abs() < 1e-15);
    }

    #[test]
    fn localisation_lengths() {
        assert!((localisation_length(0.0).unwrap() - 25.78).abs() < 0.05);
        assert!((localisation_length_one_wall(0.0).unwrap() - 39.6).abs() < 0.1);
        assert!(localisation_length(1.0).unwrap().is_infinite());
        let mut last = 0.0;
        for i in 0..1000 {
            let mu = localisation_length(i as f64 / 1000.0).unwrap();
            assert!(mu > last);
            last = mu;
        }
        assert!(last > 1e4);
        assert!(localisation_length(1.5).is_err());
    }

    #[test]
    fn bounds() {
        let (lo, hi) = kwall_bounds(1).unwrap();
        assert!((lo - 0.02493).abs() < 1e-5 && (hi - 0.2244).abs() < 1e-4);
        let (lo, hi) = kwall_bounds(2).unwrap();
        assert!((lo - 0.00787).abs() < 1e-5 && (hi - 0.1181).abs() < 1e-4);
        assert!((kwall_bounds(3).unwrap().0 - 0.00249).abs() < 1e-5);
        assert!(kwall_bounds(0).is_err());
    }
}
