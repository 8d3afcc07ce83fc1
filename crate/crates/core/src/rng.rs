//! Seeded random streams and Haar sampling on SU(2).

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Independent substream `realization` of the master `seed`.
///
/// ChaCha streams share the key and differ in the stream word, so realizations
/// can be generated in any order or in parallel with identical results.
pub fn stream(seed: u64, realization: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng
}

/// Uniform point on the 3-sphere, read as a unit quaternion `(a, b, c, d)`.
pub fn haar_quaternion<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = [(); 4].map(|_| rng.sample(StandardNormal));
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return q.map(|x| x / norm);
        }
    }
}

/// `[[a + ib, c + id], [-c + id, a - ib]]`.
pub fn quaternion_matrix(q: &[f64; 4]) -> Matrix2<Complex64> {
    let [a, b, c, d] = *q;
    Matrix2::new(
        Complex64::new(a, b),
        Complex64::new(c, d),
        Complex64::new(-c, d),
        Complex64::new(a, -b),
    )
}
