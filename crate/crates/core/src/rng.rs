use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::Vector;

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_raw((0..dim).map(|_| rng.sample(StandardNormal)).collect())
}

/// Uniform on the unit sphere; retries the (measure-zero) zero draw.
pub(crate) fn unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let g = gaussian(rng, dim);
        let n = g.norm();
        if n > 1e-300 {
            return g.scale(1.0 / n);
        }
    }
}
