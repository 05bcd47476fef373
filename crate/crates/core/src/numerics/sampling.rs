//! Seedable sampling utilities shared by the simulation generators.
//!
//! Every stochastic operation takes an explicit RNG handle. Worker-level
//! parallelism derives one independent seed per replicate from the master
//! seed with [`derive_seed`], so results do not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};

/// The generator used throughout: seedable, fast, 64-bit state streams.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Derive the seed for stream `index` from a master seed.
///
/// SplitMix64 finalizer over `master ^ (index + 1) * golden-gamma`; the same
/// (master, index) pair always maps to the same stream, independent of how
/// replicates are scheduled across workers.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One standard normal draw.
#[inline]
pub fn sample_std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// One Beta(a, b) draw as a ratio of two Gamma draws, valid for shapes
/// below 1 (Marsaglia-Tsang with the small-shape boost).
pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain(format!(
            "beta shapes must be positive, got a = {a}, b = {b}"
        )));
    }
    let ga = Gamma::new(a, 1.0)
        .map_err(|e| Error::Domain(format!("gamma shape {a}: {e}")))?;
    let gb = Gamma::new(b, 1.0)
        .map_err(|e| Error::Domain(format!("gamma shape {b}: {e}")))?;
    let x: f64 = ga.sample(rng);
    let y: f64 = gb.sample(rng);
    let total = x + y;
    if total <= 0.0 {
        // Both draws underflowed; vanishing probability but keep (0,1).
        return Ok(0.5);
    }
    Ok((x / total).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16))
}
