//! Deterministic random streams.
//!
//! Every stochastic step draws from a ChaCha stream keyed by `(seed, purpose,
//! index)`, so results never depend on evaluation order or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::math::Vec3;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent seed for sub-stream `index` of `purpose`.
pub fn derive_seed(seed: u64, purpose: u64, index: u64) -> u64 {
    mix(mix(mix(seed) ^ purpose) ^ index)
}

pub fn stream(seed: u64, purpose: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(seed, purpose, index))
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vec3<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Vec3 {
    Vec3::new(gaussian(rng), gaussian(rng), gaussian(rng)) * sigma
}

/// Uniformly distributed unit vector orthogonal to unit `n`.
pub fn orthogonal_direction<R: Rng + ?Sized>(rng: &mut R, n: Vec3) -> Vec3 {
    let t1 = n.any_orthogonal();
    let t2 = n.cross(t1);
    let phi = rng.random::<f64>() * core::f64::consts::TAU;
    t1 * libm::cos(phi) + t2 * libm::sin(phi)
}

/// Rotate unit `n` by a Gaussian angle (std `sigma` radians) about a uniformly
/// random axis orthogonal to it. The result stays unit length.
pub fn perturb_direction<R: Rng + ?Sized>(rng: &mut R, n: Vec3, sigma: f64) -> Vec3 {
    if sigma == 0.0 {
        return n;
    }
    let axis = orthogonal_direction(rng, n);
    let angle = gaussian(rng) * sigma;
    n.rotate_about(axis, angle).normalize()
}

/// Stream purposes. Distinct constants keep streams of different steps apart.
pub mod purpose {
    pub const PFC_SAMPLE: u64 = 0x5046_4300;
    pub const CAMERA: u64 = 0x4341_4d00;
    pub const CONTACT: u64 = 0x434f_4e00;
    pub const ACQUISITION: u64 = 0x4143_5100;
    pub const PRIOR: u64 = 0x5052_4900;
    pub const BASELINE: u64 = 0x4241_5300;
    pub const EXPLORE: u64 = 0x4558_5000;
    pub const SURFACE_SAMPLE: u64 = 0x5355_5200;
    pub const JOGGLE: u64 = 0x4a4f_4700;
}
