//! Counter-based random numbers for reproducible parallel ensembles.
//!
//! Every draw is a pure function of a 4-part key `(seed, stream, step, slot)`:
//! there is no generator state to share or advance, so Monte-Carlo paths can
//! run in any order, on any number of threads, and across Galerkin levels the
//! same key always yields the identical value. The mixer is a splitmix64-style
//! finalizer chain; normals come from Box-Muller on the keyed uniforms.

use std::f64::consts::TAU;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Collapse a 4-part key into one well-mixed 64-bit word.
#[inline]
pub fn key(seed: u64, stream: u64, step: u64, slot: u64) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = mix64(h ^ stream.wrapping_mul(0xa076_1d64_78bd_642f));
    h = mix64(h ^ step.wrapping_mul(0xe703_7ed1_a0b4_28db));
    mix64(h ^ slot.wrapping_mul(0x8ebc_6af0_9c88_c6e3))
}

/// Uniform in (0, 1]; the open lower end keeps `ln` finite in Box-Muller.
#[inline]
pub fn uniform_open(k: u64) -> f64 {
    (((k >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0)
}

/// Standard normal draw for a key, via Box-Muller.
///
/// Two sub-keys are derived internally, so consecutive `slot` values stay
/// independent; the sine branch is discarded to keep the map stateless.
#[inline]
pub fn standard_normal(seed: u64, stream: u64, step: u64, slot: u64) -> f64 {
    let k = key(seed, stream, step, slot);
    let u1 = uniform_open(k);
    let u2 = uniform_open(mix64(k.wrapping_add(GOLDEN)));
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// Stable 64-bit hash of a purpose string, for deriving sub-seeds.
pub fn hash_str(master: u64, purpose: &str) -> u64 {
    let mut h = mix64(master ^ GOLDEN);
    for &b in purpose.as_bytes() {
        h = mix64(h ^ u64::from(b).wrapping_mul(0x100_0000_01b3));
    }
    h
}
