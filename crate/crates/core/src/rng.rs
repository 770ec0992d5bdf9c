//! Counter-based random streams.
//!
//! Every stochastic decision draws from a stream addressed by
//! `(seed, purpose, a, b)`, for example `(seed, Collide, step, cell)`. The
//! stream is a ChaCha8 keystream whose key comes from the seed and whose
//! 64-bit stream id is a hash of the address, so the numbers a cell sees
//! depend only on its address and never on which thread processed it or in
//! which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Inject = 1,
    Collide = 2,
    Loss = 3,
    Optimizer = 4,
    Objective = 5,
    Test = 6,
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Builds an independent generator for the stream `(seed, purpose, a, b)`.
pub fn stream(seed: u64, purpose: Purpose, a: u64, b: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let k0 = mix64(seed);
    let k1 = mix64(k0 ^ 0x5851_f42d_4c95_7f2d);
    let k2 = mix64(k1 ^ purpose as u64);
    let k3 = mix64(k2);
    for (chunk, k) in key.chunks_exact_mut(8).zip([k0, k1, k2, k3]) {
        chunk.copy_from_slice(&k.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(mix64(mix64(a ^ (purpose as u64) << 56) ^ b));
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_address_same_numbers() {
        let mut a = stream(7, Purpose::Collide, 3, 11);
        let mut b = stream(7, Purpose::Collide, 3, 11);
        for _ in 0..16 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }

    #[test]
    fn different_addresses_differ() {
        let x: u64 = stream(7, Purpose::Collide, 3, 11).gen();
        let y: u64 = stream(7, Purpose::Collide, 3, 12).gen();
        let z: u64 = stream(7, Purpose::Inject, 3, 11).gen();
        let w: u64 = stream(8, Purpose::Collide, 3, 11).gen();
        assert_ne!(x, y);
        assert_ne!(x, z);
        assert_ne!(x, w);
    }
}
