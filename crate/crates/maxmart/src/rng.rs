//! Reproducible per-path random streams.
//!
//! Each path owns a counter-based ChaCha stream keyed by (seed, path_index):
//! the generator's key is the experiment seed and the stream id is the path
//! index, so a path's increments are a pure function of (seed, path_index)
//! no matter which worker generates it or in what order. Auxiliary
//! randomness (e.g. the coin of a randomized stopping rule) comes from a
//! second key so it never perturbs the increment stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const AUX_KEY_XOR: u64 = 0x9e37_79b9_7f4a_7c15;

/// Increment stream for one path.
pub fn path_stream(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// Auxiliary stream for one path (rule randomization), independent of the
/// increment stream.
pub fn aux_stream(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ AUX_KEY_XOR);
    rng.set_stream(path_index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = path_stream(42, 7);
        let mut b = path_stream(42, 7);
        let mut c = path_stream(42, 8);
        let mut d = aux_stream(42, 7);
        let xa: [u64; 4] = core::array::from_fn(|_| a.random());
        let xb: [u64; 4] = core::array::from_fn(|_| b.random());
        let xc: [u64; 4] = core::array::from_fn(|_| c.random());
        let xd: [u64; 4] = core::array::from_fn(|_| d.random());
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert_ne!(xa, xd);
    }
}
