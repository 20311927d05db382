use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Points per independently seeded chunk. Fixed so that a prefix of a
/// longer draw equals the shorter draw with the same seed.
pub const CHUNK: usize = 4096;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent random stream for `(seed, keys)`. The seed selects the key
/// and the keys select the ChaCha stream, so streams never overlap.
pub fn substream(seed: u64, keys: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = keys
        .iter()
        .fold(0x6A09_E667_F3BC_C909u64, |h, &k| splitmix(h ^ splitmix(k)));
    rng.set_stream(stream);
    rng
}

/// Derive a child seed, for handing a seed to a nested component.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix(seed), |h, &k| splitmix(h ^ k.rotate_left(17)))
}
