//! Counter-based seed derivation.
//!
//! A sub-seed depends only on the root seed and its position (a path of
//! counters), never on which worker computes it or in what order, so parallel
//! runs reproduce serial ones bit for bit.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for child `index` of `root`.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    splitmix64(root ^ splitmix64(index.wrapping_mul(GOLDEN).wrapping_add(1)))
}

/// Seed at a path of counters, e.g. `[pipeline, depth, twirl]`.
pub fn derive_path(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(root, |s, &i| derive_seed(s, i))
}
