//! Per-run seeds derived from parameter values, so a dataset depends only on
//! its own grid point and not on the rest of the grid.

use dcrp::TimeKernel;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a sequence of words.
pub fn mix(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x5eed_u64, |h, &w| splitmix(h ^ splitmix(w)))
}

pub fn kernel_words(kernel: &TimeKernel) -> [u64; 2] {
    match *kernel {
        TimeKernel::Step => [1, 0],
        TimeKernel::Exponential { tau } => [2, tau.to_bits()],
        TimeKernel::Cosine { omega } => [3, omega.to_bits()],
        TimeKernel::Hyperbolic { scale } => [4, scale.to_bits()],
    }
}
