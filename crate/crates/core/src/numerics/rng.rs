//! Seeded Gaussian streams.
//!
//! Generator: ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`). Normal
//! transform: the ziggurat sampler behind `rand_distr::StandardNormal`. Both
//! are pure functions of their input bits, so a given seed produces the same
//! stream on every platform for fixed crate versions.

use nalgebra::DMatrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub struct GaussianStream {
    rng: ChaCha8Rng,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn sample(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.sample();
        }
    }
}

/// `rows x cols` matrix of iid standard normals, filled row by row.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut stream = GaussianStream::new(seed);
    DMatrix::from_row_iterator(rows, cols, std::iter::repeat_with(|| stream.sample()))
}

/// Child seed for item `index` of a run seeded by `master` (SplitMix64 finalizer
/// over a golden-ratio stride). Order-independent, so items can run in parallel.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
