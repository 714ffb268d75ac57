#![allow(dead_code)]

use mirrorchain::Chain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mirror-symmetric chain with couplings in `[0.85, 1.15)` and fields in
/// `[-0.25, 0.25)`, mild enough that no edge-bound pairs form.
pub fn random_chain(rng: &mut impl Rng, n_sites: usize) -> Chain {
    let half_j: Vec<f64> = (0..(n_sites - 1).div_ceil(2)).map(|_| rng.random_range(0.85..1.15)).collect();
    let half_h: Vec<f64> = (0..n_sites.div_ceil(2)).map(|_| rng.random_range(-0.25..0.25)).collect();
    Chain::from_half(n_sites, &half_j, &half_h).unwrap()
}

/// `max |a_i - b_i| / scale` over both couplings and fields.
pub fn parameter_error(a: &Chain, b: &Chain) -> f64 {
    let scale = a.couplings().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let dj = a.couplings().iter().zip(b.couplings()).map(|(x, y)| (x - y).abs());
    let dh = a.fields().iter().zip(b.fields()).map(|(x, y)| (x - y).abs());
    dj.chain(dh).fold(0.0, f64::max) / scale
}

pub fn grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()
}
