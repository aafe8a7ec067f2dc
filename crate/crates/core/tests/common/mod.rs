#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tropical_core::{TropicalMatrix, TropicalVector, ZERO};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries in -9..=3, each replaced by -inf with probability 1/2.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> TropicalMatrix {
    TropicalMatrix::from_fn(n, |_, _| {
        if rng.gen_bool(0.5) {
            ZERO
        } else {
            rng.gen_range(-9..=3) as f64
        }
    })
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> TropicalVector {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    ZERO
                } else {
                    rng.gen_range(-9..=3) as f64
                }
            })
            .collect();
        let v = TropicalVector::new(v).unwrap();
        if !v.is_zero_vector() {
            return v;
        }
    }
}

/// `count` matrices with sizes drawn from `lo..=hi`.
pub fn corpus(seed: u64, count: usize, lo: usize, hi: usize) -> Vec<TropicalMatrix> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(lo..=hi);
            random_matrix(&mut r, n)
        })
        .collect()
}

/// Equal `-inf` patterns, finite entries within `1e-9` relative to their size.
pub fn close(a: &TropicalMatrix, b: &TropicalMatrix) -> bool {
    let scale = a.max_abs_finite().max(b.max_abs_finite());
    a.approx_eq(b, 1e-9 * (1.0 + scale)).unwrap()
}

pub fn below(a: &TropicalMatrix, b: &TropicalMatrix) -> bool {
    let scale = a.max_abs_finite().max(b.max_abs_finite());
    a.approx_le(b, 1e-9 * (1.0 + scale)).unwrap()
}
