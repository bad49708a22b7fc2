#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rigid_core::rng::ReplicaRng;

/// `sigma_k` by summing the products of every `k`-subset.
pub fn brute_sigma(points: &[Complex64]) -> Vec<Complex64> {
    let n = points.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for mask in 0u32..(1 << n) {
        let mut p = Complex64::new(1.0, 0.0);
        for (i, z) in points.iter().enumerate() {
            if mask & (1 << i) != 0 {
                p *= z;
            }
        }
        out[mask.count_ones() as usize] += p;
    }
    out
}

pub fn random_points(rng: &mut ReplicaRng, n: usize, scale: f64) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))).collect()
}

/// `|a - b| / max(|b|, floor)`.
pub fn rel(a: Complex64, b: Complex64, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}
