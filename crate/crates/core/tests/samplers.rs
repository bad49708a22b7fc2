use num_complex::Complex64;
use rigid_core::rng::{standard_complex_gaussian, ReplicaRng};
use rigid_core::samplers::{sample_gaf, sample_ginibre_eigen};
use rigid_core::stats::{mean, std_error};
use statrs::function::gamma::gamma_lr;

const EDGES: [f64; 9] = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0];

fn annulus_counts(points: &[Complex64]) -> Vec<f64> {
    let mut out = vec![0.0; EDGES.len() - 1];
    for z in points {
        let r = z.norm();
        if let Some(i) = EDGES.windows(2).position(|w| r >= w[0] && r < w[1]) {
            out[i] += 1.0;
        }
    }
    out
}

fn check_grid(samples: &[Vec<f64>], expected_inside: impl Fn(f64) -> f64) {
    for i in 0..EDGES.len() - 1 {
        let col: Vec<f64> = samples.iter().map(|c| c[i]).collect();
        let expect = expected_inside(EDGES[i + 1]) - expected_inside(EDGES[i]);
        let se = std_error(&col).max(1e-3);
        assert!(
            (mean(&col) - expect).abs() <= 4.0 * se,
            "annulus {i}: mean {} vs {expect} (se {se})",
            mean(&col)
        );
    }
}

#[test]
fn ginibre_counts_per_annulus_match_kernel() {
    let n = 16;
    let samples: Vec<Vec<f64>> = (0..2000)
        .map(|r| annulus_counts(sample_ginibre_eigen(n, &mut ReplicaRng::new(501, r)).unwrap().points.points()))
        .collect();
    // radii of G_n are independent sqrt(Gamma(k, 1)), k = 1..n
    check_grid(&samples, |r| (1..=n).map(|k| if r == 0.0 { 0.0 } else { gamma_lr(k as f64, r * r) }).sum());
}

#[test]
fn gaf_counts_per_annulus_match_edelman_kostlan() {
    let n = 20;
    let samples: Vec<Vec<f64>> = (0..2000)
        .map(|r| annulus_counts(sample_gaf(n, &mut ReplicaRng::new(502, r)).unwrap().roots.points()))
        .collect();
    // E #{|z| < r} = x K'(x) / K(x), K(x) = sum_{k<=n} x^k / k!, x = r^2
    check_grid(&samples, |r| {
        let x = r * r;
        let mut term = 1.0;
        let (mut k0, mut k1) = (1.0, 0.0);
        for k in 1..=n {
            term *= x / k as f64;
            k0 += term;
            k1 += k as f64 * term;
        }
        k1 / k0
    });
}

#[test]
fn ginibre_intensity_is_flat_in_the_bulk() {
    let n = 100;
    let counts: Vec<f64> = (0..400)
        .map(|r| {
            let s = sample_ginibre_eigen(n, &mut ReplicaRng::new(503, r)).unwrap();
            s.points.points().iter().filter(|z| z.norm() < 5.0).count() as f64
        })
        .collect();
    // the disk of radius 5 holds 25 points on average, up to a negligible edge term
    assert!((mean(&counts) - 25.0).abs() <= 4.0 * std_error(&counts));
}

#[test]
fn complex_gaussian_moments() {
    let mut rng = ReplicaRng::new(504, 0);
    let draws: Vec<Complex64> = (0..1_000_000).map(|_| standard_complex_gaussian(&mut rng)).collect();
    let m = draws.len() as f64;
    let first: Complex64 = draws.iter().sum::<Complex64>() / m;
    let pseudo: Complex64 = draws.iter().map(|z| z * z).sum::<Complex64>() / m;
    let second = draws.iter().map(|z| z.norm_sqr()).sum::<f64>() / m;
    let fourth = draws.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>() / m;
    // standard errors: 1/sqrt(m) for E xi and E xi^2, 1/sqrt(m) for |xi|^2, sqrt(20)/sqrt(m) for |xi|^4
    let se = 1.0 / m.sqrt();
    assert!(first.norm() <= 4.0 * se);
    assert!(pseudo.norm() <= 4.0 * se);
    assert!((second - 1.0).abs() <= 4.0 * se);
    assert!((fourth - 2.0).abs() <= 4.0 * 20f64.sqrt() * se);
}

#[test]
fn gaf_zero_count_is_the_degree() {
    for n in [1usize, 2, 5, 33] {
        let s = sample_gaf(n, &mut ReplicaRng::new(505, n as u64)).unwrap();
        assert_eq!(s.roots.len(), n);
        assert_eq!(s.xi.len(), n + 1);
    }
}
