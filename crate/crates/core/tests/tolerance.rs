use num_complex::Complex64;
use rand::Rng;
use rigid_core::mcmc::accept;
use rigid_core::rng::{uniform_in_disk, ReplicaRng};
use rigid_core::samplers::{sample_gaf, sample_ginibre_eigen};
use rigid_core::stats::{ks_two_sample, ks_two_sample_critical_1pct};
use rigid_core::symfun::vandermonde_log_abs;
use rigid_core::tolerance::{
    full_log_gamma, run_gaf_chain, run_ginibre_chain, separated_split, ChainParams, ConditionalTarget, GafTarget,
    GinibreTarget,
};

fn separated_ginibre(n: usize, m: usize, seed: u64) -> (Vec<Complex64>, Vec<Complex64>) {
    (0..)
        .find_map(|r| {
            let s = sample_ginibre_eigen(n, &mut ReplicaRng::new(seed, r)).unwrap();
            separated_split(s.points.points(), 1.0, m, 0.1).unwrap()
        })
        .unwrap()
}

#[test]
fn truncated_cross_term_matches_full_product() {
    for n in [64usize, 256] {
        let (zeta, omega) = separated_ginibre(n, 2, 301);
        let target = GinibreTarget::new(1.0, 2, &omega).unwrap();
        let mut rng = ReplicaRng::new(301, 99);
        for _ in 0..50 {
            let prop = [uniform_in_disk(&mut rng, 1.0), uniform_in_disk(&mut rng, 1.0)];
            let truncated = target.cross().log_gamma(&prop) - target.cross().log_gamma(&zeta);
            let full = full_log_gamma(&prop, &omega) - full_log_gamma(&zeta, &omega);
            assert!((truncated - full).abs() <= 1e-10, "n={n}: {truncated} vs {full}");
        }
    }
}

#[test]
fn ginibre_ratio_matches_direct_density() {
    let (zeta, omega) = separated_ginibre(100, 2, 302);
    let target = GinibreTarget::new(1.0, 2, &omega).unwrap();
    let direct = |z: &[Complex64]| {
        2.0 * vandermonde_log_abs(z) + 2.0 * full_log_gamma(z, &omega) - z.iter().map(|w| w.norm_sqr()).sum::<f64>()
    };
    let mut rng = ReplicaRng::new(302, 7);
    for _ in 0..100 {
        let prop = [uniform_in_disk(&mut rng, 1.0), uniform_in_disk(&mut rng, 1.0)];
        let lr = target.log_ratio(&zeta, &prop).unwrap();
        assert!((lr - (direct(&prop) - direct(&zeta))).abs() <= 1e-10);
        assert_eq!(lr, -target.log_ratio(&prop, &zeta).unwrap());
    }
}

#[test]
fn free_chain_matches_rejection_sampler() {
    let target = GinibreTarget::new(1.0, 1, &[]).unwrap();
    let mut rng = ReplicaRng::new(303, 0);
    let chain = run_ginibre_chain(&target, &[Complex64::new(0.0, 0.0)], &ChainParams::new(200_000), &mut rng).unwrap();
    let radii: Vec<f64> = chain.samples.iter().map(|r| r.state[0].norm()).collect();
    // direct draws: uniform in the disk, kept with probability exp(-|z|^2)
    let mut oracle = Vec::new();
    while oracle.len() < 20_000 {
        let z = uniform_in_disk(&mut rng, 1.0);
        if rng.random::<f64>() < (-z.norm_sqr()).exp() {
            oracle.push(z.norm());
        }
    }
    let d = ks_two_sample(&radii, &oracle);
    assert!(d < ks_two_sample_critical_1pct(radii.len(), oracle.len()), "D = {d}");
}

#[test]
fn detailed_balance_on_three_states() {
    let omega: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(1.8, 0.7 * k as f64)).collect();
    let target = GinibreTarget::new(1.0, 1, &omega).unwrap();
    let states = [Complex64::new(0.1, 0.2), Complex64::new(-0.6, 0.3), Complex64::new(0.4, -0.7)];
    let mut rng = ReplicaRng::new(304, 0);
    let mut counts = [[0u64; 3]; 3];
    let mut cur = 0usize;
    let steps = 400_000;
    for _ in 0..steps {
        let j = rng.random_range(0..3);
        let lr = target.log_ratio(&[states[cur]], &[states[j]]).unwrap();
        let next = if accept(lr, &mut rng) { j } else { cur };
        counts[cur][next] += 1;
        cur = next;
    }
    // empirical flows pi_i P_ij are the off-diagonal transition frequencies
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (counts[i][j] as f64, counts[j][i] as f64);
            let se = (a + b).sqrt();
            assert!((a - b).abs() <= 3.0 * se, "{i}->{j}: {a} vs {b}");
        }
    }
    // stationary frequencies against the target
    let w: Vec<f64> = states.iter().map(|z| target.log_density(&[*z]).exp()).collect();
    let total: f64 = w.iter().sum();
    for i in 0..3 {
        let freq = counts[i].iter().sum::<u64>() as f64 / steps as f64;
        assert!((freq - w[i] / total).abs() < 0.01);
    }
}

#[test]
fn gaf_chain_keeps_the_sum() {
    let (zeta, omega) = (0..)
        .find_map(|r| {
            let s = sample_gaf(40, &mut ReplicaRng::new(305, r)).unwrap();
            separated_split(s.roots.points(), 1.0, 3, 0.1).unwrap()
        })
        .unwrap();
    let target = GafTarget::new(1.0, &zeta, &omega).unwrap();
    let mut rng = ReplicaRng::new(305, 1000);
    let mut params = ChainParams::new(30_000);
    params.bins = 20;
    let rep = run_gaf_chain(&target, &zeta, &params, &mut rng).unwrap();
    assert!(rep.max_drift.unwrap() <= 1e-10);
    assert!(rep.acceptance > 0.05);
    for row in &rep.samples {
        assert!(row.state.iter().all(|z| z.norm() < 1.0));
    }
}

#[test]
fn chains_are_reproducible() {
    let (zeta, omega) = separated_ginibre(64, 2, 306);
    let target = GinibreTarget::new(1.0, 2, &omega).unwrap();
    let run = || run_ginibre_chain(&target, &zeta, &ChainParams::new(5_000), &mut ReplicaRng::new(1, 2)).unwrap();
    assert_eq!(run(), run());
}
