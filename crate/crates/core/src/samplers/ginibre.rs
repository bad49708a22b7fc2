//! Finite Ginibre ensemble: eigenvalues of an `n x n` matrix of i.i.d. standard
//! complex Gaussians, plus a Metropolis oracle on the joint eigenvalue density
//! for small `n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{eigenvalues, lu_log_det, CMatrix};
use crate::error::{Error, Result};
use crate::mcmc;
use crate::points::{ConfigurationFile, PointConfiguration, SampleMeta};
use crate::rng::{standard_complex_gaussian, uniform_in_disk, ReplicaRng};

pub const DEFAULT_GINIBRE_CAP: usize = 4096;
pub const ORACLE_MAX_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GinibreMethod {
    Eigen,
    McmcOracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GinibreSample {
    pub n: usize,
    pub points: PointConfiguration,
    pub seed: u64,
    pub stream: u64,
    pub method: GinibreMethod,
    /// `|sum(eigenvalues) - trace| / |trace|` (eigen method).
    pub trace_rel_err: f64,
    /// `|prod(eigenvalues) / det - 1|` with `det` from LU (eigen method).
    pub det_rel_err: f64,
    /// Post-tuning acceptance rate (oracle method).
    pub acceptance: Option<f64>,
}

impl GinibreSample {
    pub fn to_file(&self, r0: f64) -> ConfigurationFile {
        let meta = SampleMeta {
            model: "ginibre".into(),
            n: self.n,
            seed: self.seed,
            stream: self.stream,
            residual: self.trace_rel_err,
        };
        ConfigurationFile::new(r0, self.points.points(), Some(meta))
    }
}

pub fn random_ginibre_matrix(n: usize, rng: &mut ReplicaRng) -> CMatrix {
    CMatrix::from_fn(n, |_, _| standard_complex_gaussian(rng))
}

/// Dense eigen-decomposition sampler with the default size cap.
pub fn sample_ginibre_eigen(n: usize, rng: &mut ReplicaRng) -> Result<GinibreSample> {
    sample_ginibre_eigen_capped(n, DEFAULT_GINIBRE_CAP, rng)
}

pub fn sample_ginibre_eigen_capped(n: usize, cap: usize, rng: &mut ReplicaRng) -> Result<GinibreSample> {
    if n == 0 || n > cap {
        return Err(Error::InvalidParameter(format!("ginibre n = {n} must lie in 1..={cap}")));
    }
    let a = random_ginibre_matrix(n, rng);
    let eig = eigenvalues(&a)?;

    let tr = a.trace();
    let sum: Complex64 = eig.iter().sum();
    let trace_rel_err = (sum - tr).norm() / tr.norm().max(f64::MIN_POSITIVE);

    let (log_det, det_phase) = lu_log_det(&a);
    let log_prod: f64 = eig.iter().map(|z| z.norm().ln()).sum();
    let prod_phase: Complex64 = eig.iter().map(|z| z / z.norm()).product();
    let det_rel_err = ((log_prod - log_det).exp() * prod_phase / det_phase - 1.0).norm();

    Ok(GinibreSample {
        n,
        points: PointConfiguration::new(eig)?,
        seed: rng.seed(),
        stream: rng.stream(),
        method: GinibreMethod::Eigen,
        trace_rel_err,
        det_rel_err,
        acceptance: None,
    })
}

/// Log of the unnormalized joint eigenvalue density
/// `2 sum_{i<j} log|z_i - z_j| - sum |z_k|^2`.
pub fn ginibre_log_density(points: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for (i, a) in points.iter().enumerate() {
        s -= a.norm_sqr();
        for b in &points[i + 1..] {
            s += 2.0 * (a - b).norm().ln();
        }
    }
    s
}

/// Single-coordinate Gaussian-proposal Metropolis chain on the joint density.
#[derive(Debug, Clone)]
pub struct GinibreMetropolis {
    points: Vec<Complex64>,
    step: f64,
    proposed: u64,
    accepted: u64,
}

impl GinibreMetropolis {
    pub fn new(points: Vec<Complex64>, step: f64) -> Result<Self> {
        for (i, a) in points.iter().enumerate() {
            if points[i + 1..].iter().any(|b| (a - b).norm() <= 1e-14) {
                return Err(Error::DegenerateState);
            }
        }
        Ok(Self { points, step, proposed: 0, accepted: 0 })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn step_size(&self) -> f64 {
        self.step
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return 0.0;
        }
        self.accepted as f64 / self.proposed as f64
    }

    pub fn reset_counters(&mut self) {
        self.proposed = 0;
        self.accepted = 0;
    }

    /// Change in log-density when coordinate `i` moves to `z`.
    pub fn log_ratio(&self, i: usize, z: Complex64) -> f64 {
        let old = self.points[i];
        let mut d = old.norm_sqr() - z.norm_sqr();
        for (j, w) in self.points.iter().enumerate() {
            if j != i {
                d += 2.0 * ((z - w).norm().ln() - (old - w).norm().ln());
            }
        }
        d
    }

    pub fn step(&mut self, rng: &mut ReplicaRng) -> bool {
        use rand::Rng;
        let i = rng.random_range(0..self.points.len());
        let z = self.points[i] + standard_complex_gaussian(rng) * self.step;
        let lr = self.log_ratio(i, z);
        self.proposed += 1;
        if mcmc::accept(lr, rng) {
            self.points[i] = z;
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    /// Burn-in with step-size adaptation toward 35% acceptance.
    pub fn tune(&mut self, steps: usize, rng: &mut ReplicaRng) {
        let block = 500;
        let mut done = 0;
        while done < steps {
            self.reset_counters();
            let len = block.min(steps - done);
            for _ in 0..len {
                self.step(rng);
            }
            done += len;
            self.step *= (2.0 * (self.acceptance_rate() - 0.35)).exp();
            self.step = self.step.clamp(1e-3, 10.0);
        }
        self.reset_counters();
    }
}

/// Metropolis oracle for small `n`: half the steps tune the proposal, the
/// other half run at a fixed step; the final state is returned.
pub fn sample_ginibre_mcmc_oracle(n: usize, steps: usize, rng: &mut ReplicaRng) -> Result<GinibreSample> {
    if n == 0 || n > ORACLE_MAX_N {
        return Err(Error::InvalidParameter(format!("oracle n = {n} must lie in 1..={ORACLE_MAX_N}")));
    }
    if steps < 10_000 * n {
        return Err(Error::InvalidParameter(format!("oracle needs at least {} steps", 10_000 * n)));
    }
    let radius = (n as f64).sqrt();
    let init: Vec<Complex64> = (0..n).map(|_| uniform_in_disk(rng, radius)).collect();
    let mut chain = GinibreMetropolis::new(init, 0.5)?;
    chain.tune(steps / 2, rng);
    for _ in 0..steps - steps / 2 {
        chain.step(rng);
    }
    Ok(GinibreSample {
        n,
        points: PointConfiguration::new(chain.points.clone())?,
        seed: rng.seed(),
        stream: rng.stream(),
        method: GinibreMethod::McmcOracle,
        trace_rel_err: f64::NAN,
        det_rel_err: f64::NAN,
        acceptance: Some(chain.acceptance_rate()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_critical_1pct, ks_statistic, ks_two_sample, ks_two_sample_critical_1pct, mean, std_error};

    #[test]
    fn one_by_one_is_the_matrix_entry() {
        let mut a = ReplicaRng::new(4, 2);
        let mut b = ReplicaRng::new(4, 2);
        let s = sample_ginibre_eigen(1, &mut a).unwrap();
        let entry = standard_complex_gaussian(&mut b);
        assert_eq!(s.points.points(), &[entry]);
    }

    #[test]
    fn sum_and_product_checks() {
        for (n, stream) in [(2usize, 0u64), (10, 1), (100, 2)] {
            let s = sample_ginibre_eigen(n, &mut ReplicaRng::new(8, stream)).unwrap();
            assert_eq!(s.points.len(), n);
            assert!(s.trace_rel_err <= 1e-8, "n={n} trace {}", s.trace_rel_err);
            assert!(s.det_rel_err <= 1e-6, "n={n} det {}", s.det_rel_err);
        }
        let s = sample_ginibre_eigen(2, &mut ReplicaRng::new(1, 1)).unwrap();
        assert!(s.trace_rel_err <= 1e-10 && s.det_rel_err <= 1e-10);
    }

    #[test]
    fn rejects_out_of_range_sizes() {
        let mut rng = ReplicaRng::new(1, 0);
        assert!(sample_ginibre_eigen(0, &mut rng).is_err());
        assert!(sample_ginibre_eigen_capped(5, 4, &mut rng).is_err());
        assert!(sample_ginibre_mcmc_oracle(17, 1 << 20, &mut rng).is_err());
        assert!(sample_ginibre_mcmc_oracle(2, 100, &mut rng).is_err());
    }

    #[test]
    fn degenerate_initial_state() {
        let z = Complex64::new(0.3, 0.1);
        assert_eq!(GinibreMetropolis::new(vec![z, z], 0.1).unwrap_err(), Error::DegenerateState);
    }

    #[test]
    fn deterministic_replay() {
        let a = sample_ginibre_eigen(12, &mut ReplicaRng::new(5, 3)).unwrap();
        let b = sample_ginibre_eigen(12, &mut ReplicaRng::new(5, 3)).unwrap();
        assert_eq!(a, b);
    }

    /// `E #{|z| < r}` for G_n: `sum_{k<n} P(Poisson(r^2) >= k + 1)`.
    fn expected_count_inside(n: usize, r: f64) -> f64 {
        let x = r * r;
        let mut pmf = (-x).exp();
        let mut cdf = pmf;
        let mut total = 0.0;
        for k in 0..n {
            total += 1.0 - cdf;
            pmf *= x / (k + 1) as f64;
            cdf += pmf;
        }
        total
    }

    #[test]
    fn mean_count_in_unit_disk_matches_intensity() {
        let n = 64;
        let counts: Vec<f64> = (0..500)
            .map(|r| {
                let s = sample_ginibre_eigen(n, &mut ReplicaRng::new(2024, r)).unwrap();
                s.points.points().iter().filter(|z| z.norm() < 1.0).count() as f64
            })
            .collect();
        let expect = expected_count_inside(n, 1.0);
        assert!((expect - 1.0).abs() < 1e-12);
        assert!((mean(&counts) - expect).abs() <= 3.0 * std_error(&counts), "{} vs {expect}", mean(&counts));
    }

    #[test]
    fn oracle_single_point_radial_law() {
        let mut rng = ReplicaRng::new(77, 0);
        let mut chain = GinibreMetropolis::new(vec![Complex64::new(0.1, 0.0)], 1.0).unwrap();
        chain.tune(20_000, &mut rng);
        let mut radii = Vec::with_capacity(100_000);
        while radii.len() < 100_000 {
            for _ in 0..50 {
                chain.step(&mut rng);
            }
            radii.push(chain.points()[0].norm());
        }
        let d = ks_statistic(&radii, |r| 1.0 - (-r * r).exp());
        assert!(d < ks_critical_1pct(radii.len()), "ks {d}");
        let rate = chain.acceptance_rate();
        assert!(rate > 0.1 && rate < 0.7, "acceptance {rate}");
    }

    #[test]
    fn oracle_single_point_independent_chains() {
        let radii: Vec<f64> = (0..3000)
            .map(|r| sample_ginibre_mcmc_oracle(1, 10_000, &mut ReplicaRng::new(91, r)).unwrap().points.points()[0].norm())
            .collect();
        let d = ks_statistic(&radii, |r| 1.0 - (-r * r).exp());
        assert!(d < ks_critical_1pct(radii.len()), "ks {d}");
    }

    #[test]
    fn oracle_matches_eigen_sampler_for_three_points() {
        let reps = 2000;
        let max_abs = |s: GinibreSample| s.points.points().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mc: Vec<f64> = (0..reps)
            .map(|r| {
                let s = sample_ginibre_mcmc_oracle(3, 30_000, &mut ReplicaRng::new(5150, r)).unwrap();
                let a = s.acceptance.unwrap();
                assert!(a > 0.1 && a < 0.7, "acceptance {a}");
                max_abs(s)
            })
            .collect();
        let ei: Vec<f64> = (0..reps).map(|r| max_abs(sample_ginibre_eigen(3, &mut ReplicaRng::new(6160, r)).unwrap())).collect();
        let d = ks_two_sample(&mc, &ei);
        assert!(d < ks_two_sample_critical_1pct(reps as usize, reps as usize), "ks {d}");
    }

    #[test]
    fn log_ratio_matches_full_density_difference() {
        let pts = vec![Complex64::new(0.2, 0.5), Complex64::new(-1.0, 0.3), Complex64::new(0.7, -0.9)];
        let chain = GinibreMetropolis::new(pts.clone(), 0.3).unwrap();
        let z = Complex64::new(0.4, 0.4);
        let mut moved = pts.clone();
        moved[1] = z;
        let direct = ginibre_log_density(&moved) - ginibre_log_density(&pts);
        assert!((chain.log_ratio(1, z) - direct).abs() < 1e-12);
        assert_eq!(chain.log_ratio(1, pts[1]), 0.0);
    }
}
