//! Zeros of the truncated planar Gaussian analytic function
//! `f_n(z) = sum_{k<=n} xi_k z^k / sqrt(k!)`.

use num_complex::Complex64;

use super::aberth::aberth_roots;
use crate::error::{Error, Result};
use crate::logmath::ln_factorial;
use crate::points::{ConfigurationFile, PointConfiguration, SampleMeta};
use crate::rng::{standard_complex_gaussian, ReplicaRng};

pub const DEFAULT_GAF_CAP: usize = 128;
/// Corrections below `ROOT_TOL (1 + |z|)` stop the iteration for that root.
pub const ROOT_TOL: f64 = 1e-13;
/// Largest accepted relative residual of a returned root.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GafSample {
    pub n: usize,
    /// The Gaussian draws `xi_0..xi_n` (not divided by `sqrt(k!)`).
    pub xi: Vec<Complex64>,
    pub roots: PointConfiguration,
    pub max_residual: f64,
    pub iterations: usize,
    pub seed: u64,
    pub stream: u64,
}

impl GafSample {
    /// Polynomial coefficients `xi_k / sqrt(k!)`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        gaf_coefficients(&self.xi)
    }

    pub fn to_file(&self, r0: f64) -> ConfigurationFile {
        let meta = SampleMeta {
            model: "gaf".into(),
            n: self.n,
            seed: self.seed,
            stream: self.stream,
            residual: self.max_residual,
        };
        ConfigurationFile::new(r0, self.roots.points(), Some(meta))
    }
}

pub fn gaf_coefficients(xi: &[Complex64]) -> Vec<Complex64> {
    xi.iter().enumerate().map(|(k, x)| x * (-0.5 * ln_factorial(k)).exp()).collect()
}

pub fn draw_xi(n: usize, rng: &mut ReplicaRng) -> Vec<Complex64> {
    (0..=n).map(|_| standard_complex_gaussian(rng)).collect()
}

pub fn sample_gaf(n: usize, rng: &mut ReplicaRng) -> Result<GafSample> {
    sample_gaf_capped(n, DEFAULT_GAF_CAP, rng)
}

pub fn sample_gaf_capped(n: usize, cap: usize, rng: &mut ReplicaRng) -> Result<GafSample> {
    if n == 0 || n > cap {
        return Err(Error::InvalidParameter(format!("gaf degree n = {n} must lie in 1..={cap}")));
    }
    let xi = draw_xi(n, rng);
    gaf_from_xi(xi, rng.seed(), rng.stream())
}

/// Roots of the GAF polynomial built from given draws; degree is `xi.len() - 1`.
pub fn gaf_from_xi(xi: Vec<Complex64>, seed: u64, stream: u64) -> Result<GafSample> {
    let n = xi.len().saturating_sub(1);
    let c = gaf_coefficients(&xi);
    let out = aberth_roots(&c, ROOT_TOL)?;
    if out.max_residual > RESIDUAL_TOL {
        return Err(Error::RootFindingFailure { iterations: out.iterations, residual: out.max_residual });
    }
    Ok(GafSample {
        n,
        xi,
        roots: PointConfiguration::new(out.roots)?,
        max_residual: out.max_residual,
        iterations: out.iterations,
        seed,
        stream,
    })
}
