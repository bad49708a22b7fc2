//! Rigidity estimators: the number of points in the disk `|z| < r0` (Ginibre
//! and GAF zeros) and their sum (GAF zeros), computed from outside points only.
//!
//! Count: `raw = int Psi rho_1 dA - sum_{outside} Psi(w)`.
//! Sum: `raw = int theta rho_1 dA - sum_{outside} theta(w)`, where the integral
//! vanishes for every radial intensity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linstat::{finite_intensity, intensity_integral};
use crate::points::{split_points, Disk};
use crate::quadrature::GaussLegendre;
use crate::testfns::{Bump, RadialFunction, Theta};

/// Radial one-point intensity used by the count estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Intensity {
    /// `K_n(z,z) e^{-|z|^2} / pi` of the finite Ginibre ensemble.
    GinibreFinite { n: usize },
    /// `1 / pi`: the infinite Ginibre ensemble and the planar GAF zeros.
    Flat,
}

impl Intensity {
    pub fn density(&self, r: f64) -> f64 {
        match *self {
            Intensity::GinibreFinite { n } => finite_intensity(n, r),
            Intensity::Flat => 1.0 / PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountEstimate {
    pub raw: f64,
    pub rounded: i64,
    pub truth: usize,
    pub eps: f64,
    pub intensity_integral: f64,
}

impl CountEstimate {
    pub fn error(&self) -> f64 {
        self.raw - self.truth as f64
    }

    pub fn hit(&self) -> bool {
        self.rounded == self.truth as i64
    }
}

/// Count estimator with the intensity integral precomputed.
#[derive(Debug, Clone, Copy)]
pub struct CountEstimator {
    bump: Bump,
    intensity: Intensity,
    integral: f64,
}

impl CountEstimator {
    pub fn new(bump: Bump, intensity: Intensity) -> Result<Self> {
        let integral = match intensity {
            Intensity::Flat => {
                let gl = GaussLegendre::new(64);
                2.0 * PI * gl.integrate_panels(&bump.breakpoints(), |r| bump.value(r) * r) / PI
            }
            Intensity::GinibreFinite { n } => {
                intensity_integral(crate::linstat::KernelSpec::GinibreFinite { n }, &bump, 128, 1e-6)?.value
            }
        };
        Ok(Self { bump, intensity, integral })
    }

    pub fn bump(&self) -> &Bump {
        &self.bump
    }

    pub fn intensity(&self) -> Intensity {
        self.intensity
    }

    pub fn intensity_integral(&self) -> f64 {
        self.integral
    }

    /// Estimate from outside points alone.
    pub fn raw(&self, outside: &[Complex64]) -> f64 {
        self.integral - outside.iter().map(|w| self.bump.value(w.norm())).sum::<f64>()
    }

    /// Split a full configuration at `r0`, estimate from the outside part and
    /// score against the true inside count.
    pub fn score(&self, points: &[Complex64]) -> Result<CountEstimate> {
        let split = split_points(points, &Disk::new(self.bump.r0())?)?;
        let raw = self.raw(&split.outside);
        Ok(CountEstimate {
            raw,
            rounded: raw.round() as i64,
            truth: split.inside.len(),
            eps: self.bump.eps(),
            intensity_integral: self.integral,
        })
    }
}

/// Convenience wrapper for a one-off count estimate.
pub fn estimate_inside_count(outside: &[Complex64], bump: &Bump, intensity: Intensity) -> Result<f64> {
    Ok(CountEstimator::new(*bump, intensity)?.raw(outside))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumEstimate {
    pub raw: Complex64,
    pub truth: Complex64,
    pub eps: f64,
    pub intensity_integral: Complex64,
}

impl SumEstimate {
    pub fn abs_error(&self) -> f64 {
        (self.raw - self.truth).norm()
    }
}

/// `int theta(z) rho_1(|z|) dA` on a polar grid; zero up to rounding for any radial `rho_1`.
pub fn theta_intensity_integral(theta: &Theta, intensity: Intensity) -> Complex64 {
    let gl = GaussLegendre::new(32);
    let m = 64;
    let mut acc = Complex64::new(0.0, 0.0);
    for panel in theta.bump.breakpoints().windows(2) {
        for (r, w) in gl.mapped(panel[0], panel[1]) {
            let ring: Complex64 = (0..m)
                .map(|l| theta.value(Complex64::from_polar(r, 2.0 * PI * l as f64 / m as f64)))
                .sum();
            acc += ring * (w * r * intensity.density(r) * 2.0 * PI / m as f64);
        }
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub struct SumEstimator {
    theta: Theta,
    integral: Complex64,
}

impl SumEstimator {
    /// Fails if the quadrature of `theta rho_1` is not below `1e-10`.
    pub fn new(theta: Theta, intensity: Intensity) -> Result<Self> {
        let integral = theta_intensity_integral(&theta, intensity);
        if integral.norm() > 1e-10 {
            return Err(Error::QuadratureNotConverged { change: integral.norm(), tol: 1e-10 });
        }
        Ok(Self { theta, integral })
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    /// `-sum_{outside} theta(w)`; the intensity term is zero analytically.
    pub fn raw(&self, outside: &[Complex64]) -> Complex64 {
        -outside.iter().map(|&w| self.theta.value(w)).sum::<Complex64>()
    }

    pub fn score(&self, points: &[Complex64]) -> Result<SumEstimate> {
        let split = split_points(points, &Disk::new(self.theta.bump.r0())?)?;
        Ok(SumEstimate {
            raw: self.raw(&split.outside),
            truth: split.inside.iter().sum(),
            eps: self.theta.bump.eps(),
            intensity_integral: self.integral,
        })
    }
}

pub fn estimate_inside_sum(outside: &[Complex64], theta: &Theta) -> Complex64 {
    -outside.iter().map(|&w| theta.value(w)).sum::<Complex64>()
}

/// Ginibre size covering the bump support with a margin of 5: `ceil((r0 e^{1/eps} + 5)^2)`.
pub fn ginibre_size_for(r0: f64, eps: f64) -> usize {
    (r0 * (1.0 / eps).exp() + 5.0).powi(2).ceil() as usize
}
