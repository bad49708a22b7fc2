//! Radial test functions: the logarithmic bump `Psi` behind the rigidity
//! estimators, `theta(z) = z Psi(z)`, a quartic Lipschitz bump, and the dyadic
//! partition of unity used for inverse-power sums.
//!
//! The bump is built in the variable `u = ln r`. Its unsmoothed profile is
//! `1` up to `ln r0 + eta`, linear with slope `-eps'` down to `0` at
//! `ln r0 + 1/eps - eta`, then `0`; it is convolved with the kernel
//! `35/(32 eta) (1 - (t/eta)^2)^3` on `[-eta, eta]`. The result equals `1`
//! exactly for `r <= r0`, `0` exactly for `r >= r0 e^{1/eps}`, is `C^2`, and
//! has `|Psi'(r)| <= eps'/r` everywhere.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Default log-radius smoothing half-width.
pub const DEFAULT_LOG_WIDTH: f64 = 0.01;
pub const DEFAULT_J_MAX: u32 = 20;

/// A radial function `f(|z|)` with first and second radial derivatives.
pub trait RadialFunction: Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    fn second_derivative(&self, r: f64) -> f64;
    /// Radius beyond which the function vanishes identically.
    fn support_radius(&self) -> f64;
    /// Radii where the piecewise definition changes, including `0` and the support radius.
    fn breakpoints(&self) -> Vec<f64>;

    fn at(&self, z: Complex64) -> f64 {
        self.value(z.norm())
    }

    fn gradient_norm(&self, r: f64) -> f64 {
        self.derivative(r).abs()
    }

    fn laplacian(&self, r: f64) -> f64 {
        if r == 0.0 {
            2.0 * self.second_derivative(0.0)
        } else {
            self.second_derivative(r) + self.derivative(r) / r
        }
    }
}

/// CDF of the smoothing kernel at `v = t / eta`.
fn kernel_cdf(v: f64) -> f64 {
    if v <= -1.0 {
        return 0.0;
    }
    if v >= 1.0 {
        return 1.0;
    }
    let v2 = v * v;
    35.0 / 32.0 * (v * (1.0 - v2 + 0.6 * v2 * v2 - v2 * v2 * v2 / 7.0) + 16.0 / 35.0)
}

/// Density of the smoothing kernel at `v = t / eta`, in units of `1 / eta`.
fn kernel_density(v: f64) -> f64 {
    if v.abs() >= 1.0 {
        return 0.0;
    }
    let w = 1.0 - v * v;
    35.0 / 32.0 * w * w * w
}

/// Smoothed hinge `int max(x - t, 0) K(t) dt` in units of `eta`, at `v = x / eta`.
fn kernel_hinge(v: f64) -> f64 {
    if v <= -1.0 {
        return 0.0;
    }
    if v >= 1.0 {
        return v;
    }
    let v2 = v * v;
    let p = v2 / 2.0 - v2 * v2 / 4.0 + v2 * v2 * v2 / 10.0 - v2 * v2 * v2 * v2 / 56.0 + 16.0 * v / 35.0;
    35.0 / 32.0 * (p + 0.125)
}

/// The logarithmic bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    r0: f64,
    eps: f64,
    eta: f64,
    slope: f64,
    u0: f64,
    u1: f64,
}

/// Bump with plateau radius `r0` and nominal slope `eps`, default smoothing.
pub fn build_bump(r0: f64, eps: f64) -> Result<Bump> {
    Bump::with_log_width(r0, eps, DEFAULT_LOG_WIDTH)
}

impl Bump {
    pub fn with_log_width(r0: f64, eps: f64, eta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidEps(eps));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidParameter(format!("bump radius r0 = {r0} must be positive")));
        }
        if !(eta > 0.0 && 4.0 * eta <= 1.0 / eps) {
            return Err(Error::InvalidParameter(format!("smoothing width {eta} too large for eps = {eps}")));
        }
        let u0 = r0.ln();
        let u1 = u0 + 1.0 / eps;
        let slope = 1.0 / (1.0 / eps - 2.0 * eta);
        Ok(Self { r0, eps, eta, slope, u0, u1 })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Slope of the unsmoothed ramp in `ln r`, slightly above `eps`.
    pub fn effective_eps(&self) -> f64 {
        self.slope
    }

    pub fn log_width(&self) -> f64 {
        self.eta
    }

    /// Radial width of the inner smoothing band `[r0, r0 e^{2 eta}]`.
    pub fn smoothing_width(&self) -> f64 {
        self.r0 * (2.0 * self.eta).exp_m1()
    }

    pub fn outer_radius(&self) -> f64 {
        self.u1.exp()
    }

    /// `(G, G', G'')` with `Psi(r) = G(ln r)`.
    pub fn log_profile(&self, u: f64) -> (f64, f64, f64) {
        if u <= self.u0 {
            return (1.0, 0.0, 0.0);
        }
        if u >= self.u1 {
            return (0.0, 0.0, 0.0);
        }
        let a = self.u0 + self.eta;
        let b = self.u1 - self.eta;
        let e = self.eta;
        if u <= 0.5 * (a + b) {
            let v = (u - a) / e;
            (1.0 - self.slope * e * kernel_hinge(v), -self.slope * kernel_cdf(v), -self.slope * kernel_density(v) / e)
        } else {
            let v = (b - u) / e;
            (self.slope * e * kernel_hinge(v), -self.slope * kernel_cdf(v), self.slope * kernel_density(v) / e)
        }
    }

    /// `int |grad Psi|^2 dA = 2 pi int G'(u)^2 du`.
    pub fn gradient_energy(&self) -> f64 {
        let gl = GaussLegendre::new(16);
        2.0 * PI * gl.integrate_panels(&self.log_breaks(), |u| self.log_profile(u).1.powi(2))
    }

    fn log_breaks(&self) -> [f64; 4] {
        [self.u0, self.u0 + 2.0 * self.eta, self.u1 - 2.0 * self.eta, self.u1]
    }
}

impl RadialFunction for Bump {
    fn value(&self, r: f64) -> f64 {
        if r <= self.r0 {
            return 1.0;
        }
        self.log_profile(r.ln()).0
    }

    fn derivative(&self, r: f64) -> f64 {
        if r <= self.r0 {
            return 0.0;
        }
        self.log_profile(r.ln()).1 / r
    }

    fn second_derivative(&self, r: f64) -> f64 {
        if r <= self.r0 {
            return 0.0;
        }
        let (_, g1, g2) = self.log_profile(r.ln());
        (g2 - g1) / (r * r)
    }

    fn laplacian(&self, r: f64) -> f64 {
        if r <= self.r0 {
            return 0.0;
        }
        self.log_profile(r.ln()).2 / (r * r)
    }

    fn support_radius(&self) -> f64 {
        self.outer_radius()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut v = vec![0.0];
        v.extend(self.log_breaks().iter().map(|u| u.exp()));
        v
    }
}

/// `theta(z) = z Psi(|z|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    pub bump: Bump,
}

pub fn build_theta(bump: Bump) -> Theta {
    Theta { bump }
}

impl Theta {
    pub fn value(&self, z: Complex64) -> Complex64 {
        z * self.bump.value(z.norm())
    }

    /// `Delta theta(z) = z (Psi'' + 3 Psi'/r)`.
    pub fn laplacian(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        if r <= self.bump.r0 {
            return Complex64::new(0.0, 0.0);
        }
        let (_, g1, g2) = self.bump.log_profile(r.ln());
        z * ((g2 + 2.0 * g1) / (r * r))
    }

    /// `int |Delta theta|^2 dA = 2 pi int (G'' + 2 G')^2 du`.
    pub fn laplacian_energy(&self) -> f64 {
        let gl = GaussLegendre::new(16);
        2.0 * PI
            * gl.integrate_panels(&self.bump.log_breaks(), |u| {
                let (_, g1, g2) = self.bump.log_profile(u);
                (g2 + 2.0 * g1).powi(2)
            })
    }
}

/// `(1 - (r/R)^2)^2` on `r < R`: a `C^1` bump with Lipschitz gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticBump {
    pub radius: f64,
}

impl RadialFunction for QuarticBump {
    fn value(&self, r: f64) -> f64 {
        let s = (r / self.radius).powi(2);
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - s).powi(2)
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        let s = (r / self.radius).powi(2);
        if s >= 1.0 {
            0.0
        } else {
            -4.0 * r / (self.radius * self.radius) * (1.0 - s)
        }
    }

    fn second_derivative(&self, r: f64) -> f64 {
        let s = (r / self.radius).powi(2);
        if s >= 1.0 {
            0.0
        } else {
            (12.0 * s - 4.0) / (self.radius * self.radius)
        }
    }

    fn support_radius(&self) -> f64 {
        self.radius
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0, self.radius]
    }
}

/// Quintic smoothstep `6x^5 - 15x^4 + 10x^3` clamped to `[0, 1]`.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    }
}

/// Dyadic partition of unity on `|z| > r0`: `phi_tilde + sum_{j>=1} phi(z / 2^j) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionOfUnity {
    r0: f64,
    j_max: u32,
}

pub fn build_partition(r0: f64, j_max: u32) -> Result<PartitionOfUnity> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidParameter(format!("partition radius r0 = {r0} must be positive")));
    }
    if j_max == 0 || j_max > 60 {
        return Err(Error::InvalidParameter(format!("j_max = {j_max} must lie in 1..=60")));
    }
    Ok(PartitionOfUnity { r0, j_max })
}

impl PartitionOfUnity {
    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    /// Radius up to which the partition sums to one.
    pub fn coverage_radius(&self) -> f64 {
        self.r0 * 2f64.powi(self.j_max as i32 + 1)
    }

    /// Base bump: rises on `[r0, 1.5 r0]`, plateau to `2 r0`, falls to `0` at `3 r0`.
    pub fn phi(&self, r: f64) -> f64 {
        let r0 = self.r0;
        if r <= r0 || r >= 3.0 * r0 {
            0.0
        } else if r < 1.5 * r0 {
            smoothstep((r - r0) / (0.5 * r0))
        } else if r <= 2.0 * r0 {
            1.0
        } else {
            1.0 - smoothstep((r - 2.0 * r0) / r0)
        }
    }

    pub fn phi_tilde(&self, r: f64) -> f64 {
        if r >= self.r0 && r <= 1.5 * self.r0 {
            1.0
        } else {
            self.phi(r)
        }
    }

    /// `phi(r / 2^j)`.
    pub fn phi_scale(&self, j: u32, r: f64) -> f64 {
        self.phi(r / 2f64.powi(j as i32))
    }

    /// Scales `j` whose `phi_{2^j}` is nonzero at radius `r` (at most two).
    pub fn active_scales(&self, r: f64) -> impl Iterator<Item = u32> + '_ {
        let top = if r > self.r0 { (r / self.r0).log2().floor() as i64 } else { 0 };
        let lo = (top - 1).max(1) as u32;
        let hi = (top.max(0) as u32).min(self.j_max);
        (lo..=hi).filter(move |&j| self.phi_scale(j, r) != 0.0)
    }

    pub fn total(&self, r: f64) -> f64 {
        self.phi_tilde(r) + (1..=self.j_max).map(|j| self.phi_scale(j, r)).sum::<f64>()
    }
}
