//! Linear statistics and exact covariances of linear statistics for the
//! Ginibre kernels.
//!
//! For a projection kernel `K` with background `d gamma = e^{-|z|^2}/pi dA`,
//!
//! ```text
//! Cov = 1/2 ∬ (f(z) - f(w)) conj(g(z) - g(w)) |K(z,w)|^2 dgamma dgamma.
//! ```
//!
//! Expanding `|K(z,w)|^2 = sum_{j,k} z^j conj(z)^k w^k conj(w)^j / (j! k!)`
//! separates the double integral into moment matrices
//! `N_h[j,k] = int h z^j conj(z)^k dgamma / sqrt(j! k!)`, evaluated on a polar
//! grid (Gauss–Legendre in `r` split at the breakpoints of the integrands,
//! trapezoid in the angle via FFT). The constant function has `N_1 = I`
//! exactly, so only the supports of `f`, `g` need to be covered.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::logmath::ln_factorial;
use crate::quadrature::GaussLegendre;
use crate::testfns::RadialFunction;

/// Largest `|z conj(w)|` accepted by the infinite kernel.
pub const EXP_GUARD: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSpec {
    /// `K_n(z,w) = sum_{k<n} (z conj w)^k / k!`.
    GinibreFinite { n: usize },
    /// `K(z,w) = exp(z conj w)`.
    GinibreInfinite,
}

impl KernelSpec {
    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let x = z * w.conj();
        match *self {
            KernelSpec::GinibreFinite { n } => {
                let mut acc = Complex64::new(1.0, 0.0);
                for k in (1..n).rev() {
                    acc = acc * x / k as f64 + 1.0;
                }
                Ok(if n == 0 { Complex64::new(0.0, 0.0) } else { acc })
            }
            KernelSpec::GinibreInfinite => {
                if x.norm() > EXP_GUARD {
                    return Err(Error::InvalidParameter(format!("|z conj w| = {} exceeds {EXP_GUARD}", x.norm())));
                }
                Ok(x.exp())
            }
        }
    }

    /// First intensity `K(z,z) e^{-|z|^2} / pi` at radius `r`.
    pub fn intensity(&self, r: f64) -> f64 {
        match *self {
            KernelSpec::GinibreFinite { n } => finite_intensity(n, r),
            KernelSpec::GinibreInfinite => 1.0 / PI,
        }
    }

    /// Number of basis functions `z^j` kept for test functions supported in `|z| <= radius`.
    pub fn truncation(&self, radius: f64) -> usize {
        match *self {
            KernelSpec::GinibreFinite { n } => n,
            KernelSpec::GinibreInfinite => (radius * radius + 12.0 * radius + 20.0).ceil() as usize,
        }
    }
}

/// `P(Poisson(r^2) <= n - 1) / pi`, the one-point intensity of `G_n`.
pub fn finite_intensity(n: usize, r: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let x = r * r;
    if x == 0.0 {
        return 1.0 / PI;
    }
    statrs::function::gamma::gamma_ur(n as f64, x) / PI
}

/// `sum_z f(z)` over a configuration.
pub fn linear_statistic<T>(points: &[Complex64], f: impl Fn(Complex64) -> T) -> T
where
    T: std::iter::Sum<T>,
{
    points.iter().map(|&z| f(z)).sum()
}

/// A compactly supported planar function with the radii where it has kinks.
#[derive(Clone)]
pub struct TestFunction {
    f: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    support: f64,
    breaks: Vec<f64>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("TestFunction").field("support", &self.support).field("breaks", &self.breaks).finish()
    }
}

impl TestFunction {
    /// `f` must vanish for `|z| >= support`; `breaks` lists interior kink radii.
    pub fn new(support: f64, breaks: &[f64], f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        let mut b: Vec<f64> = breaks.iter().copied().filter(|&x| x > 0.0 && x < support).collect();
        b.push(0.0);
        b.push(support);
        b.sort_by(f64::total_cmp);
        b.dedup();
        Self { f: Arc::new(f), support, breaks: b }
    }

    pub fn radial<R: RadialFunction + Clone + 'static>(g: &R) -> Self {
        let h = g.clone();
        Self::new(g.support_radius(), &g.breakpoints(), move |z| Complex64::new(h.value(z.norm()), 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadParams {
    /// Gauss–Legendre nodes per radial panel.
    pub radial_nodes: usize,
    /// Trapezoid nodes in the angle (power of two is fastest).
    pub angular_nodes: usize,
    /// Doubling both node counts may change the result by at most `tol * max(1, |value|)`.
    pub tol: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self { radial_nodes: 128, angular_nodes: 256, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// `|fine - coarse|` from the doubling check.
    pub change: f64,
}

/// Moment matrix `N_h[j,k]`, stored densely `j * dim + k`.
struct Moments {
    dim: usize,
    data: Vec<Complex64>,
}

fn moments(h: &TestFunction, dim: usize, radial: usize, angular: usize) -> Moments {
    let gl = GaussLegendre::new(radial);
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(angular);
    let band = (angular / 2) as isize;
    let half_ln_fact: Vec<f64> = (0..dim).map(|j| 0.5 * ln_factorial(j)).collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); angular];
    let mut p = vec![0.0; dim];
    let dtheta = 2.0 * PI / angular as f64;
    for panel in h.breaks.windows(2) {
        for (r, w) in gl.mapped(panel[0], panel[1]) {
            for (l, b) in buf.iter_mut().enumerate() {
                *b = h.eval(Complex64::from_polar(r, dtheta * l as f64));
            }
            if buf.iter().all(|b| *b == Complex64::new(0.0, 0.0)) {
                continue;
            }
            fft.process(&mut buf);
            let ln_r = r.ln();
            for (j, pj) in p.iter_mut().enumerate() {
                *pj = (j as f64 * ln_r - 0.5 * r * r - half_ln_fact[j]).exp();
            }
            let scale = w * r / PI * dtheta;
            for j in 0..dim {
                if p[j] == 0.0 {
                    continue;
                }
                let row = &mut data[j * dim..(j + 1) * dim];
                let k_lo = (j as isize - band + 1).max(0) as usize;
                let k_hi = ((j as isize + band) as usize).min(dim);
                for k in k_lo..k_hi {
                    let m = (j as isize - k as isize).rem_euclid(angular as isize) as usize;
                    row[k] += buf[m] * (scale * p[j] * p[k]);
                }
            }
        }
    }
    Moments { dim, data }
}

/// `T(A, B) = sum_{j,k} N_A[j,k] N_B[k,j]`.
fn pair(a: &Moments, b: &Moments) -> Complex64 {
    let d = a.dim;
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            s += a.data[j * d + k] * b.data[k * d + j];
        }
    }
    s
}

fn trace(a: &Moments) -> Complex64 {
    (0..a.dim).map(|j| a.data[j * a.dim + j]).sum()
}

fn covariance_once(kernel: KernelSpec, f: &TestFunction, g: &TestFunction, radial: usize, angular: usize) -> Complex64 {
    let support = f.support.max(g.support);
    let dim = kernel.truncation(support);
    let (ff, gg) = (f.clone(), g.clone());
    let mut breaks: Vec<f64> = f.breaks.iter().chain(&g.breaks).copied().filter(|&b| b <= f.support.min(g.support)).collect();
    breaks.push(f.support.min(g.support));
    let fg = TestFunction::new(f.support.min(g.support), &breaks, move |z| ff.eval(z) * gg.eval(z).conj());
    let gg = g.clone();
    let gbar = TestFunction::new(g.support, &g.breaks, move |z| gg.eval(z).conj());
    let n_f = moments(f, dim, radial, angular);
    let n_gbar = moments(&gbar, dim, radial, angular);
    let n_fg = moments(&fg, dim, radial, angular);
    // N_1 = I, so T(fg, 1) = T(1, fg) = tr N_fg.
    trace(&n_fg) - 0.5 * (pair(&n_f, &n_gbar) + pair(&n_gbar, &n_f))
}

/// Covariance of the linear statistics of `f` and `g` (conjugate-linear in `g`).
pub fn dpp_covariance(kernel: KernelSpec, f: &TestFunction, g: &TestFunction, quad: QuadParams) -> Result<QuadResult<Complex64>> {
    if quad.radial_nodes == 0 || quad.angular_nodes < 4 {
        return Err(Error::InvalidParameter("quadrature needs radial >= 1 and angular >= 4 nodes".into()));
    }
    let coarse = covariance_once(kernel, f, g, quad.radial_nodes, quad.angular_nodes);
    let fine = covariance_once(kernel, f, g, 2 * quad.radial_nodes, 2 * quad.angular_nodes);
    let change = (fine - coarse).norm();
    if change > quad.tol * fine.norm().max(1.0) {
        return Err(Error::QuadratureNotConverged { change, tol: quad.tol });
    }
    Ok(QuadResult { value: fine, change })
}

pub fn dpp_variance(kernel: KernelSpec, f: &TestFunction, quad: QuadParams) -> Result<QuadResult<f64>> {
    let c = dpp_covariance(kernel, f, f, quad)?;
    Ok(QuadResult { value: c.value.re, change: c.change })
}

/// `int f(|z|) rho_1(|z|) dA` for a radial `f`, Gauss–Legendre on the
/// breakpoint panels with a doubling check at relative `tol`.
pub fn intensity_integral<R: RadialFunction + ?Sized>(kernel: KernelSpec, f: &R, nodes: usize, tol: f64) -> Result<QuadResult<f64>> {
    let breaks = f.breakpoints();
    let run = |m: usize| {
        let gl = GaussLegendre::new(m);
        2.0 * PI * gl.integrate_panels(&breaks, |r| f.value(r) * kernel.intensity(r) * r)
    };
    let coarse = run(nodes);
    let fine = run(2 * nodes);
    let change = (fine - coarse).abs();
    if change > tol * fine.abs().max(1e-300) {
        return Err(Error::QuadratureNotConverged { change, tol });
    }
    Ok(QuadResult { value: fine, change })
}
