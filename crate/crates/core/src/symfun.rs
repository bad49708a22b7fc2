//! Elementary symmetric polynomials, Vandermonde magnitudes, the inside/outside
//! expansion coefficients `g_r`, and the GAF denominator
//! `D(zeta, omega) = sum_k |sigma_k|^2 / (n)_k`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logmath::{ln_falling_factorial, log_sum_exp};

/// `sigma_0..sigma_N` of the points by one-point-at-a-time multiplication.
pub fn elementary_symmetric(points: &[Complex64]) -> Vec<Complex64> {
    let mut s = vec![Complex64::new(0.0, 0.0); points.len() + 1];
    s[0] = Complex64::new(1.0, 0.0);
    for (count, &v) in points.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            s[k] = s[k] + v * s[k - 1];
        }
    }
    s
}

/// `sigma_k(u, v) = sum_i sigma_i(u) sigma_{k-i}(v)`.
pub fn concat_sigma(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `sum_{i<j} ln|z_i - z_j|`; `-inf` for a repeated point.
pub fn vandermonde_log_abs(points: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            s += (a - b).norm().ln();
        }
    }
    s
}

/// `sum_{i,j} ln|a_i - b_j|`.
pub fn cross_log_abs(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().map(|x| b.iter().map(|y| (x - y).norm().ln()).sum::<f64>()).sum()
}

/// Coefficients `g_0..g_{k_max}` with `sigma_k(omega) = sum_{r<=k} g_r sigma_{k-r}(zeta, omega)`.
///
/// `g` is the power series of `1 / prod(1 + zeta_i t)`: `g_0 = 1`,
/// `g_r = -sum_{i=1}^{min(r,m)} sigma_i(zeta) g_{r-i}`.
pub fn g_expansion(sigma_inside: &[Complex64], k_max: usize) -> Result<Vec<Complex64>> {
    if sigma_inside.len() < 2 {
        return Err(Error::InvalidParameter("g expansion needs at least one inside point".into()));
    }
    let m = sigma_inside.len() - 1;
    let mut g = vec![Complex64::new(0.0, 0.0); k_max + 1];
    g[0] = Complex64::new(1.0, 0.0);
    for r in 1..=k_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=r.min(m) {
            acc += sigma_inside[i] * g[r - i];
        }
        g[r] = -acc;
    }
    Ok(g)
}

/// `ln D` with `D = sum_{k=0}^n |sigma_k|^2 / (n)_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GafDenominator {
    pub n: usize,
    pub log_value: f64,
}

impl GafDenominator {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

pub fn gaf_denominator(sigma_joint: &[Complex64], n: usize) -> Result<GafDenominator> {
    if sigma_joint.len() != n + 1 {
        return Err(Error::InvalidParameter(format!("expected {} sigma values, got {}", n + 1, sigma_joint.len())));
    }
    let terms: Vec<f64> =
        sigma_joint.iter().enumerate().map(|(k, s)| 2.0 * s.norm().ln() - ln_falling_factorial(n, k)).collect();
    let log_value = log_sum_exp(&terms);
    if log_value == f64::NEG_INFINITY || log_value.is_nan() {
        return Err(Error::AllZeroSigma);
    }
    Ok(GafDenominator { n, log_value })
}

/// Diagnostics of the denominator ratio, each multiplied by `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GafDiagnostics {
    pub n: usize,
    pub m: usize,
    /// `(i, n |sum_k conj(sigma_k(zeta,omega)) sigma_{k-i}(omega) / (n)_k| / D)` for `2 <= i <= m`.
    pub linear: Vec<(usize, f64)>,
    /// `(i, j, n |sum_k conj(sigma_{k-i}(omega)) sigma_{k-j}(omega) / (n)_k| / D)` for `2 <= i < j <= m`.
    pub cross: Vec<(usize, usize, f64)>,
}

pub fn gaf_ratio_diagnostics(zeta: &[Complex64], omega: &[Complex64], n: usize) -> Result<GafDiagnostics> {
    let m = zeta.len();
    if m + omega.len() != n {
        return Err(Error::InvalidParameter(format!("{} inside + {} outside points != n = {n}", m, omega.len())));
    }
    let mut diag = GafDiagnostics { n, m, linear: vec![], cross: vec![] };
    if m < 2 {
        return Ok(diag);
    }
    let so = elementary_symmetric(omega);
    let joint = concat_sigma(&elementary_symmetric(zeta), &so);
    let d = gaf_denominator(&joint, n)?;
    // scaled values sigma / sqrt((n)_k), which stay moderate
    let half: Vec<f64> = (0..=n).map(|k| 0.5 * ln_falling_factorial(n, k)).collect();
    let a: Vec<Complex64> = joint.iter().zip(&half).map(|(s, h)| s * (-h).exp()).collect();
    let shifted = |i: usize, k: usize| -> Complex64 {
        if k < i || k - i >= so.len() {
            Complex64::new(0.0, 0.0)
        } else {
            so[k - i] * (-half[k]).exp()
        }
    };
    let dval = d.value();
    for i in 2..=m {
        let s: Complex64 = (0..=n).map(|k| a[k].conj() * shifted(i, k)).sum();
        diag.linear.push((i, n as f64 * s.norm() / dval));
        for j in i + 1..=m {
            let t: Complex64 = (0..=n).map(|k| shifted(i, k).conj() * shifted(j, k)).sum();
            diag.cross.push((i, j, n as f64 * t.norm() / dval));
        }
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{standard_complex_gaussian, ReplicaRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_sigma() {
        assert_eq!(elementary_symmetric(&[c(1.0, 0.0), c(2.0, 0.0)]), vec![c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(elementary_symmetric(&[]), vec![c(1.0, 0.0)]);
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_log_abs(&[c(0.0, 0.0), c(1.0, 0.0)]), 0.0);
        assert_eq!(vandermonde_log_abs(&[c(0.5, 0.5), c(0.5, 0.5)]), f64::NEG_INFINITY);
        let w: Vec<Complex64> = (0..3).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0)).collect();
        let direct = ((w[0] - w[1]) * (w[0] - w[2]) * (w[1] - w[2])).norm().ln();
        assert!((vandermonde_log_abs(&w) - (3.0 * 3f64.sqrt()).ln()).abs() < 1e-14);
        assert!((vandermonde_log_abs(&w) - direct).abs() < 1e-14);
    }

    #[test]
    fn single_inside_point_gives_geometric_g() {
        let cc = c(0.3, -0.4);
        let g = g_expansion(&elementary_symmetric(&[cc]), 8).unwrap();
        for (r, gr) in g.iter().enumerate() {
            assert!((gr - (-cc).powu(r as u32)).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_inside_points_kill_g() {
        let g = g_expansion(&elementary_symmetric(&[c(0.0, 0.0), c(0.0, 0.0)]), 6).unwrap();
        assert_eq!(g[0], c(1.0, 0.0));
        assert!(g[1..].iter().all(|x| *x == c(0.0, 0.0)));
        assert!(g_expansion(&[c(1.0, 0.0)], 3).is_err());
    }

    #[test]
    fn g_growth_bound() {
        let zeta = [c(0.6, 0.2), c(-0.3, 0.5), c(0.1, -0.7)];
        let g = g_expansion(&elementary_symmetric(&zeta), 60).unwrap();
        let rho = zeta.iter().map(|z| z.norm()).fold(0.0, f64::max) + 1.0;
        for (r, gr) in g.iter().enumerate() {
            assert!(gr.norm() <= 10.0 * rho.powi(r as i32));
        }
    }

    #[test]
    fn denominator_two_points() {
        let (a, b) = (c(0.4, 1.1), c(-0.7, 0.2));
        let d = gaf_denominator(&elementary_symmetric(&[a, b]), 2).unwrap();
        let expect = 1.0 + (a + b).norm_sqr() / 2.0 + (a * b).norm_sqr() / 2.0;
        assert!((d.value() - expect).abs() < 1e-14 * expect);
        assert!(gaf_denominator(&[c(1.0, 0.0)], 2).is_err());
    }

    #[test]
    fn denominator_phase_invariant() {
        let mut rng = ReplicaRng::new(3, 3);
        let pts: Vec<Complex64> = (0..12).map(|_| standard_complex_gaussian(&mut rng) * 3.0).collect();
        let rot: Vec<Complex64> = pts.iter().map(|z| z * Complex64::from_polar(1.0, 0.77)).collect();
        let d1 = gaf_denominator(&elementary_symmetric(&pts), 12).unwrap();
        let d2 = gaf_denominator(&elementary_symmetric(&rot), 12).unwrap();
        assert!((d1.log_value - d2.log_value).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_shapes() {
        let zeta = [c(0.1, 0.2), c(-0.3, 0.1), c(0.2, -0.2)];
        let omega = [c(2.0, 0.0), c(-1.5, 1.5), c(0.0, -3.0)];
        let d = gaf_ratio_diagnostics(&zeta, &omega, 6).unwrap();
        assert_eq!(d.linear.len(), 2);
        assert_eq!(d.cross.len(), 1);
        let e = gaf_ratio_diagnostics(&[], &omega, 3).unwrap();
        assert!(e.linear.is_empty() && e.cross.is_empty());
        assert!(gaf_ratio_diagnostics(&zeta, &omega, 7).is_err());
    }
}
