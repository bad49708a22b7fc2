//! Aberth–Ehrlich simultaneous iteration for all roots of a complex polynomial.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const ANGLE_OFFSET: f64 = 0.4142;

#[derive(Debug, Clone, PartialEq)]
pub struct AberthOutcome {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    /// Largest relative residual `|p(z)| / sum |c_k| |z|^k` over the roots.
    pub max_residual: f64,
}

/// `p(z) / p'(z)` for `p(z) = sum c_k z^k`, using the reversed polynomial
/// outside the unit disk to avoid overflow.
pub fn newton_ratio(c: &[Complex64], z: Complex64) -> Complex64 {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = c[n];
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        p / dp
    } else {
        let y = z.inv();
        let mut q = c[0];
        let mut dq = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            dq = dq * y + q;
            q = q * y + c[k];
        }
        z / (n as f64 - y * dq / q)
    }
}

pub fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * z + ck)
}

/// `|p(z)| / sum |c_k| |z|^k`.
pub fn relative_residual(c: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let scale = c.iter().rev().fold(0.0, |acc, ck| acc * r + ck.norm());
    if scale == 0.0 {
        return 0.0;
    }
    horner(c, z).norm() / scale
}

/// Positive root of `|c_n| rho^n = sum_{k<n} |c_k| rho^k`.
pub fn cauchy_radius(c: &[Complex64]) -> f64 {
    let n = c.len() - 1;
    let a: Vec<f64> = c.iter().map(|z| z.norm()).collect();
    if a[..n].iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    // g(rho) = sum_{k<n} a_k rho^(k-n) - a_n is decreasing in rho.
    let g = |rho: f64| a[..n].iter().enumerate().map(|(k, &ak)| ak * rho.powi(k as i32 - n as i32)).sum::<f64>() - a[n];
    let (mut lo, mut hi) = (1e-300_f64, 1.0_f64);
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    if lo == 1e-300 {
        lo = hi / 2.0;
        while g(lo) < 0.0 && lo > 1e-300 {
            hi = lo;
            lo /= 2.0;
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

/// All roots of `sum c_k z^k` (coefficients in increasing degree).
///
/// Converged once every correction is at most `tol (1 + |z|)`; a single Newton
/// polish step is then kept wherever it lowers the residual.
pub fn aberth_roots(c: &[Complex64], tol: f64) -> Result<AberthOutcome> {
    if c.len() < 2 {
        return Err(Error::InvalidParameter("polynomial degree must be at least 1".into()));
    }
    let n = c.len() - 1;
    let lead = c[n].norm();
    if lead == 0.0 || !lead.is_normal() {
        return Err(Error::LeadingCoefficientUnderflow { degree: n });
    }
    if n == 1 {
        let z = -c[0] / c[1];
        return Ok(AberthOutcome { roots: vec![z], iterations: 0, max_residual: relative_residual(c, z) });
    }

    let rho = cauchy_radius(c).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(rho, ANGLE_OFFSET + GOLDEN_ANGLE * k as f64)).collect();
    let mut done = vec![false; n];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let r = newton_ratio(c, zi);
            if r == Complex64::new(0.0, 0.0) {
                done[i] = true;
                continue;
            }
            let s: Complex64 = z.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, zj)| (zi - zj).inv()).sum();
            let w = r / (1.0 - r * s);
            if w.is_finite() {
                z[i] = zi - w;
            }
            if !w.is_finite() || w.norm() <= tol * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
    }

    for zi in z.iter_mut() {
        let before = relative_residual(c, *zi);
        let cand = *zi - newton_ratio(c, *zi);
        if cand.is_finite() && relative_residual(c, cand) < before {
            *zi = cand;
        }
    }
    let max_residual = z.iter().map(|&zi| relative_residual(c, zi)).fold(0.0, f64::max);
    if done.iter().any(|d| !d) || z.iter().any(|zi| !zi.is_finite()) {
        return Err(Error::RootFindingFailure { iterations, residual: max_residual });
    }
    Ok(AberthOutcome { roots: z, iterations, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(roots: &[Complex64], z: Complex64, tol: f64) -> bool {
        roots.iter().any(|r| (r - z).norm() < tol)
    }

    #[test]
    fn square_roots_of_one() {
        let out = aberth_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-14).unwrap();
        assert!(contains(&out.roots, c(1.0, 0.0), 1e-12));
        assert!(contains(&out.roots, c(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn cube_roots_of_one() {
        let out = aberth_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-14).unwrap();
        for k in 0..3 {
            let w = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0);
            assert!(contains(&out.roots, w, 1e-12), "{w}");
        }
    }

    #[test]
    fn linear_root_is_exact() {
        let out = aberth_roots(&[c(2.0, 1.0), c(0.5, -0.5)], 1e-14).unwrap();
        assert_eq!(out.roots, vec![-c(2.0, 1.0) / c(0.5, -0.5)]);
    }

    #[test]
    fn zero_root_is_found() {
        // z^2 - z
        let out = aberth_roots(&[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)], 1e-14).unwrap();
        assert!(contains(&out.roots, c(0.0, 0.0), 1e-12));
        assert!(contains(&out.roots, c(1.0, 0.0), 1e-12));
    }

    #[test]
    fn leading_coefficient_must_be_nonzero() {
        let err = aberth_roots(&[c(1.0, 0.0), c(0.0, 0.0)], 1e-14).unwrap_err();
        assert_eq!(err, Error::LeadingCoefficientUnderflow { degree: 1 });
        assert!(aberth_roots(&[c(1.0, 0.0)], 1e-14).is_err());
    }

    #[test]
    fn cauchy_radius_bounds_roots() {
        // (z - 3)(z + 0.5) = z^2 - 2.5 z - 1.5
        let p = [c(-1.5, 0.0), c(-2.5, 0.0), c(1.0, 0.0)];
        let rho = cauchy_radius(&p);
        assert!(rho >= 3.0 - 1e-12);
        assert!((rho * rho - 2.5 * rho - 1.5).abs() < 1e-9);
    }

    /// Coefficients of `lead * prod (z - r_i)`, increasing degree.
    fn expand(roots: &[Complex64], lead: Complex64) -> Vec<Complex64> {
        let mut p = vec![lead];
        for r in roots {
            let mut q = vec![c(0.0, 0.0); p.len() + 1];
            for (k, pk) in p.iter().enumerate() {
                q[k + 1] += pk;
                q[k] -= pk * r;
            }
            p = q;
        }
        p
    }

    #[test]
    fn random_degree_twenty_re_expands() {
        let mut rng = crate::rng::ReplicaRng::new(20, 0);
        for _ in 0..20 {
            let p: Vec<Complex64> =
                (0..=20).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let out = aberth_roots(&p, 1e-14).unwrap();
            let q = expand(&out.roots, p[20]);
            let scale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).norm() <= 1e-8 * scale, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn clustered_roots_converge() {
        let roots = [c(1.0, 0.0), c(1.0 + 1e-4, 0.0), c(-0.5, 0.3), c(0.0, 2.0)];
        let p = expand(&roots, c(1.0, 0.0));
        let out = aberth_roots(&p, 1e-14).unwrap();
        for r in &roots {
            assert!(contains(&out.roots, *r, 1e-8), "{r}");
        }
    }
}
