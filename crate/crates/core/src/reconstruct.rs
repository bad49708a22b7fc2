//! Recovery of the GAF coefficients from its zeros, up to a unimodular factor.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logmath::ln_factorial;
use crate::samplers::GafSample;
use crate::symfun::elementary_symmetric;

/// Coefficients of size below this are skipped by the aligned error.
pub const ALIGN_FLOOR: f64 = 0.1;

/// `e_0..e_k` from power sums `beta_1..beta_k` via Newton's identities.
pub fn newton_from_power_sums(beta: &[Complex64]) -> Vec<Complex64> {
    let mut e = Vec::with_capacity(beta.len() + 1);
    e.push(Complex64::new(1.0, 0.0));
    for k in 1..=beta.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let term = e[k - i] * beta[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / k as f64);
    }
    e
}

/// Ratios `a_k = xi_k / xi_0` for `k = 0..=k_max`, with `a_0 = 1`.
///
/// `a_k = (-1)^k sqrt(k!) e_k(1/z_1, .., 1/z_n)`.
pub fn vieta_ratios(roots: &[Complex64], k_max: usize) -> Result<Vec<Complex64>> {
    if k_max > roots.len() {
        return Err(Error::InvalidParameter(format!("k_max = {k_max} exceeds degree {}", roots.len())));
    }
    let mut inv = Vec::with_capacity(roots.len());
    for z in roots {
        if *z == Complex64::new(0.0, 0.0) {
            return Err(Error::OriginRoot { root: [z.re, z.im] });
        }
        inv.push(z.inv());
    }
    // equal to newton_from_power_sums on the reciprocal power sums, but stable
    let e = elementary_symmetric(&inv);
    Ok(e.iter()
        .take(k_max + 1)
        .enumerate()
        .map(|(k, ek)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            ek * sign * (0.5 * ln_factorial(k)).exp()
        })
        .collect())
}

/// `chi_k = sqrt(k) (sum_{j<k} |a_j|^2)^{-1/2}` with `k = a.len()`.
pub fn estimate_chi(a: &[Complex64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("chi needs at least one ratio".into()));
    }
    let s: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    Ok((a.len() as f64 / s).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub k_max: usize,
    pub ratios: Vec<Complex64>,
    pub chi: f64,
    /// CLT error bar `0.5 / sqrt(k)` on `chi / |xi_0|`.
    pub chi_err: f64,
    pub coefficients: Vec<Complex64>,
    pub phase: Complex64,
    /// `max_k |a_k - xi_k / xi_0| / |xi_k / xi_0|`.
    pub max_ratio_err: f64,
    /// `max |u xi_hat_k - xi_k| / |xi_k|` over `k` with `|xi_k| >= ALIGN_FLOOR`.
    pub aligned_err: f64,
}

impl ReconstructionResult {
    pub fn phase_angle(&self) -> f64 {
        self.phase.arg()
    }
}

/// Reconstruct from known ratios and compare with the true `xi`.
pub fn align(ratios: Vec<Complex64>, chi: f64, xi: &[Complex64]) -> ReconstructionResult {
    let k_max = ratios.len() - 1;
    let coefficients: Vec<Complex64> = ratios.iter().map(|a| a * chi).collect();
    let proj: Complex64 = coefficients.iter().zip(xi).map(|(h, x)| h.conj() * x).sum();
    let phase = proj / proj.norm();
    let mut max_ratio_err: f64 = 0.0;
    let mut aligned_err: f64 = 0.0;
    for k in 0..=k_max {
        let truth = xi[k] / xi[0];
        max_ratio_err = max_ratio_err.max((ratios[k] - truth).norm() / truth.norm());
        if xi[k].norm() >= ALIGN_FLOOR {
            aligned_err = aligned_err.max((phase * coefficients[k] - xi[k]).norm() / xi[k].norm());
        }
    }
    ReconstructionResult {
        k_max,
        ratios,
        chi,
        chi_err: 0.5 / ((k_max + 1) as f64).sqrt(),
        coefficients,
        phase,
        max_ratio_err,
        aligned_err,
    }
}

/// Full pipeline on a sample: ratios from the roots, `chi` from `a_0..a_{k_max-1}`,
/// aligned against the drawn `xi`.
pub fn reconstruct_and_align(sample: &GafSample, k_max: usize) -> Result<ReconstructionResult> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be positive".into()));
    }
    let ratios = vieta_ratios(sample.roots.points(), k_max)?;
    let chi = estimate_chi(&ratios[..k_max])?;
    Ok(align(ratios, chi, &sample.xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ReplicaRng;
    use crate::samplers::gaf::gaf_from_xi;
    use crate::samplers::sample_gaf;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn low_order_newton() {
        let b = [c(0.3, 1.0), c(-2.0, 0.5)];
        let e = newton_from_power_sums(&b);
        assert_eq!(e[1], b[0]);
        assert!((e[2] - (b[0] * b[0] - b[1]) / 2.0).norm() < 1e-15);
    }

    #[test]
    fn newton_matches_multiply_out() {
        let z = [c(0.4, 0.1), c(-1.2, 0.7), c(0.9, -0.3), c(2.0, 1.0), c(-0.5, -1.5)];
        let beta: Vec<Complex64> = (1..=5).map(|j| z.iter().map(|v| v.powu(j)).sum()).collect();
        let e = newton_from_power_sums(&beta);
        let s = elementary_symmetric(&z);
        for k in 0..=5 {
            assert!((e[k] - s[k]).norm() <= 1e-12 * s[k].norm().max(1.0));
        }
    }

    #[test]
    fn linear_case() {
        let xi = vec![c(0.7, -0.2), c(-1.1, 0.4)];
        let s = gaf_from_xi(xi.clone(), 0, 0).unwrap();
        let a = vieta_ratios(s.roots.points(), 1).unwrap();
        assert_eq!(a[0], c(1.0, 0.0));
        assert!((a[1] - xi[1] / xi[0]).norm() < 1e-15);
    }

    #[test]
    fn quadratic_case() {
        let xi = vec![c(0.5, 0.5), c(-0.3, 1.2), c(0.8, -0.1)];
        let s = gaf_from_xi(xi.clone(), 0, 0).unwrap();
        let a = vieta_ratios(s.roots.points(), 2).unwrap();
        for k in 0..3 {
            assert!((a[k] - xi[k] / xi[0]).norm() < 1e-12 * (xi[k] / xi[0]).norm());
        }
    }

    #[test]
    fn newton_agrees_on_reciprocal_power_sums() {
        let roots = [c(1.5, 0.2), c(-0.8, 1.9), c(2.2, -1.0), c(-1.7, -0.6)];
        let inv: Vec<Complex64> = roots.iter().map(|z| z.inv()).collect();
        let beta: Vec<Complex64> = (1..=4).map(|j| inv.iter().map(|v| v.powu(j)).sum()).collect();
        let e = newton_from_power_sums(&beta);
        let a = vieta_ratios(&roots, 4).unwrap();
        for k in 0..=4 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let via_newton = e[k] * sign * (0.5 * ln_factorial(k)).exp();
            assert!((via_newton - a[k]).norm() <= 1e-12 * a[k].norm());
        }
    }

    #[test]
    fn origin_root_rejected() {
        assert!(matches!(vieta_ratios(&[c(0.0, 0.0), c(1.0, 0.0)], 2), Err(Error::OriginRoot { .. })));
        assert!(vieta_ratios(&[c(1.0, 0.0)], 2).is_err());
    }

    #[test]
    fn chi_identities() {
        assert_eq!(estimate_chi(&vec![c(1.0, 0.0); 12]).unwrap(), 1.0);
        let xi = [c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        // sum |xi_j|^2 = 4 = k, so chi = |xi_0|
        let a: Vec<Complex64> = xi.iter().map(|x| x / xi[0]).collect();
        assert!((estimate_chi(&a).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_inputs_align_exactly() {
        let mut rng = ReplicaRng::new(5, 1);
        let s = sample_gaf(12, &mut rng).unwrap();
        let ratios: Vec<Complex64> = s.xi.iter().map(|x| x / s.xi[0]).collect();
        let r = align(ratios, s.xi[0].norm(), &s.xi);
        assert!(r.aligned_err < 1e-14);
        assert!((r.phase - s.xi[0] / s.xi[0].norm()).norm() < 1e-14);
        assert!((r.phase.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degree_twenty_ratios() {
        let mut rng = ReplicaRng::new(9, 0);
        let s = sample_gaf(20, &mut rng).unwrap();
        let r = reconstruct_and_align(&s, 20).unwrap();
        assert!(r.max_ratio_err <= 1e-6, "{}", r.max_ratio_err);
    }
}
