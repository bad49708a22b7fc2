//! Smoothed inverse-power sums of the points outside `|z| < r0`, their dyadic
//! tails, and full-configuration power sums `alpha_k = sum 1/z^k`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::points::{split_points, Disk, BOUNDARY_TOL};
use crate::stats::{mean, ols, std_error};
use crate::testfns::PartitionOfUnity;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSumReport {
    pub l_max: usize,
    /// `S_l` for `l = 1..=l_max` (index `l - 1`).
    pub s: Vec<Complex64>,
    /// `S~_l = sum 1/|w|^l`, same indexing (meaningful for `l >= 3`).
    pub s_abs: Vec<f64>,
    /// `tau_l(2^k)` for `k = 1..=j_max`, indexed `[l - 1][k - 1]`.
    pub tau: Vec<Vec<Complex64>>,
    pub tau_abs: Vec<Vec<f64>>,
    /// Inside part `S_k(D) = sum_{|z| < r0} 1/z^k`.
    pub inside: Vec<Complex64>,
    /// `alpha_k = sum_{all} 1/z^k`.
    pub alpha: Vec<Complex64>,
}

impl PowerSumReport {
    /// `X = |S_1| + |S_2| + S~_3`.
    pub fn x_statistic(&self) -> f64 {
        assert!(self.l_max >= 3, "X needs l_max >= 3");
        self.s[0].norm() + self.s[1].norm() + self.s_abs[2]
    }
}

pub fn check_origin(points: &[Complex64]) -> Result<()> {
    if let Some(z) = points.iter().find(|z| z.norm() <= BOUNDARY_TOL) {
        return Err(Error::OriginPoint { point: [z.re, z.im], tol: BOUNDARY_TOL });
    }
    Ok(())
}

pub fn inverse_power_sums(points: &[Complex64], partition: &PartitionOfUnity, l_max: usize) -> Result<PowerSumReport> {
    if l_max == 0 {
        return Err(Error::InvalidParameter("l_max must be at least 1".into()));
    }
    check_origin(points)?;
    let cover = partition.coverage_radius();
    if let Some(z) = points.iter().find(|z| z.norm() >= cover) {
        return Err(Error::InvalidParameter(format!("point at radius {} beyond partition coverage {cover}", z.norm())));
    }
    let split = split_points(points, &Disk::new(partition.r0())?)?;
    let j_max = partition.j_max() as usize;
    let zero = Complex64::new(0.0, 0.0);
    let mut s = vec![zero; l_max];
    let mut s_abs = vec![0.0; l_max];
    let mut scale_sum = vec![vec![zero; j_max]; l_max];
    let mut scale_abs = vec![vec![0.0; j_max]; l_max];
    for &w in &split.outside {
        let r = w.norm();
        let inv = w.inv();
        let tilde = partition.phi_tilde(r);
        let active: Vec<(usize, f64)> = partition.active_scales(r).map(|j| (j as usize, partition.phi_scale(j, r))).collect();
        let mut p = Complex64::new(1.0, 0.0);
        let mut pa = 1.0;
        for l in 0..l_max {
            p *= inv;
            pa /= r;
            let mut weight = tilde;
            for &(j, phi) in &active {
                scale_sum[l][j - 1] += p * phi;
                scale_abs[l][j - 1] += pa * phi;
                weight += phi;
            }
            s[l] += p * weight;
            s_abs[l] += pa * weight;
        }
    }
    let tail = |v: &Vec<Complex64>| -> Vec<Complex64> {
        let mut out = v.clone();
        for k in (0..j_max.saturating_sub(1)).rev() {
            out[k] = out[k] + out[k + 1];
        }
        out
    };
    let tail_abs = |v: &Vec<f64>| -> Vec<f64> {
        let mut out = v.clone();
        for k in (0..j_max.saturating_sub(1)).rev() {
            out[k] += out[k + 1];
        }
        out
    };
    let tau = scale_sum.iter().map(tail).collect();
    let tau_abs = scale_abs.iter().map(tail_abs).collect();
    let inside: Vec<Complex64> = (1..=l_max).map(|l| split.inside.iter().map(|z| z.powi(-(l as i32))).sum()).collect();
    let alpha = (0..l_max).map(|l| inside[l] + split.outside.iter().map(|z| z.powi(-(l as i32 + 1))).sum::<Complex64>()).collect();
    Ok(PowerSumReport { l_max, s, s_abs, tau, tau_abs, inside, alpha })
}

/// `alpha_k = sum_z 1/z^k` for `k = 1..=k_max`.
pub fn power_sums(points: &[Complex64], k_max: usize) -> Result<Vec<Complex64>> {
    check_origin(points)?;
    let mut out = vec![Complex64::new(0.0, 0.0); k_max];
    for z in points {
        let inv = z.inv();
        let mut p = Complex64::new(1.0, 0.0);
        for o in out.iter_mut() {
            p *= inv;
            *o += p;
        }
    }
    Ok(out)
}

/// Dyadic scales `k` with `2^k * 3 r0 <= 0.7 sqrt(n)`.
pub fn usable_scales(scales: &[u32], r0: f64, n: usize) -> Vec<u32> {
    let limit = 0.7 * (n as f64).sqrt();
    scales.iter().copied().filter(|&k| 2f64.powi(k as i32) * 3.0 * r0 <= limit).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailScale {
    pub k: u32,
    pub mean_abs_tau: f64,
    pub std_error: f64,
    pub log2_mean: f64,
    pub log2_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    pub l: usize,
    pub scales: Vec<TailScale>,
    pub slope: f64,
    /// Delta-method standard error of the OLS slope.
    pub slope_se: f64,
}

/// OLS of `log2 E|tau_l(2^k)|` on `k`, given per-replica `|tau|` samples for each scale.
pub fn fit_tail_decay(l: usize, scales: &[u32], samples: &[Vec<f64>]) -> Result<TailFit> {
    if scales.len() < 3 {
        return Err(Error::InsufficientScale { usable: scales.len() });
    }
    let ln2 = std::f64::consts::LN_2;
    let rows: Vec<TailScale> = scales
        .iter()
        .zip(samples)
        .map(|(&k, xs)| {
            let m = mean(xs);
            let se = std_error(xs);
            TailScale { k, mean_abs_tau: m, std_error: se, log2_mean: m.log2(), log2_err: se / (m * ln2) }
        })
        .collect();
    let x: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.log2_mean).collect();
    let fit = ols(&x, &y);
    let mx = mean(&x);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let var: f64 = rows.iter().zip(&x).map(|(r, v)| ((v - mx) / sxx).powi(2) * r.log2_err.powi(2)).sum();
    Ok(TailFit { l, scales: rows, slope: fit.slope, slope_se: var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfns::build_partition;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_outside_point() {
        let p = build_partition(1.0, 20).unwrap();
        let rep = inverse_power_sums(&[c(2.0, 0.0)], &p, 3).unwrap();
        assert!((rep.s[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((rep.s_abs[2] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn alpha_of_plus_minus_one() {
        let a = power_sums(&[c(1.0, 0.0), c(-1.0, 0.0)], 2).unwrap();
        assert_eq!(a, vec![c(0.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn origin_rejected() {
        let p = build_partition(1.0, 20).unwrap();
        assert!(matches!(inverse_power_sums(&[c(0.0, 0.0)], &p, 2), Err(Error::OriginPoint { .. })));
        assert!(matches!(power_sums(&[c(1e-15, 0.0)], 2), Err(Error::OriginPoint { .. })));
    }

    #[test]
    fn partition_sums_match_direct_sums() {
        let p = build_partition(1.0, 20).unwrap();
        let mut rng = crate::rng::ReplicaRng::new(50, 0);
        let pts: Vec<Complex64> = (0..50)
            .map(|_| Complex64::from_polar(rng.random_range(1.0..8.0), rng.random_range(0.0..6.3)))
            .collect();
        let rep = inverse_power_sums(&pts, &p, 4).unwrap();
        for l in 1..=4 {
            let direct: Complex64 = pts.iter().map(|z| z.powi(-(l as i32))).sum();
            assert!((rep.s[l - 1] - direct).norm() <= 1e-10 * direct.norm(), "l={l}");
            let direct_abs: f64 = pts.iter().map(|z| z.norm().powi(-(l as i32))).sum();
            assert!((rep.s_abs[l - 1] - direct_abs).abs() <= 1e-10 * direct_abs);
            assert!((rep.alpha[l - 1] - direct).norm() <= 1e-10 * direct.norm());
        }
    }

    #[test]
    fn alpha_splits_into_inside_and_outside() {
        let p = build_partition(1.0, 20).unwrap();
        let pts = [c(0.3, 0.1), c(-0.5, -0.2), c(2.0, 1.0), c(-3.0, 0.5), c(0.0, 6.0)];
        let rep = inverse_power_sums(&pts, &p, 3).unwrap();
        for l in 0..3 {
            assert!((rep.alpha[l] - rep.inside[l] - rep.s[l]).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_tail_beyond_last_point() {
        let p = build_partition(1.0, 10).unwrap();
        let rep = inverse_power_sums(&[c(1.2, 0.0), c(0.0, -2.5)], &p, 2).unwrap();
        // 2.5 lies in the supports of phi_1 only; tau(2^k) for k >= 2 is exactly zero
        for k in 2..=10 {
            assert_eq!(rep.tau[0][k - 1], c(0.0, 0.0));
            assert_eq!(rep.tau_abs[1][k - 1], 0.0);
        }
        assert!(rep.tau[0][0].norm() > 0.0);
    }

    #[test]
    fn coverage_enforced() {
        let p = build_partition(1.0, 2).unwrap();
        assert!(inverse_power_sums(&[c(9.0, 0.0)], &p, 1).is_err());
    }

    #[test]
    fn usable_scales_and_insufficient() {
        assert_eq!(usable_scales(&[1, 2, 3, 4], 0.5, 300), vec![1, 2, 3]);
        assert_eq!(usable_scales(&[1, 2, 3], 1.0, 100), vec![1]);
        let err = fit_tail_decay(1, &[1, 2], &[vec![1.0, 2.0], vec![0.5, 1.0]]).unwrap_err();
        assert_eq!(err, Error::InsufficientScale { usable: 2 });
    }

    #[test]
    fn fit_recovers_exact_halving() {
        let samples: Vec<Vec<f64>> = (1..=4).map(|k| vec![0.9 * 2f64.powi(-k), 1.1 * 2f64.powi(-k)]).collect();
        let fit = fit_tail_decay(1, &[1, 2, 3, 4], &samples).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.slope_se > 0.0);
    }
}
