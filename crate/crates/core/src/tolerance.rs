//! Conditional densities of the inside points given the outside points, and the
//! Metropolis chains that resample them.
//!
//! Normalizers never appear: targets are evaluated up to an additive constant
//! that depends only on the outside points, and chains consume differences.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mcmc::accept;
use crate::points::{split_points, Disk};
use crate::rng::uniform_in_disk;
use crate::symfun::{concat_sigma, elementary_symmetric, gaf_denominator, vandermonde_log_abs};

/// Outside points beyond `NEAR_FACTOR * r0` enter the cross term through their power sums.
pub const NEAR_FACTOR: f64 = 4.0;
pub const FAR_TERMS: usize = 30;
pub const SUM_TOL: f64 = 1e-12;
pub const STUCK_WINDOW: usize = 10_000;
pub const STUCK_RATE: f64 = 0.01;
pub const GAF_TARGET_ACCEPTANCE: f64 = 0.25;
const TUNE_BLOCK: usize = 500;

/// `sum_j log|z - w_j|` up to the constant `sum_far log|w_j|`.
///
/// Far points contribute `-Re sum_l z^l tau_l / l` with `tau_l = sum_far w^-l`.
#[derive(Debug, Clone)]
pub struct CrossTerm {
    near: Vec<Complex64>,
    far_sums: Vec<Complex64>,
    near_radius: f64,
}

impl CrossTerm {
    pub fn new(outside: &[Complex64], near_radius: f64) -> Self {
        let mut near = Vec::new();
        let mut far_sums = vec![Complex64::new(0.0, 0.0); FAR_TERMS];
        for &w in outside {
            if w.norm() <= near_radius {
                near.push(w);
            } else {
                let inv = w.inv();
                let mut p = inv;
                for t in far_sums.iter_mut() {
                    *t += p;
                    p *= inv;
                }
            }
        }
        CrossTerm { near, far_sums, near_radius }
    }

    pub fn near_radius(&self) -> f64 {
        self.near_radius
    }

    pub fn near_count(&self) -> usize {
        self.near.len()
    }

    pub fn log_abs(&self, z: Complex64) -> f64 {
        let near: f64 = self.near.iter().map(|w| (z - w).norm().ln()).sum();
        let mut far = Complex64::new(0.0, 0.0);
        let mut p = z;
        for (l, t) in self.far_sums.iter().enumerate() {
            far += p * t / (l + 1) as f64;
            p *= z;
        }
        near - far.re
    }

    /// `log|Gamma(zeta, omega)|` up to the same constant.
    pub fn log_gamma(&self, zeta: &[Complex64]) -> f64 {
        zeta.iter().map(|&z| self.log_abs(z)).sum()
    }
}

/// `log|Gamma(zeta, omega)| = sum_{i,j} log|zeta_i - omega_j|` by the full product.
pub fn full_log_gamma(zeta: &[Complex64], omega: &[Complex64]) -> f64 {
    crate::symfun::cross_log_abs(zeta, omega)
}

pub trait ConditionalTarget {
    fn m(&self) -> usize;
    fn r0(&self) -> f64;
    /// Unnormalized log-density; the constant depends only on the outside points.
    fn log_density(&self, zeta: &[Complex64]) -> f64;
    fn log_ratio(&self, zeta: &[Complex64], zeta_new: &[Complex64]) -> Result<f64>;
}

fn check_inside(zeta: &[Complex64], r0: f64) -> Result<()> {
    if let Some(z) = zeta.iter().find(|z| z.norm() >= r0) {
        return Err(Error::InvalidParameter(format!("state point {z} is outside the disk of radius {r0}")));
    }
    Ok(())
}

/// `|Delta(zeta, omega)|^2 exp(-sum |zeta_k|^2)` on `D^m`.
#[derive(Debug, Clone)]
pub struct GinibreTarget {
    r0: f64,
    m: usize,
    cross: CrossTerm,
}

impl GinibreTarget {
    pub fn new(r0: f64, m: usize, outside: &[Complex64]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        let disk = Disk::new(r0)?;
        if outside.iter().any(|w| disk.contains(*w)) {
            return Err(Error::InvalidParameter("an outside point lies in the disk".into()));
        }
        Ok(GinibreTarget { r0, m, cross: CrossTerm::new(outside, NEAR_FACTOR * r0) })
    }

    pub fn cross(&self) -> &CrossTerm {
        &self.cross
    }
}

impl ConditionalTarget for GinibreTarget {
    fn m(&self) -> usize {
        self.m
    }

    fn r0(&self) -> f64 {
        self.r0
    }

    fn log_density(&self, zeta: &[Complex64]) -> f64 {
        2.0 * vandermonde_log_abs(zeta) + 2.0 * self.cross.log_gamma(zeta)
            - zeta.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Inside-Vandermonde ratio, cross-term ratio, Gaussian factor.
    fn log_ratio(&self, zeta: &[Complex64], zeta_new: &[Complex64]) -> Result<f64> {
        let vander = 2.0 * (vandermonde_log_abs(zeta_new) - vandermonde_log_abs(zeta));
        let gamma = 2.0 * (self.cross.log_gamma(zeta_new) - self.cross.log_gamma(zeta));
        let gauss = zeta.iter().map(|z| z.norm_sqr()).sum::<f64>() - zeta_new.iter().map(|z| z.norm_sqr()).sum::<f64>();
        Ok(vander + gamma + gauss)
    }
}

/// `|Delta(zeta, omega)|^2 / D(zeta, omega)^(n+1)` on the slice `sum zeta = s`.
#[derive(Debug, Clone)]
pub struct GafTarget {
    r0: f64,
    n: usize,
    m: usize,
    s: Complex64,
    sigma_outside: Vec<Complex64>,
    cross: CrossTerm,
}

impl GafTarget {
    pub fn new(r0: f64, inside: &[Complex64], outside: &[Complex64]) -> Result<Self> {
        let disk = Disk::new(r0)?;
        check_inside(inside, r0)?;
        if outside.iter().any(|w| disk.contains(*w)) {
            return Err(Error::InvalidParameter("an outside point lies in the disk".into()));
        }
        Ok(GafTarget {
            r0,
            n: inside.len() + outside.len(),
            m: inside.len(),
            s: inside.iter().sum(),
            sigma_outside: elementary_symmetric(outside),
            cross: CrossTerm::new(outside, NEAR_FACTOR * r0),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sum(&self) -> Complex64 {
        self.s
    }

    /// `ln D(zeta, omega)`.
    pub fn log_denominator(&self, zeta: &[Complex64]) -> f64 {
        let joint = concat_sigma(&elementary_symmetric(zeta), &self.sigma_outside);
        gaf_denominator(&joint, self.n).map(|d| d.log_value).unwrap_or(f64::INFINITY)
    }

    /// `(n + 1) ln(D(zeta_new, omega) / D(zeta, omega))`.
    pub fn log_denominator_ratio(&self, zeta: &[Complex64], zeta_new: &[Complex64]) -> f64 {
        (self.n + 1) as f64 * (self.log_denominator(zeta_new) - self.log_denominator(zeta))
    }
}

impl ConditionalTarget for GafTarget {
    fn m(&self) -> usize {
        self.m
    }

    fn r0(&self) -> f64 {
        self.r0
    }

    fn log_density(&self, zeta: &[Complex64]) -> f64 {
        2.0 * vandermonde_log_abs(zeta) + 2.0 * self.cross.log_gamma(zeta)
            - (self.n + 1) as f64 * self.log_denominator(zeta)
    }

    fn log_ratio(&self, zeta: &[Complex64], zeta_new: &[Complex64]) -> Result<f64> {
        let a: Complex64 = zeta.iter().sum();
        let b: Complex64 = zeta_new.iter().sum();
        let diff = (a - b).norm();
        if diff > SUM_TOL {
            return Err(Error::SumMismatch { diff });
        }
        let vander = 2.0 * (vandermonde_log_abs(zeta_new) - vandermonde_log_abs(zeta));
        let gamma = 2.0 * (self.cross.log_gamma(zeta_new) - self.cross.log_gamma(zeta));
        let dr = (self.n + 1) as f64 * (self.log_denominator(zeta) - self.log_denominator(zeta_new));
        Ok(vander + gamma + dr)
    }
}

/// `X_n = |sum 1/w| + |sum 1/w^2| + sum 1/|w|^3` over the outside points.
pub fn x_statistic(outside: &[Complex64]) -> f64 {
    let s1: Complex64 = outside.iter().map(|w| w.inv()).sum();
    let s2: Complex64 = outside.iter().map(|w| w.inv().powu(2)).sum();
    let s3: f64 = outside.iter().map(|w| w.norm().powi(-3)).sum();
    s1.norm() + s2.norm() + s3
}

/// Constant `K(D, delta) = max(r, r^2/2, r^3 / (3 (1 - q)))`, `q = r / (r + delta)`,
/// from bounding the series of `log|1 - zeta/w|` term by term.
pub fn envelope_constant(r0: f64, delta: f64) -> f64 {
    let q = r0 / (r0 + delta);
    r0.max(r0 * r0 / 2.0).max(r0.powi(3) / (3.0 * (1.0 - q)))
}

/// Inside and outside points on the event "exactly `m` inside and no outside
/// point within `delta` of the circle".
pub fn separated_split(points: &[Complex64], r0: f64, m: usize, delta: f64) -> Result<Option<(Vec<Complex64>, Vec<Complex64>)>> {
    let split = split_points(points, &Disk::new(r0)?)?;
    if split.inside.len() != m || split.outside.iter().any(|w| w.norm() < r0 + delta) {
        return Ok(None);
    }
    Ok(Some((split.inside, split.outside)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ChainModel {
    #[serde(rename = "ginibre")]
    Ginibre,
    #[serde(rename = "gaf")]
    Gaf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    pub steps: usize,
    pub burn_in: usize,
    /// Occupancy grid side (ginibre) or number of angle bins (gaf).
    pub bins: usize,
    /// Initial pair-move radius as a fraction of `r0` (gaf only).
    pub step_fraction: f64,
}

impl ChainParams {
    pub fn new(steps: usize) -> Self {
        ChainParams { steps, burn_in: steps / 10, bins: 10, step_fraction: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    pub step: usize,
    pub state: Vec<Complex64>,
    pub log_density: f64,
    pub accepted: bool,
}

/// Visit counts of the first coordinate (ginibre: square grid over the disk,
/// cells fully inside only; gaf: bins of `arg(t^2)`, `t = (zeta_1 - zeta_2)/2`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Occupancy {
    pub bins: usize,
    pub counts: Vec<u64>,
    pub eligible: Vec<bool>,
}

impl Occupancy {
    fn grid(bins: usize, r0: f64) -> Self {
        let h = 2.0 * r0 / bins as f64;
        let eligible = (0..bins * bins)
            .map(|c| {
                let (i, j) = (c % bins, c / bins);
                let x = [-r0 + i as f64 * h, -r0 + (i + 1) as f64 * h];
                let y = [-r0 + j as f64 * h, -r0 + (j + 1) as f64 * h];
                x.iter().all(|a| y.iter().all(|b| a * a + b * b <= r0 * r0))
            })
            .collect();
        Occupancy { bins, counts: vec![0; bins * bins], eligible }
    }

    fn angles(bins: usize) -> Self {
        Occupancy { bins, counts: vec![0; bins], eligible: vec![true; bins] }
    }

    /// Share of eligible cells with at least one visit.
    pub fn coverage(&self) -> f64 {
        let total = self.eligible.iter().filter(|e| **e).count();
        let hit = self.counts.iter().zip(&self.eligible).filter(|(c, e)| **e && **c > 0).count();
        hit as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub model: ChainModel,
    pub m: usize,
    pub steps: usize,
    pub acceptance: f64,
    pub step_size: f64,
    /// `max |sigma_1(state) - s|` over every step (gaf only).
    pub max_drift: Option<f64>,
    pub thin: usize,
    pub samples: Vec<ChainRow>,
    pub occupancy: Occupancy,
}

struct StuckGuard {
    seen: usize,
    accepted: usize,
}

impl StuckGuard {
    fn record(&mut self, ok: bool) -> Result<()> {
        self.seen += 1;
        self.accepted += ok as usize;
        if self.seen == STUCK_WINDOW {
            let rate = self.accepted as f64 / STUCK_WINDOW as f64;
            if rate < STUCK_RATE {
                return Err(Error::StuckChain { rate, window: STUCK_WINDOW });
            }
            self.seen = 0;
            self.accepted = 0;
        }
        Ok(())
    }
}

/// Ginibre chain: re-draw one coordinate uniformly in the disk.
pub fn run_ginibre_chain<R: Rng + ?Sized>(
    target: &GinibreTarget,
    start: &[Complex64],
    params: &ChainParams,
    rng: &mut R,
) -> Result<ChainReport> {
    let m = target.m();
    let r0 = target.r0();
    if start.len() != m {
        return Err(Error::InvalidParameter(format!("start has {} points, target expects {m}", start.len())));
    }
    check_inside(start, r0)?;
    let thin = 10 * m;
    let mut state = start.to_vec();
    let mut logp = target.log_density(&state);
    let mut occupancy = Occupancy::grid(params.bins, r0);
    let mut guard = StuckGuard { seen: 0, accepted: 0 };
    let mut samples = Vec::new();
    let mut accepted = 0usize;
    let h = 2.0 * r0 / params.bins as f64;
    for step in 0..params.burn_in + params.steps {
        let i = rng.random_range(0..m);
        let mut prop = state.clone();
        prop[i] = uniform_in_disk(rng, r0);
        let lr = target.log_ratio(&state, &prop)?;
        let ok = accept(lr, rng);
        if ok {
            state = prop;
            logp += lr;
        }
        guard.record(ok)?;
        if step < params.burn_in {
            continue;
        }
        let t = step - params.burn_in + 1;
        accepted += ok as usize;
        let z = state[0];
        let ix = (((z.re + r0) / h) as usize).min(params.bins - 1);
        let iy = (((z.im + r0) / h) as usize).min(params.bins - 1);
        occupancy.counts[iy * params.bins + ix] += 1;
        if t.is_multiple_of(thin) {
            samples.push(ChainRow { step: t, state: state.clone(), log_density: logp, accepted: ok });
        }
    }
    Ok(ChainReport {
        model: ChainModel::Ginibre,
        m,
        steps: params.steps,
        acceptance: accepted as f64 / params.steps.max(1) as f64,
        step_size: r0,
        max_drift: None,
        thin,
        samples,
        occupancy,
    })
}

fn angle_bin(state: &[Complex64], bins: usize) -> usize {
    let t = (state[0] - state[1]) / 2.0;
    let a = (t * t).arg();
    let u = (a + std::f64::consts::PI) / std::f64::consts::TAU;
    ((u * bins as f64) as usize).min(bins - 1)
}

/// GAF chain on the constant-sum slice: move a pair by `+delta`, `-delta`.
pub fn run_gaf_chain<R: Rng + ?Sized>(target: &GafTarget, start: &[Complex64], params: &ChainParams, rng: &mut R) -> Result<ChainReport> {
    let m = target.m();
    let r0 = target.r0();
    if m < 2 {
        return Err(Error::InvalidParameter("the gaf chain needs m >= 2; for m = 1 the inside point equals s".into()));
    }
    if start.len() != m {
        return Err(Error::InvalidParameter(format!("start has {} points, target expects {m}", start.len())));
    }
    check_inside(start, r0)?;
    let s = target.sum();
    let drift = |st: &[Complex64]| (st.iter().sum::<Complex64>() - s).norm();
    let thin = 10 * m;
    let mut state = start.to_vec();
    let mut logp = target.log_density(&state);
    let mut step_size = params.step_fraction * r0;
    let mut occupancy = Occupancy::angles(params.bins);
    let mut guard = StuckGuard { seen: 0, accepted: 0 };
    let mut samples = Vec::new();
    let mut max_drift = drift(&state);
    let (mut accepted, mut block_acc) = (0usize, 0usize);
    for step in 0..params.burn_in + params.steps {
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let d = uniform_in_disk(rng, step_size);
        let mut prop = state.clone();
        prop[i] += d;
        prop[j] -= d;
        let ok = if prop[i].norm() >= r0 || prop[j].norm() >= r0 {
            // keep the uniform stream aligned with the in-disk branch
            let _: f64 = rng.random();
            false
        } else {
            let lr = target.log_ratio(&state, &prop)?;
            let ok = accept(lr, rng);
            if ok {
                state = prop;
                logp += lr;
            }
            ok
        };
        guard.record(ok)?;
        max_drift = max_drift.max(drift(&state));
        if step < params.burn_in {
            block_acc += ok as usize;
            if (step + 1) % TUNE_BLOCK == 0 {
                let rate = block_acc as f64 / TUNE_BLOCK as f64;
                step_size = (step_size * (rate / GAF_TARGET_ACCEPTANCE).clamp(0.5, 2.0)).min(2.0 * r0);
                block_acc = 0;
            }
            continue;
        }
        let t = step - params.burn_in + 1;
        accepted += ok as usize;
        occupancy.counts[angle_bin(&state, params.bins)] += 1;
        if t.is_multiple_of(thin) {
            samples.push(ChainRow { step: t, state: state.clone(), log_density: logp, accepted: ok });
        }
    }
    Ok(ChainReport {
        model: ChainModel::Gaf,
        m,
        steps: params.steps,
        acceptance: accepted as f64 / params.steps.max(1) as f64,
        step_size,
        max_drift: Some(max_drift),
        thin,
        samples,
        occupancy,
    })
}

/// CDF of `|z|` under `exp(-|z|^2)` restricted to the disk of radius `r0`.
pub fn truncated_gaussian_radial_cdf(r: f64, r0: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else if r >= r0 {
        1.0
    } else {
        (-r * r).exp_m1() / (-r0 * r0).exp_m1()
    }
}
