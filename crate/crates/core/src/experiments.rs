//! Replica-parallel experiment runners shared by the command-line harness and the
//! acceptance suite. Every replica owns its RNG stream and results are gathered
//! in replica order, so output does not depend on the thread count.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linstat::{dpp_variance, linear_statistic, KernelSpec, QuadParams, TestFunction};
use crate::powersums::{fit_tail_decay, inverse_power_sums, usable_scales, TailFit};
use crate::reconstruct::reconstruct_and_align;
use crate::rigidity::{ginibre_size_for, CountEstimator, Intensity, SumEstimator};
use crate::rng::{uniform_in_disk, ReplicaRng};
use crate::samplers::{sample_gaf, sample_ginibre_eigen};
use crate::stats::{ks_critical_1pct, ks_statistic, mean, median, quantile, std_dev};
use crate::symfun::gaf_ratio_diagnostics;
use crate::testfns::{build_bump, build_partition, build_theta, QuarticBump, RadialFunction, DEFAULT_J_MAX};
use crate::tolerance::{
    envelope_constant, run_gaf_chain, run_ginibre_chain, separated_split, truncated_gaussian_radial_cdf, x_statistic,
    ChainParams, ChainReport, ConditionalTarget, GafTarget, GinibreTarget,
};

/// Stream tags separating the sub-experiments that share a master seed.
const TAG_SWEEP: u64 = 0x5157_0000;
const TAG_PROPOSALS: u64 = 0x7072_0000;

/// Run `f` for replicas `0..replicas` in parallel and collect in index order.
pub fn par_replicas<T, F>(replicas: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..replicas as u64).into_par_iter().map(f).collect()
}

/// One row of tidy plot data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
    pub yerr: f64,
}

impl PlotPoint {
    fn new(series: &str, x: f64, y: f64, yerr: f64) -> Self {
        PlotPoint { series: series.into(), x, y, yerr }
    }
}

fn fraction(flags: impl Iterator<Item = bool>) -> f64 {
    let (mut hit, mut total) = (0usize, 0usize);
    for f in flags {
        hit += f as usize;
        total += 1;
    }
    if total == 0 {
        0.0
    } else {
        hit as f64 / total as f64
    }
}

// ---------------------------------------------------------------- vieta

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VietaRow {
    pub replica: u64,
    pub n: usize,
    pub max_ratio_err: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VietaReport {
    pub n: usize,
    pub replicas: usize,
    pub worst: f64,
    pub within_1e6: usize,
    pub rows: Vec<VietaRow>,
}

pub fn vieta_check(n: usize, replicas: usize, seed: u64) -> Result<VietaReport> {
    let rows = par_replicas(replicas, |r| {
        let s = sample_gaf(n, &mut ReplicaRng::new(seed, r))?;
        let rec = reconstruct_and_align(&s, n)?;
        Ok(VietaRow { replica: r, n, max_ratio_err: rec.max_ratio_err, max_residual: s.max_residual })
    })?;
    Ok(VietaReport {
        n,
        replicas,
        worst: rows.iter().map(|r| r.max_ratio_err).fold(0.0, f64::max),
        within_1e6: rows.iter().filter(|r| r.max_ratio_err <= 1e-6).count(),
        rows,
    })
}

// ---------------------------------------------------------- reconstruct

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructRow {
    pub replica: u64,
    pub k_max: usize,
    pub chi: f64,
    pub chi_err: f64,
    pub chi_rel_err: f64,
    pub max_ratio_err: f64,
    pub aligned_err: f64,
    pub phase_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructReport {
    pub n: usize,
    pub k_max: usize,
    pub replicas: usize,
    /// Share of replicas with `|chi / |xi_0| - 1| <= 0.25`.
    pub chi_within_025: f64,
    /// Share of replicas with aligned error `<= 0.3`.
    pub aligned_within_03: f64,
    pub phase_ks: f64,
    pub phase_ks_critical: f64,
    pub rows: Vec<ReconstructRow>,
}

impl ReconstructReport {
    pub fn phase_uniform(&self) -> bool {
        self.phase_ks < self.phase_ks_critical
    }

    pub fn plotdata(&self) -> Vec<PlotPoint> {
        self.rows.iter().map(|r| PlotPoint::new("chi_over_abs_xi0", r.replica as f64, 1.0 + r.chi_rel_err, r.chi_err)).collect()
    }
}

pub fn reconstruct_experiment(n: usize, k_max: usize, replicas: usize, seed: u64) -> Result<ReconstructReport> {
    let rows = par_replicas(replicas, |r| {
        let s = sample_gaf(n, &mut ReplicaRng::new(seed, r))?;
        let rec = reconstruct_and_align(&s, k_max)?;
        Ok(ReconstructRow {
            replica: r,
            k_max,
            chi: rec.chi,
            chi_err: rec.chi_err,
            chi_rel_err: (rec.chi / s.xi[0].norm() - 1.0).abs(),
            max_ratio_err: rec.max_ratio_err,
            aligned_err: rec.aligned_err,
            phase_angle: rec.phase_angle(),
        })
    })?;
    let angles: Vec<f64> = rows.iter().map(|r| r.phase_angle).collect();
    Ok(ReconstructReport {
        n,
        k_max,
        replicas,
        chi_within_025: fraction(rows.iter().map(|r| r.chi_rel_err <= 0.25)),
        aligned_within_03: fraction(rows.iter().map(|r| r.aligned_err <= 0.3)),
        phase_ks: ks_statistic(&angles, |a| (a + PI) / TAU),
        phase_ks_critical: ks_critical_1pct(angles.len()),
        rows,
    })
}

// ------------------------------------------------------ rigidity: count

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub eps: f64,
    pub n: usize,
    pub replica: u64,
    pub raw: f64,
    pub rounded: i64,
    pub truth: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountSummary {
    pub eps: f64,
    pub n: usize,
    pub intensity_integral: f64,
    pub mean_error: f64,
    /// Standard deviation of `raw - truth` over replicas.
    pub std_error: f64,
    pub hit_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub r0: f64,
    pub replicas: usize,
    pub summaries: Vec<CountSummary>,
    pub rows: Vec<CountRow>,
}

impl CountReport {
    /// Whether the error spread shrinks strictly along the (decreasing) eps sweep.
    pub fn std_decreasing(&self) -> bool {
        self.summaries.windows(2).all(|w| w[1].std_error < w[0].std_error)
    }

    pub fn plotdata(&self) -> Vec<PlotPoint> {
        let mut out: Vec<PlotPoint> = self.summaries.iter().map(|s| PlotPoint::new("std_error", s.eps, s.std_error, 0.0)).collect();
        out.extend(self.summaries.iter().map(|s| PlotPoint::new("hit_rate", s.eps, s.hit_rate, 0.0)));
        out
    }
}

/// Ginibre count rigidity; `n` per eps covers the bump support unless `n_override` is set.
pub fn rigidity_count(eps_list: &[f64], r0: f64, n_override: Option<usize>, replicas: usize, seed: u64) -> Result<CountReport> {
    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    for (i, &eps) in eps_list.iter().enumerate() {
        let n = n_override.unwrap_or_else(|| ginibre_size_for(r0, eps));
        let est = CountEstimator::new(build_bump(r0, eps)?, Intensity::GinibreFinite { n })?;
        let block = par_replicas(replicas, |r| {
            let mut rng = ReplicaRng::new(seed, r).derive(TAG_SWEEP + i as u64);
            let s = sample_ginibre_eigen(n, &mut rng)?;
            let e = est.score(s.points.points())?;
            Ok(CountRow { eps, n, replica: r, raw: e.raw, rounded: e.rounded, truth: e.truth, error: e.error() })
        })?;
        let errs: Vec<f64> = block.iter().map(|r| r.error).collect();
        summaries.push(CountSummary {
            eps,
            n,
            intensity_integral: est.intensity_integral(),
            mean_error: mean(&errs),
            std_error: std_dev(&errs),
            hit_rate: fraction(block.iter().map(|r| r.rounded == r.truth as i64)),
        });
        rows.extend(block);
    }
    Ok(CountReport { r0, replicas, summaries, rows })
}

// -------------------------------------------------------- rigidity: sum

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumRow {
    pub eps: f64,
    pub replica: u64,
    pub raw_re: f64,
    pub raw_im: f64,
    pub truth_re: f64,
    pub truth_im: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumSummary {
    pub eps: f64,
    pub outer_radius: f64,
    pub median_abs_error: f64,
    pub mean_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumReport {
    pub n: usize,
    pub r0: f64,
    pub replicas: usize,
    pub summaries: Vec<SumSummary>,
    pub rows: Vec<SumRow>,
}

impl SumReport {
    pub fn plotdata(&self) -> Vec<PlotPoint> {
        self.summaries.iter().map(|s| PlotPoint::new("median_abs_error", s.eps, s.median_abs_error, 0.0)).collect()
    }
}

/// Largest `r0` keeping every bump of the sweep inside `0.7 sqrt(n)`.
pub fn gaf_sum_radius(n: usize, eps_list: &[f64]) -> f64 {
    let eps_min = eps_list.iter().copied().fold(f64::INFINITY, f64::min);
    0.7 * (n as f64).sqrt() * (-1.0 / eps_min).exp()
}

/// GAF sum rigidity; each replica's zeros are scored at every eps.
pub fn rigidity_sum(n: usize, eps_list: &[f64], r0: Option<f64>, replicas: usize, seed: u64) -> Result<SumReport> {
    let r0 = r0.unwrap_or_else(|| gaf_sum_radius(n, eps_list));
    let ests = eps_list
        .iter()
        .map(|&eps| SumEstimator::new(build_theta(build_bump(r0, eps)?), Intensity::Flat))
        .collect::<Result<Vec<_>>>()?;
    let per_replica = par_replicas(replicas, |r| {
        let s = sample_gaf(n, &mut ReplicaRng::new(seed, r))?;
        ests.iter()
            .map(|e| {
                let v = e.score(s.roots.points())?;
                Ok(SumRow {
                    eps: v.eps,
                    replica: r,
                    raw_re: v.raw.re,
                    raw_im: v.raw.im,
                    truth_re: v.truth.re,
                    truth_im: v.truth.im,
                    abs_error: v.abs_error(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let summaries = ests
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let errs: Vec<f64> = per_replica.iter().map(|rows| rows[i].abs_error).collect();
            SumSummary {
                eps: e.theta().bump.eps(),
                outer_radius: e.theta().bump.outer_radius(),
                median_abs_error: median(&errs),
                mean_abs_error: mean(&errs),
            }
        })
        .collect();
    Ok(SumReport { n, r0, replicas, summaries, rows: per_replica.into_iter().flatten().collect() })
}

// ---------------------------------------------------------- power tails

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Ginibre,
    Gaf,
}

impl Model {
    pub fn sample(self, n: usize, rng: &mut ReplicaRng) -> Result<Vec<Complex64>> {
        match self {
            Model::Ginibre => Ok(sample_ginibre_eigen(n, rng)?.points.into_points()),
            Model::Gaf => Ok(sample_gaf(n, rng)?.roots.into_points()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub replica: u64,
    pub k: u32,
    pub abs_tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub model: Model,
    pub n: usize,
    pub r0: f64,
    pub l: usize,
    pub replicas: usize,
    pub fit: TailFit,
    pub rows: Vec<TailRow>,
}

impl TailReport {
    pub fn plotdata(&self) -> Vec<PlotPoint> {
        self.fit.scales.iter().map(|s| PlotPoint::new("log2_mean_abs_tau", s.k as f64, s.log2_mean, s.log2_err)).collect()
    }
}

/// `E|tau_l(2^k)|` against `k` over the requested scales that fit inside `0.7 sqrt(n)`.
pub fn power_tails(model: Model, n: usize, r0: f64, l: usize, scales: &[u32], replicas: usize, seed: u64) -> Result<TailReport> {
    if l == 0 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    let usable = usable_scales(scales, r0, n);
    if usable.len() < 3 {
        return Err(Error::InsufficientScale { usable: usable.len() });
    }
    let partition = build_partition(r0, DEFAULT_J_MAX)?;
    let per_replica = par_replicas(replicas, |r| {
        let pts = model.sample(n, &mut ReplicaRng::new(seed, r))?;
        let rep = inverse_power_sums(&pts, &partition, l)?;
        Ok(usable.iter().map(|&k| rep.tau[l - 1][k as usize - 1].norm()).collect::<Vec<f64>>())
    })?;
    let samples: Vec<Vec<f64>> = (0..usable.len()).map(|i| per_replica.iter().map(|v| v[i]).collect()).collect();
    let fit = fit_tail_decay(l, &usable, &samples)?;
    let rows = per_replica
        .iter()
        .enumerate()
        .flat_map(|(r, v)| usable.iter().zip(v).map(move |(&k, &a)| TailRow { replica: r as u64, k, abs_tau: a }))
        .collect();
    Ok(TailReport { model, n, r0, l, replicas, fit, rows })
}

// ------------------------------------------------- variance quadrature

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    pub radius: f64,
    pub n: usize,
    pub variance: f64,
    pub change: f64,
    pub ratio_to_reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloCheck {
    pub n: usize,
    pub radius: f64,
    pub replicas: usize,
    pub quadrature: f64,
    pub monte_carlo: f64,
    pub standard_error: f64,
}

impl MonteCarloCheck {
    pub fn z_score(&self) -> f64 {
        (self.monte_carlo - self.quadrature) / self.standard_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceReport {
    pub reference_radius: f64,
    pub reference_n: usize,
    pub reference: f64,
    /// Largest of `max/ref` and `ref/min` over the grid.
    pub max_ratio: f64,
    pub rows: Vec<VarianceRow>,
    pub monte_carlo: MonteCarloCheck,
}

impl VarianceReport {
    pub fn plotdata(&self) -> Vec<PlotPoint> {
        self.rows
            .iter()
            .map(|r| PlotPoint::new(&format!("variance_n{}", r.n), r.radius, r.variance, r.change))
            .collect()
    }
}

/// `Var(sum phi(z / R))` for the quartic bump under the finite Ginibre kernel,
/// with a Monte Carlo check at `(mc_n, mc_radius)`.
pub fn variance_quadrature(
    radii: &[f64],
    sizes: &[usize],
    reference: (f64, usize),
    mc: (usize, f64, usize),
    seed: u64,
) -> Result<VarianceReport> {
    let quad = QuadParams::default();
    let var = |radius: f64, n: usize| {
        let f = TestFunction::radial(&QuarticBump { radius });
        dpp_variance(KernelSpec::GinibreFinite { n }, &f, quad)
    };
    let reference_value = var(reference.0, reference.1)?.value;
    let cells: Vec<(f64, usize)> = radii.iter().flat_map(|&r| sizes.iter().map(move |&n| (r, n))).collect();
    let rows = cells
        .par_iter()
        .map(|&(radius, n)| {
            let v = var(radius, n)?;
            Ok(VarianceRow { radius, n, variance: v.value, change: v.change, ratio_to_reference: v.value / reference_value })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio_to_reference.max(1.0 / r.ratio_to_reference)).fold(1.0, f64::max);

    let (mc_n, mc_radius, mc_replicas) = mc;
    let bump = QuarticBump { radius: mc_radius };
    let stats = par_replicas(mc_replicas, |r| {
        let s = sample_ginibre_eigen(mc_n, &mut ReplicaRng::new(seed, r))?;
        Ok(linear_statistic(s.points.points(), |z| bump.value(z.norm())))
    })?;
    let m = mean(&stats);
    let sq: Vec<f64> = stats.iter().map(|x| (x - m).powi(2)).collect();
    let mc_var = sq.iter().sum::<f64>() / (stats.len() - 1) as f64;
    let monte_carlo = MonteCarloCheck {
        n: mc_n,
        radius: mc_radius,
        replicas: mc_replicas,
        quadrature: var(mc_radius, mc_n)?.value,
        monte_carlo: mc_var,
        standard_error: std_dev(&sq) / (sq.len() as f64).sqrt(),
    };
    Ok(VarianceReport {
        reference_radius: reference.0,
        reference_n: reference.1,
        reference: reference_value,
        max_ratio,
        rows,
        monte_carlo,
    })
}

// ------------------------------------------------------------- tolerance

/// First replica whose configuration lies on the separated event, and how many were tried.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedDraw {
    pub stream: u64,
    pub tries: usize,
    pub inside: Vec<Complex64>,
    pub outside: Vec<Complex64>,
}

pub fn find_separated(model: Model, n: usize, r0: f64, m: usize, delta: f64, seed: u64, max_tries: usize) -> Result<SeparatedDraw> {
    for t in 0..max_tries {
        let pts = model.sample(n, &mut ReplicaRng::new(seed, t as u64))?;
        if let Some((inside, outside)) = separated_split(&pts, r0, m, delta)? {
            return Ok(SeparatedDraw { stream: t as u64, tries: t + 1, inside, outside });
        }
    }
    Err(Error::InvalidParameter(format!("no configuration with exactly {m} inside points in {max_tries} draws")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceReport {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub r0: f64,
    pub delta: f64,
    /// Draws needed to hit the separated event (1 when no outside points are used).
    pub tries: usize,
    pub coverage: f64,
    /// KS statistic of the thinned radii against the truncated Gaussian (ginibre, m = 1, n = 0).
    pub ks: Option<(f64, f64)>,
    pub chain: ChainReport,
}

impl ToleranceReport {
    pub fn plotdata(&self) -> Vec<PlotPoint> {
        self.chain
            .occupancy
            .counts
            .iter()
            .zip(&self.chain.occupancy.eligible)
            .enumerate()
            .filter(|(_, (_, e))| **e)
            .map(|(i, (c, _))| PlotPoint::new("occupancy", i as f64, *c as f64, 0.0))
            .collect()
    }
}

/// Resample the inside points of one separated configuration.
///
/// With `n = 0` the ginibre target has no outside points and the chain starts at the origin.
pub fn tolerance_mcmc(model: Model, n: usize, m: usize, r0: f64, delta: f64, params: &ChainParams, seed: u64) -> Result<ToleranceReport> {
    let (tries, inside, outside) = if n == 0 {
        if model == Model::Gaf {
            return Err(Error::InvalidParameter("the gaf chain needs n >= m >= 2".into()));
        }
        (1, vec![Complex64::new(0.0, 0.0); m], Vec::new())
    } else {
        let d = find_separated(model, n, r0, m, delta, seed, 10_000)?;
        (d.tries, d.inside, d.outside)
    };
    let mut rng = ReplicaRng::new(seed, u64::MAX);
    let (chain, ks) = match model {
        Model::Ginibre => {
            let target = GinibreTarget::new(r0, m, &outside)?;
            let chain = run_ginibre_chain(&target, &inside, params, &mut rng)?;
            let ks = (n == 0 && m == 1).then(|| {
                let radii: Vec<f64> = chain.samples.iter().map(|row| row.state[0].norm()).collect();
                (ks_statistic(&radii, |r| truncated_gaussian_radial_cdf(r, r0)), ks_critical_1pct(radii.len()))
            });
            (chain, ks)
        }
        Model::Gaf => {
            let target = GafTarget::new(r0, &inside, &outside)?;
            (run_gaf_chain(&target, &inside, params, &mut rng)?, None)
        }
    };
    Ok(ToleranceReport { model, n, m, r0, delta, tries, coverage: chain.occupancy.coverage(), ks, chain })
}

// -------------------------------------------------------------- envelope

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub replica: u64,
    pub x_n: f64,
    pub bound: f64,
    /// `|log ratio - inside Vandermonde term|`.
    pub excess: f64,
    /// The cross-term part alone, `2 |log|Gamma(zeta')| - log|Gamma(zeta)||`.
    pub cross_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub n: usize,
    pub m: usize,
    pub r0: f64,
    pub delta: f64,
    pub k: f64,
    pub replicas_drawn: usize,
    pub replicas_retained: usize,
    pub within: f64,
    pub cross_within: f64,
    pub rows: Vec<EnvelopeRow>,
}

impl EnvelopeReport {
    pub fn retained_fraction(&self) -> f64 {
        self.replicas_retained as f64 / self.replicas_drawn as f64
    }

    pub fn plotdata(&self) -> Vec<PlotPoint> {
        self.rows.iter().map(|r| PlotPoint::new("excess_over_bound", r.x_n, r.excess / r.bound, 0.0)).collect()
    }
}

/// Check the ratio envelope on separated Ginibre configurations, `proposals`
/// uniform `zeta'` per retained replica.
pub fn ratio_envelope(n: usize, m: usize, r0: f64, delta: f64, replicas: usize, proposals: usize, seed: u64) -> Result<EnvelopeReport> {
    let k = envelope_constant(r0, delta);
    let per_replica = par_replicas(replicas, |r| {
        let pts = Model::Ginibre.sample(n, &mut ReplicaRng::new(seed, r))?;
        let Some((zeta, omega)) = separated_split(&pts, r0, m, delta)? else {
            return Ok(Vec::new());
        };
        let target = GinibreTarget::new(r0, m, &omega)?;
        let x_n = x_statistic(&omega);
        let bound = 4.0 * m as f64 * k * x_n;
        let mut rng = ReplicaRng::new(seed, r).derive(TAG_PROPOSALS);
        let base_v = crate::symfun::vandermonde_log_abs(&zeta);
        let base_g = target.cross().log_gamma(&zeta);
        (0..proposals)
            .map(|_| {
                let prop: Vec<Complex64> = (0..m).map(|_| uniform_in_disk(&mut rng, r0)).collect();
                let lr = target.log_ratio(&zeta, &prop)?;
                let vander = 2.0 * (crate::symfun::vandermonde_log_abs(&prop) - base_v);
                let cross = 2.0 * (target.cross().log_gamma(&prop) - base_g);
                Ok(EnvelopeRow { replica: r, x_n, bound, excess: (lr - vander).abs(), cross_excess: cross.abs() })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let replicas_retained = per_replica.iter().filter(|v| !v.is_empty()).count();
    let rows: Vec<EnvelopeRow> = per_replica.into_iter().flatten().collect();
    Ok(EnvelopeReport {
        n,
        m,
        r0,
        delta,
        k,
        replicas_drawn: replicas,
        replicas_retained,
        within: fraction(rows.iter().map(|r| r.excess <= r.bound)),
        cross_within: fraction(rows.iter().map(|r| r.cross_excess <= r.bound)),
        rows,
    })
}

// ------------------------------------------------------- gaf diagnostics

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GafDiagnosticRow {
    pub n: usize,
    pub replica: u64,
    /// `max_i n * (linear ratio quantity)`.
    pub linear_max: f64,
    /// `max_{i<j} n * (cross ratio quantity)`, 0 when `m < 3`.
    pub cross_max: f64,
    /// `max` over proposals of `|(n + 1) ln(D(zeta', omega) / D(zeta, omega))|`.
    pub d_ratio_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GafDiagnosticSummary {
    pub n: usize,
    pub retained: usize,
    pub linear_p90: f64,
    pub d_ratio_p95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GafDiagnosticReport {
    pub m: usize,
    pub r0: f64,
    pub delta: f64,
    pub replicas: usize,
    pub summaries: Vec<GafDiagnosticSummary>,
    pub rows: Vec<GafDiagnosticRow>,
}

impl GafDiagnosticReport {
    pub fn plotdata(&self) -> Vec<PlotPoint> {
        let mut out: Vec<PlotPoint> =
            self.summaries.iter().map(|s| PlotPoint::new("linear_p90", s.n as f64, s.linear_p90, 0.0)).collect();
        out.extend(self.summaries.iter().map(|s| PlotPoint::new("d_ratio_p95", s.n as f64, s.d_ratio_p95, 0.0)));
        out
    }
}

/// A uniform point of the slice `{zeta_1 + zeta_2 = s}` inside the disk (`m = 2`),
/// with any further coordinates kept fixed.
fn slice_proposal(zeta: &[Complex64], r0: f64, rng: &mut ReplicaRng) -> Vec<Complex64> {
    let mid = (zeta[0] + zeta[1]) / 2.0;
    loop {
        let t = uniform_in_disk(rng, r0);
        if (mid + t).norm() < r0 && (mid - t).norm() < r0 {
            let mut out = zeta.to_vec();
            out[0] = mid + t;
            out[1] = mid - t;
            // round-off in mid +- t may move the sum by an ulp; shift it back
            let err: Complex64 = zeta.iter().sum::<Complex64>() - out.iter().sum::<Complex64>();
            out[0] += err;
            return out;
        }
    }
}

pub fn diagnostics_gaf(sizes: &[usize], m: usize, r0: f64, delta: f64, replicas: usize, proposals: usize, seed: u64) -> Result<GafDiagnosticReport> {
    if m < 2 {
        return Err(Error::InvalidParameter("diagnostics need m >= 2".into()));
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let block = par_replicas(replicas, |r| {
            let mut rng = ReplicaRng::new(seed, r).derive(TAG_SWEEP + i as u64);
            let pts = Model::Gaf.sample(n, &mut rng)?;
            let Some((zeta, omega)) = separated_split(&pts, r0, m, delta)? else {
                return Ok(None);
            };
            let diag = gaf_ratio_diagnostics(&zeta, &omega, n)?;
            let target = GafTarget::new(r0, &zeta, &omega)?;
            let mut prng = rng.derive(TAG_PROPOSALS);
            let d_ratio_max = (0..proposals)
                .map(|_| target.log_denominator_ratio(&zeta, &slice_proposal(&zeta, r0, &mut prng)).abs())
                .fold(0.0, f64::max);
            Ok(Some(GafDiagnosticRow {
                n,
                replica: r,
                linear_max: diag.linear.iter().map(|x| x.1).fold(0.0, f64::max),
                cross_max: diag.cross.iter().map(|x| x.2).fold(0.0, f64::max),
                d_ratio_max,
            }))
        })?;
        let kept: Vec<GafDiagnosticRow> = block.into_iter().flatten().collect();
        let lin: Vec<f64> = kept.iter().map(|r| r.linear_max).collect();
        let dr: Vec<f64> = kept.iter().map(|r| r.d_ratio_max).collect();
        summaries.push(GafDiagnosticSummary {
            n,
            retained: kept.len(),
            linear_p90: if lin.is_empty() { f64::NAN } else { quantile(&lin, 0.9) },
            d_ratio_p95: if dr.is_empty() { f64::NAN } else { quantile(&dr, 0.95) },
        });
        rows.extend(kept);
    }
    Ok(GafDiagnosticReport { m, r0, delta, replicas, summaries, rows })
}
