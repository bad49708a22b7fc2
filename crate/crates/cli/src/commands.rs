//! One runner per subcommand: validated parameters in, artifacts out.

use serde::Serialize;
use serde_json::{json, Value};

use rigid_core::experiments::{
    diagnostics_gaf, par_replicas, power_tails, ratio_envelope, reconstruct_experiment, rigidity_count, rigidity_sum,
    tolerance_mcmc, variance_quadrature, vieta_check, Model,
};
use rigid_core::rng::ReplicaRng;
use rigid_core::samplers::ginibre::sample_ginibre_mcmc_oracle;
use rigid_core::samplers::{sample_gaf, sample_ginibre_eigen};
use rigid_core::tolerance::ChainParams;

use crate::config::*;
use crate::error::CliError;
use crate::output::{raw_table, summarize, table, Artifacts};

pub struct Outcome {
    pub property: &'static str,
    pub params: Value,
    pub artifacts: Artifacts,
}

fn replicas(common: &Common, default: usize) -> usize {
    common.replicas.unwrap_or(default)
}

fn outcome<P: Serialize>(property: &'static str, params: &P, artifacts: Artifacts) -> Outcome {
    Outcome { property, params: serde_json::to_value(params).expect("params serialize"), artifacts }
}

#[derive(Serialize)]
struct PointRow {
    replica: u64,
    index: usize,
    re: f64,
    im: f64,
}

fn point_rows(replica: u64, pts: &[rigid_core::Complex64]) -> Vec<PointRow> {
    pts.iter().enumerate().map(|(index, z)| PointRow { replica, index, re: z.re, im: z.im }).collect()
}

fn point_file(r: u64) -> String {
    format!("points-{r:04}.json")
}

pub fn sample_ginibre(c: &Common, p: &SampleGinibreParams) -> Result<Outcome, CliError> {
    let reps = replicas(c, 1);
    let samples = par_replicas(reps, |r| {
        let mut rng = ReplicaRng::new(c.seed, r);
        match p.method {
            GinibreMethodParam::Eigen => sample_ginibre_eigen(p.n, &mut rng),
            GinibreMethodParam::McmcOracle => sample_ginibre_mcmc_oracle(p.n, p.steps.unwrap_or(10_000 * p.n), &mut rng),
        }
    })?;
    let mut rows = Vec::new();
    let mut extra = Vec::new();
    for (r, s) in samples.iter().enumerate() {
        rows.extend(point_rows(r as u64, s.points.points()));
        extra.push((point_file(r as u64), s.to_file(p.r0).to_json() + "\n"));
    }
    let summary = json!({
        "max_trace_rel_err": samples.iter().map(|s| s.trace_rel_err).fold(0.0, f64::max),
        "max_det_rel_err": samples.iter().map(|s| s.det_rel_err).fold(0.0, f64::max),
        "acceptance": samples.iter().filter_map(|s| s.acceptance).collect::<Vec<_>>(),
    });
    Ok(outcome("ginibre-sampling", p, Artifacts { summary, rows: table(&rows)?, plot: vec![], extra }))
}

pub fn sample_gaf_cmd(c: &Common, p: &SampleGafParams) -> Result<Outcome, CliError> {
    let reps = replicas(c, 1);
    let samples = par_replicas(reps, |r| sample_gaf(p.n, &mut ReplicaRng::new(c.seed, r)))?;
    let mut rows = Vec::new();
    let mut extra = Vec::new();
    for (r, s) in samples.iter().enumerate() {
        rows.extend(point_rows(r as u64, s.roots.points()));
        extra.push((point_file(r as u64), s.to_file(p.r0).to_json() + "\n"));
    }
    let summary = json!({
        "max_residual": samples.iter().map(|s| s.max_residual).fold(0.0, f64::max),
        "max_iterations": samples.iter().map(|s| s.iterations).max(),
    });
    Ok(outcome("gaf-sampling", p, Artifacts { summary, rows: table(&rows)?, plot: vec![], extra }))
}

pub fn rigidity_count_cmd(c: &Common, p: &RigidityCountParams) -> Result<Outcome, CliError> {
    let rep = rigidity_count(&p.eps, p.r0, p.n, replicas(c, 200), c.seed)?;
    let mut summary = summarize(&rep);
    summary["std_decreasing"] = json!(rep.std_decreasing());
    Ok(outcome("count-rigidity", p, Artifacts { summary, rows: table(&rep.rows)?, plot: rep.plotdata(), extra: vec![] }))
}

pub fn rigidity_sum_cmd(c: &Common, p: &RigiditySumParams) -> Result<Outcome, CliError> {
    let rep = rigidity_sum(p.n, &p.eps, p.r0, replicas(c, 200), c.seed)?;
    Ok(outcome("sum-rigidity", p, Artifacts { summary: summarize(&rep), rows: table(&rep.rows)?, plot: rep.plotdata(), extra: vec![] }))
}

pub fn power_tails_cmd(c: &Common, p: &PowerTailsParams) -> Result<Outcome, CliError> {
    let rep = power_tails(p.model, p.n, p.r0, p.l, &p.scales, replicas(c, 500), c.seed)?;
    Ok(outcome(
        "inverse-power-tail-decay",
        p,
        Artifacts { summary: summarize(&rep), rows: table(&rep.rows)?, plot: rep.plotdata(), extra: vec![] },
    ))
}

pub fn variance_cmd(c: &Common, p: &VarianceParams) -> Result<Outcome, CliError> {
    let rep = variance_quadrature(
        &p.radii,
        &p.sizes,
        (p.reference_radius, p.reference_n),
        (p.mc_n, p.mc_radius, replicas(c, 20_000)),
        c.seed,
    )?;
    let mut summary = summarize(&rep);
    summary["monte_carlo_z"] = json!(rep.monte_carlo.z_score());
    Ok(outcome(
        "linear-statistic-variance",
        p,
        Artifacts { summary, rows: table(&rep.rows)?, plot: rep.plotdata(), extra: vec![] },
    ))
}

pub fn vieta_cmd(c: &Common, p: &VietaParams) -> Result<Outcome, CliError> {
    let rep = vieta_check(p.n, replicas(c, 100), c.seed)?;
    Ok(outcome("vieta-exactness", p, Artifacts { summary: summarize(&rep), rows: table(&rep.rows)?, plot: vec![], extra: vec![] }))
}

pub fn reconstruct_cmd(c: &Common, p: &ReconstructParams) -> Result<Outcome, CliError> {
    let k_max = p.k_max.unwrap_or(p.n);
    if k_max == 0 || k_max > p.n {
        return Err(CliError::validation(format!("k_max = {k_max} must lie in 1..={}", p.n), Some("k_max")));
    }
    let rep = reconstruct_experiment(p.n, k_max, replicas(c, 500), c.seed)?;
    let mut summary = summarize(&rep);
    summary["phase_uniform"] = json!(rep.phase_uniform());
    Ok(outcome("reconstruction-from-zeros", p, Artifacts { summary, rows: table(&rep.rows)?, plot: rep.plotdata(), extra: vec![] }))
}

pub fn tolerance_cmd(c: &Common, p: &ToleranceParams) -> Result<Outcome, CliError> {
    if c.replicas.is_some_and(|r| r != 1) {
        return Err(CliError::validation("tolerance-mcmc runs a single chain; drop `replicas`".into(), Some("replicas")));
    }
    let mut params = ChainParams::new(p.steps);
    if let Some(b) = p.burn_in {
        params.burn_in = b;
    }
    params.bins = p.bins.unwrap_or(if p.model == Model::Gaf { 20 } else { 10 });
    if params.bins == 0 {
        return Err(CliError::validation("`bins` must be positive".into(), Some("bins")));
    }
    let rep = tolerance_mcmc(p.model, p.n, p.m, p.r0, p.delta, &params, c.seed)?;
    let mut header = vec!["step".to_string()];
    for i in 1..=p.m {
        header.push(format!("re_{i}"));
        header.push(format!("im_{i}"));
    }
    header.push("log_density".into());
    header.push("accepted".into());
    let rows: Vec<Vec<String>> = rep
        .chain
        .samples
        .iter()
        .map(|row| {
            let mut rec = vec![row.step.to_string()];
            for z in &row.state {
                rec.push(z.re.to_string());
                rec.push(z.im.to_string());
            }
            rec.push(row.log_density.to_string());
            rec.push((row.accepted as u8).to_string());
            rec
        })
        .collect();
    Ok(outcome("conditional-tolerance", p, Artifacts { summary: summarize(&rep), rows: raw_table(&header, &rows)?, plot: rep.plotdata(), extra: vec![] }))
}

pub fn envelope_cmd(c: &Common, p: &EnvelopeParams) -> Result<Outcome, CliError> {
    let rep = ratio_envelope(p.n, p.m, p.r0, p.delta, replicas(c, 460), p.proposals, c.seed)?;
    let mut summary = summarize(&rep);
    summary["retained_fraction"] = json!(rep.retained_fraction());
    Ok(outcome("conditional-ratio-envelope", p, Artifacts { summary, rows: table(&rep.rows)?, plot: rep.plotdata(), extra: vec![] }))
}

pub fn diagnostics_cmd(c: &Common, p: &DiagnosticsParams) -> Result<Outcome, CliError> {
    let rep = diagnostics_gaf(&p.sizes, p.m, p.r0, p.delta, replicas(c, 300), p.proposals, c.seed)?;
    Ok(outcome(
        "denominator-ratio-growth",
        p,
        Artifacts { summary: summarize(&rep), rows: table(&rep.rows)?, plot: rep.plotdata(), extra: vec![] },
    ))
}
