//! Configuration: a JSON object per run, merged with command-line flags
//! (flags win), then validated against the command's parameter schema.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use rigid_core::experiments::Model;

use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

/// Keys shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Common {
    pub seed: u64,
    pub replicas: Option<usize>,
    pub threads: Option<usize>,
    pub out: String,
}

/// Split a merged object into the common keys and the command parameters.
pub fn resolve<P: DeserializeOwned>(mut merged: Map<String, Value>) -> Result<(Common, P), CliError> {
    if let Some(v) = merged.remove("version") {
        if v.as_u64() != Some(SCHEMA_VERSION) {
            return Err(CliError::validation(format!("unsupported config version {v}; expected {SCHEMA_VERSION}"), Some("version")));
        }
    }
    let take_u64 = |m: &mut Map<String, Value>, key: &str| -> Result<Option<u64>, CliError> {
        match m.remove(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| CliError::validation(format!("`{key}` must be a non-negative integer"), Some(key))),
        }
    };
    let seed = take_u64(&mut merged, "seed")?.unwrap_or(0);
    let replicas = take_u64(&mut merged, "replicas")?.map(|v| v as usize);
    let threads = take_u64(&mut merged, "threads")?.map(|v| v as usize);
    if replicas == Some(0) {
        return Err(CliError::validation("`replicas` must be positive".into(), Some("replicas")));
    }
    if threads == Some(0) {
        return Err(CliError::validation("`threads` must be positive".into(), Some("threads")));
    }
    let out = match merged.remove("out") {
        None | Some(Value::Null) => "rigid-points-out".to_string(),
        Some(Value::String(s)) => s,
        Some(_) => return Err(CliError::validation("`out` must be a string".into(), Some("out"))),
    };
    let params = serde_json::from_value(Value::Object(merged)).map_err(|e| {
        let msg = e.to_string();
        let key = msg.split('`').nth(1).map(str::to_string);
        CliError::Validation { message: msg, key }
    })?;
    Ok((Common { seed, replicas, threads, out }, params))
}

fn default_eps() -> Vec<f64> {
    vec![1.0, 0.5, 0.33]
}

fn default_scales() -> Vec<u32> {
    vec![1, 2, 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum GinibreMethodParam {
    Eigen,
    McmcOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGinibreParams {
    #[serde(default = "d64")]
    pub n: usize,
    #[serde(default = "one")]
    pub r0: f64,
    #[serde(default = "eigen")]
    pub method: GinibreMethodParam,
    /// Oracle chain length; defaults to `10^4 n`.
    #[serde(default)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGafParams {
    #[serde(default = "d50")]
    pub n: usize,
    #[serde(default = "one")]
    pub r0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidityCountParams {
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "one")]
    pub r0: f64,
    /// Fixed ensemble size instead of the support-covering size per eps.
    #[serde(default)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigiditySumParams {
    #[serde(default = "d100")]
    pub n: usize,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    /// Defaults to the largest radius keeping every bump within `0.7 sqrt(n)`.
    #[serde(default)]
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerTailsParams {
    #[serde(default = "ginibre")]
    pub model: Model,
    #[serde(default = "d300")]
    pub n: usize,
    #[serde(default = "half")]
    pub r0: f64,
    #[serde(default = "one_usize")]
    pub l: usize,
    #[serde(default = "default_scales")]
    pub scales: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceParams {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "two")]
    pub reference_radius: f64,
    #[serde(default = "d256")]
    pub reference_n: usize,
    #[serde(default = "three")]
    pub mc_n: usize,
    #[serde(default = "two")]
    pub mc_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VietaParams {
    #[serde(default = "d20")]
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructParams {
    #[serde(default = "d60")]
    pub n: usize,
    /// Defaults to `n`.
    #[serde(default)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceParams {
    #[serde(default = "ginibre")]
    pub model: Model,
    /// Ensemble size; 0 runs the ginibre chain without outside points.
    #[serde(default = "d64")]
    pub n: usize,
    #[serde(default = "two_usize")]
    pub m: usize,
    #[serde(default = "one")]
    pub r0: f64,
    #[serde(default = "tenth")]
    pub delta: f64,
    #[serde(default = "d100000")]
    pub steps: usize,
    /// Defaults to `steps / 10`.
    #[serde(default)]
    pub burn_in: Option<usize>,
    /// Defaults to 10 (ginibre grid side) or 20 (gaf angle bins).
    #[serde(default)]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsParams {
    #[serde(default = "default_gaf_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "two_usize")]
    pub m: usize,
    #[serde(default = "one")]
    pub r0: f64,
    #[serde(default = "tenth")]
    pub delta: f64,
    #[serde(default = "d50")]
    pub proposals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeParams {
    #[serde(default = "d64")]
    pub n: usize,
    #[serde(default = "two_usize")]
    pub m: usize,
    #[serde(default = "one")]
    pub r0: f64,
    #[serde(default = "tenth")]
    pub delta: f64,
    #[serde(default = "d125")]
    pub proposals: usize,
}

fn d125() -> usize {
    125
}
fn d20() -> usize {
    20
}
fn d50() -> usize {
    50
}
fn d60() -> usize {
    60
}
fn d64() -> usize {
    64
}
fn d100() -> usize {
    100
}
fn d256() -> usize {
    256
}
fn d300() -> usize {
    300
}
fn d100000() -> usize {
    100_000
}
fn one_usize() -> usize {
    1
}
fn two_usize() -> usize {
    2
}
fn three() -> usize {
    3
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn half() -> f64 {
    0.5
}
fn tenth() -> f64 {
    0.1
}
fn eigen() -> GinibreMethodParam {
    GinibreMethodParam::Eigen
}
fn ginibre() -> Model {
    Model::Ginibre
}
fn default_radii() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}
fn default_sizes() -> Vec<usize> {
    vec![16, 64, 256]
}
fn default_gaf_sizes() -> Vec<usize> {
    vec![40, 60, 80]
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn obj(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn defaults_fill_missing_keys() {
        let (c, p): (Common, VietaParams) = resolve(obj(json!({"seed": 7}))).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(p.n, 20);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = resolve::<VietaParams>(obj(json!({"n": 20, "bogus": 1}))).unwrap_err();
        match err {
            CliError::Validation { key, .. } => assert_eq!(key.as_deref(), Some("bogus")),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn version_checked() {
        assert!(resolve::<VietaParams>(obj(json!({"version": 2}))).is_err());
        assert!(resolve::<VietaParams>(obj(json!({"version": 1}))).is_ok());
    }

    #[test]
    fn zero_replicas_rejected() {
        assert!(resolve::<VietaParams>(obj(json!({"replicas": 0}))).is_err());
    }
}
