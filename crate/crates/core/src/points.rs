//! Point configurations in the plane and their inside/outside split with
//! respect to an origin-centred disk.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for "on the boundary circle" and "at the origin".
pub const BOUNDARY_TOL: f64 = 1e-14;

/// Open disk centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    radius: f64,
}

impl Disk {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < self.radius
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointConfiguration {
    points: Vec<Complex64>,
}

/// Result of [`PointConfiguration::split`]; points keep their input order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Split {
    pub inside: Vec<Complex64>,
    pub outside: Vec<Complex64>,
}

impl PointConfiguration {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::InvalidParameter(format!("non-finite point {p}")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Complex64> {
        self.points
    }

    pub fn split(&self, disk: &Disk) -> Result<Split> {
        split_points(&self.points, disk)
    }
}

/// Exact partition of `points` by `|z| < r0`; a point within [`BOUNDARY_TOL`]
/// of the circle is rejected.
pub fn split_points(points: &[Complex64], disk: &Disk) -> Result<Split> {
    let mut split = Split::default();
    for &z in points {
        let r = z.norm();
        if (r - disk.radius).abs() <= BOUNDARY_TOL {
            return Err(Error::BoundaryPoint { point: [z.re, z.im], radius: disk.radius, tol: BOUNDARY_TOL });
        }
        if r < disk.radius {
            split.inside.push(z);
        } else {
            split.outside.push(z);
        }
    }
    Ok(split)
}

/// Provenance block attached to serialized samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleMeta {
    pub model: String,
    pub n: usize,
    pub seed: u64,
    pub stream: u64,
    pub residual: f64,
}

/// On-disk configuration format: `{"r0": .., "points": [[re, im], ..]}` with
/// an optional `meta` object. Floats use shortest round-trip encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationFile {
    pub r0: f64,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<SampleMeta>,
}

impl ConfigurationFile {
    pub fn new(r0: f64, points: &[Complex64], meta: Option<SampleMeta>) -> Self {
        Self { r0, points: points.iter().map(|z| [z.re, z.im]).collect(), meta }
    }

    pub fn to_configuration(&self) -> Result<(Disk, PointConfiguration)> {
        let disk = Disk::new(self.r0)?;
        let pts = self.points.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok((disk, PointConfiguration::new(pts)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
