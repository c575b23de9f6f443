//! Limiting absorption: polynomial extrapolation of `G(k^2 + i eps)` to `eps = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::quadrature::{green_quadrature_converged, GridPolicy};
use crate::green::spectral::{Band, SpectralParameter};
use crate::lattice::LatticePoint;

/// Absorption values used when none are given.
pub const DEFAULT_EPS_SCHEDULE: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

/// A strictly decreasing list of at least three positive absorption values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EpsSchedule(Vec<f64>);

impl EpsSchedule {
    pub fn new(values: Vec<f64>) -> Result<EpsSchedule> {
        if values.len() < 3 {
            return Err(Error::InvalidSchedule(format!(
                "need at least 3 values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidSchedule(format!("{v} is not a positive number")));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSchedule(format!(
                "values must strictly decrease ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(EpsSchedule(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for EpsSchedule {
    fn default() -> Self {
        EpsSchedule(DEFAULT_EPS_SCHEDULE.to_vec())
    }
}

impl TryFrom<Vec<f64>> for EpsSchedule {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        EpsSchedule::new(values)
    }
}

impl From<EpsSchedule> for Vec<f64> {
    fn from(s: EpsSchedule) -> Vec<f64> {
        s.0
    }
}

/// Value of the interpolating polynomial through `(nodes[i], values[i])` at `at`.
pub fn neville(nodes: &[f64], values: &[Complex64], at: f64) -> Complex64 {
    assert_eq!(nodes.len(), values.len());
    assert!(!nodes.is_empty());
    let mut p = values.to_vec();
    let n = nodes.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (nodes[i], nodes[i + level]);
            p[i] = ((at - xj) * p[i] + (xi - at) * p[i + 1]) / (xi - xj);
        }
    }
    p[0]
}

/// An extrapolated value and its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolated {
    pub value: Complex64,
    /// Distance to the extrapolant that drops the largest node.
    pub error_estimate: f64,
}

/// Extrapolates samples at the schedule's nodes to zero.
pub fn extrapolate_to_zero(schedule: &EpsSchedule, values: &[Complex64]) -> Extrapolated {
    let nodes = schedule.as_slice();
    let value = neville(nodes, values, 0.0);
    let reduced = neville(&nodes[1..], &values[1..], 0.0);
    Extrapolated {
        value,
        error_estimate: (value - reduced).norm(),
    }
}

/// Quadrature-based limiting-absorption value of `G(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsorptionLimit {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Set when the error estimate exceeds the caller's tolerance.
    pub flagged: bool,
    /// Final quadrature grid size per schedule entry.
    pub grid_sizes: Vec<usize>,
}

/// [`extrapolate_absorption`] for a batch of points sharing one set of grids.
pub fn extrapolate_absorption_many(
    points: &[LatticePoint],
    spectral: &SpectralParameter,
    schedule: &EpsSchedule,
    grid: GridPolicy,
    tolerance: f64,
) -> Result<Vec<AbsorptionLimit>> {
    if spectral.band() != Band::PassBand {
        return Err(Error::InvalidArgument(
            "absorption extrapolation applies to the pass band".into(),
        ));
    }
    let mut samples = Vec::with_capacity(schedule.len());
    let mut grid_sizes = Vec::with_capacity(schedule.len());
    for &eps in schedule.as_slice() {
        let q = green_quadrature_converged(points, spectral, eps, grid)?;
        grid_sizes.push(q.grid_size);
        samples.push(q.values);
    }
    Ok((0..points.len())
        .map(|i| {
            let column: Vec<Complex64> = samples.iter().map(|s| s[i]).collect();
            let e = extrapolate_to_zero(schedule, &column);
            AbsorptionLimit {
                value: e.value,
                error_estimate: e.error_estimate,
                flagged: e.error_estimate > tolerance,
                grid_sizes: grid_sizes.clone(),
            }
        })
        .collect())
}

/// Extrapolates the quadrature value of `G(x)` at `k^2 + i eps` to `eps -> 0+`.
pub fn extrapolate_absorption(
    x: LatticePoint,
    spectral: &SpectralParameter,
    schedule: &EpsSchedule,
    grid: GridPolicy,
    tolerance: f64,
) -> Result<AbsorptionLimit> {
    let mut out = extrapolate_absorption_many(&[x], spectral, schedule, grid, tolerance)?;
    Ok(out.remove(0))
}
