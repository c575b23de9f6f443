//! Scenario runs: table caching, solving, verification and field export.

pub mod cache;
pub mod export;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_3;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::extrapolate::EpsSchedule;
use crate::green::recursion::RecursionSettings;
use crate::green::spectral::SpectralParameter;
use crate::halfplane::{
    solve_dirichlet, verification_radius, verify_solution, BoundaryData, HalfPlaneSolution,
    VerificationReport, Window,
};
use crate::lattice::LatticePoint;

pub use cache::{CacheStatus, TableCache, CACHE_ENV};
pub use export::{export_field, format_float, ExportFormat, FieldExport, FieldRow};

/// Boundary nodes of the two-slit demo.
pub const TWO_SLIT_OPENINGS: [i64; 4] = [-11, -10, 10, 11];

/// A plane wave `exp(i rate x2)` shown below the boundary row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Incident {
    pub phase_rate: f64,
}

impl Incident {
    /// `exp(i pi x2 / 3)`, which solves the equation at `k^2 = 2`.
    pub const VERTICAL: Incident = Incident {
        phase_rate: FRAC_PI_3,
    };

    pub fn value(&self, x: LatticePoint) -> Complex64 {
        Complex64::from_polar(1.0, self.phase_rate * x.x2 as f64)
    }
}

/// Unit amplitude on each opening, zero elsewhere.
pub fn build_opening_boundary(openings: &[i64]) -> Result<BoundaryData> {
    BoundaryData::from_openings(openings)
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub spectral: SpectralParameter,
    pub boundary: BoundaryData,
    /// Evaluation window; rows must satisfy `x2 >= 0`.
    pub window: Window,
    pub incident: Option<Incident>,
    pub eps_schedule: EpsSchedule,
    pub recursion: RecursionSettings,
}

impl Scenario {
    /// `k = sqrt 2`, openings at `+-10, +-11`, window `|x1| <= 60`, `1 <= x2 <= 60`.
    pub fn two_slits() -> Scenario {
        Scenario {
            spectral: SpectralParameter::pass_band(2f64.sqrt()).expect("inside the pass band"),
            boundary: build_opening_boundary(&TWO_SLIT_OPENINGS).expect("distinct nodes"),
            window: Window::upper(60, 60).expect("nonempty"),
            incident: Some(Incident::VERTICAL),
            eps_schedule: EpsSchedule::default(),
            recursion: RecursionSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window.x2_min < 0 {
            return Err(Error::OutsideHalfPlane(LatticePoint::new(
                self.window.x1_min,
                self.window.x2_min,
            )));
        }
        Window::new(
            self.window.x1_min,
            self.window.x1_max,
            self.window.x2_min,
            self.window.x2_max,
        )?;
        Ok(())
    }

    /// Table radius covering evaluation and verification of the window.
    pub fn required_radius(&self) -> usize {
        verification_radius(&self.window, &self.boundary)
    }
}

/// Smallest table residual used by [`ScenarioOutput::failures`].
pub const RESIDUAL_FLOOR: f64 = 1e-14;

pub struct ScenarioOutput {
    pub solution: HalfPlaneSolution,
    pub field: FieldExport,
    pub report: VerificationReport,
    pub cache_status: CacheStatus,
}

impl ScenarioOutput {
    /// Reasons the run counts as failed: any boundary deviation, or an
    /// interior residual more than ten times the table's own residual
    /// (floored at [`RESIDUAL_FLOOR`] so rounding alone never fails a run).
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let r = &self.report;
        if r.boundary_deviation > 0.0 {
            out.push(format!("boundary deviation {:e} > 0", r.boundary_deviation));
        }
        if r.max_residual > 10.0 * r.table_residual.max(RESIDUAL_FLOOR) {
            out.push(format!(
                "interior residual {:e} exceeds 10 x table residual {:e}",
                r.max_residual, r.table_residual
            ));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Builds or loads the table, solves, verifies and assembles the export.
///
/// Export rows: every window point, every boundary support node, and with an
/// incident wave the mirrored rows `-x2_max..=-1` over the window's `x1`
/// range carrying that wave (display only).
pub fn run_scenario(s: &Scenario, cache: &TableCache) -> Result<ScenarioOutput> {
    s.validate()?;
    let radius = s.required_radius();
    let (table, cache_status) = cache.load_or_build(&s.spectral, radius, &s.eps_schedule, &s.recursion)?;
    let solution = solve_dirichlet(s.boundary.clone(), table);
    let report = verify_solution(&solution, &s.window)?;
    let mut values: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    for (p, u) in solution.eval_window(&s.window)? {
        values.insert((p.x2, p.x1), u);
    }
    for (y1, f) in s.boundary.iter() {
        values.insert((0, y1), f);
    }
    if let Some(inc) = s.incident {
        for x2 in -s.window.x2_max..=-1 {
            for x1 in s.window.x1_min..=s.window.x1_max {
                values.insert((x2, x1), inc.value(LatticePoint::new(x1, x2)));
            }
        }
    }
    let field = FieldExport::from_values(
        values
            .into_iter()
            .map(|((x2, x1), v)| (LatticePoint::new(x1, x2), v)),
    )?;
    Ok(ScenarioOutput {
        solution,
        field,
        report,
        cache_status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::apply_helmholtz;

    #[test]
    fn incident_wave_solves_the_equation() {
        let inc = Incident::VERTICAL;
        let w = |p: LatticePoint| inc.value(p);
        for p in [LatticePoint::new(0, 0), LatticePoint::new(-5, 17), LatticePoint::new(3, -8)] {
            assert!(apply_helmholtz(&w, Complex64::new(2.0, 0.0), p).norm() < 1e-12);
        }
    }

    #[test]
    fn small_stop_band_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path());
        let s = Scenario {
            spectral: SpectralParameter::stop_band(Complex64::new(10.0, 0.0)).unwrap(),
            boundary: build_opening_boundary(&[-1, 2]).unwrap(),
            window: Window::upper(4, 3).unwrap(),
            incident: Some(Incident { phase_rate: 0.5 }),
            eps_schedule: EpsSchedule::default(),
            recursion: RecursionSettings::default(),
        };
        let out = run_scenario(&s, &cache).unwrap();
        assert!(out.passed(), "{:?}", out.failures());
        assert_eq!(out.field.len(), 9 * 3 + 2 + 9 * 3);
        assert_eq!(out.field.get(LatticePoint::new(2, 0)), Some(Complex64::new(1.0, 0.0)));
        let again = run_scenario(&s, &cache).unwrap();
        assert_eq!(again.cache_status, CacheStatus::Hit);
        assert_eq!(again.field.to_csv_string(), out.field.to_csv_string());
    }

    #[test]
    fn rejects_lower_window() {
        let mut s = Scenario::two_slits();
        s.window = Window::new(-1, 1, -2, 3).unwrap();
        assert!(s.validate().is_err());
    }
}
