//! Stored values of `G` on the fundamental wedge, with JSON persistence.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::extrapolate::{extrapolate_to_zero, EpsSchedule};
use crate::green::recursion::{solve_recursion, RecursionSettings, Truncation};
use crate::green::shells::shell_len;
use crate::green::spectral::{Band, SpectralParameter};
use crate::green::symmetry::{canonicalize, CanonicalPoint};
use crate::lattice::{apply_helmholtz, LatticePoint};

pub const SCHEMA_VERSION: u32 = 1;

/// How a table was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Absorption values that were extrapolated (empty in the stop band).
    pub eps_schedule: Vec<f64>,
    pub truncation: Truncation,
    /// First truncation order tried.
    pub order_start: usize,
    /// Final truncation order per absorption value.
    pub orders: Vec<usize>,
    /// Largest change between the last two truncations, over all runs.
    pub truncation_change: f64,
    /// Largest extrapolation error estimate over all entries.
    pub extrapolation_error: f64,
    /// Largest `|(Delta_d + k^2) G - delta_0|` at canonical distance below the radius.
    pub residual_max: f64,
}

/// `G` on all canonical points `(i, j)` with `i + j <= radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenTable {
    spectral: SpectralParameter,
    radius: usize,
    /// Shell `n` occupies `values[offset(n)..offset(n + 1)]`.
    values: Vec<Complex64>,
    provenance: Provenance,
}

fn offset(n: usize) -> usize {
    // sum of (k / 2 + 1) for k < n
    let h = n / 2;
    n + h * h - h + if n % 2 == 1 { h } else { 0 }
}

impl GreenTable {
    fn from_shells(
        spectral: SpectralParameter,
        shells: Vec<Vec<Complex64>>,
        provenance: Provenance,
    ) -> GreenTable {
        let radius = shells.len() - 1;
        let values: Vec<Complex64> = shells.into_iter().flatten().collect();
        debug_assert_eq!(values.len(), offset(radius + 1));
        let mut table = GreenTable {
            spectral,
            radius,
            values,
            provenance,
        };
        table.provenance.residual_max = table.max_residual();
        table
    }

    pub fn spectral(&self) -> &SpectralParameter {
        &self.spectral
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The advertised defining-equation residual.
    pub fn residual_max(&self) -> f64 {
        self.provenance.residual_max
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, c: CanonicalPoint) -> Option<Complex64> {
        (c.shell() <= self.radius).then(|| self.values[offset(c.shell()) + c.slot()])
    }

    /// `G(x)`, read from the stored orbit representative.
    pub fn green(&self, x: LatticePoint) -> Result<Complex64> {
        let c = canonicalize(x);
        self.get(c).ok_or(Error::Range {
            point: x,
            required: c.shell(),
            available: self.radius,
        })
    }

    /// Stored entries in shell order.
    pub fn entries(&self) -> impl Iterator<Item = (CanonicalPoint, Complex64)> + '_ {
        (0..=self.radius).flat_map(move |n| {
            (0..shell_len(n)).map(move |m| {
                let c = CanonicalPoint {
                    i: (n - m) as u32,
                    j: m as u32,
                };
                (c, self.values[offset(n) + m])
            })
        })
    }

    /// `(Delta_d + k^2) G(x) - delta_{x,0}`.
    pub fn defining_residual(&self, x: LatticePoint) -> Result<Complex64> {
        if x.hex_norm() + 1 > self.radius as u64 {
            return Err(Error::Range {
                point: x,
                required: x.hex_norm() as usize + 1,
                available: self.radius,
            });
        }
        let g = |p: LatticePoint| self.green(p).expect("neighbour within radius");
        let delta = if x == LatticePoint::ORIGIN { 1.0 } else { 0.0 };
        Ok(apply_helmholtz(&g, self.spectral.k2(), x) - delta)
    }

    /// Largest defining residual over canonical points below the radius; the
    /// residual is constant on orbits, so this covers every point.
    pub fn max_residual(&self) -> f64 {
        if self.radius == 0 {
            return 0.0;
        }
        self.entries()
            .filter(|(c, _)| c.shell() < self.radius)
            .map(|(c, _)| self.defining_residual(c.point()).expect("in range").norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        let k2 = self.spectral.k2();
        let file = TableFile {
            header: Header {
                schema_version: SCHEMA_VERSION,
                k2: [k2.re, k2.im],
                mode: self.spectral.band(),
                exclusion_window: self.spectral.exclusion_window(),
                radius: self.radius,
                eps_schedule: self.provenance.eps_schedule.clone(),
                residual_max: self.provenance.residual_max,
                n_start: self.provenance.order_start,
                truncation: self.provenance.truncation,
                orders: self.provenance.orders.clone(),
                truncation_change: self.provenance.truncation_change,
                extrapolation_error: self.provenance.extrapolation_error,
            },
            body: self
                .entries()
                .map(|(c, v)| (c.i, c.j, v.re, v.im))
                .collect(),
        };
        serde_json::to_string(&file).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<GreenTable> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| Error::format(origin, e))?;
        let h = file.header;
        if h.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion(h.schema_version));
        }
        let k2 = Complex64::new(h.k2[0], h.k2[1]);
        let spectral = match h.mode {
            Band::PassBand => SpectralParameter::validate(
                Band::PassBand,
                Complex64::new(k2.re.sqrt(), 0.0),
                h.exclusion_window,
            )?,
            Band::StopBand => SpectralParameter::stop_band_with_window(k2, h.exclusion_window)?,
        };
        if (spectral.k2() - k2).norm() > 1e-14 * k2.norm() {
            return Err(Error::format(origin, "pass-band k^2 must be real"));
        }
        let spectral = spectral.with_stored_k2(k2);
        let count = offset(h.radius + 1);
        if file.body.len() != count {
            return Err(Error::format(
                origin,
                format!("radius {} needs {count} rows, found {}", h.radius, file.body.len()),
            ));
        }
        let mut values = vec![None; count];
        for &(i, j, re, im) in &file.body {
            let c = CanonicalPoint { i, j };
            if j > i || c.shell() > h.radius {
                return Err(Error::format(origin, format!("row ({i}, {j}) is not a canonical point in range")));
            }
            let slot = &mut values[offset(c.shell()) + c.slot()];
            if slot.is_some() {
                return Err(Error::format(origin, format!("row ({i}, {j}) repeated")));
            }
            *slot = Some(Complex64::new(re, im));
        }
        Ok(GreenTable {
            spectral,
            radius: h.radius,
            values: values.into_iter().map(|v| v.expect("all rows present")).collect(),
            provenance: Provenance {
                eps_schedule: h.eps_schedule,
                truncation: h.truncation,
                order_start: h.n_start,
                orders: h.orders,
                truncation_change: h.truncation_change,
                extrapolation_error: h.extrapolation_error,
                residual_max: h.residual_max,
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.to_json()?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<GreenTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        GreenTable::from_json(&text, path)
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    schema_version: u32,
    k2: [f64; 2],
    mode: Band,
    exclusion_window: f64,
    radius: usize,
    eps_schedule: Vec<f64>,
    residual_max: f64,
    #[serde(rename = "N_start")]
    n_start: usize,
    truncation: Truncation,
    orders: Vec<usize>,
    truncation_change: f64,
    extrapolation_error: f64,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    header: Header,
    body: Vec<(u32, u32, f64, f64)>,
}

/// Builds a table by the shell recursion.
///
/// In the pass band one recursion runs per absorption value in `schedule`
/// and the entries are extrapolated to `eps -> 0+`; in the stop band a
/// single lossless recursion is run and `schedule` is ignored.
pub fn recursion_table(
    spectral: &SpectralParameter,
    radius: usize,
    schedule: &EpsSchedule,
    settings: &RecursionSettings,
) -> Result<GreenTable> {
    let k2 = spectral.k2();
    match spectral.band() {
        Band::StopBand => {
            let sol = solve_recursion(k2, 0.0, radius, settings)?;
            let truncation = match settings.truncation {
                Truncation::Absorbing { .. } => Truncation::Zero { min_order: 64 },
                zero => zero,
            };
            let provenance = Provenance {
                eps_schedule: Vec::new(),
                truncation,
                order_start: sol.order_start,
                orders: vec![sol.order],
                truncation_change: sol.change,
                extrapolation_error: 0.0,
                residual_max: 0.0,
            };
            Ok(GreenTable::from_shells(*spectral, sol.shells, provenance))
        }
        Band::PassBand => {
            let mut runs = Vec::with_capacity(schedule.len());
            for &eps in schedule.as_slice() {
                runs.push(solve_recursion(k2, eps, radius, settings)?);
            }
            let mut error = 0.0f64;
            let shells: Vec<Vec<Complex64>> = (0..=radius)
                .map(|n| {
                    (0..shell_len(n))
                        .map(|m| {
                            let samples: Vec<Complex64> = runs.iter().map(|r| r.shells[n][m]).collect();
                            let e = extrapolate_to_zero(schedule, &samples);
                            error = error.max(e.error_estimate);
                            e.value
                        })
                        .collect()
                })
                .collect();
            let provenance = Provenance {
                eps_schedule: schedule.as_slice().to_vec(),
                truncation: settings.truncation,
                order_start: runs[0].order_start,
                orders: runs.iter().map(|r| r.order).collect(),
                truncation_change: runs.iter().map(|r| r.change).fold(0.0, f64::max),
                extrapolation_error: error,
                residual_max: 0.0,
            };
            Ok(GreenTable::from_shells(*spectral, shells, provenance))
        }
    }
}

/// Free-function form of [`GreenTable::green`].
pub fn green(x: LatticePoint, table: &GreenTable) -> Result<Complex64> {
    table.green(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_count_shell_lengths() {
        let mut acc = 0;
        for n in 0..50 {
            assert_eq!(offset(n), acc, "n={n}");
            acc += shell_len(n);
        }
    }

    fn stop_table(radius: usize) -> GreenTable {
        let p = SpectralParameter::stop_band(Complex64::new(10.0, 0.0)).unwrap();
        recursion_table(&p, radius, &EpsSchedule::default(), &RecursionSettings::default()).unwrap()
    }

    #[test]
    fn lookup_and_range() {
        let t = stop_table(8);
        assert_eq!(t.green(LatticePoint::new(5, 3)).unwrap(), t.green(LatticePoint::new(3, 5)).unwrap());
        assert!(matches!(
            t.green(LatticePoint::new(9, 0)),
            Err(Error::Range { required: 9, available: 8, .. })
        ));
        assert_eq!(t.len(), offset(9));
    }

    #[test]
    fn defining_equation() {
        let t = stop_table(10);
        assert!(t.residual_max() < 1e-13, "{}", t.residual_max());
        assert!((t.defining_residual(LatticePoint::ORIGIN).unwrap()).norm() < 1e-13);
        assert!(t.defining_residual(LatticePoint::new(10, 0)).is_err());
    }

    #[test]
    fn json_round_trip_is_bitwise() {
        let t = stop_table(6);
        let text = t.to_json().unwrap();
        let back = GreenTable::from_json(&text, Path::new("mem")).unwrap();
        assert_eq!(back, t);
        assert!(text.contains("\"schema_version\":1"));
        assert!(text.contains("\"N_start\""));
    }

    #[test]
    fn json_rejects_bad_files() {
        let t = stop_table(3);
        let text = t.to_json().unwrap();
        let wrong_version = text.replace("\"schema_version\":1", "\"schema_version\":7");
        assert!(matches!(
            GreenTable::from_json(&wrong_version, Path::new("x")),
            Err(Error::SchemaVersion(7))
        ));
        let truncated = text.replace("\"radius\":3", "\"radius\":4");
        assert!(matches!(GreenTable::from_json(&truncated, Path::new("x")), Err(Error::Format { .. })));
        assert!(GreenTable::from_json("{", Path::new("x")).is_err());
    }
}
