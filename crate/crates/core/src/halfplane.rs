//! The Dirichlet problem on the upper half-plane `x2 >= 0`.
//!
//! With the mirror `x^ = (x1 + x2, -x2)` the Dirichlet Green's function is
//! `G+(x; y) = G(x - y) - G(x^ - y)`, which vanishes for `x` on the boundary
//! row `x2 = 0`. The radiating solution with boundary values `f` is the
//! finite sum
//!
//! `u(x) = sum_y (delta_{x,y} - G+(x; y + e2) - G+(x; y + e2 - e1)) f(y)`
//!
//! over the support of `f`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::table::GreenTable;
use crate::lattice::{apply_helmholtz, LatticePoint, Side, OFFSETS};

const E1: LatticePoint = OFFSETS[0];
const E2: LatticePoint = OFFSETS[1];

/// The reflection `(x1, x2) -> (x1 + x2, -x2)` across the boundary row.
pub fn mirror(x: LatticePoint) -> LatticePoint {
    crate::green::symmetry::mirror(x)
}

/// Finitely supported data on the boundary row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundaryData {
    values: BTreeMap<i64, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct BoundaryRow {
    y1: i64,
    re: f64,
    im: f64,
}

impl BoundaryData {
    pub fn new() -> Self {
        Self::default()
    }

    /// Unit amplitude on each listed node.
    pub fn from_openings(nodes: &[i64]) -> Result<BoundaryData> {
        let mut data = BoundaryData::new();
        for &y1 in nodes {
            if data.values.insert(y1, Complex64::new(1.0, 0.0)).is_some() {
                return Err(Error::DuplicateNode(y1));
            }
        }
        Ok(data)
    }

    pub fn from_pairs<I>(pairs: I) -> Result<BoundaryData>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut data = BoundaryData::new();
        for (y1, v) in pairs {
            if data.values.insert(y1, v).is_some() {
                return Err(Error::DuplicateNode(y1));
            }
        }
        Ok(data)
    }

    pub fn set(&mut self, y1: i64, value: Complex64) {
        self.values.insert(y1, value);
    }

    pub fn get(&self, y1: i64) -> Complex64 {
        self.values.get(&y1).copied().unwrap_or_default()
    }

    /// Stored nodes, including explicit zeros.
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a f + b g`.
    pub fn combine(a: Complex64, f: &BoundaryData, b: Complex64, g: &BoundaryData) -> BoundaryData {
        let mut out = BoundaryData::new();
        for y1 in f.support().chain(g.support()) {
            out.set(y1, a * f.get(y1) + b * g.get(y1));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<BoundaryRow> = self
            .iter()
            .map(|(y1, v)| BoundaryRow { y1, re: v.re, im: v.im })
            .collect();
        serde_json::to_string_pretty(&rows).expect("plain data serializes")
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<BoundaryData> {
        let rows: Vec<BoundaryRow> = serde_json::from_str(text).map_err(|e| Error::format(origin, e))?;
        BoundaryData::from_pairs(rows.into_iter().map(|r| (r.y1, Complex64::new(r.re, r.im))))
    }

    pub fn load(path: &Path) -> Result<BoundaryData> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        BoundaryData::from_json(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// An axial rectangle `[x1_min, x1_max] x [x2_min, x2_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub x1_min: i64,
    pub x1_max: i64,
    pub x2_min: i64,
    pub x2_max: i64,
}

impl Window {
    pub fn new(x1_min: i64, x1_max: i64, x2_min: i64, x2_max: i64) -> Result<Window> {
        if x1_min > x1_max || x2_min > x2_max {
            return Err(Error::InvalidArgument(format!(
                "empty window [{x1_min}, {x1_max}] x [{x2_min}, {x2_max}]"
            )));
        }
        Ok(Window {
            x1_min,
            x1_max,
            x2_min,
            x2_max,
        })
    }

    /// `|x1| <= half_width`, `1 <= x2 <= height`.
    pub fn upper(half_width: i64, height: i64) -> Result<Window> {
        Window::new(-half_width, half_width, 1, height)
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        (self.x1_min..=self.x1_max).contains(&p.x1) && (self.x2_min..=self.x2_max).contains(&p.x2)
    }

    /// Points in row-major order: `x2` ascending, then `x1` ascending.
    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (self.x2_min..=self.x2_max)
            .flat_map(move |x2| (self.x1_min..=self.x1_max).map(move |x1| LatticePoint::new(x1, x2)))
    }

    pub fn corners(&self) -> [LatticePoint; 4] {
        [
            LatticePoint::new(self.x1_min, self.x2_min),
            LatticePoint::new(self.x1_max, self.x2_min),
            LatticePoint::new(self.x1_min, self.x2_max),
            LatticePoint::new(self.x1_max, self.x2_max),
        ]
    }

    pub fn len(&self) -> usize {
        ((self.x1_max - self.x1_min + 1) * (self.x2_max - self.x2_min + 1)) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `G+(x; y) = G(x - y) - G(x^ - y)`.
pub fn dirichlet_green(x: LatticePoint, y: LatticePoint, table: &GreenTable) -> Result<Complex64> {
    if x.x2 < 0 {
        return Err(Error::OutsideHalfPlane(x));
    }
    if x.x2 == 0 {
        // x^ = x on the boundary row, so the two images cancel identically.
        return Ok(Complex64::default());
    }
    Ok(table.green(x - y)? - table.green(mirror(x) - y)?)
}

/// Table radius needed to evaluate `u` on the window, i.e. the largest
/// canonical distance among `x - y'` and `x^ - y'` for `y'` one of the two
/// kernel points of each boundary node. The canonical distance is a norm
/// and the arguments are affine in `(x, y1)`, so the maximum is attained at
/// window corners and support extremes.
pub fn required_radius(window: &Window, boundary: &BoundaryData) -> usize {
    let (Some(lo), Some(hi)) = (boundary.support().next(), boundary.support().last()) else {
        return 0;
    };
    let mut r = 0u64;
    for x in window.corners() {
        for y1 in [lo, hi] {
            let y = LatticePoint::new(y1, 0);
            for kernel in [y + E2, y + E2 - E1] {
                for image in [x, mirror(x)] {
                    r = r.max((image - kernel).hex_norm());
                }
            }
        }
    }
    r as usize
}

/// Lazy evaluator for the half-plane solution.
#[derive(Clone, Debug)]
pub struct HalfPlaneSolution {
    table: Arc<GreenTable>,
    boundary: BoundaryData,
}

/// Builds the evaluator for boundary data `f`.
pub fn solve_dirichlet(f: BoundaryData, table: Arc<GreenTable>) -> HalfPlaneSolution {
    HalfPlaneSolution { table, boundary: f }
}

impl HalfPlaneSolution {
    pub fn table(&self) -> &GreenTable {
        &self.table
    }

    pub fn boundary(&self) -> &BoundaryData {
        &self.boundary
    }

    /// Fails with a range error unless the table covers the window.
    pub fn check_window(&self, window: &Window) -> Result<()> {
        let required = required_radius(window, &self.boundary);
        if required > self.table.radius() {
            let worst = window.corners()[3];
            return Err(Error::Range {
                point: worst,
                required,
                available: self.table.radius(),
            });
        }
        Ok(())
    }

    /// `u(x)` for `x2 >= 0`.
    pub fn eval(&self, x: LatticePoint) -> Result<Complex64> {
        if x.x2 < 0 {
            return Err(Error::OutsideHalfPlane(x));
        }
        let mut u = Complex64::default();
        for (y1, f) in self.boundary.iter() {
            let y = LatticePoint::new(y1, 0);
            let delta = if x == y { 1.0 } else { 0.0 };
            let kernel = delta
                - dirichlet_green(x, y + E2, &self.table)?
                - dirichlet_green(x, y + E2 - E1, &self.table)?;
            u += kernel * f;
        }
        Ok(u)
    }

    /// Values on the window in its row-major order.
    pub fn eval_window(&self, window: &Window) -> Result<Vec<(LatticePoint, Complex64)>> {
        self.check_window(window)?;
        window.points().map(|p| Ok((p, self.eval(p)?))).collect()
    }

    /// `(Delta_d + k^2) u(x)` for `x2 >= 1`.
    pub fn residual(&self, x: LatticePoint) -> Result<Complex64> {
        if x.x2 < 1 {
            return Err(Error::OutsideHalfPlane(x));
        }
        let mut values = [Complex64::default(); 7];
        values[0] = self.eval(x)?;
        for (slot, e) in values[1..].iter_mut().zip(OFFSETS) {
            *slot = self.eval(x + e)?;
        }
        let ring: Complex64 = values[1..].iter().sum();
        Ok(ring + (self.table.spectral().k2() - 6.0) * values[0])
    }

    /// `(Delta_d + k^2)` of the three kernel sums at `(x1, 1)`: the delta
    /// term, the `y + e2` term and the `y + e2 - e1` term. They should equal
    /// `f(x1) + f(x1 + 1)`, `f(x1)` and `f(x1 + 1)`.
    pub fn row_identities(&self, x1: i64) -> Result<[Complex64; 3]> {
        let x = LatticePoint::new(x1, 1);
        let k2 = self.table.spectral().k2();
        let mut out = [Complex64::default(); 3];
        let table = &self.table;
        for (y1, f) in self.boundary.iter() {
            let y = LatticePoint::new(y1, 0);
            let delta = |p: LatticePoint| if p == y { Complex64::new(1.0, 0.0) } else { Complex64::default() };
            let first = |p: LatticePoint| {
                dirichlet_green(p, y + E2, table).expect("range checked by caller")
            };
            let second = |p: LatticePoint| {
                dirichlet_green(p, y + E2 - E1, table).expect("range checked by caller")
            };
            out[0] += f * apply_helmholtz(&delta, k2, x);
            out[1] += f * apply_helmholtz(&first, k2, x);
            out[2] += f * apply_helmholtz(&second, k2, x);
        }
        Ok(out)
    }
}

/// `sum_y u(y) sum_{j in sides} (G+(x; y) - G+(x; y - e_j))`, the
/// representation of `u` by its boundary values. Both sides 3 and 5 border
/// the interior at every boundary node; with `sides = [3, 5]` this reproduces
/// [`HalfPlaneSolution::eval`] above the boundary row, and a single side
/// does not.
pub fn representation_eval(
    boundary_values: &BoundaryData,
    x: LatticePoint,
    table: &GreenTable,
    sides: &[Side],
) -> Result<Complex64> {
    let mut u = Complex64::default();
    for (y1, value) in boundary_values.iter() {
        let y = LatticePoint::new(y1, 0);
        for side in sides {
            let t = dirichlet_green(x, y, table)? - dirichlet_green(x, y - side.offset(), table)?;
            u += value * t;
        }
    }
    Ok(u)
}

/// Least-squares fit of `log|u|` against `log|x|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the samples from the fitted line.
    pub rms_residual: f64,
    pub samples: usize,
}

/// Points `(-x2/2, x2)` for even `x2` in the range: the Euclidean vertical
/// ray through the origin.
pub fn vertical_ray(x2_min: i64, x2_max: i64) -> Vec<LatticePoint> {
    let start = x2_min.max(1) + x2_min.max(1).rem_euclid(2);
    (start..=x2_max)
        .step_by(2)
        .map(|x2| LatticePoint::new(-x2 / 2, x2))
        .collect()
}

/// Decay fit of `|u|` along the vertical ray over `x2_min..=x2_max`.
/// `None` when fewer than two samples have `u != 0`.
pub fn decay_fit(sol: &HalfPlaneSolution, x2_min: i64, x2_max: i64) -> Result<Option<DecayFit>> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in vertical_ray(x2_min, x2_max) {
        let u = sol.eval(p)?;
        if u.norm() > 0.0 {
            let (a, b) = p.to_euclidean();
            xs.push((a * a + b * b).sqrt().ln());
            ys.push(u.norm().ln());
        }
    }
    if xs.len() < 2 {
        return Ok(None);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(Some(DecayFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
        samples: xs.len(),
    }))
}

/// Outcome of [`verify_solution`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `max |u(y1, 0) - f(y1)|` over the window's `x1` range and the support.
    pub boundary_deviation: f64,
    /// `max |(Delta_d + k^2) u|` over window points with `x2 >= 1`.
    pub max_residual: f64,
    /// Fit over the upper half of the window's height, if `u` is nonzero there.
    pub decay: Option<DecayFit>,
    /// The table's own advertised residual.
    pub table_residual: f64,
    pub points: usize,
}

fn verification_windows(window: &Window) -> [Window; 2] {
    let grown = Window {
        x1_min: window.x1_min - 1,
        x1_max: window.x1_max + 1,
        x2_min: window.x2_min.min(0),
        x2_max: window.x2_max + 1,
    };
    let top = window.x2_max.max(1);
    let ray = Window {
        x1_min: -top / 2,
        x1_max: 0,
        x2_min: 0,
        x2_max: top,
    };
    [grown, ray]
}

/// Table radius needed by [`verify_solution`] on this window.
pub fn verification_radius(window: &Window, boundary: &BoundaryData) -> usize {
    verification_windows(window)
        .iter()
        .map(|w| required_radius(w, boundary))
        .max()
        .unwrap_or(0)
}

/// Checks boundary reproduction, the interior equation and decay on a window.
pub fn verify_solution(sol: &HalfPlaneSolution, window: &Window) -> Result<VerificationReport> {
    for w in verification_windows(window) {
        sol.check_window(&w)?;
    }
    let mut boundary_deviation = 0.0f64;
    let row = (window.x1_min..=window.x1_max).chain(sol.boundary.support());
    for y1 in row {
        let u = sol.eval(LatticePoint::new(y1, 0))?;
        boundary_deviation = boundary_deviation.max((u - sol.boundary.get(y1)).norm());
    }
    let mut max_residual = 0.0f64;
    let mut points = 0;
    for p in window.points().filter(|p| p.x2 >= 1) {
        max_residual = max_residual.max(sol.residual(p)?.norm());
        points += 1;
    }
    let top = window.x2_max;
    let decay = decay_fit(sol, (top / 2).max(1), top)?;
    Ok(VerificationReport {
        boundary_deviation,
        max_residual,
        decay,
        table_residual: sol.table.residual_max(),
        points,
    })
}
