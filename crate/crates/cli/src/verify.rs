//! The `verify` suite: the library's invariants at fixed parameters, one
//! table row per check.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use trihelm::experiment::{Incident, TableCache, TWO_SLIT_OPENINGS};
use trihelm::{
    apply_helmholtz, build_ball_region, decay_fit, extrapolate_absorption_many,
    green_quadrature_converged, greens_identity_residual, mirror, orbit, required_radius,
    solve_dirichlet, solve_recursion, verification_radius, verify_solution, BoundaryData,
    Complex64, EpsSchedule, Error, GreenTable, GridPolicy, LatticeField, LatticePoint,
    RecursionSettings, SideChoice, SpectralParameter, TrapezoidGrid, Window,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A diagnostic outside its expected range; reported, not fatal.
    Warn,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

type Outcome = Result<(bool, String), Error>;

fn record(checks: &mut Vec<Check>, name: &'static str, soft: bool, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let (status, detail) = match f() {
        Ok((true, d)) => (Status::Pass, d),
        Ok((false, d)) if soft => (Status::Warn, d),
        Ok((false, d)) => (Status::Fail, d),
        Err(e) => (Status::Fail, format!("error: {e}")),
    };
    log::info!("{name}: {status}");
    checks.push(Check {
        name,
        status,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    });
}

fn table(cache: &TableCache, spectral: &SpectralParameter, radius: usize) -> Result<Arc<GreenTable>, Error> {
    let (t, _) = cache.load_or_build(spectral, radius, &EpsSchedule::default(), &RecursionSettings::default())?;
    Ok(t)
}

fn sqrt2() -> SpectralParameter {
    SpectralParameter::pass_band(2f64.sqrt()).expect("inside the pass band")
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn ball_points(n: i64) -> impl Iterator<Item = LatticePoint> {
    (-n..=n)
        .flat_map(move |a| (-n..=n).map(move |b| LatticePoint::new(a, b)))
        .filter(move |p| p.hex_norm() <= n as u64)
}

/// Deterministic test field number `s`.
fn field(region: &trihelm::Region, s: f64) -> LatticeField {
    LatticeField::from_fn(region.points(), |p| {
        let (a, b) = (p.x1 as f64, p.x2 as f64);
        Complex64::new((1.3 * a + 0.7 * b + s).sin(), (0.4 * a * b - 1.1 * s).cos())
    })
}

/// Runs the suite. `quick` skips the decay diagnostic, which needs a table
/// of radius about 200.
pub fn run(cache: &TableCache, quick: bool) -> Vec<Check> {
    let mut checks = Vec::new();

    record(&mut checks, "defining equation (k = sqrt 2, radius 16)", false, || {
        let t = table(cache, &sqrt2(), 16)?;
        let r = t.max_residual();
        let k2 = t.spectral().k2();
        let closure = (6.0 * t.green(LatticePoint::new(1, 0))? - (6.0 - k2) * t.green(LatticePoint::ORIGIN)? - 1.0).norm();
        Ok((
            r <= 1e-7 && closure <= 1e-8,
            format!("residual {r:.1e} <= 1e-7, closure {closure:.1e} <= 1e-8"),
        ))
    });

    record(&mut checks, "stop-band oracle (k^2 = 10, radius 10)", false, || {
        let p = SpectralParameter::stop_band(Complex64::new(10.0, 0.0))?;
        let t = table(cache, &p, 10)?;
        let points: Vec<_> = t.entries().map(|(c, _)| c.point()).collect();
        let q = green_quadrature_converged(&points, &p, 0.0, GridPolicy::default())?;
        let worst = t.entries().zip(&q.values).map(|((_, g), &v)| rel(g, v)).fold(0.0, f64::max);
        Ok((worst <= 1e-8, format!("relative gap {worst:.1e} <= 1e-8")))
    });

    record(&mut checks, "pass-band oracle (k = sqrt 2, radius 10)", false, || {
        let p = sqrt2();
        let t = table(cache, &p, 10)?;
        let points: Vec<_> = t.entries().map(|(c, _)| c.point()).collect();
        let q = extrapolate_absorption_many(&points, &p, &EpsSchedule::default(), GridPolicy::default(), 1e-4)?;
        let worst = t.entries().zip(&q).map(|((_, g), l)| rel(g, l.value)).fold(0.0, f64::max);
        let est = t.provenance().extrapolation_error + q.iter().map(|l| l.error_estimate).fold(0.0, f64::max);
        Ok((worst <= 1e-4, format!("relative gap {worst:.1e} <= 1e-4, combined estimate {est:.1e}")))
    });

    record(&mut checks, "orbit and mirror symmetry", false, || {
        let t = table(cache, &sqrt2(), 16)?;
        let grid = TrapezoidGrid::new(Complex64::new(2.0, 0.05), 2048)?;
        let (mut mismatches, mut spread) = (0, 0.0f64);
        for p in ball_points(16) {
            let g = t.green(p)?;
            let q0 = grid.eval(p);
            for q in orbit(p) {
                mismatches += usize::from(t.green(q)? != g);
                spread = spread.max((grid.eval(q) - q0).norm());
            }
        }
        let mut gap = 0.0f64;
        for x in ball_points(4) {
            for y in ball_points(4) {
                gap = gap.max((t.green(mirror(x) - y)? - t.green(x - mirror(y))?).norm());
            }
        }
        Ok((
            mismatches == 0 && spread <= 1e-10 && gap <= 1e-12,
            format!("table mismatches {mismatches}, quadrature spread {spread:.1e}, mirror gap {gap:.1e}"),
        ))
    });

    record(&mut checks, "Green's second identity on H_6", false, || {
        let ball = build_ball_region(6)?;
        let region = ball.region();
        let choice = SideChoice::full(region);
        let mut worst = 0.0f64;
        for s in 0..50 {
            let u = field(region, s as f64);
            let v = field(region, 0.37 - s as f64);
            worst = worst.max(greens_identity_residual(&u, &v, region, &choice)?.norm());
        }
        Ok((worst <= 1e-12, format!("residual {worst:.1e} <= 1e-12")))
    });

    let demo = BoundaryData::from_openings(&TWO_SLIT_OPENINGS).expect("distinct nodes");
    let window = Window::upper(40, 40).expect("nonempty");
    let reflected = Window::new(-80, 40, 1, 40).expect("nonempty");
    let radius = verification_radius(&window, &demo).max(required_radius(&reflected, &demo));
    let demo_table = table(cache, &sqrt2(), radius).map_err(|e| e.to_string());

    record(&mut checks, "half-plane demo (|x1| <= 40, 1 <= x2 <= 40)", false, || {
        let sol = solve_dirichlet(demo.clone(), demo_table.clone().map_err(Error::InvalidArgument)?);
        let report = verify_solution(&sol, &window)?;
        let mut rows = 0.0f64;
        for x1 in window.x1_min..=window.x1_max {
            let ids = sol.row_identities(x1)?;
            let want = [demo.get(x1) + demo.get(x1 + 1), demo.get(x1), demo.get(x1 + 1)];
            for (a, b) in ids.iter().zip(want) {
                rows = rows.max((a - b).norm());
            }
        }
        Ok((
            report.boundary_deviation == 0.0 && report.max_residual <= 1e-7 && rows <= 1e-10,
            format!(
                "boundary {:e}, residual {:.1e} <= 1e-7, row identities {rows:.1e} <= 1e-10",
                report.boundary_deviation, report.max_residual
            ),
        ))
    });

    record(&mut checks, "homogeneous data gives u = 0", false, || {
        let sol = solve_dirichlet(BoundaryData::new(), demo_table.clone().map_err(Error::InvalidArgument)?);
        let mut nonzero = 0;
        for p in window.points() {
            nonzero += usize::from(sol.eval(p)? != Complex64::default());
        }
        Ok((nonzero == 0, format!("{nonzero} nonzero values")))
    });

    record(&mut checks, "reflection symmetry of the demo", false, || {
        let sol = solve_dirichlet(demo.clone(), demo_table.clone().map_err(Error::InvalidArgument)?);
        let mut worst = 0.0f64;
        for p in window.points() {
            worst = worst.max((sol.eval(p)? - sol.eval(LatticePoint::new(-p.x1 - p.x2, p.x2))?).norm());
        }
        Ok((worst <= 1e-9, format!("gap {worst:.1e} <= 1e-9")))
    });

    record(&mut checks, "incident wave at k^2 = 2", false, || {
        let wave = |p: LatticePoint| Incident::VERTICAL.value(p);
        let worst = window
            .points()
            .map(|p| apply_helmholtz(&wave, Complex64::new(2.0, 0.0), p).norm())
            .fold(0.0, f64::max);
        Ok((worst <= 1e-12, format!("residual {worst:.1e} <= 1e-12")))
    });

    record(&mut checks, "degenerate parameter k = 2", false, || {
        let p = SpectralParameter::pass_band(2.0)?;
        let raised = matches!(
            solve_recursion(p.k2(), 0.0, 16, &RecursionSettings::default()),
            Err(Error::DegenerateParameter { .. })
        );
        let r = table(cache, &p, 16)?.max_residual();
        Ok((
            raised && r <= 1e-5,
            format!("eps = 0 degenerate: {raised}, extrapolated residual {r:.1e} <= 1e-5"),
        ))
    });

    const DECAY: &str = "decay slope on x2 in [50, 200]";
    if quick {
        checks.push(Check {
            name: DECAY,
            status: Status::Skip,
            detail: "skipped by --quick".into(),
            seconds: 0.0,
        });
    } else {
        record(&mut checks, DECAY, true, || {
            let ray = Window::new(-100, 0, 50, 200)?;
            let t = table(cache, &sqrt2(), required_radius(&ray, &demo))?;
            let sol = solve_dirichlet(demo.clone(), t);
            match decay_fit(&sol, 50, 200)? {
                Some(fit) => Ok((
                    (-0.7..=-0.3).contains(&fit.slope),
                    format!("slope {:.3} in [-0.7, -0.3], rms {:.1e}", fit.slope, fit.rms_residual),
                )),
                None => Ok((false, "field vanishes on the ray".into())),
            }
        });
    }
    checks
}

pub fn print_table(checks: &[Check]) {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in checks {
        println!("{:<4}  {:<width$}  {:>6.1}s  {}", c.status, c.name, c.seconds, c.detail);
    }
}

pub fn failed(checks: &[Check]) -> bool {
    checks.iter().any(|c| c.status == Status::Fail)
}
