//! Worked examples for the Green's-function builders against independent oracles.

use std::collections::HashMap;
use std::path::Path;

use trihelm::{
    extrapolate_absorption, extrapolate_absorption_many, green_quadrature, recursion_table, Complex64, EpsSchedule, GreenTable,
    GridPolicy, LatticePoint, RecursionSettings, ShellStencil, SpectralParameter, OFFSETS,
};

/// `G(x)` for `k^2 = -c` by the Neumann series
/// `G = -(6 + c)^{-1} sum_m (A / (6 + c))^m delta`, with `A` the adjacency
/// operator, accumulated walk by walk.
fn neumann_green(c: f64, terms: usize) -> HashMap<LatticePoint, f64> {
    let scale = 1.0 / (6.0 + c);
    let mut walk: HashMap<LatticePoint, f64> = HashMap::from([(LatticePoint::ORIGIN, 1.0)]);
    let mut green: HashMap<LatticePoint, f64> = HashMap::new();
    for _ in 0..terms {
        for (p, w) in &walk {
            *green.entry(*p).or_default() -= scale * w;
        }
        let mut next: HashMap<LatticePoint, f64> = HashMap::new();
        for (p, w) in &walk {
            for e in OFFSETS {
                *next.entry(*p + e).or_default() += scale * w;
            }
        }
        walk = next;
    }
    green
}

#[test]
fn deep_stop_band_matches_walk_series() {
    let c = 20.0;
    let spectral = SpectralParameter::stop_band(Complex64::new(-c, 0.0)).unwrap();
    let table = recursion_table(&spectral, 8, &EpsSchedule::default(), &RecursionSettings::default()).unwrap();
    let series = neumann_green(c, 40);
    for (canon, g) in table.entries() {
        let want = series[&canon.point()];
        assert!((g.re - want).abs() <= 1e-12 * want.abs().max(1e-300), "{canon:?}: {g} vs {want}");
        assert_eq!(g.im, 0.0);
    }
}

#[test]
fn shell_stencils_pass_self_check() {
    for n in 1..=12 {
        ShellStencil::enumerate(n).unwrap().self_check().unwrap();
    }
}

#[test]
fn below_band_decays_along_an_axis() {
    // Below the band every walk contributes with one sign, so |G| is monotone.
    let spectral = SpectralParameter::stop_band(Complex64::new(-2.0, 0.0)).unwrap();
    let table = recursion_table(&spectral, 12, &EpsSchedule::default(), &RecursionSettings::default()).unwrap();
    let mags: Vec<f64> = (0..=12).map(|n| table.green(LatticePoint::new(n, 0)).unwrap().norm()).collect();
    assert!(mags.windows(2).all(|w| w[1] < w[0]), "{mags:?}");
}

#[test]
fn stop_band_recursion_agrees_with_quadrature() {
    let spectral = SpectralParameter::stop_band(Complex64::new(-3.0, 1.5)).unwrap();
    let table = recursion_table(&spectral, 6, &EpsSchedule::default(), &RecursionSettings::default()).unwrap();
    for (c, g) in table.entries() {
        let q = green_quadrature(c.point(), &spectral, 0.0, 512).unwrap();
        assert!((g - q).norm() <= 1e-12, "{c:?}");
    }
}

#[test]
fn table_json_round_trip_is_bitwise() {
    let spectral = SpectralParameter::pass_band(1.1).unwrap();
    let table = recursion_table(&spectral, 5, &EpsSchedule::default(), &RecursionSettings::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    table.save(&path).unwrap();
    let back = GreenTable::load(&path).unwrap();
    assert_eq!(back, table);
    let text = table.to_json().unwrap();
    assert_eq!(GreenTable::from_json(&text, Path::new("mem")).unwrap(), table);
}

#[test]
fn limiting_absorption_has_outgoing_imaginary_part() {
    let spectral = SpectralParameter::pass_band(2f64.sqrt()).unwrap();
    let g = extrapolate_absorption(
        LatticePoint::ORIGIN,
        &spectral,
        &EpsSchedule::default(),
        GridPolicy::default(),
        1e-6,
    )
    .unwrap();
    assert!(g.value.im.abs() > 1e-3, "{:?}", g.value);
    assert!(!g.flagged);
}

#[test]
fn schedules_agree_on_the_limit() {
    let spectral = SpectralParameter::pass_band(1.7).unwrap();
    let x = LatticePoint::new(3, -1);
    let a = extrapolate_absorption(x, &spectral, &EpsSchedule::default(), GridPolicy::default(), 1e-6).unwrap();
    let other = EpsSchedule::new(vec![8e-4, 4e-4, 2e-4]).unwrap();
    let b = extrapolate_absorption(x, &spectral, &other, GridPolicy::default(), 1e-6).unwrap();
    assert!((a.value - b.value).norm() <= 1e-6, "{:?} vs {:?}", a.value, b.value);
}

#[test]
fn limit_is_constant_on_orbits() {
    let spectral = SpectralParameter::pass_band(0.9).unwrap();
    let base = LatticePoint::new(2, 1);
    let schedule = EpsSchedule::default();
    let points = trihelm::orbit(base);
    let limits = extrapolate_absorption_many(&points, &spectral, &schedule, GridPolicy::default(), 1e-6).unwrap();
    for g in &limits {
        assert!((g.value - limits[0].value).norm() <= 1e-8);
    }
}
