//! Property tests for the lattice operators, symmetry maps and solvers.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use trihelm::{
    apply_helmholtz, build_ball_region, canonicalize, greens_identity_residual, mirror, orbit,
    recursion_table, solve_dirichlet, BoundaryData, Complex64, EpsSchedule, GreenTable,
    LatticeField, LatticePoint, RecursionSettings, SideChoice, SpectralParameter, TrapezoidGrid,
};

fn point(max: i64) -> impl Strategy<Value = LatticePoint> {
    (-max..=max, -max..=max).prop_map(|(a, b)| LatticePoint::new(a, b))
}

fn c64() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn stop_band_table() -> Arc<GreenTable> {
    static TABLE: OnceLock<Arc<GreenTable>> = OnceLock::new();
    TABLE
        .get_or_init(|| {
            let p = SpectralParameter::stop_band(Complex64::new(-0.5, 0.3)).unwrap();
            let t = recursion_table(&p, 40, &EpsSchedule::default(), &RecursionSettings::default()).unwrap();
            Arc::new(t)
        })
        .clone()
}

fn grid() -> &'static TrapezoidGrid {
    static GRID: OnceLock<TrapezoidGrid> = OnceLock::new();
    GRID.get_or_init(|| TrapezoidGrid::new(Complex64::new(1.3, 0.2), 512).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_sizes(n in 1usize..=10) {
        let ball = build_ball_region(n).unwrap();
        prop_assert_eq!(ball.len(), 1 + 3 * n * (n + 1));
        prop_assert_eq!(ball.region().boundary().len(), 6 * n);
    }

    #[test]
    fn greens_identity_on_random_balls(
        n in 1usize..=8,
        values in prop::collection::vec((c64(), c64()), 217),
    ) {
        let ball = build_ball_region(n).unwrap();
        let region = ball.region();
        let mut u = LatticeField::new();
        let mut v = LatticeField::new();
        for (p, (a, b)) in region.points().zip(values.iter().cycle()) {
            u.set(p, *a);
            v.set(p, *b);
        }
        let r = greens_identity_residual(&u, &v, region, &SideChoice::full(region)).unwrap();
        prop_assert!(r.norm() <= 1e-12, "residual {r}");
    }

    #[test]
    fn helmholtz_is_symmetric(
        a in prop::collection::vec(c64(), 19),
        b in prop::collection::vec(c64(), 19),
        k2 in c64(),
    ) {
        // Supports inside H_2, so the sums over H_3 see every nonzero term.
        let (mut u, mut v) = (LatticeField::new(), LatticeField::new());
        for ((p, x), y) in build_ball_region(2).unwrap().region().points().zip(&a).zip(&b) {
            u.set(p, *x);
            v.set(p, *y);
        }
        let outer = build_ball_region(3).unwrap();
        let (mut lhs, mut rhs) = (Complex64::default(), Complex64::default());
        for p in outer.region().points() {
            lhs += u.get(p) * apply_helmholtz(&v, k2, p);
            rhs += v.get(p) * apply_helmholtz(&u, k2, p);
        }
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn helmholtz_is_linear(x in point(50), s in c64(), t in c64(), k2 in c64()) {
        let f = |p: LatticePoint| Complex64::new((p.x1 as f64 * 0.3).sin(), p.x2 as f64 * 0.01);
        let g = |p: LatticePoint| Complex64::new(1.0 / (1.0 + p.hex_norm() as f64), 0.0);
        let h = |p: LatticePoint| s * f(p) + t * g(p);
        let direct = apply_helmholtz(&h, k2, x);
        let split = s * apply_helmholtz(&f, k2, x) + t * apply_helmholtz(&g, k2, x);
        prop_assert!((direct - split).norm() <= 1e-12);
    }

    #[test]
    fn orbit_members_share_a_canonical_point(p in point(60)) {
        let c = canonicalize(p);
        prop_assert!(c.i >= c.j);
        prop_assert_eq!(c.shell() as u64, p.hex_norm());
        for q in orbit(p) {
            prop_assert_eq!(canonicalize(q), c);
            prop_assert_eq!(canonicalize(mirror(q)), c);
        }
    }

    #[test]
    fn table_is_constant_on_orbits(p in point(40)) {
        let t = stop_band_table();
        prop_assume!(p.hex_norm() <= 40);
        let g = t.green(p).unwrap();
        for q in orbit(p) {
            prop_assert_eq!(t.green(q).unwrap(), g);
        }
    }

    #[test]
    fn quadrature_is_constant_on_orbits(p in point(30)) {
        let g = grid().eval(p);
        for q in orbit(p) {
            prop_assert!((grid().eval(q) - g).norm() <= 1e-10);
        }
    }

    #[test]
    fn solver_is_linear(
        f in prop::collection::btree_map(-6i64..=6, c64(), 1..4),
        g in prop::collection::btree_map(-6i64..=6, c64(), 1..4),
        a in c64(),
        b in c64(),
        x in (-8i64..=8, 1i64..=8),
    ) {
        let t = stop_band_table();
        let f = BoundaryData::from_pairs(f).unwrap();
        let g = BoundaryData::from_pairs(g).unwrap();
        let x = LatticePoint::new(x.0, x.1);
        let combined = solve_dirichlet(BoundaryData::combine(a, &f, b, &g), t.clone()).eval(x).unwrap();
        let split = a * solve_dirichlet(f, t.clone()).eval(x).unwrap()
            + b * solve_dirichlet(g, t.clone()).eval(x).unwrap();
        prop_assert!((combined - split).norm() <= 1e-12);
    }

    #[test]
    fn solution_reproduces_boundary_data(
        f in prop::collection::btree_map(-10i64..=10, c64(), 0..5),
        y1 in -15i64..=15,
    ) {
        let t = stop_band_table();
        let f = BoundaryData::from_pairs(f).unwrap();
        let sol = solve_dirichlet(f.clone(), t);
        prop_assert_eq!(sol.eval(LatticePoint::new(y1, 0)).unwrap(), f.get(y1));
    }
}
