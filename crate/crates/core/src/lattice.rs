//! Triangular-lattice geometry and the 7-point Helmholtz stencil.
//!
//! Nodes are indexed by integer axial coordinates `(x1, x2)`; the Euclidean
//! position of a node is `(x1 + x2/2, sqrt(3) x2 / 2)`. Every node has six
//! neighbours at unit distance, reached through the offsets
//! `e1 = (1,0)`, `e2 = (0,1)`, `e3 = e1 - e2`, `e4 = -e1`, `e5 = -e2`, `e6 = -e3`.
//!
//! Finite regions carry an explicit split into interior and boundary. A
//! boundary point `y` belongs to side `j` when `y - e_j` is interior; a point
//! may sit on several sides at once.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x1: i64,
    pub x2: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x1: 0, x2: 0 };

    pub const fn new(x1: i64, x2: i64) -> Self {
        LatticePoint { x1, x2 }
    }

    /// Euclidean position of the node.
    pub fn to_euclidean(self) -> (f64, f64) {
        let x2 = self.x2 as f64;
        (self.x1 as f64 + 0.5 * x2, SQRT3_2 * x2)
    }

    /// Graph distance to the origin, i.e. the index of the hexagonal shell
    /// containing the point.
    pub fn hex_norm(self) -> u64 {
        let (a, b) = (self.x1, self.x2);
        (a.unsigned_abs() + b.unsigned_abs() + (a + b).unsigned_abs()) / 2
    }

    pub fn neighbors(self) -> [LatticePoint; 6] {
        OFFSETS.map(|e| self + e)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, rhs: Self) -> Self {
        LatticePoint::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, rhs: Self) -> Self {
        LatticePoint::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> Self {
        LatticePoint::new(-self.x1, -self.x2)
    }
}

impl From<(i64, i64)> for LatticePoint {
    fn from((x1, x2): (i64, i64)) -> Self {
        LatticePoint::new(x1, x2)
    }
}

/// Free-function form of [`LatticePoint::to_euclidean`].
pub fn to_euclidean(p: LatticePoint) -> (f64, f64) {
    p.to_euclidean()
}

/// Neighbour offsets `e1..e6`; `OFFSETS[j - 1]` is `e_j`.
pub const OFFSETS: [LatticePoint; 6] = [
    LatticePoint::new(1, 0),
    LatticePoint::new(0, 1),
    LatticePoint::new(1, -1),
    LatticePoint::new(-1, 0),
    LatticePoint::new(0, -1),
    LatticePoint::new(-1, 1),
];

/// Index of a side of a region, `1..=6`, naming the outward offset `e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side(u8);

impl Side {
    pub const ALL: [Side; 6] = [Side(1), Side(2), Side(3), Side(4), Side(5), Side(6)];

    pub fn new(j: usize) -> Result<Side> {
        if (1..=6).contains(&j) {
            Ok(Side(j as u8))
        } else {
            Err(Error::InvalidSide(j))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn offset(self) -> LatticePoint {
        OFFSETS[self.0 as usize - 1]
    }
}

/// Anything that can be sampled at lattice points.
pub trait LatticeFunction {
    fn at(&self, p: LatticePoint) -> Complex64;
}

impl<F> LatticeFunction for F
where
    F: Fn(LatticePoint) -> Complex64,
{
    fn at(&self, p: LatticePoint) -> Complex64 {
        self(p)
    }
}

/// A finitely supported complex field; reads off the support return zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LatticeField {
    values: BTreeMap<LatticePoint, Complex64>,
}

impl LatticeField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn indicator(p: LatticePoint) -> Self {
        let mut field = Self::new();
        field.set(p, Complex64::new(1.0, 0.0));
        field
    }

    /// Samples `f` on every point of `points`.
    pub fn from_fn<I, F>(points: I, f: F) -> Self
    where
        I: IntoIterator<Item = LatticePoint>,
        F: Fn(LatticePoint) -> Complex64,
    {
        let values = points.into_iter().map(|p| (p, f(p))).collect();
        LatticeField { values }
    }

    pub fn set(&mut self, p: LatticePoint, value: Complex64) {
        self.values.insert(p, value);
    }

    pub fn get(&self, p: LatticePoint) -> Complex64 {
        self.values.get(&p).copied().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (LatticePoint, Complex64)> + '_ {
        self.values.iter().map(|(p, v)| (*p, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl LatticeFunction for LatticeField {
    fn at(&self, p: LatticePoint) -> Complex64 {
        self.get(p)
    }
}

/// `(Delta_d + k2) u` at `p`.
pub fn apply_helmholtz<F>(u: &F, k2: Complex64, p: LatticePoint) -> Complex64
where
    F: LatticeFunction + ?Sized,
{
    let ring = OFFSETS.iter().fold(Complex64::default(), |acc, &e| acc + u.at(p + e));
    ring + (k2 - 6.0) * u.at(p)
}

/// Discrete outward normal derivative `u(y) - u(y - e_j)`.
///
/// The caller is responsible for `y` lying on side `j` of the region in play.
pub fn normal_derivative<F>(u: &F, y: LatticePoint, side: usize) -> Result<Complex64>
where
    F: LatticeFunction + ?Sized,
{
    let side = Side::new(side)?;
    Ok(u.at(y) - u.at(y - side.offset()))
}

/// A finite region with a fixed interior/boundary split.
#[derive(Clone, Debug)]
pub struct Region {
    interior: BTreeSet<LatticePoint>,
    boundary: BTreeSet<LatticePoint>,
    sides: [BTreeSet<LatticePoint>; 6],
}

impl Region {
    pub fn new(interior: BTreeSet<LatticePoint>, boundary: BTreeSet<LatticePoint>) -> Result<Region> {
        if interior.is_empty() || boundary.is_empty() {
            return Err(Error::InvalidRegion("interior and boundary must be nonempty".into()));
        }
        if let Some(p) = interior.intersection(&boundary).next() {
            return Err(Error::InvalidRegion(format!("{p:?} is both interior and boundary")));
        }
        for &x in &interior {
            for y in x.neighbors() {
                if !interior.contains(&y) && !boundary.contains(&y) {
                    return Err(Error::InvalidRegion(format!(
                        "neighbour {y:?} of interior point {x:?} is outside the region"
                    )));
                }
            }
        }
        let mut sides: [BTreeSet<LatticePoint>; 6] = Default::default();
        for &y in &boundary {
            let mut on_any = false;
            for (j, &e) in OFFSETS.iter().enumerate() {
                if interior.contains(&(y - e)) {
                    sides[j].insert(y);
                    on_any = true;
                }
            }
            if !on_any {
                return Err(Error::InvalidRegion(format!(
                    "boundary point {y:?} has no interior neighbour"
                )));
            }
        }
        Ok(Region {
            interior,
            boundary,
            sides,
        })
    }

    pub fn interior(&self) -> &BTreeSet<LatticePoint> {
        &self.interior
    }

    pub fn boundary(&self) -> &BTreeSet<LatticePoint> {
        &self.boundary
    }

    /// The boundary points on side `side`.
    pub fn side(&self, side: Side) -> &BTreeSet<LatticePoint> {
        &self.sides[side.index() - 1]
    }

    /// All sides containing `y` (empty for points not on the boundary).
    pub fn sides_of(&self, y: LatticePoint) -> Vec<Side> {
        Side::ALL
            .into_iter()
            .filter(|s| self.side(*s).contains(&y))
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.interior.iter().chain(self.boundary.iter()).copied()
    }
}

/// The hexagonal ball `H_N`: interior `H_{N-1}`, boundary `H_N \ H_{N-1}`.
#[derive(Clone, Debug)]
pub struct BallRegion {
    order: usize,
    region: Region,
}

impl BallRegion {
    /// Builds `H_N` by the neighbourhood recurrence `H_N = U_{x in H_{N-1}} F_x`.
    pub fn new(order: usize) -> Result<BallRegion> {
        if order == 0 {
            return Err(Error::InvalidArgument("ball order must be at least 1".into()));
        }
        let mut inner: BTreeSet<LatticePoint> = BTreeSet::from([LatticePoint::ORIGIN]);
        let mut outer = inner.clone();
        for _ in 0..order {
            inner = outer;
            outer = inner.clone();
            for x in &inner {
                outer.extend(x.neighbors());
            }
        }
        let boundary = outer.difference(&inner).copied().collect();
        let region = Region::new(inner, boundary)?;
        Ok(BallRegion { order, region })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn len(&self) -> usize {
        self.region.interior.len() + self.region.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Free-function form of [`BallRegion::new`].
pub fn build_ball_region(order: usize) -> Result<BallRegion> {
    BallRegion::new(order)
}

/// For each boundary point, the sides whose normal derivative enters the
/// boundary sum of Green's second identity.
///
/// The identity is exact only when every boundary point contributes once for
/// each side it lies on; [`SideChoice::full`] builds that choice. A narrower
/// choice is accepted and simply yields a nonzero residual.
#[derive(Clone, Debug, Default)]
pub struct SideChoice {
    sides: BTreeMap<LatticePoint, Vec<Side>>,
}

impl SideChoice {
    /// Every side each boundary point belongs to.
    pub fn full(region: &Region) -> SideChoice {
        let sides = region
            .boundary()
            .iter()
            .map(|&y| (y, region.sides_of(y)))
            .collect();
        SideChoice { sides }
    }

    /// One side per boundary point: the lowest-numbered side it lies on.
    pub fn first(region: &Region) -> SideChoice {
        let sides = region
            .boundary()
            .iter()
            .map(|&y| (y, region.sides_of(y)[..1].to_vec()))
            .collect();
        SideChoice { sides }
    }

    pub fn assign(&mut self, y: LatticePoint, sides: Vec<Side>) {
        self.sides.insert(y, sides);
    }

    pub fn get(&self, y: LatticePoint) -> Option<&[Side]> {
        self.sides.get(&y).map(Vec::as_slice)
    }
}

/// `sum_interior (u Delta v - v Delta u) - sum_boundary sum_sides (u T v - v T u)`.
pub fn greens_identity_residual<U, V>(
    u: &U,
    v: &V,
    region: &Region,
    choice: &SideChoice,
) -> Result<Complex64>
where
    U: LatticeFunction + ?Sized,
    V: LatticeFunction + ?Sized,
{
    for (&y, sides) in &choice.sides {
        if !region.boundary().contains(&y) {
            return Err(Error::InconsistentSides {
                point: y,
                reason: "not a boundary point".into(),
            });
        }
        if let Some(s) = sides.iter().find(|s| !region.side(**s).contains(&y)) {
            return Err(Error::InconsistentSides {
                point: y,
                reason: format!("not on side {}", s.index()),
            });
        }
    }
    let zero = Complex64::default();
    let mut volume = zero;
    for &x in region.interior() {
        volume += u.at(x) * apply_helmholtz(v, zero, x) - v.at(x) * apply_helmholtz(u, zero, x);
    }
    let mut surface = zero;
    for &y in region.boundary() {
        let sides = choice.get(y).ok_or_else(|| Error::InconsistentSides {
            point: y,
            reason: "no side assigned".into(),
        })?;
        for side in sides {
            let inner = y - side.offset();
            let du = u.at(y) - u.at(inner);
            let dv = v.at(y) - v.at(inner);
            surface += u.at(y) * dv - v.at(y) * du;
        }
    }
    Ok(volume - surface)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn euclidean_embedding() {
        assert_eq!(LatticePoint::new(0, 0).to_euclidean(), (0.0, 0.0));
        let (a, b) = LatticePoint::new(0, 1).to_euclidean();
        assert_eq!(a, 0.5);
        assert!((b - 3f64.sqrt() / 2.0).abs() < 1e-16);
        let (a, b) = LatticePoint::new(1, -2).to_euclidean();
        assert_eq!(a, 0.0);
        assert!((b + 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn offsets_are_unit_and_cancel() {
        let sum = OFFSETS.iter().fold(LatticePoint::ORIGIN, |a, &e| a + e);
        assert_eq!(sum, LatticePoint::ORIGIN);
        for e in OFFSETS {
            let (a, b) = e.to_euclidean();
            assert!(((a * a + b * b).sqrt() - 1.0).abs() < 1e-15);
            assert_eq!(e.hex_norm(), 1);
        }
    }

    #[test]
    fn stencil_on_point_source() {
        let u = LatticeField::indicator(LatticePoint::ORIGIN);
        assert_eq!(apply_helmholtz(&u, c(2.0), LatticePoint::ORIGIN), c(-4.0));
        assert_eq!(apply_helmholtz(&u, c(2.0), LatticePoint::new(1, 0)), c(1.0));
        assert_eq!(apply_helmholtz(&u, c(2.0), LatticePoint::new(2, 0)), c(0.0));
    }

    #[test]
    fn normal_derivatives() {
        let constant = |_| Complex64::new(3.0, -1.0);
        for j in 1..=6 {
            assert_eq!(normal_derivative(&constant, LatticePoint::new(4, -2), j).unwrap(), c(0.0));
        }
        let u = LatticeField::indicator(LatticePoint::ORIGIN);
        assert_eq!(normal_derivative(&u, LatticePoint::new(1, 0), 1).unwrap(), c(-1.0));
        let ramp = |p: LatticePoint| c(p.x1 as f64);
        assert_eq!(normal_derivative(&ramp, LatticePoint::new(5, 2), 1).unwrap(), c(1.0));
        assert!(matches!(normal_derivative(&u, LatticePoint::ORIGIN, 0), Err(Error::InvalidSide(0))));
        assert!(matches!(normal_derivative(&u, LatticePoint::ORIGIN, 7), Err(Error::InvalidSide(7))));
    }

    #[test]
    fn first_balls() {
        let h1 = BallRegion::new(1).unwrap();
        assert_eq!(h1.region().interior().len(), 1);
        let ring: BTreeSet<_> = LatticePoint::ORIGIN.neighbors().into_iter().collect();
        assert_eq!(h1.region().boundary(), &ring);
        let h2 = BallRegion::new(2).unwrap();
        assert_eq!(h2.len(), 19);
        assert_eq!(h2.region().boundary().len(), 12);
        assert_eq!(BallRegion::new(3).unwrap().len(), 37);
        assert!(BallRegion::new(0).is_err());
    }

    #[test]
    fn edge_points_sit_on_two_sides() {
        let h2 = BallRegion::new(2).unwrap();
        let r = h2.region();
        assert_eq!(r.sides_of(LatticePoint::new(2, 0)).len(), 1);
        let both = r.sides_of(LatticePoint::new(1, 1));
        assert_eq!(both, vec![Side::new(1).unwrap(), Side::new(2).unwrap()]);
        let union: BTreeSet<_> = Side::ALL.iter().flat_map(|s| r.side(*s).iter().copied()).collect();
        assert_eq!(&union, r.boundary());
    }

    #[test]
    fn region_rejects_bad_splits() {
        let interior = BTreeSet::from([LatticePoint::ORIGIN]);
        let partial: BTreeSet<_> = LatticePoint::ORIGIN.neighbors()[..5].iter().copied().collect();
        assert!(Region::new(interior.clone(), partial).is_err());
        let mut stray: BTreeSet<_> = LatticePoint::ORIGIN.neighbors().into_iter().collect();
        stray.insert(LatticePoint::new(5, 5));
        assert!(Region::new(interior.clone(), stray).is_err());
        assert!(Region::new(interior.clone(), BTreeSet::new()).is_err());
        assert!(Region::new(interior.clone(), interior).is_err());
    }

    #[test]
    fn identity_is_antisymmetric() {
        let h3 = BallRegion::new(3).unwrap();
        let r = h3.region();
        let u = |p: LatticePoint| Complex64::new(p.x1 as f64 * 0.3, (p.x2 * p.x2) as f64);
        let res = greens_identity_residual(&u, &u, r, &SideChoice::full(r)).unwrap();
        assert_eq!(res, Complex64::default());
    }

    #[test]
    fn identity_with_point_fields() {
        let h3 = BallRegion::new(3).unwrap();
        let r = h3.region();
        let u = LatticeField::indicator(LatticePoint::ORIGIN);
        for &y in r.boundary() {
            let v = LatticeField::indicator(y);
            let res = greens_identity_residual(&u, &v, r, &SideChoice::full(r)).unwrap();
            assert!(res.norm() < 1e-12);
        }
    }

    #[test]
    fn single_side_choice_breaks_the_identity_on_edges() {
        let h2 = BallRegion::new(2).unwrap();
        let r = h2.region();
        let u = LatticeField::indicator(LatticePoint::new(1, 1));
        let v = LatticeField::indicator(LatticePoint::new(1, 0));
        let full = greens_identity_residual(&u, &v, r, &SideChoice::full(r)).unwrap();
        let first = greens_identity_residual(&u, &v, r, &SideChoice::first(r)).unwrap();
        assert!(full.norm() < 1e-12);
        assert!(first.norm() > 0.5);
    }

    #[test]
    fn side_choice_is_validated() {
        let h1 = BallRegion::new(1).unwrap();
        let r = h1.region();
        let u = LatticeField::indicator(LatticePoint::ORIGIN);
        let mut bad = SideChoice::full(r);
        bad.assign(LatticePoint::new(1, 0), vec![Side::new(2).unwrap()]);
        assert!(matches!(
            greens_identity_residual(&u, &u, r, &bad),
            Err(Error::InconsistentSides { .. })
        ));
        let mut missing = SideChoice::default();
        missing.assign(LatticePoint::new(1, 0), vec![Side::new(1).unwrap()]);
        assert!(greens_identity_residual(&u, &u, r, &missing).is_err());
    }
}
