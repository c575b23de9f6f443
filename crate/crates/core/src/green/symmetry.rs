//! Point symmetries of the lattice Green's function.
//!
//! `G` is invariant under the swap `(x1, x2) -> (x2, x1)`, the negation
//! `(x1, x2) -> (-x1, -x2)` and the mirror `(x1, x2) -> (x1 + x2, -x2)`. These
//! generate the 12-element hexagonal point group; every orbit meets the wedge
//! `i >= j >= 0` in exactly one point.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::lattice::LatticePoint;

/// Orbit representative with `i >= j >= 0`; `i + j` is the shell index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalPoint {
    pub i: u32,
    pub j: u32,
}

impl CanonicalPoint {
    pub fn shell(self) -> usize {
        (self.i + self.j) as usize
    }

    /// Position inside the shell vector: `(n, 0)` is 0, `(n - 1, 1)` is 1, ...
    pub fn slot(self) -> usize {
        self.j as usize
    }

    pub fn point(self) -> LatticePoint {
        LatticePoint::new(self.i as i64, self.j as i64)
    }
}

fn swap(p: LatticePoint) -> LatticePoint {
    LatticePoint::new(p.x2, p.x1)
}

fn negate(p: LatticePoint) -> LatticePoint {
    -p
}

/// The reflection `(x1, x2) -> (x1 + x2, -x2)`.
pub fn mirror(p: LatticePoint) -> LatticePoint {
    LatticePoint::new(p.x1 + p.x2, -p.x2)
}

/// The orbit of `p` under the group generated by swap, negation and mirror.
pub fn orbit(p: LatticePoint) -> ArrayVec<LatticePoint, 12> {
    let mut seen = ArrayVec::<LatticePoint, 12>::new();
    seen.push(p);
    let mut next = 0;
    while next < seen.len() {
        let q = seen[next];
        next += 1;
        for image in [swap(q), negate(q), mirror(q)] {
            if !seen.contains(&image) {
                seen.push(image);
            }
        }
    }
    seen
}

/// The unique orbit representative in the wedge `i >= j >= 0`.
pub fn canonicalize(p: LatticePoint) -> CanonicalPoint {
    let rep = orbit(p)
        .into_iter()
        .find(|q| q.x1 >= q.x2 && q.x2 >= 0)
        .expect("every orbit meets the fundamental wedge");
    CanonicalPoint {
        i: u32::try_from(rep.x1).expect("coordinate fits in u32"),
        j: rep.x2 as u32,
    }
}
