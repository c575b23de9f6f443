//! Coupling matrices between neighbouring shells of canonical points.
//!
//! Shell `n` collects the canonical points `(n - m, m)`, `m = 0..=n/2`, in
//! that order. Writing the homogeneous equation `(Delta_d + k^2) G = 0` at each
//! point of shell `n >= 1` and folding every neighbour back into the wedge
//! gives `gamma_n V_n = alpha_n V_{n-1} + beta_n V_{n+1}`.
//!
//! The matrices are assembled from closed-form band rules ([`ShellStencil::rules`])
//! and cross-checked against a direct enumeration of the stencil
//! ([`ShellStencil::enumerate`]). [`ShellStencil::printed`] keeps the
//! literal published table for comparison; it differs from the enumeration in
//! one entry of every odd shell, see [`printed_deviations`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result, ShellBlock};
use crate::green::symmetry::{canonicalize, CanonicalPoint};

/// Number of canonical points on shell `n`.
pub fn shell_len(n: usize) -> usize {
    n / 2 + 1
}

/// The canonical points of shell `n` in slot order.
pub fn shell_points(n: usize) -> Vec<CanonicalPoint> {
    (0..shell_len(n))
        .map(|m| CanonicalPoint {
            i: (n - m) as u32,
            j: m as u32,
        })
        .collect()
}

/// Integer shell couplings; `gamma(k2) = gamma0 - k2 I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellStencil {
    n: usize,
    alpha: DMatrix<f64>,
    beta: DMatrix<f64>,
    gamma0: DMatrix<f64>,
}

impl ShellStencil {
    fn zeros(n: usize) -> ShellStencil {
        let len = shell_len(n);
        ShellStencil {
            n,
            alpha: DMatrix::zeros(len, shell_len(n - 1)),
            beta: DMatrix::zeros(len, shell_len(n + 1)),
            gamma0: DMatrix::zeros(len, len),
        }
    }

    /// Folds the six neighbours of every shell point into the wedge.
    pub fn enumerate(n: usize) -> Result<ShellStencil> {
        check_shell(n)?;
        let mut s = ShellStencil::zeros(n);
        for (row, c) in shell_points(n).into_iter().enumerate() {
            s.gamma0[(row, row)] += 6.0;
            for q in c.point().neighbors() {
                let q = canonicalize(q);
                let col = q.slot();
                match q.shell() {
                    m if m + 1 == n => s.alpha[(row, col)] += 1.0,
                    m if m == n + 1 => s.beta[(row, col)] += 1.0,
                    m if m == n => s.gamma0[(row, col)] -= 1.0,
                    m => unreachable!("neighbour of shell {n} on shell {m}"),
                }
            }
        }
        Ok(s)
    }

    /// The closed-form band rules (1-based indices, `n = 2p` or `2p + 1`).
    ///
    /// Even shells: `alpha[i,i] = 1` (i <= p), `alpha[i,i-1] = 1` (2 <= i <= p),
    /// `alpha[p+1,p] = 2`; `beta[i,i] = 1` (i <= p), `beta[i,i+1] = 1`
    /// (2 <= i <= p), `beta[1,2] = beta[p+1,p+1] = 2`; `gamma` has `6 - k^2` on
    /// the diagonal, `-1` on both off-diagonals in rows `2..=p`, and
    /// `gamma[1,2] = gamma[p+1,p] = -2`.
    ///
    /// Odd shells: `alpha[i,i] = 1` (i <= p+1), `alpha[i,i-1] = 1` (i >= 2);
    /// `beta[i,i] = 1` (i <= p+1), `beta[i,i+1] = 1` (i >= 2), `beta[1,2] = 2`;
    /// `gamma` has `6 - k^2` on the diagonal except `gamma[p+1,p+1] = 5 - k^2`,
    /// `gamma[i,i+1] = -1` (2 <= i <= p), `gamma[i,i-1] = -1` (2 <= i <= p+1)
    /// and `gamma[1,2] = -2`. Shell 1 is the special case `gamma = [4 - k^2]`.
    pub fn rules(n: usize) -> Result<ShellStencil> {
        Self::from_rules(n, false)
    }

    /// The table exactly as published, including `gamma_{2p+1}[p+1,p] = -2`.
    pub fn printed(n: usize) -> Result<ShellStencil> {
        Self::from_rules(n, true)
    }

    fn from_rules(n: usize, printed: bool) -> Result<ShellStencil> {
        check_shell(n)?;
        let mut s = ShellStencil::zeros(n);
        let p = n / 2;
        // 1-based setter that ignores entries outside the matrix.
        fn set(m: &mut DMatrix<f64>, i: usize, j: usize, v: f64) {
            if i >= 1 && j >= 1 && i <= m.nrows() && j <= m.ncols() {
                m[(i - 1, j - 1)] = v;
            }
        }
        if n == 1 {
            set(&mut s.alpha, 1, 1, 1.0);
            set(&mut s.beta, 1, 1, 1.0);
            set(&mut s.beta, 1, 2, 2.0);
            set(&mut s.gamma0, 1, 1, 4.0);
            return Ok(s);
        }
        if n % 2 == 0 {
            for i in 1..=p {
                set(&mut s.alpha, i, i, 1.0);
                set(&mut s.beta, i, i, 1.0);
            }
            for i in 2..=p {
                set(&mut s.alpha, i, i - 1, 1.0);
                set(&mut s.beta, i, i + 1, 1.0);
                set(&mut s.gamma0, i, i + 1, -1.0);
                set(&mut s.gamma0, i, i - 1, -1.0);
            }
            set(&mut s.alpha, p + 1, p, 2.0);
            set(&mut s.beta, p + 1, p + 1, 2.0);
            set(&mut s.beta, 1, 2, 2.0);
            for i in 1..=p + 1 {
                set(&mut s.gamma0, i, i, 6.0);
            }
            set(&mut s.gamma0, 1, 2, -2.0);
            set(&mut s.gamma0, p + 1, p, -2.0);
        } else {
            for i in 1..=p + 1 {
                set(&mut s.alpha, i, i, 1.0);
                set(&mut s.beta, i, i, 1.0);
                set(&mut s.gamma0, i, i, 6.0);
            }
            for i in 2..=p + 1 {
                set(&mut s.alpha, i, i - 1, 1.0);
                set(&mut s.beta, i, i + 1, 1.0);
                set(&mut s.gamma0, i, i - 1, -1.0);
            }
            for i in 2..=p {
                set(&mut s.gamma0, i, i + 1, -1.0);
            }
            set(&mut s.beta, 1, 2, 2.0);
            set(&mut s.gamma0, p + 1, p + 1, 5.0);
            set(&mut s.gamma0, 1, 2, -2.0);
            if printed {
                set(&mut s.gamma0, p + 1, p, -2.0);
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &DMatrix<f64> {
        &self.alpha
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }

    /// `gamma` at `k2 = 0`.
    pub fn gamma0(&self) -> &DMatrix<f64> {
        &self.gamma0
    }

    /// Entrywise comparison against the enumerated stencil; the first
    /// mismatching row is reported.
    pub fn self_check(&self) -> Result<()> {
        let reference = ShellStencil::enumerate(self.n)?;
        match first_difference(self, &reference).into_iter().next() {
            None => Ok(()),
            Some(d) => Err(Error::ShellStructure {
                n: self.n,
                block: d.block,
                row: d.row,
                detail: format!(
                    "column {}: table has {}, stencil gives {}",
                    d.col, d.table, d.stencil
                ),
            }),
        }
    }

    /// Complex matrices at `k2`.
    pub fn at(&self, k2: Complex64) -> ShellMatrices {
        let cast = |m: &DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
        let mut gamma = cast(&self.gamma0);
        for d in 0..gamma.nrows() {
            gamma[(d, d)] -= k2;
        }
        ShellMatrices {
            n: self.n,
            alpha: cast(&self.alpha),
            beta: cast(&self.beta),
            gamma,
        }
    }
}

fn check_shell(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("shell matrices start at n = 1".into()))
    } else {
        Ok(())
    }
}

/// `alpha_n`, `beta_n`, `gamma_n` at a fixed complex `k^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellMatrices {
    pub n: usize,
    pub alpha: DMatrix<Complex64>,
    pub beta: DMatrix<Complex64>,
    pub gamma: DMatrix<Complex64>,
}

/// Shell matrices from the band rules, after the stencil self-check.
pub fn build_shell_matrices(n: usize, k2: Complex64) -> Result<ShellMatrices> {
    let stencil = ShellStencil::rules(n)?;
    stencil.self_check()?;
    Ok(stencil.at(k2))
}

/// One entry where the published table and the stencil disagree (1-based).
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub n: usize,
    pub block: ShellBlock,
    pub row: usize,
    pub col: usize,
    pub table: f64,
    pub stencil: f64,
}

/// Entries of the published table for shell `n` that contradict the stencil.
pub fn printed_deviations(n: usize) -> Result<Vec<Deviation>> {
    let printed = ShellStencil::printed(n)?;
    let reference = ShellStencil::enumerate(n)?;
    Ok(first_difference(&printed, &reference))
}

fn first_difference(table: &ShellStencil, reference: &ShellStencil) -> Vec<Deviation> {
    let mut out = Vec::new();
    let blocks = [
        (ShellBlock::Alpha, &table.alpha, &reference.alpha),
        (ShellBlock::Beta, &table.beta, &reference.beta),
        (ShellBlock::Gamma, &table.gamma0, &reference.gamma0),
    ];
    for row in 0..table.alpha.nrows() {
        for (block, a, b) in blocks {
            for col in 0..a.ncols() {
                if a[(row, col)] != b[(row, col)] {
                    out.push(Deviation {
                        n: table.n,
                        block,
                        row: row + 1,
                        col: col + 1,
                        table: a[(row, col)],
                        stencil: b[(row, col)],
                    });
                }
            }
        }
    }
    out
}

/// Sparse row form used by the recursion: `(column, weight)` pairs.
#[derive(Clone, Debug)]
pub(crate) struct SparseShell {
    pub alpha: Vec<Vec<(usize, f64)>>,
    pub beta: Vec<Vec<(usize, f64)>>,
    pub gamma0: Vec<Vec<(usize, f64)>>,
}

impl SparseShell {
    pub fn new(n: usize) -> Result<SparseShell> {
        let s = ShellStencil::rules(n)?;
        s.self_check()?;
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<(usize, f64)>> {
            (0..m.nrows())
                .map(|r| {
                    (0..m.ncols())
                        .filter(|&c| m[(r, c)] != 0.0)
                        .map(|c| (c, m[(r, c)]))
                        .collect()
                })
                .collect()
        };
        Ok(SparseShell {
            alpha: rows(&s.alpha),
            beta: rows(&s.beta),
            gamma0: rows(&s.gamma0),
        })
    }
}
