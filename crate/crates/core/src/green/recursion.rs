//! Shell-by-shell matrix recursion for `G`.
//!
//! Transfer matrices satisfy `V_n = A_n V_{n-1}` with
//! `A_n = (gamma_n - beta_n A_{n+1})^{-1} alpha_n`, started from
//! `A_{N+1} = 0` and swept down to `n = 1`. The origin equation
//! `6 G(1,0) + (k^2 - 6) G(0,0) = 1` then fixes `G(0,0)` and the shells are
//! filled outward. Every shell equation below the truncation holds exactly,
//! so the values are an exact lattice solution whatever `N` is; `N` only
//! decides how much of a spurious incoming wave is mixed in.
//!
//! In the pass band the zero start reflects outgoing waves back for any
//! finite `N`. [`Truncation::Absorbing`] places a graded absorbing layer
//! beyond the requested radius instead: shells past the radius use
//! `k^2 + i eps(n)` with `eps(n)` rising as a power of the depth into the
//! layer, which damps outgoing waves before they reach the zero start.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::shells::{shell_len, SparseShell};

/// How the shell sweep is closed off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Truncation {
    /// `A_{N+1} = 0` with uniform absorption; `N` starts at
    /// `max(4 radius, min_order)` and doubles.
    Zero { min_order: usize },
    /// Uniform absorption up to the radius, then `layer` shells with
    /// `eps(n) = eps + strength * (depth / layer)^power`; `layer` doubles.
    Absorbing {
        layer: usize,
        strength: f64,
        power: i32,
    },
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Absorbing {
            layer: 64,
            strength: 16.0,
            power: 6,
        }
    }
}

/// Convergence policy for the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionSettings {
    pub truncation: Truncation,
    /// Largest tolerated change of any shell value between two truncations.
    pub tol: f64,
    /// Hard limit on the number of shells in one sweep.
    pub max_order: usize,
}

impl Default for RecursionSettings {
    fn default() -> Self {
        RecursionSettings {
            truncation: Truncation::default(),
            tol: 1e-9,
            max_order: 1 << 14,
        }
    }
}

impl RecursionSettings {
    /// The plain zero start, used in the stop band and for lossless runs.
    pub fn zero_start() -> RecursionSettings {
        RecursionSettings {
            truncation: Truncation::Zero { min_order: 64 },
            ..Default::default()
        }
    }
}

/// Shell vectors `V_0..=V_radius` for one absorption value.
#[derive(Clone, Debug)]
pub struct ShellSolution {
    pub eps: f64,
    /// `shells[n][m]` is `G(n - m, m)`.
    pub shells: Vec<Vec<Complex64>>,
    /// Shells in the final sweep.
    pub order: usize,
    /// First truncation tried.
    pub order_start: usize,
    /// Change against the previous truncation (0 if only one sweep ran).
    pub change: f64,
}

/// One sweep with per-shell absorption `eps_of(n)` for `n = 0..=order`.
pub fn sweep<F>(k2: Complex64, radius: usize, order: usize, eps_of: F) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(usize) -> f64,
{
    let order = order.max(radius).max(1);
    let mut stored: Vec<DMatrix<Complex64>> = Vec::with_capacity(radius + 1);
    let mut next: Option<DMatrix<Complex64>> = None;
    for n in (1..=order).rev() {
        let shell = SparseShell::new(n)?;
        let len = shell_len(n);
        let k2n = k2 + Complex64::new(0.0, eps_of(n));
        let mut m = DMatrix::<Complex64>::zeros(len, len);
        for (r, row) in shell.gamma0.iter().enumerate() {
            for &(c, w) in row {
                m[(r, c)] += w;
            }
            m[(r, r)] -= k2n;
        }
        if let Some(a) = &next {
            for (r, row) in shell.beta.iter().enumerate() {
                for &(c, w) in row {
                    for col in 0..len {
                        m[(r, col)] -= w * a[(c, col)];
                    }
                }
            }
        }
        let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
        let lu = m.lu();
        let threshold = 64.0 * f64::EPSILON * len as f64 * scale;
        let pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |acc, v| acc.min(v.norm()));
        if pivot.is_nan() || pivot <= threshold {
            return Err(Error::DegenerateParameter { n, eps: eps_of(n) });
        }
        let mut alpha = DMatrix::<Complex64>::zeros(len, shell_len(n - 1));
        for (r, row) in shell.alpha.iter().enumerate() {
            for &(c, w) in row {
                alpha[(r, c)] = Complex64::new(w, 0.0);
            }
        }
        let a = lu
            .solve(&alpha)
            .ok_or(Error::DegenerateParameter { n, eps: eps_of(n) })?;
        if n <= radius {
            stored.push(a.clone());
        }
        next = Some(a);
    }
    stored.reverse();
    let a1 = next.expect("at least one shell")[(0, 0)];
    let origin = 6.0 * a1 + k2 + Complex64::new(0.0, eps_of(0)) - 6.0;
    if origin.norm() == 0.0 {
        return Err(Error::DegenerateParameter { n: 0, eps: eps_of(0) });
    }
    let mut shells = Vec::with_capacity(radius + 1);
    shells.push(vec![origin.inv()]);
    for a in &stored {
        let prev = nalgebra::DVector::from_column_slice(shells.last().unwrap());
        shells.push((a * prev).as_slice().to_vec());
    }
    Ok(shells)
}

fn max_change(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Shells `0..=radius` at `k^2 + i eps`, refined until two successive
/// truncations agree to `settings.tol`.
///
/// `eps = 0` always uses the plain zero start: a lossless sweep has nothing
/// to grade an absorbing layer against, and this is the configuration in
/// which `k = 2` is degenerate.
pub fn solve_recursion(
    k2: Complex64,
    eps: f64,
    radius: usize,
    settings: &RecursionSettings,
) -> Result<ShellSolution> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be finite and >= 0, got {eps}")));
    }
    let truncation = if eps == 0.0 {
        match settings.truncation {
            Truncation::Absorbing { .. } => Truncation::Zero { min_order: 64 },
            zero => zero,
        }
    } else {
        settings.truncation
    };
    let run = |step: usize| -> Result<(usize, Vec<Vec<Complex64>>)> {
        match truncation {
            Truncation::Zero { .. } => Ok((step, sweep(k2, radius, step, |_| eps)?)),
            Truncation::Absorbing { strength, power, .. } => {
                let order = radius + step;
                let profile = |n: usize| {
                    if n <= radius {
                        eps
                    } else {
                        eps + strength * ((n - radius) as f64 / step as f64).powi(power)
                    }
                };
                Ok((order, sweep(k2, radius, order, profile)?))
            }
        }
    };
    let mut step = match truncation {
        Truncation::Zero { min_order } => (4 * radius).max(min_order).max(1),
        Truncation::Absorbing { layer, strength, power } => {
            if layer == 0 || strength.is_nan() || strength <= 0.0 || power < 1 {
                return Err(Error::InvalidArgument(format!(
                    "absorbing layer needs layer > 0, strength > 0, power >= 1 \
                     (got {layer}, {strength}, {power})"
                )));
            }
            layer
        }
    };
    let (first_order, mut shells) = run(step)?;
    let mut change = f64::INFINITY;
    loop {
        step *= 2;
        let next_order = match truncation {
            Truncation::Zero { .. } => step,
            Truncation::Absorbing { .. } => radius + step,
        };
        if next_order > settings.max_order {
            return Err(Error::Truncation {
                change,
                order: next_order / 2,
                cap: settings.max_order,
            });
        }
        let (order, refined) = run(step)?;
        change = max_change(&shells, &refined);
        shells = refined;
        if change <= settings.tol {
            return Ok(ShellSolution {
                eps,
                shells,
                order,
                order_start: first_order,
                change,
            });
        }
        log::debug!("eps {eps}: change {change:e} at {order} shells");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::quadrature::TrapezoidGrid;
    use crate::lattice::LatticePoint;

    fn lookup(shells: &[Vec<Complex64>], p: LatticePoint) -> Complex64 {
        let c = crate::green::symmetry::canonicalize(p);
        shells[c.shell()][c.slot()]
    }

    #[test]
    fn stop_band_matches_quadrature() {
        let k2 = Complex64::new(10.0, 0.0);
        let sol = solve_recursion(k2, 0.0, 6, &RecursionSettings::zero_start()).unwrap();
        let grid = TrapezoidGrid::new(k2, 256).unwrap();
        for n in 0..=6usize {
            for m in 0..=n / 2 {
                let p = LatticePoint::new((n - m) as i64, m as i64);
                let q = grid.eval(p);
                assert!((sol.shells[n][m] - q).norm() < 1e-12 * q.norm().max(1e-3), "{p:?}");
            }
        }
    }

    #[test]
    fn shell_equations_hold_for_any_truncation() {
        let k2 = Complex64::new(2.0, 0.0);
        let shells = sweep(k2, 12, 20, |_| 0.01).unwrap();
        let k2e = k2 + Complex64::new(0.0, 0.01);
        for n in 0..12usize {
            for m in 0..=n / 2 {
                let p = LatticePoint::new((n - m) as i64, m as i64);
                let g = |q: LatticePoint| lookup(&shells, q);
                let r = crate::lattice::apply_helmholtz(&g, k2e, p);
                let target = if n == 0 { 1.0 } else { 0.0 };
                assert!((r - target).norm() < 1e-11, "{p:?} {r}");
            }
        }
    }

    #[test]
    fn degenerate_at_k_two_without_absorption() {
        let r = solve_recursion(Complex64::new(4.0, 0.0), 0.0, 4, &RecursionSettings::default());
        assert!(matches!(r, Err(Error::DegenerateParameter { .. })), "{r:?}");
    }

    #[test]
    fn rejects_bad_layer() {
        let settings = RecursionSettings {
            truncation: Truncation::Absorbing {
                layer: 0,
                strength: 1.0,
                power: 3,
            },
            ..Default::default()
        };
        assert!(solve_recursion(Complex64::new(2.0, 0.0), 0.01, 2, &settings).is_err());
    }
}
