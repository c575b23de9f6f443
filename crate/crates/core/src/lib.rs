//! Green's functions and half-plane Dirichlet problems for the discrete
//! Helmholtz equation `(Delta_d + k^2) u = 0` on the triangular lattice.
//!
//! - [`lattice`]: points, the 7-point stencil, regions and Green's second identity.
//! - [`green`]: the lattice Green's function by quadrature and by shell recursion.
//! - [`halfplane`]: the image construction and the closed-form Dirichlet solution.
//! - [`experiment`]: cached scenario runs and field export.

pub mod error;
pub mod experiment;
pub mod green;
pub mod halfplane;
pub mod lattice;

pub use error::{Error, Result, ShellBlock};
pub use green::extrapolate::{
    extrapolate_absorption, extrapolate_absorption_many, extrapolate_to_zero, neville,
    AbsorptionLimit, EpsSchedule, Extrapolated, DEFAULT_EPS_SCHEDULE,
};
pub use green::quadrature::{
    green_quadrature, green_quadrature_converged, symbol, ConvergedQuadrature, GridPolicy,
    TrapezoidGrid,
};
pub use green::recursion::{solve_recursion, RecursionSettings, ShellSolution, Truncation};
pub use green::shells::{build_shell_matrices, printed_deviations, ShellMatrices, ShellStencil};
pub use green::spectral::{validate_spectral, Band, SpectralParameter, DEFAULT_EXCLUSION};
pub use green::symmetry::{canonicalize, orbit, CanonicalPoint};
pub use green::table::{green, recursion_table, GreenTable, Provenance};
pub use halfplane::{
    decay_fit, dirichlet_green, mirror, representation_eval, required_radius, solve_dirichlet,
    verification_radius, verify_solution, BoundaryData, DecayFit, HalfPlaneSolution,
    VerificationReport, Window,
};
pub use lattice::{
    apply_helmholtz, build_ball_region, greens_identity_residual, normal_derivative, to_euclidean,
    BallRegion, LatticeField, LatticeFunction, LatticePoint, Region, Side, SideChoice, OFFSETS,
};
pub use num_complex::Complex64;
