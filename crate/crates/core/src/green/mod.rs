//! The lattice Green's function `G(x)`, solving `(Delta_d + k^2) G = delta_0`.
//!
//! Two independent evaluators are provided: Brillouin-zone quadrature at
//! `k^2 + i eps` ([`quadrature`], [`extrapolate`]) and the shell recursion
//! ([`recursion`]) that backs the persistent [`table::GreenTable`].

pub mod extrapolate;
pub mod quadrature;
pub mod recursion;
pub mod shells;
pub mod spectral;
pub mod symmetry;
pub mod table;
