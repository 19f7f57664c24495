//! Elastic half-space loaded at a triple contact line: complex potentials,
//! fields, quadrature checks, surface stress calculus and line equations.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contact_line;
pub mod fields;
pub mod potentials;
pub mod scaling;
pub mod suite;
pub mod surface;
pub mod verification;
