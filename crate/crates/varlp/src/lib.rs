//! Desk-scale numerical toolkit for variable-exponent Lebesgue norms,
//! Muckenhoupt weight constants, and extrapolation-range experiments.
//!
//! Everything lives on small dyadic grids over a centered box. The modules
//! build on each other roughly in this order:
//!
//! - [`grid`]: sampled functions, midpoint quadrature, unitary DFT;
//! - [`exponent`]: variable exponents and log-Holder diagnostics;
//! - [`norms`]: modulars and Luxemburg norms;
//! - [`weights`]: cube families and weight-class constants;
//! - [`maximal`]: Hardy-Littlewood and spherical maximal operators;
//! - [`rubio`]: the Rubio de Francia iteration and its A1 certificate;
//! - [`operators`]: rough singular integrals and oscillatory multipliers;
//! - [`extrapolation`]: hypothesis checkers and empirical constant hunts.
//!
//! All computations are deterministic: seeded generators, sequential
//! reductions, and fixed iteration orders throughout.

pub mod error;
pub mod exponent;
pub mod extrapolation;
pub mod grid;
pub mod maximal;
pub mod norms;
pub mod operators;
pub mod report;
pub mod rubio;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{ComplexGridFunction, Grid, GridFunction, GridMode};
