//! Finite-difference verification of thin-shell strain compatibility on
//! curvature-line surfaces, and of the correspondence between compatible
//! strains and symmetries of integrable Gauss equations.

// `!(x > 0.0)` style checks deliberately reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod banded;
pub mod error;
pub mod frames;
pub mod grid;
pub mod integrable;
pub mod strain;
pub mod surface;

pub use error::{Error, Result};
pub use grid::{Grid2D, Norms, ScalarField};
pub use surface::{CatalogSurface, SurfaceGeometry};
