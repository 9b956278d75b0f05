//! Numerical tools for missing-digits measures and their projections.
//!
//! * [`measure`] – measures `λ_{p,D}`, products, sampling and cylinder counting.
//! * [`fourier`] – `λ̂` through the digit-symbol product, plus a brute-force oracle.
//! * [`dimension`] – lower bounds for the l¹ Fourier dimension.
//! * [`projection`] – radial and linear projection densities, frequency integrals.
//! * [`certify`] – turns bounds into verdicts for the absolute-continuity criteria.
//! * [`graham`] – integers with restricted digits in several bases.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod base;
pub mod certify;
pub mod config;
pub mod digits;
pub mod dimension;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod graham;
pub mod measure;
pub mod par;
pub mod projection;

pub use base::{BasePower, SymInt};
pub use config::parse_spec;
pub use digits::DigitSet;
pub use error::{Error, Result, DEFAULT_BUDGET};
pub use measure::{MissingDigitsSpec, ProductMeasureSpec};
