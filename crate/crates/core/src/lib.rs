//! Singular Hölder and Besov path spaces, improper Young and rough
//! integration, Loewner trace regularity and renormalised Wong-Zakai
//! approximation for rough volatility.
//!
//! All paths live on finite grids ([`grid`]). Seminorms are in [`norms`],
//! integrals in [`integrate`], Loewner traces in [`sle`] and the rough
//! volatility construction in [`roughvol`]. The `singpath` binary wraps the
//! experiments ([`cli`]).

// `!(a < b)` checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conv;
pub mod error;
pub mod grid;
pub mod integrate;
pub mod io;
pub mod norms;
pub mod quad;
pub mod roughvol;
pub mod sle;
pub mod stats;

pub use error::{Error, Result};
pub use grid::{
    make_uniform_grid, restrict, sample_brownian, Grid, PathValue, PlanarPath, RngStream,
    SampledPath, TwoParamField,
};
