//! Periodic grids, fields, transforms and Fourier multipliers.

pub(crate) mod fft;
mod field;
mod grid;
mod symbol;

pub use field::Field;
pub use grid::Grid;
pub use symbol::{
    abs_derivative, apply_multiplier, derivative, h_norm, hs_norm, sobolev_phi_norm, weighted_norm, SymbolSpec,
};
