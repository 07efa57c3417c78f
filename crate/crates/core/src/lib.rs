//! Symbolic-numeric engine for the (G'/G)-expansion method applied to
//! space-time fractional evolution equations of KdV-Burgers type.
//!
//! The pipeline: [`reduction`] turns a fractional PDE into an ODE in the
//! travelling-wave variable and picks the ansatz order, [`ansatz`] supplies
//! the Laurent-series algebra in `phi = G'/G`, [`system`] collects the
//! algebraic conditions and checks or solves them, [`closed_form`] evaluates
//! the resulting wave profiles and [`fractional`] validates everything
//! numerically.

pub mod algebra;
pub mod ansatz;
pub mod closed_form;
pub mod error;
pub mod fractional;
pub mod reduction;
pub mod solve;
pub mod special;
pub mod system;

pub use error::{Error, Result};
