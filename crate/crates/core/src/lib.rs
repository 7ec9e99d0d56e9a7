//! Rankin–Selberg moments of holomorphic eigenforms for SL₂(ℤ), with the
//! Eisenstein, Whittaker and Epstein machinery needed to cross-check them.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;

pub mod eisenstein;
pub mod epstein;
pub mod modforms;
pub mod moments;
pub mod rankin_selberg;
pub mod spectral;
pub mod symmetric_space;

pub use error::{Error, Result};
