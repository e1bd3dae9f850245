//! Shock development for a barotropic relativistic fluid in spherical symmetry.
//!
//! The crate is layered bottom-up:
//!
//! - [`eos`]: barotropic equations of state and derived thermodynamics
//! - [`state`]: Riemann invariants, characteristic speeds, sources, stress
//! - [`jump`]: jump function, root solve behind the shock, shock speed
//! - [`state_ahead`]: polynomial model of the flow ahead of the shock near the cusp
//! - [`fixed_bvp`]: characteristic solver on the triangle for given shock data
//! - [`free_boundary`]: outer iteration locating the shock
//! - [`harness`]: configuration, fits, checks and the diagnostics report

// Negated comparisons are used on purpose so that NaN is rejected. Grid
// loops index several parallel arrays by node number.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod eos;
pub mod error;
pub mod fixed_bvp;
pub mod free_boundary;
pub mod harness;
pub mod jump;
pub mod numerics;
pub mod state;
pub mod state_ahead;

pub use error::{Error, Result};
