#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod gas;
pub mod harness;
pub mod kinetic;
pub mod numerics;
pub mod par;
pub mod profiles;
pub mod riemann;

pub use error::{Error, Result};
pub use gas::GasState;
