#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod graphon;
pub mod hawkes_sim;
pub mod limit_solver;
pub mod longtime;
pub mod model;
pub mod par;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
