//! Closed-loop simulation of production-induced seismicity.
//!
//! The physics chain is pore-pressure diffusion on a masked reservoir grid,
//! a Dieterich-type seismicity-rate field driven by the pressure rate, and a
//! non-homogeneous Poisson catalog drawn from that field. A sampled-data
//! super-twisting controller reads event counts and commands well fluxes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod calendar;
pub mod catalog;
pub mod control;
pub mod dataset;
pub mod diffusion;
pub mod error;
pub mod grid;
pub mod rng;
pub mod scenario;
pub mod seismicity;
pub mod solver;
pub mod units;
pub mod wells;

pub use error::{Error, Result};
