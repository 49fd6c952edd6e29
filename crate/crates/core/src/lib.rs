//! Max-min secrecy-rate optimization for IRS-assisted multi-pair two-way
//! communication.
//!
//! The crate is `no_std` (it needs `alloc`). It covers the whole numerical
//! pipeline for one channel realization:
//!
//! * [`geometry`] places users, the eavesdropper and the IRS,
//! * [`channel`] samples Rician channels and forms the cascaded vectors,
//! * [`rates`] evaluates information, leakage and secrecy rates, both in the
//!   phase-vector form and in the relaxed trace form,
//! * [`kernel`] holds the two interior-point solvers (a small complex SDP
//!   with smooth log constraints and a concave box problem),
//! * [`phase_opt`] and [`power_opt`] are the SCA and fractional-programming
//!   inner loops, [`ao`] alternates them and rounds the result to phases,
//! * [`baselines`] provides random-phase, no-IRS and exhaustive references,
//! * [`metrics`] has the fractional-increase bookkeeping used by all loops.
//!
//! File formats, the CLI and the Monte Carlo runner live in the `irsec` crate.
#![no_std]
#![cfg_attr(test, allow(unused_imports))]
// `!(x > 0.0)` is used on purpose so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ao;
pub mod baselines;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod params;
pub mod phase_opt;
pub mod power_opt;
pub mod rates;
pub mod seed;

pub use error::{Error, Result};
pub use num_complex::Complex64;
