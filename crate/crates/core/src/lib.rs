//! Spectral numerics for interfacial capillary-gravity wave models.
//!
//! The crate is `no_std` and only needs an allocator. It covers the
//! Benjamin equation, the regularized (rBenjamin) family and the
//! one-dimensional Benjamin system:
//!
//! - [`spectral`]: periodic Fourier grid, transforms and multipliers;
//! - [`models`]: parameters, states and right-hand sides;
//! - [`solitary`]: Petviashvili iteration with minimal polynomial extrapolation;
//! - [`evolution`]: fourth-order symmetric time stepping and tail diagnostics;
//! - [`analysis`]: dispersion relations and phase-speed functions;
//! - [`invariants`]: conserved and quasi-conserved functionals.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod fft;
pub mod invariants;
pub mod models;
pub mod solitary;
pub mod spectral;

pub use error::{Error, Result};
pub use models::{ModelKind, ModelParams, State};
pub use spectral::{GridFunction, GridSpec, Multiplier};
