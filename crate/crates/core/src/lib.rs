//! Output quadrature squeezing of a cavity mode coupled to a second bosonic
//! mode through a time-modulated coupling.
//!
//! Two independent engines compute the same stationary spectra: a
//! frequency-domain input-output solver ([`freq`]) and a time-domain
//! Gaussian covariance engine ([`oracle`]).

// Threshold checks are written `!(x <= limit)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod export;
pub mod freq;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod params;
pub mod runner;
pub mod spectrum;

pub use error::{Error, Result};
