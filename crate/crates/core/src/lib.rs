//! Estimators for testing weak-form market efficiency on price series:
//! Hurst exponents, the BDS test, embedding diagnostics, maximal Lyapunov
//! exponents, GARCH-family volatility, Tsallis entropy and concentration.

pub mod bds;
pub mod embedding;
pub mod entropy;
pub mod error;
pub mod hurst;
pub mod lyapunov;
pub mod market;
pub mod optim;
pub mod pipeline;
pub mod regress;
pub mod report;
pub mod series;
pub mod spectral;
pub mod stats;
pub mod synth;
pub mod volatility;

pub use error::{Error, Result};
