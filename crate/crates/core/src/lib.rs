//! Eulerian and Lagrangian solvers for the 1D-1V Vlasov-Poisson system with
//! quasi-Monte-Carlo sampling, a spectral-to-PIC handoff and phase-space
//! uniformity diagnostics.
//!
//! Module map:
//!
//! * [`model`]: domain geometry, initial conditions, gridded densities and particle ensembles
//! * [`lowdisc`]: pseudo-random and Sobol pairs, exact star discrepancy
//! * [`sampling`]: inverse transform sampling (tensor product and bilinear Rosenblatt)
//! * [`spectral`]: Fourier split-step Vlasov solver and Hardy-Krause variation
//! * [`pic`]: cubic B-spline particle-in-cell with the integrator family
//! * [`densest`]: density reconstruction from markers
//! * [`coupling`]: spectral to PIC handoff
//! * [`driver`]: configuration, file formats and the command line

pub mod coupling;
pub mod densest;
pub mod driver;
pub mod error;
pub mod lowdisc;
pub mod model;
pub mod par;
pub mod pic;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
