//! Satellite orbit determination under GPS dropout.
//!
//! The toolkit covers the classical estimation pipeline end to end:
//!
//! - [`dynamics`] — Cowell propagation (two-body + J2 + drag) with RK4 and
//!   adaptive RKF45 integrators, plus finite-difference state-transition
//!   Jacobians.
//! - [`iod`] — initial orbit determination: WGS84 geodetic conversion,
//!   three-sphere trilateration, and the Gibbs method.
//! - [`filters`] — three estimators over the same dynamics: the extended
//!   Kalman filter, the EKF holding its last GPS fix through contact gaps
//!   (EKFFG), and pure Cowell prediction.
//! - [`measurements`] — truth simulation, seeded GPS measurement synthesis,
//!   and dropout scheduling.
//! - [`harness`] — scenario files, Monte-Carlo runs with RMSE aggregates,
//!   external-prediction scoring, and dropout sweeps.
//!
//! Internal units are km, km/s, and seconds; epochs are scenario-relative.
//! Every stochastic path is driven by ChaCha8 with documented seed
//! derivation, so identical inputs reproduce identical outputs bit for bit.
//!
//! The `examples/` directory walks through each capability; the `orbitdet`
//! binary exposes the same machinery as `simulate`, `iod`, `score`, and
//! `sweep` subcommands.

pub mod constants;
pub mod dynamics;
pub mod elements;
pub mod filters;
pub mod frames;
pub mod harness;
pub mod iod;
pub mod measurements;
pub mod state;

pub use state::{Covariance6, Epoch, Frame, StateVector, Vec3};
