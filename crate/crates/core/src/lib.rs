//! Finite Ginibre and Gaussian-analytic-function zero ensembles, rigidity
//! estimators for the count and sum of points in a disk, and conditional
//! samplers for the points inside a disk given the points outside.

pub mod error;
pub mod experiments;
pub mod linstat;
pub mod logmath;
pub mod mcmc;
pub mod points;
pub mod powersums;
pub mod quadrature;
pub mod reconstruct;
pub mod rigidity;
pub mod rng;
pub mod samplers;
pub mod stats;
pub mod symfun;
pub mod testfns;
pub mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
