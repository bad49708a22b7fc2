//! Ensemble samplers.

pub mod aberth;
pub mod eigen;
pub mod gaf;
pub mod ginibre;

pub use gaf::{sample_gaf, GafSample};
pub use ginibre::{sample_ginibre_eigen, sample_ginibre_mcmc_oracle, GinibreSample};
