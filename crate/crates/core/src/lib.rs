//! Monte Carlo laboratory for the local convertibility of random bipartite
//! pure states.
//!
//! Spectra of Haar-random states are sampled through a tridiagonal chi
//! model ([`sampling`]), compared in the majorization order
//! ([`majorization`]), and aggregated into conversion probabilities,
//! distributions of Vidal's Π, persistence statistics and scaling collapses
//! ([`experiments`]). Closed-form laws live in [`analytic`].

pub mod analytic;
pub mod checks;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod fitstats;
pub mod majorization;
pub mod persistence;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use sampling::Spectrum;
