//! Simulation and verification laboratory for depth-`k` polynomial GNN
//! features on contextual stochastic block models (CSBMs).
//!
//! The crate samples CSBMs, computes `k`-hop aggregated features `A^k X`,
//! measures the signal-to-noise ratio of class separation, and verifies
//! quantitative statements about that ratio at desk scale: exact
//! combinatorial oracles (walk enumeration) where feasible, Monte Carlo
//! elsewhere.
//!
//! Module map:
//! - [`csbm`]: the generative model, deterministic labels, graph/feature
//!   samplers, assumption checking.
//! - [`linalg`]: sparse and block linear algebra (adjacency powers, operator
//!   norms) and deterministic matrix-perturbation checks.
//! - [`walks`]: exact combinatorics engine for walks and walk sequences;
//!   counting lemmas, moment decompositions, and their census tables.
//! - [`features`]: aggregated features, population centers, SNR, and the
//!   linear classifier.
//! - [`bounds`]: theorem-level inequality checks with explicit constants and
//!   growth-condition preflights.

pub mod bounds;
pub mod csbm;
pub mod features;
pub mod linalg;
pub mod rng;
pub mod walks;

mod error;

pub use error::{Error, Result};
