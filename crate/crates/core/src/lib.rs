//! Rumor and truth spreading on directed social networks.
//!
//! Every node is uncertain, rumor-spreading, quarantined or truth-believing.
//! The crate provides:
//!
//! - [`graph`]: spreading networks, random generators and rate parameters;
//! - [`ctmc`]: the exact continuous-time Markov chain, both as a forward
//!   equation on the joint state space and as Gillespie sample paths;
//! - [`dynamics`]: deterministic mean-field models (linear, generic and the
//!   simplified model without uncertain nodes);
//! - [`spectral`]: threshold matrices, spectral abscissae, the sufficient
//!   dying-out criteria, asymptotic bounds and rumor equilibria;
//! - [`harness`]: parameter sweeps comparing the linear model to ensembles.

pub mod ctmc;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod harness;
pub mod instances;
pub mod matrix;
pub mod ode;
pub mod seed;
pub mod spectral;
pub mod trajectory;

pub use error::{Error, Result};
pub use graph::{DirectedNetwork, ModelParams, RateLevels};
pub use matrix::Matrix;
pub use trajectory::{MarginalTrajectory, Trajectory};
