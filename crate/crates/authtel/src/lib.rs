//! Self-testing constants, finite-statistics fidelity certificates and protocol
//! simulation for one-sided and fully device-independent authenticated teleportation.
//!
//! Modules, bottom-up:
//! - [`qcore`]: two-qubit states, measurement models, the SWAP isometry, teleportation.
//! - [`npa`]: operator words, moment matrices and the fidelity functionals.
//! - [`sdp`]: a dense primal-dual interior-point solver and the α re-derivation driver.
//! - [`cert`]: Chernoff/Azuma certificates, copy counts and the inverse planner.
//! - [`protosim`]: Monte Carlo runs of the authentication protocol.

pub mod cert;
pub mod npa;
pub mod protosim;
pub mod qcore;
pub mod sdp;

mod setting;

pub use setting::{Inequality, ParseSettingError, Trust};

/// Version string embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
