//! Ground states of the coupled Choquard system
//!
//! ```text
//! −Δu + A(x) u = 2p/(p+q) (I_α ∗ |v|^q) |u|^{p−2} u
//! −Δv + B(x) v = 2q/(p+q) (I_α ∗ |u|^p) |v|^{q−2} v
//! ```
//!
//! discretized on a periodic spectral grid. The action functional is
//! minimized over the Nehari manifold by a preconditioned projected gradient
//! flow ([`nehari`]); [`verify`] turns the identities and inequalities the
//! variational argument relies on into reproducible numerical checks.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod grid;
pub mod nehari;
pub mod par;
pub mod potentials;
pub mod random;
pub mod riesz;
pub mod verify;

pub use energy::{EnergyReport, FiberMap, Pair, ProblemSpec};
pub use error::{Error, Result};
pub use grid::{Field, GridSpec, Spectrum};
pub use nehari::{SolveResult, SolverConfig};
pub use potentials::{PotentialField, PotentialSpec};
pub use riesz::{KernelPolicy, RieszOperator};
pub use verify::CheckReport;
