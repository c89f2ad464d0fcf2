//! Quantum-time SIR epidemic model on the geometric grid t_n = q^n t0.
//!
//! The model advances susceptible/infected/removed fractions by a
//! q-difference scheme whose nonlocal term placement keeps every compartment
//! nonnegative and conserves the total population. Four views of the same
//! dynamics live here:
//!
//! * [`recurrence`] steps the explicit update equations one grid point at a
//!   time;
//! * [`exact`] evaluates the closed-form product solution at any grid index
//!   without stepping;
//! * [`continuum`] integrates the classical continuous-time system with RK4
//!   as the q -> 1 reference;
//! * [`analysis`] classifies equilibria, checks the per-index decay condition
//!   behind the convergence theorems, and estimates the susceptible limit.
//!
//! Shared types (parameters, states, trajectories, the grid) sit in
//! [`domain`] and are re-exported at the crate root.

pub mod analysis;
pub mod continuum;
pub mod domain;
mod error;
pub mod exact;
pub mod recurrence;

pub use domain::{grid_time, GridIndex, Params, SirState, Trajectory, TrajectoryRecord};
pub use error::ModelError;
