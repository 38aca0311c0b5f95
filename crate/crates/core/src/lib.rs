//! Quantitative limits of small quantum processors.
//!
//! * [`quantum`]: dense state and operator arithmetic, entropies.
//! * [`jc`]: damped Jaynes-Cummings dynamics of a trapped ion, with a
//!   numerical dephasing integrator that cross-checks the analytic solution.
//! * [`feasibility`]: spontaneous-emission budgets for ion-trap computation.
//! * [`swap`]: entanglement swapping on multiparticle cat states and the
//!   quantum telephone exchange.
//! * [`entanglement`]: relative entropy of entanglement, classical
//!   correlations, the axiom harness and the distillation bound.

pub mod entanglement;
pub mod error;
pub mod feasibility;
pub mod jc;
pub mod quantum;
pub mod swap;

pub use error::{Error, Result};
