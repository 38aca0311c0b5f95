//! Entanglement swapping on products of multiparticle cat states.
//!
//! A cat on `n` qubits is `(|u> ± |u^c>)/sqrt(2)`. Measuring `p` particles
//! drawn from several cats in the `p`-particle cat basis leaves the unmeasured
//! particles of those cats in a single cat. [`enumerate_outcomes`] computes
//! the outcome table symbolically; [`brute_force_oracle`] does the same with
//! dense state vectors for cross-checking.

mod cat;
mod engine;
mod exchange;
mod oracle;
mod scenario;

pub use cat::{make_bell, CatCollection, CatState, MeasurementSpec, ParticleId, Sign};
pub use engine::{enumerate_outcomes, polygon_counts, project_outcome, SwapOutcome};
pub use exchange::{telephone_exchange, ExchangeResult, TelephoneExchange, UserLink, EXCHANGE_OWNER};
pub use oracle::{
    brute_force_oracle, compare_with_oracle, symbolic_residual_state, DenseOutcome, OracleComparison,
    ORACLE_PARTICLE_LIMIT,
};
pub use scenario::{random_scenario, CatSpec, OutcomeRecord, Scenario};
