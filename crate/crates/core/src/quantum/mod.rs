//! Finite-dimensional state and operator arithmetic.

pub mod entropy;
pub mod linalg;
pub mod random;
pub mod state;

pub use entropy::{
    mutual_information, nats_to_bits, quantum_relative_entropy, von_neumann_entropy,
};
pub use linalg::{CMatrix, CVector, HermitianEigen};
pub use state::{partial_trace, tensor_product, DensityOperator, PureState, QuantumObject};
