//! Quantum operations on finite-dimensional systems: superoperator algebra,
//! operator decompositions, reversal of operations on code subspaces,
//! entanglement-fidelity bounds and a nine-qubit code simulator.

pub mod channels;
pub mod cli;
pub mod entfid;
pub mod error;
pub mod formats;
pub mod linalg;
pub mod random;
pub mod reversal;
pub mod shorcode;
pub mod superop;

pub use channels::{DensityOperator, EnvironmentModel, QuantumOperation};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, C64};
pub use superop::{ReferenceFrame, Superoperator};
