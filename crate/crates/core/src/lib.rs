//! Variational quantum search on small statevector simulators.
//!
//! A search for a marked bit string `ω` is recast as ground-state search for an
//! all-Z "oracle" Hamiltonian whose unique minimum sits at `|ω⟩`. A shallow
//! real-amplitude circuit is tuned by a classical optimizer to minimize that
//! Hamiltonian's expectation, and the result is compared against textbook
//! Grover search on ideal and Pauli-noise simulators.
//!
//! Conventions used throughout the crate:
//! - qubit 0 is the least significant bit of a basis-state index;
//! - bit strings render qubit 0 first (leftmost character);
//! - `σ_z|0⟩ = −|0⟩` and `σ_z|1⟩ = +|1⟩`, see [`oracle::eigval`].

pub mod ansatz;
pub mod bench;
pub mod bitstring;
pub mod error;
pub mod grover;
pub mod noise;
pub mod optimize;
pub mod oracle;
pub mod seed;
pub mod statevector;

pub use bitstring::{BitString, Counts};
pub use error::{Error, Result};
