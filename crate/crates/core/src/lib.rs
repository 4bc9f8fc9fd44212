pub mod bits;
pub mod circuit;
pub mod dense;
pub mod error;
pub mod exact;
pub mod group;
pub mod pauli;
pub mod povm;
pub mod fixtures;
pub mod search;

pub use error::{Error, Result};
pub use pauli::{pauli, Letter, PauliString, ProjectivePauli};
