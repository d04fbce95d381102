//! Permutation-Hermite equivalence of integer matrices: exact normal forms,
//! the opposite-matrix duality, subset-indexed cokernel invariants, class
//! counting and density constants.

pub mod error;
pub mod exact_linalg;
pub mod structure;

pub use error::{Error, Result};
pub use exact_linalg::{AbelianGroup, IntMatrix, RatMatrix};
pub mod duality;
pub mod equivalence;
pub mod invariants;
pub mod counting;
pub mod density;
pub mod orbitlab;
