//! Exact integer and rational matrix arithmetic.

mod hnf;
mod matrix;
mod rational;
pub mod small;
mod snf;

pub use hnf::{determinant, hnf, is_ns, rank, Hnf};
pub use matrix::{content, IntMatrix};
pub use rational::{rational_inverse, RatMatrix};
pub use snf::{cokernel, snf_diagonal, AbelianGroup, Cokernel};
