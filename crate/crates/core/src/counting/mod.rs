//! Multiplicative-function engine, fixed-point counts S(pi)(d), the
//! brute-force class census and the closed-form class counts.

pub mod arith;
pub mod census;
pub mod fixed;
pub mod formulas;
pub mod printed;

pub use arith::{arith_eval, factorize, ArithFn};
pub use census::{ph_count_bruteforce, ClassCensus, OrbitRecord};
pub use fixed::{s_fixed, s_fixed_with, SFixedMode};
pub use formulas::{
    block2_counts, nonblock2_count, ph_count_3, ph_count_3_prime_square, ph_count_3_small_shapes,
    ph_count_3_squarefree, weakly_terminal_count, Block2Counts,
};
