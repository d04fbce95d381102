//! Rank counts over F_p, truncated Euler products, F(s), the density
//! formulas and a Monte-Carlo sampler.

pub mod constants;
pub mod montecarlo;
pub mod poly;
pub mod product;
pub mod real;

pub use constants::{
    constants, d_sequence, deficiency_density, deficiency_local_factor, f_factor, forward_difference, f_constant, inverse_zeta, inverse_zeta_product, ns_density,
    tf_density_formula, tf_numerator, tf_numerator_substituted, zeta, ConstantsReport,
};
pub use montecarlo::{classify_sample, monte_carlo_tf_density, McReport, SampleClass};
pub use poly::{landsberg_count, maclaurin_truncation, maclaurin_truncation_n, QPolynomial};
pub use product::{euler_product, primes_up_to, PrimeProduct};
pub use real::Real;
