//! Closed-form class counts for n = 3.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::arith::{self, factorize, m, p_fn, phi, weakly_terminal_fn};
use super::fixed::s132;
use crate::error::{Error, Result};

/// F(n, d), the number of weakly terminal n x n matrices of determinant d.
pub fn weakly_terminal_count(n: usize, d: u64) -> Result<BigInt> {
    if d == 0 {
        return Err(Error::RangeError("d must be positive".into()));
    }
    weakly_terminal_fn(n).eval(d)
}

fn exact_div(num: BigInt, den: i64, what: &str) -> BigInt {
    let (q, r) = num.div_rem(&BigInt::from(den));
    assert!(r.is_zero(), "{what}: {num} not divisible by {den}");
    q
}

/// PH classes for n = 3 by Burnside: `(F + 3 S(23) + 2 S(132)) / 6` with
/// `S(23) = (P * M)(d)`.
pub fn ph_count_3(d: u64) -> Result<BigInt> {
    if d == 0 {
        return Err(Error::RangeError("d must be positive".into()));
    }
    let f = weakly_terminal_count(3, d)?;
    let s23 = p_fn().convolve(&m()).eval(d)?;
    let s132 = s132(d)?;
    Ok(exact_div(f + 3 * s23 + 2 * s132, 6, "Burnside sum"))
}

/// Square-free closed form
/// `(d phi(d) prod(1 + 2/p) + 3 d prod_{p odd}(1 + 1/p) + 2 * 3^{w'(d)}) / 6`.
pub fn ph_count_3_squarefree(d: u64) -> Result<BigInt> {
    let primes = squarefree_primes(d)?;
    let phi_d: BigInt = primes.iter().map(|&p| BigInt::from(p - 1)).product();
    let first: BigInt = &phi_d * primes.iter().map(|&p| BigInt::from(p + 2)).product::<BigInt>();
    let middle: BigInt = primes.iter().map(|&p| BigInt::from(if p == 2 { 2 } else { p + 1 })).product();
    let last = BigInt::from(3u64.pow(arith::w_prime(d)?));
    Ok(exact_div(first + 3 * middle + 2 * last, 6, "square-free formula"))
}

fn squarefree_primes(d: u64) -> Result<Vec<u64>> {
    let fac = factorize(d)?;
    if fac.iter().any(|&(_, m)| m > 1) {
        return Err(Error::NotSquareFree(d));
    }
    Ok(fac.into_iter().map(|(p, _)| p).collect())
}

/// Closed forms for d = p, 2p, pq with p, q distinct odd primes. `None` for
/// other shapes, including d = 2 where the d = p expression is not integral.
pub fn ph_count_3_small_shapes(d: u64) -> Result<Option<BigInt>> {
    let fac = factorize(d)?;
    let wp = BigInt::from(3u64.pow(arith::w_prime(d)?));
    let big = |x: u64| BigInt::from(x);
    Ok(match fac[..] {
        [(p, 1)] if p != 2 => Some(exact_div(big(p * p + 4 * p + 1) + 2 * wp, 6, "d = p")),
        [(2, 1), (p, 1)] if p != 2 => Some(exact_div(big(2 * p * p + 5 * p) - 1 + wp, 3, "d = 2p")),
        [(p, 1), (q, 1)] if p != 2 => {
            let ph = big((p - 1) * (q - 1));
            let dd = big(d);
            let t = &ph * (3 * &dd - 2 * &ph + 3) + 2 * wp;
            Some(exact_div(t, 6, "d = pq") + dd + 1)
        }
        _ => None,
    })
}

/// Closed form for d = p^2: 7 at p = 2, otherwise
/// `(p^4 + p^3 + 2p^2 + p + 1 + 2 * 3^{w'(d)} (1 + 3^{w''(d)})) / 6`.
pub fn ph_count_3_prime_square(p: u64) -> Result<BigInt> {
    if !arith::is_prime(p) {
        return Err(Error::RangeError(format!("{p} is not prime")));
    }
    if p == 2 {
        return Ok(BigInt::from(7));
    }
    let d = p * p;
    let pb = BigInt::from(p);
    let poly = pb.pow(4) + pb.pow(3) + 2 * pb.pow(2) + &pb + 1;
    let wp = BigInt::from(3u64.pow(arith::w_prime(d)?));
    let wpp = BigInt::from(3u64.pow(arith::w_second(d)));
    Ok(exact_div(poly + 2 * wp * (1 + wpp), 6, "d = p^2"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block2Counts {
    pub case1: BigInt,
    pub case2: BigInt,
    pub case3: BigInt,
}

impl Block2Counts {
    pub fn total(&self) -> BigInt {
        &self.case1 + &self.case2 + &self.case3
    }
}

/// Classes of n = 3 with a terminal form of 1-block size two, split by how
/// many of the last-column entries a_1, a_2 are units mod d (2, 1, 0).
pub fn block2_counts(d: u64) -> Result<Block2Counts> {
    if d < 2 {
        return Err(Error::RangeError("block-two counts need d > 1".into()));
    }
    let fac = factorize(d)?;
    let ph = phi().eval_factored(&fac);
    let dd = BigInt::from(d);
    let n3 = BigInt::from(3u64.pow(arith::w_prime(d)? + arith::w_second(d)));
    let case1 = exact_div(&ph * &ph + 3 * &ph + 2 * n3, 6, "case 1");
    let case2 = exact_div(&ph * (&dd - &ph - 1) + m().eval_factored(&fac), 2, "case 2");
    // d prod(1 + 1/p) = (d / rad) prod(p + 1); d prod(1 - 1/p) = phi(d)
    let rad: u64 = fac.iter().map(|&(p, _)| p).product();
    let up = BigInt::from(d / rad) * fac.iter().map(|&(p, _)| BigInt::from(p + 1)).product::<BigInt>();
    let case3 = exact_div(&ph * (up - 2 * &dd + &ph), 2, "case 3");
    Ok(Block2Counts { case1, case2, case3 })
}

/// Classes with no terminal form of 1-block size two, square-free d:
/// `phi(d) * Delta^3 f(-1) / 6` with `f(x) = prod_{p | d} (x + p)`.
pub fn nonblock2_count(d: u64) -> Result<BigInt> {
    let primes = squarefree_primes(d)?;
    let f = |x: i64| -> BigInt { primes.iter().map(|&p| BigInt::from(x + p as i64)).product() };
    let delta3 = f(2) - 3 * f(1) + 3 * f(0) - f(-1);
    let ph: BigInt = primes.iter().map(|&p| BigInt::from(p - 1)).product();
    Ok(exact_div(ph * delta3, 6, "nonblock-two count"))
}

/// Bounds `F(3,d)/6 * (1 + 3(1-eps)/d)` and `F(3,d)/6 * (1 + 3 zeta(2)/d + 6/d^1.5)`.
pub fn sandwich_bounds(d: u64, eps: f64) -> Result<(f64, f64)> {
    let f = weakly_terminal_count(3, d)?;
    let base = f.to_f64().expect("finite") / 6.0;
    let df = d as f64;
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    Ok((base * (1.0 + 3.0 * (1.0 - eps) / df), base * (1.0 + 3.0 * zeta2 / df + 6.0 / df.powf(1.5))))
}
