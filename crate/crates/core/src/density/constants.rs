//! F(s), zeta products and the density formulas built from them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::poly::{maclaurin_truncation, maclaurin_truncation_n, QPolynomial};
use super::product::{big, euler_product, PrimeProduct};
use super::real::{Real, FRAC_BITS};
use crate::error::{Error, Result};

pub const DEFAULT_P_MAX: u64 = 100_000;

fn binom(n: u64, k: u64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// `1 - p^{-k}` as a fixed-point value.
fn one_minus_inv_pow(p: u64, k: u32) -> Real {
    let pk = big(p).pow(k);
    Real::from_ratio(&(&pk - 1), &pk)
}

/// `prod_{i=lo}^{hi} (1 - z^i)` with z = 1/p, in fixed point.
fn one_minus_powers(p: u64, lo: u32, hi: u32) -> Real {
    let z = Real::from_ratio(&BigInt::one(), &big(p));
    let mut zi = (1..lo).fold(z.clone(), |acc, _| &acc * &z);
    let mut out = Real::one();
    for _ in lo..=hi {
        out = &out * &(&Real::one() - &zi);
        zi = &zi * &z;
    }
    out
}

/// Horner evaluation of an integer-coefficient polynomial at 1/p.
fn eval_at_inverse(coeffs: &[Real], p: u64) -> Real {
    let z = Real::from_ratio(&BigInt::one(), &big(p));
    coeffs.iter().rev().fold(Real::zero(), |acc, c| &(&acc * &z) + c)
}

/// Exponent beyond which `p^{-i}` is invisible at the working precision.
fn negligible_exponent(p: u64) -> u32 {
    (FRAC_BITS + 8) / (63 - p.leading_zeros()).max(1) + 1
}

/// f_s(1/p) = 1 - (p^{s-1} - (p-1)^{s-1}) / p^s.
pub fn f_factor(s: u32, p: u64) -> BigRational {
    let (num, den) = f_factor_parts(s, p);
    BigRational::new(num, den)
}

fn f_factor_parts(s: u32, p: u64) -> (BigInt, BigInt) {
    let (pb, qb) = (big(p), big(p - 1));
    if s == 0 {
        let den = &pb * &qb;
        return (&den + 1, den);
    }
    let den = pb.pow(s);
    (&den - pb.pow(s - 1) + qb.pow(s - 1), den)
}

/// F(s) = prod_p f_s(1/p).
pub fn f_constant(s: u32, p_max: u64) -> Result<PrimeProduct> {
    // |f_s(1/p) - 1| <= (s-1)/p^2 for s >= 2, <= 2/p^2 for s = 0, and f_1 = 1
    let c = match s {
        0 => 2.0,
        1 => 0.0,
        _ => (s - 1) as f64,
    };
    euler_product(format!("F({s})"), p_max, c, |p| {
        let (num, den) = f_factor_parts(s, p);
        Real::from_ratio(&num, &den)
    })
}

/// 1/zeta(k) = prod_p (1 - p^{-k}).
pub fn inverse_zeta(k: u32, p_max: u64) -> Result<PrimeProduct> {
    if k < 2 {
        return Err(Error::RangeError("zeta(k) needs k >= 2".into()));
    }
    euler_product(format!("1/zeta({k})"), p_max, 1.0, |p| one_minus_inv_pow(p, k))
}

pub fn zeta(k: u32, p_max: u64) -> Result<PrimeProduct> {
    Ok(inverse_zeta(k, p_max)?.recip().relabel(format!("zeta({k})")))
}

/// `prod_p prod_{i=lo}^{hi} (1 - p^{-i})`, `hi = None` for the infinite product.
fn inverse_zeta_range(lo: u32, hi: Option<u32>, p_max: u64) -> Result<PrimeProduct> {
    if lo < 2 {
        return Err(Error::RangeError("zeta(k) needs k >= 2".into()));
    }
    let label = match hi {
        Some(h) => format!("1/(zeta({lo})...zeta({h}))"),
        None => format!("1/prod_{{k>={lo}}} zeta(k)"),
    };
    // sum_{i >= lo} p^{-i} <= 2 p^{-lo} <= 2/p^2
    euler_product(label, p_max, 2.0, |p| {
        let top = hi.unwrap_or(u32::MAX).min(negligible_exponent(p)).max(lo);
        one_minus_powers(p, lo, top)
    })
}

/// 1 / (zeta(2) zeta(3) ... zeta(n)).
pub fn inverse_zeta_product(n: u32, p_max: u64) -> Result<PrimeProduct> {
    inverse_zeta_range(2, Some(n), p_max)
}

/// 1 / prod_{k >= 2} zeta(k).
pub fn inverse_zeta_product_limit(p_max: u64) -> Result<PrimeProduct> {
    inverse_zeta_range(2, None, p_max)
}

/// Density of NS_n (every column primitive): `1/zeta(n)^n`.
pub fn ns_density(n: u32, p_max: u64) -> Result<PrimeProduct> {
    if n < 2 {
        return Err(Error::RangeError("n must be at least 2".into()));
    }
    euler_product(format!("1/zeta({n})^{n}"), p_max, n as f64, |p| {
        let f = one_minus_inv_pow(p, n);
        (1..n).fold(f.clone(), |acc, _| &acc * &f)
    })
}

/// Density of matrices with deficiency at most s modulo every prime:
/// `prod_p a_s(1/p) prod_{i=(s+1)^2}^{n} (1 - p^{-i})`. `n = None` is the
/// n -> infinity limit; for finite n the n-dependent truncation is used,
/// which gives the exact local factor.
pub fn deficiency_density(n: Option<u32>, s: u32, p_max: u64) -> Result<PrimeProduct> {
    if s == 0 {
        return Err(Error::RangeError("s must be at least 1".into()));
    }
    let k = (s + 1) * (s + 1);
    let a: QPolynomial = match n {
        None => maclaurin_truncation(s as usize)?,
        Some(n) if n > k + 1 => maclaurin_truncation_n(s as usize, n as usize)?,
        Some(n) => return Err(Error::RangeError(format!("need n > (s+1)^2 + 1, got n = {n}, s = {s}"))),
    };
    // a_s(z) - 1 has no terms below z^{k+2}, so |a_s(1/p) - 1| <= |a_s|_1 p^{-k} for p > p_max
    let a_norm = a.l1_norm().to_f64().unwrap_or(f64::INFINITY);
    let c = a_norm / (p_max as f64).powi(k as i32 - 2) + 2.0 / (p_max as f64).powi(k as i32 - 2);
    let label = match n {
        Some(n) => format!("deficiency<={s} density, n={n}"),
        None => format!("deficiency<={s} density, n->inf"),
    };
    let coeffs: Vec<Real> = a.coeffs().iter().map(Real::from_rational).collect();
    euler_product(label, p_max, c, |p| {
        let top = n.unwrap_or(u32::MAX).min(negligible_exponent(p).max(k));
        &eval_at_inverse(&coeffs, p) * &one_minus_powers(p, k, top)
    })
}

/// The local factor of [`deficiency_density`] at p, exactly.
pub fn deficiency_local_factor(n: u32, s: u32, p: u64) -> Result<BigRational> {
    let k = (s + 1) * (s + 1);
    if s == 0 || n <= k + 1 {
        return Err(Error::RangeError(format!("need s >= 1 and n > (s+1)^2 + 1, got n = {n}, s = {s}")));
    }
    let z = BigRational::new(BigInt::one(), big(p));
    let a = maclaurin_truncation_n(s as usize, n as usize)?.eval(&z);
    Ok((k..=n).fold(a, |acc, i| acc * (BigRational::one() - z.pow(i as i32))))
}

/// Numerator of the inclusion-exclusion density, term by term exactly as
/// `n/zeta(n) - C(n,2)/zeta(2) + sum_{j=3}^n (-1)^{j-1} C(n,j) F(j)`.
pub fn tf_numerator(n: u32, p_max: u64) -> Result<PrimeProduct> {
    if n < 3 {
        return Err(Error::RangeError("n must be at least 3".into()));
    }
    let nn = n as u64;
    let first = inverse_zeta(n, p_max)?;
    let second = inverse_zeta(2, p_max)?;
    let fs: Vec<PrimeProduct> = (3..=n).map(|j| f_constant(j, p_max)).collect::<Result<_>>()?;
    let mut terms: Vec<(i64, &PrimeProduct)> = vec![(nn as i64, &first), (-binom(nn, 2), &second)];
    for (j, f) in (3..=nn).zip(&fs) {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        terms.push((sign * binom(nn, j), f));
    }
    Ok(PrimeProduct::combine(format!("numerator(n={n})"), &terms))
}

/// Density of NS_n matrices that have a terminal form with 1-block size at
/// least n - 1: the numerator above over zeta(2) ... zeta(n).
pub fn tf_density_formula(n: u32, p_max: u64) -> Result<PrimeProduct> {
    let num = tf_numerator(n, p_max)?;
    let inv = inverse_zeta_product(n, p_max)?;
    Ok(num.mul(&inv).relabel(format!("tf density(n={n})")))
}

/// Numerator with F(1) in place of 1/zeta(n): `F(0) - D(n)`.
pub fn tf_numerator_substituted(n: u32, p_max: u64) -> Result<PrimeProduct> {
    let nn = n as u64;
    let fs: Vec<PrimeProduct> = (1..=n).map(|j| f_constant(j, p_max)).collect::<Result<_>>()?;
    let terms: Vec<(i64, &PrimeProduct)> = (1..=nn)
        .zip(&fs)
        .map(|(j, f)| (if j % 2 == 1 { 1 } else { -1 } * binom(nn, j), f))
        .collect();
    Ok(PrimeProduct::combine(format!("substituted numerator(n={n})"), &terms))
}

/// Truncated values `F_P(0..=top)` over the same primes.
pub fn f_truncated(top: u32, p_max: u64) -> Result<Vec<Real>> {
    (0..=top).map(|s| f_constant(s, p_max).map(|f| f.value)).collect()
}

/// `D(n) = sum_i (-1)^i C(n,i) F(i)` for n = 0..=n_max, all from the same
/// truncated products so the cancellation is exact at the working precision.
pub fn d_sequence(n_max: u32, p_max: u64) -> Result<Vec<Real>> {
    let f = f_truncated(n_max, p_max)?;
    Ok((0..=n_max as u64)
        .map(|n| {
            (0..=n).fold(Real::zero(), |acc, i| {
                let t = &f[i as usize] * &BigInt::from(binom(n, i));
                if i % 2 == 0 {
                    &acc + &t
                } else {
                    &acc - &t
                }
            })
        })
        .collect())
}

/// `Delta^j g(k)` for a sequence given on 0..len.
pub fn forward_difference(g: &[Real], j: usize, k: usize) -> Real {
    (0..=j).fold(Real::zero(), |acc, i| {
        let t = &g[k + i] * &BigInt::from(binom(j as u64, i as u64));
        if (j - i) % 2 == 0 {
            &acc + &t
        } else {
            &acc - &t
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsReport {
    pub p_max: u64,
    pub f: Vec<PrimeProduct>,
    pub landau_totient: PrimeProduct,
    pub carefree: PrimeProduct,
    pub inverse_zeta_product_limit: PrimeProduct,
    pub zeta_product_limit: PrimeProduct,
    pub deficiency_one_limit: PrimeProduct,
}

/// F(0..=8), the Landau totient and carefree constants, prod zeta(k), and
/// the s = 1 deficiency limit.
pub fn constants(p_max: u64) -> Result<ConstantsReport> {
    let f: Vec<PrimeProduct> = (0..=8).map(|s| f_constant(s, p_max)).collect::<Result<_>>()?;
    let inv = inverse_zeta_product_limit(p_max)?;
    Ok(ConstantsReport {
        p_max,
        landau_totient: f[0].clone().relabel("Landau totient"),
        carefree: f[3].clone().relabel("carefree"),
        zeta_product_limit: inv.recip().relabel("prod_{k>=2} zeta(k)"),
        inverse_zeta_product_limit: inv,
        deficiency_one_limit: deficiency_density(None, 1, p_max)?,
        f,
    })
}
