//! Exact polynomials over Q in one variable z, and the rank-count series.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Coefficients in ascending degree, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPolynomial {
    coeffs: Vec<BigRational>,
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl QPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPolynomial { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        QPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_ints(&[1])
    }

    /// c z^k
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// 1 - z^k
    pub fn one_minus_z_pow(k: usize) -> Self {
        &Self::one() - &Self::monomial(q(1), k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Terms of degree <= k.
    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().take(k + 1).cloned().collect())
    }

    pub fn eval(&self, z: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * z + c)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigRational {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Quotient and remainder by long division.
    pub fn div_rem(&self, d: &QPolynomial) -> Result<(QPolynomial, QPolynomial)> {
        if d.is_zero() {
            return Err(Error::RangeError("division by the zero polynomial".into()));
        }
        let dl = d.coeffs.len();
        let lead = d.coeffs[dl - 1].clone();
        let mut r = self.coeffs.clone();
        if r.len() < dl {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quo = vec![BigRational::zero(); r.len() - dl + 1];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dl - 1] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            quo[k] = c;
        }
        Ok((Self::new(quo), Self::new(r)))
    }

    /// Division that must be exact.
    pub fn div_exact(&self, d: &QPolynomial) -> Result<QPolynomial> {
        let (quo, rem) = self.div_rem(d)?;
        if rem.is_zero() {
            Ok(quo)
        } else {
            Err(Error::NotApplicable("polynomial division is not exact".into()))
        }
    }
}

impl Add for &QPolynomial {
    type Output = QPolynomial;
    fn add(self, o: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPolynomial::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &QPolynomial {
    type Output = QPolynomial;
    fn sub(self, o: &QPolynomial) -> QPolynomial {
        self + &(-o)
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        QPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &QPolynomial {
    type Output = QPolynomial;
    fn mul(self, o: &QPolynomial) -> QPolynomial {
        if self.is_zero() || o.is_zero() {
            return QPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPolynomial::new(out)
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                _ => {}
            }
            let mag = if a.is_integer() { a.to_integer().to_string() } else { format!("({a})") };
            match k {
                0 => f.write_str(&mag)?,
                _ => {
                    if !a.is_one() {
                        f.write_str(&mag)?;
                    }
                    if k == 1 {
                        f.write_str("z")?
                    } else {
                        write!(f, "z^{k}")?
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for QPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

fn prod_one_minus(range: impl Iterator<Item = usize>) -> QPolynomial {
    range.fold(QPolynomial::one(), |acc, i| &acc * &QPolynomial::one_minus_z_pow(i))
}

/// Number of n x n matrices over F_p of rank n - s.
pub fn landsberg_count(n: usize, s: usize, p: u64) -> Result<BigInt> {
    if s > n {
        return Err(Error::RangeError(format!("s = {s} exceeds n = {n}")));
    }
    if !crate::counting::arith::is_prime(p) {
        return Err(Error::RangeError(format!("{p} is not prime")));
    }
    let pb = BigInt::from(p);
    let r = n - s;
    let pn = pb.pow(n as u32);
    let pr = pb.pow(r as u32);
    let num: BigInt = (0..r).map(|i| &pn - pb.pow(i as u32)).product();
    let den: BigInt = (0..r).map(|i| &pr - pb.pow(i as u32)).product();
    Ok(&num * &num / den)
}

/// c_j(z) for the rank count of deficiency j, as numerator and denominator.
/// With `n` given, the numerator carries `(1 - z^n) ... (1 - z^{n-j+1})`.
fn c_term(j: usize, n: Option<usize>) -> (QPolynomial, QPolynomial) {
    let mut num = QPolynomial::monomial(q(1), j * j);
    if let Some(n) = n {
        num = &num * &prod_one_minus((n + 1 - j)..=n);
    }
    let den = prod_one_minus(1..=j).pow(2);
    (num, den)
}

/// `sum_{j <= s} c_j(z)` over the common denominator `prod_{i<=s}(1 - z^i)^2`.
fn truncated_sum(s: usize, n: Option<usize>) -> (QPolynomial, QPolynomial) {
    let common = prod_one_minus(1..=s).pow(2);
    let mut num = QPolynomial::zero();
    for j in 0..=s {
        let (cn, _) = c_term(j, n);
        let cofactor = prod_one_minus((j + 1)..=s).pow(2);
        num = &num + &(&cn * &cofactor);
    }
    (num, common)
}

fn truncation(s: usize, n: Option<usize>) -> Result<QPolynomial> {
    if s == 0 {
        return Err(Error::RangeError("s must be at least 1".into()));
    }
    let left = prod_one_minus(1..(s + 1) * (s + 1));
    let (num, den) = truncated_sum(s, n);
    (&left * &num).div_exact(&den)
}

/// `a_s(z) = prod_{i < (s+1)^2} (1 - z^i) * (1 + sum_{1<=j<=s} z^{j^2} / prod_{i<=j}(1 - z^i)^2)`,
/// a polynomial.
pub fn maclaurin_truncation(s: usize) -> Result<QPolynomial> {
    truncation(s, None)
}

/// Same with the n-dependent terms `c_j` that carry `(1 - z^n) ... (1 - z^{n-j+1})`.
pub fn maclaurin_truncation_n(s: usize, n: usize) -> Result<QPolynomial> {
    if n <= (s + 1) * (s + 1) + 1 {
        return Err(Error::RangeError(format!("need n > (s+1)^2 + 1, got n = {n}, s = {s}")));
    }
    truncation(s, Some(n))
}

/// `prod_{i=1}^n (1 - z^i) * sum_{j=0}^n c_j(z)`; identically 1 because the
/// normalized rank counts add up to 1.
pub fn rank_count_identity(n: usize) -> Result<QPolynomial> {
    let (num, den) = truncated_sum(n, Some(n));
    (&prod_one_minus(1..=n) * &num).div_exact(&den)
}

/// `C_s / p^{n^2}` from the series: `prod_{i=1}^n (1 - z^i) c_s(z)` at z = 1/p.
pub fn normalized_rank_count(n: usize, s: usize, p: u64) -> BigRational {
    let z = BigRational::new(BigInt::one(), BigInt::from(p));
    let (num, den) = c_term(s, Some(n));
    prod_one_minus(1..=n).eval(&z) * num.eval(&z) / den.eval(&z)
}
