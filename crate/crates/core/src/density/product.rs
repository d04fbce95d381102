//! Truncated Euler products with an explicit tail bound.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::real::Real;
use crate::error::{Error, Result};

/// Factors are multiplied in chunks of this many primes; chunking does not
/// depend on the thread count, so the rounding is reproducible.
const CHUNK: usize = 4096;

/// Slack added to every bound for the fixed-point rounding (far below any
/// tail bound that matters).
const ROUNDING_SLACK: f64 = 1e-60;

/// Primes up to `n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// A value known up to `tail_bound`: the infinite product (or a quantity
/// derived from such products) lies in `value ± tail_bound`.
#[derive(Clone, Debug)]
pub struct PrimeProduct {
    pub label: String,
    pub p_max: u64,
    pub value: Real,
    pub tail_bound: f64,
}

impl PrimeProduct {
    pub fn exact(label: impl Into<String>, value: Real) -> Self {
        PrimeProduct { label: label.into(), p_max: 0, value, tail_bound: 0.0 }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn interval(&self) -> (f64, f64) {
        let v = self.to_f64();
        (v - self.tail_bound, v + self.tail_bound)
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn recip(&self) -> PrimeProduct {
        let v = self.value.to_f64().abs();
        let e = self.tail_bound;
        let bound = if e < v { e / (v * (v - e)) } else { f64::INFINITY };
        PrimeProduct {
            label: format!("1/{}", self.label),
            p_max: self.p_max,
            value: self.value.recip(),
            tail_bound: bound + ROUNDING_SLACK,
        }
    }

    pub fn mul(&self, o: &PrimeProduct) -> PrimeProduct {
        let (a, b) = (self.value.to_f64().abs(), o.value.to_f64().abs());
        let (ea, eb) = (self.tail_bound, o.tail_bound);
        PrimeProduct {
            label: format!("{}*{}", self.label, o.label),
            p_max: self.p_max.max(o.p_max),
            value: &self.value * &o.value,
            tail_bound: a * eb + b * ea + ea * eb + ROUNDING_SLACK,
        }
    }

    pub fn scale(&self, k: i64) -> PrimeProduct {
        PrimeProduct {
            label: format!("{k}*{}", self.label),
            p_max: self.p_max,
            value: &self.value * k,
            tail_bound: self.tail_bound * k.unsigned_abs() as f64,
        }
    }

    /// Integer linear combination; bounds add.
    pub fn combine(label: impl Into<String>, terms: &[(i64, &PrimeProduct)]) -> PrimeProduct {
        let mut value = Real::zero();
        let mut bound = 0.0;
        let mut p_max = 0;
        for (k, t) in terms {
            value = &value + &(&t.value * *k);
            bound += t.tail_bound * k.unsigned_abs() as f64;
            p_max = p_max.max(t.p_max);
        }
        PrimeProduct { label: label.into(), p_max, value, tail_bound: bound }
    }
}

impl Serialize for PrimeProduct {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            label: &'a str,
            p_max: u64,
            value: String,
            approx: f64,
            tail_bound: f64,
        }
        Out {
            label: &self.label,
            p_max: self.p_max,
            value: self.value.to_decimal(60),
            approx: self.to_f64(),
            tail_bound: self.tail_bound,
        }
        .serialize(s)
    }
}

/// `prod_{p <= p_max} factor(p)`. The caller promises `|factor(p) - 1| <= c/p^2`
/// for every prime `p > p_max`; the tail then changes the logarithm by at
/// most `c/(p_max - 1)` (up to the `1/(1 - c/p_max^2)` correction used below).
pub fn euler_product<F>(label: impl Into<String>, p_max: u64, c: f64, factor: F) -> Result<PrimeProduct>
where
    F: Fn(u64) -> Real + Sync,
{
    if p_max < 2 {
        return Err(Error::RangeError("prime cutoff must be at least 2".into()));
    }
    let primes = primes_up_to(p_max);
    let value = truncated(&primes, &factor);
    let pm = p_max as f64;
    let log_tail = if c == 0.0 { 0.0 } else { c / (pm - 1.0) / (1.0 - c / (pm * pm)).max(0.5) };
    let bound = value.to_f64().abs() * log_tail.exp_m1() + ROUNDING_SLACK;
    Ok(PrimeProduct { label: label.into(), p_max, value, tail_bound: bound })
}

fn truncated<F: Fn(u64) -> Real + Sync>(primes: &[u64], factor: &F) -> Real {
    let partial: Vec<Real> = primes
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().fold(Real::one(), |acc, &p| &acc * &factor(p)))
        .collect();
    partial.iter().fold(Real::one(), |acc, x| &acc * x)
}

pub(crate) fn big(x: u64) -> BigInt {
    BigInt::from(x)
}
