//! Multiplicative arithmetic functions evaluated through their values on
//! prime powers.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest argument accepted by [`factorize`]. Trial division up to the
/// square root (10^6) is then complete.
pub const FACTORIZATION_LIMIT: u64 = 1_000_000_000_000;

/// Prime factorization `[(p, m)]` with p increasing.
pub fn factorize(d: u64) -> Result<Vec<(u64, u32)>> {
    if d == 0 {
        return Err(Error::RangeError("cannot factor 0".into()));
    }
    if d > FACTORIZATION_LIMIT {
        return Err(Error::FactorizationLimit(d));
    }
    let mut out = Vec::new();
    let mut rest = d;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut m = 0;
            while rest % p == 0 {
                rest /= p;
                m += 1;
            }
            out.push((p, m));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(out)
}

pub fn is_square_free(d: u64) -> Result<bool> {
    Ok(factorize(d)?.iter().all(|&(_, m)| m == 1))
}

/// Distinct prime divisors.
pub fn radical_primes(d: u64) -> Result<Vec<u64>> {
    Ok(factorize(d)?.into_iter().map(|(p, _)| p).collect())
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).map(|f| f == [(n, 1)]).unwrap_or(false)
}

/// Number of distinct prime divisors.
pub fn w(d: u64) -> Result<u32> {
    Ok(factorize(d)?.len() as u32)
}

/// Number of distinct prime divisors congruent to 1 mod 3.
pub fn w_prime(d: u64) -> Result<u32> {
    Ok(factorize(d)?.iter().filter(|(p, _)| p % 3 == 1).count() as u32)
}

/// 1 if 9 divides d, else 0.
pub fn w_second(d: u64) -> u32 {
    u32::from(d % 9 == 0)
}

/// 1 for odd t, 2 for even t.
pub fn h(t: u32) -> u32 {
    if t % 2 == 0 {
        2
    } else {
        1
    }
}

fn pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

type Eval = dyn Fn(u64, u32) -> BigInt + Send + Sync;

struct Inner {
    eval: Box<Eval>,
    memo: RwLock<HashMap<(u64, u32), BigInt>>,
}

/// A multiplicative function, determined by `f(p^m)`. Values on prime
/// powers are memoised; the cache is shared between clones.
#[derive(Clone)]
pub struct ArithFn {
    name: String,
    inner: Arc<Inner>,
}

impl fmt::Debug for ArithFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ArithFn({})", self.name)
    }
}

impl ArithFn {
    pub fn new(name: impl Into<String>, eval: impl Fn(u64, u32) -> BigInt + Send + Sync + 'static) -> Self {
        ArithFn {
            name: name.into(),
            inner: Arc::new(Inner { eval: Box::new(eval), memo: RwLock::new(HashMap::new()) }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `f(p^m)`; `f(1) = 1` always.
    pub fn prime_power(&self, p: u64, m: u32) -> BigInt {
        if m == 0 {
            return BigInt::one();
        }
        if let Some(v) = self.inner.memo.read().expect("memo lock").get(&(p, m)) {
            return v.clone();
        }
        let v = (self.inner.eval)(p, m);
        self.inner.memo.write().expect("memo lock").entry((p, m)).or_insert(v).clone()
    }

    pub fn eval(&self, d: u64) -> Result<BigInt> {
        Ok(self.eval_factored(&factorize(d)?))
    }

    pub fn eval_factored(&self, fac: &[(u64, u32)]) -> BigInt {
        fac.iter().map(|&(p, m)| self.prime_power(p, m)).product()
    }

    /// Dirichlet convolution.
    pub fn convolve(&self, other: &ArithFn) -> ArithFn {
        let (f, g) = (self.clone(), other.clone());
        ArithFn::new(format!("({} * {})", self.name, other.name), move |p, m| {
            (0..=m).map(|i| f.prime_power(p, i) * g.prime_power(p, m - i)).sum()
        })
    }

    /// Pointwise product.
    pub fn times(&self, other: &ArithFn) -> ArithFn {
        let (f, g) = (self.clone(), other.clone());
        ArithFn::new(format!("{}.{}", self.name, other.name), move |p, m| {
            f.prime_power(p, m) * g.prime_power(p, m)
        })
    }

    /// Convolution of a list; the empty list gives delta.
    pub fn convolve_all(fs: &[ArithFn]) -> ArithFn {
        match fs.split_first() {
            None => delta(),
            Some((first, rest)) => rest.iter().fold(first.clone(), |acc, f| acc.convolve(f)),
        }
    }
}

/// Dirichlet identity.
pub fn delta() -> ArithFn {
    ArithFn::new("delta", |_, _| BigInt::zero())
}

pub fn phi() -> ArithFn {
    jordan(1).renamed("phi")
}

/// Jordan totient `J_k(p^m) = p^{mk} - p^{(m-1)k}`.
pub fn jordan(k: u32) -> ArithFn {
    ArithFn::new(format!("J{k}"), move |p, m| pow(p, m * k) - pow(p, (m - 1) * k))
}

/// Number of solutions of `x^k = 1` in `Z_d`.
pub fn n_k(k: u64) -> ArithFn {
    ArithFn::new(format!("N{k}"), move |p, m| {
        let g = |a: u64, b: u64| BigInt::from(a.gcd(&b));
        if p == 2 {
            match m {
                1 => BigInt::one(),
                2 => g(k, 2),
                _ => g(k, 2) * BigInt::from(k).gcd(&pow(2, m - 2)),
            }
        } else {
            BigInt::from(k).gcd(&(pow(p, m - 1) * BigInt::from(p - 1)))
        }
    })
}

/// `M_k(d) = #{(a, t_1..t_{k-1}) in Z_d^k : a^2 = 1, t_i (a + 1) = 0}`.
pub fn m_k(k: u32) -> ArithFn {
    assert!(k >= 2, "M_k needs k >= 2");
    ArithFn::new(format!("M{k}"), move |p, m| {
        let k1 = k - 1;
        if p != 2 {
            pow(p, m * k1) + 1
        } else {
            match m {
                1 => pow(2, k1),
                2 => pow(2, 2 * k1) + pow(2, k1),
                _ => pow(2, m * k1) + pow(2, (m - 1) * k1) + pow(2, k),
            }
        }
    })
}

/// `M = M_2`: solutions of `y^2 = 1, (y + 1) k = 0`.
pub fn m() -> ArithFn {
    m_k(2).renamed("M")
}

/// `P_k(d) = J_k(sqrt d)` on squares, 0 elsewhere.
pub fn p_k(k: u32) -> ArithFn {
    ArithFn::new(format!("P{k}"), move |p, m| {
        if m % 2 == 1 {
            BigInt::zero()
        } else {
            pow(p, m / 2 * k) - pow(p, (m / 2 - 1) * k)
        }
    })
}

pub fn p_fn() -> ArithFn {
    p_k(1).renamed("P")
}

/// Indicator of the squares.
pub fn chi2() -> ArithFn {
    ArithFn::new("chi2", |_, m| BigInt::from(u32::from(m % 2 == 0)))
}

/// `3^{w(d)}`, `3^{w'(d)}` and `3^{w''(d)}` as multiplicative functions.
pub fn three_pow_w() -> ArithFn {
    ArithFn::new("3^w", |_, _| BigInt::from(3))
}

pub fn three_pow_w_prime() -> ArithFn {
    ArithFn::new("3^w'", |p, _| BigInt::from(if p % 3 == 1 { 3 } else { 1 }))
}

pub fn three_pow_w_second() -> ArithFn {
    ArithFn::new("3^w''", |p, m| BigInt::from(if p == 3 && m >= 2 { 3 } else { 1 }))
}

impl ArithFn {
    fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

/// `(phi * J_2 * ... * J_{n-1})`, the weakly terminal count; delta for n = 1.
pub fn weakly_terminal_fn(n: usize) -> ArithFn {
    if n <= 1 {
        return delta();
    }
    let mut fs = vec![phi()];
    fs.extend((2..n as u32).map(jordan));
    ArithFn::convolve_all(&fs)
}

/// Evaluates a named function: `phi`, `J<k>`, `N<k>`, `M<k>`, `M`, `P<k>`,
/// `P`, `chi2`, `w`, `w'`, `w''`.
pub fn arith_eval(name: &str, d: u64) -> Result<BigInt> {
    let num = |s: &str| -> Result<u32> {
        s.parse::<u32>().map_err(|_| Error::Parse(format!("unknown arithmetic function '{name}'")))
    };
    match name {
        "w" => return Ok(w(d)?.into()),
        "w'" => return Ok(w_prime(d)?.into()),
        "w''" => {
            factorize(d)?;
            return Ok(w_second(d).into());
        }
        _ => {}
    }
    let f = match name {
        "phi" => phi(),
        "M" => m(),
        "P" => p_fn(),
        "chi2" => chi2(),
        "delta" => delta(),
        _ if name.len() > 1 => {
            let k = num(&name[1..])?;
            match &name[..1] {
                "J" => jordan(k),
                "N" if k >= 1 => n_k(k as u64),
                "M" if k >= 2 => m_k(k),
                "P" => p_k(k),
                _ => return Err(Error::Parse(format!("unknown arithmetic function '{name}'"))),
            }
        }
        _ => return Err(Error::Parse(format!("unknown arithmetic function '{name}'"))),
    };
    f.eval(d)
}
