use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;

/// Nonzero invariant factors `d_1 | d_2 | ... | d_r` (r = rank), all positive.
pub fn snf_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let (r, c) = (a.rows(), a.cols());
    let mut out = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let v = a.get(i, j);
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        a.swap_cols(t, bj);
        loop {
            let mut dirty = false;
            for i in (t + 1)..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).div_floor(a.get(t, t));
                for j in t..c {
                    let v = a.get(i, j) - &q * a.get(t, j);
                    a.set(i, j, v);
                }
                if !a.get(i, t).is_zero() {
                    a.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in (t + 1)..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).div_floor(a.get(t, t));
                for i in t..r {
                    let v = a.get(i, j) - &q * a.get(i, t);
                    a.set(i, j, v);
                }
                if !a.get(t, j).is_zero() {
                    a.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide the rest of the block
            let p = a.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for j in t..c {
                        let v = a.get(t, j) + a.get(i, j);
                        a.set(t, j, v);
                    }
                }
                None => break,
            }
        }
        out.push(a.get(t, t).abs());
        t += 1;
    }
    out
}

/// Finite abelian group in invariant-factor form: factors > 1 with
/// `factors[i] | factors[i+1]`. The trivial group has no factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianGroup {
    factors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { factors: Vec::new() }
    }

    pub fn cyclic(order: impl Into<BigInt>) -> Self {
        Self::from_orders(&[order.into()])
    }

    /// Any list of cyclic orders, normalised to invariant factors.
    pub fn from_orders(orders: &[BigInt]) -> Self {
        let n = orders.len();
        let mut d = IntMatrix::zeros(n, n);
        for (i, o) in orders.iter().enumerate() {
            d.set(i, i, o.clone());
        }
        Self::from_snf(&snf_diagonal(&d))
    }

    pub(crate) fn from_snf(diag: &[BigInt]) -> Self {
        AbelianGroup { factors: diag.iter().filter(|x| !x.is_one()).cloned().collect() }
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut all = self.factors.clone();
        all.extend(other.factors.iter().cloned());
        Self::from_orders(&all)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|x| format!("Z_{x}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cokernel of the row space: `Z^cols / rowspace(m)` = torsion + Z^free_rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    pub torsion: AbelianGroup,
    pub free_rank: usize,
}

pub fn cokernel(m: &IntMatrix) -> Cokernel {
    let diag = snf_diagonal(m);
    Cokernel { free_rank: m.cols() - diag.len(), torsion: AbelianGroup::from_snf(&diag) }
}
