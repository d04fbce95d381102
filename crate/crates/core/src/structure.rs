//! Weakly terminal and terminal forms, 1-block sizes, standard forms and
//! enumeration of weakly terminal matrices.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linalg::{cokernel, content, determinant, hnf, is_ns, rational_inverse, IntMatrix};

/// A set of column indices of an n-column matrix, stored as a bitmask.
/// Indices are 0-based internally and printed 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subset {
    pub n: usize,
    pub mask: u64,
}

impl Subset {
    pub fn new(n: usize, members: &[usize]) -> Result<Self> {
        if n > 63 {
            return Err(Error::BadSubset(format!("ambient size {n} too large")));
        }
        let mut mask = 0u64;
        for &m in members {
            if m >= n {
                return Err(Error::BadSubset(format!("index {} out of range 1..={}", m + 1, n)));
            }
            mask |= 1 << m;
        }
        Ok(Subset { n, mask })
    }

    pub fn full(n: usize) -> Self {
        Subset { n, mask: (1u64 << n) - 1 }
    }

    /// Omega(i): everything except column i.
    pub fn omega(n: usize, i: usize) -> Self {
        Subset { n, mask: ((1u64 << n) - 1) & !(1 << i) }
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.n).filter(|i| self.mask >> i & 1 == 1).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Image under a permutation of indices.
    pub fn map(&self, perm: &[usize]) -> Subset {
        let mut mask = 0;
        for i in self.members() {
            mask |= 1 << perm[i];
        }
        Subset { n: self.n, mask }
    }

    /// All subsets ordered by cardinality, then lexicographically.
    pub fn all(n: usize) -> Vec<Subset> {
        let mut out = Vec::with_capacity(1 << n);
        for k in 0..=n {
            for s in crate::exact_linalg::small::subsets(n, k) {
                out.push(Subset::new(n, &s).expect("in range"));
            }
        }
        out
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

pub const MAX_PERM_N: usize = 8;

fn require_ns(b: &IntMatrix) -> Result<()> {
    if is_ns(b) {
        Ok(())
    } else {
        Err(Error::NotNS)
    }
}

pub fn weakly_terminal(b: &IntMatrix) -> Result<IntMatrix> {
    require_ns(b)?;
    Ok(hnf(b).h)
}

pub fn is_weakly_terminal(c: &IntMatrix) -> bool {
    is_ns(c) && hnf(c).h == *c
}

/// Terminal-form test. Condition (c) is read as: for each column j and
/// i < j, C_ii <= gcd(C_jj, C_ij, ..., C_{j-1,j}).
pub fn is_terminal(c: &IntMatrix) -> bool {
    if !c.is_square() || !c.is_upper_triangular() || !is_ns(c) {
        return false;
    }
    let n = c.rows();
    let diag = c.diagonal();
    if diag.iter().any(|x| !x.is_positive()) || diag.windows(2).any(|w| w[0] > w[1]) {
        return false;
    }
    for j in 0..n {
        for i in 0..j {
            let v = c.get(i, j);
            if v.is_negative() || v >= &diag[j] {
                return false;
            }
        }
    }
    for j in 0..n {
        for i in 0..j {
            let g = (i..j).fold(diag[j].clone(), |g, s| g.gcd(c.get(s, j)));
            if diag[i] > g {
                return false;
            }
        }
    }
    true
}

pub fn one_block_size(c: &IntMatrix) -> Result<usize> {
    if !is_terminal(c) {
        return Err(Error::NotTerminal);
    }
    Ok(c.diagonal().iter().take_while(|x| x.is_one()).count())
}

fn columns_trivial(b: &IntMatrix, cols: &[usize]) -> bool {
    cokernel(&b.select_columns(cols)).torsion.is_trivial()
}

/// Largest m with a size-m column subset whose cokernel is trivial.
/// Triviality is inherited by subsets, so the search runs downward.
pub fn max_one_block(b: &IntMatrix) -> Result<usize> {
    require_ns(b)?;
    let n = b.cols();
    if let Some(m) = b.to_i64().and_then(|v| crate::exact_linalg::small::max_one_block(n, &v)) {
        return Ok(m);
    }
    for size in (1..=n).rev() {
        if crate::exact_linalg::small::subsets(n, size).iter().any(|s| columns_trivial(b, s)) {
            return Ok(size);
        }
    }
    Ok(0)
}

/// Same as [`max_one_block`] but always on the exact path; kept separate so
/// the machine-integer path has an independent check.
pub fn max_one_block_exact(b: &IntMatrix) -> Result<usize> {
    require_ns(b)?;
    let n = b.cols();
    for size in (1..=n).rev() {
        if crate::exact_linalg::small::subsets(n, size).iter().any(|s| columns_trivial(b, s)) {
            return Ok(size);
        }
    }
    Ok(0)
}

/// 1-block sizes of all terminal forms among the HNFs of B*P.
pub fn class_one_block_sizes(b: &IntMatrix) -> Result<BTreeSet<usize>> {
    require_ns(b)?;
    let n = b.cols();
    if n > MAX_PERM_N {
        return Err(Error::SizeLimit(format!("n = {n} > {MAX_PERM_N}")));
    }
    let mut out = BTreeSet::new();
    for p in permutations(n) {
        let c = hnf(&b.permute_columns(&p)).h;
        if is_terminal(&c) {
            out.insert(c.diagonal().iter().take_while(|x| x.is_one()).count());
        }
    }
    Ok(out)
}

/// No standard basis row lies in the row space: every row of B^{-1} has a
/// non-integral entry.
pub fn is_weakly_indecomposable(b: &IntMatrix) -> Result<bool> {
    require_ns(b)?;
    let inv = rational_inverse(b)?;
    Ok((0..b.rows()).all(|i| !inv.row_denominator_lcm(i).is_one()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardForm {
    pub n: usize,
    pub d: BigInt,
    pub a: Vec<BigInt>,
}

impl StandardForm {
    /// Validates ranges and the joint gcd condition; does not sort.
    pub fn new(d: impl Into<BigInt>, a: Vec<BigInt>) -> Result<Self> {
        let d = d.into();
        if d <= BigInt::one() {
            return Err(Error::BadColumn(format!("d = {d} must exceed 1")));
        }
        if a.iter().any(|x| x.is_negative() || x >= &d) {
            return Err(Error::BadColumn("entries must lie in [0, d)".into()));
        }
        if !a.iter().fold(d.clone(), |g, x| g.gcd(x)).is_one() {
            return Err(Error::BadColumn("gcd(d, a) must be 1".into()));
        }
        Ok(StandardForm { n: a.len() + 1, d, a })
    }

    pub fn from_i64(d: i64, a: &[i64]) -> Result<Self> {
        Self::new(d, a.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// The matrix (I a; 0 d).
    pub fn matrix(&self) -> IntMatrix {
        let n = self.n;
        let mut m = IntMatrix::identity(n);
        for (i, x) in self.a.iter().enumerate() {
            m.set(i, n - 1, x.clone());
        }
        m.set(n - 1, n - 1, self.d.clone());
        m
    }

    /// Sorted by gcd(d, a_i) nonincreasing, ties by a_i ascending.
    pub fn sorted(&self) -> StandardForm {
        let mut a = self.a.clone();
        a.sort_by(|x, y| {
            let gx = self.d.gcd(x);
            let gy = self.d.gcd(y);
            gy.cmp(&gx).then(x.cmp(y))
        });
        StandardForm { n: self.n, d: self.d.clone(), a }
    }
}

pub fn to_standard_form(b: &IntMatrix) -> Result<StandardForm> {
    require_ns(b)?;
    let n = b.cols();
    if determinant(b).abs().is_one() {
        return Err(Error::Unimodular);
    }
    let k = (0..n)
        .rev()
        .find(|&k| {
            let cols: Vec<usize> = (0..n).filter(|&j| j != k).collect();
            columns_trivial(b, &cols)
        })
        .ok_or(Error::NoLargeBlock)?;
    let mut order: Vec<usize> = (0..n).filter(|&j| j != k).collect();
    order.push(k);
    let h = hnf(&b.permute_columns(&order)).h;
    debug_assert!((0..n - 1).all(|i| h.get(i, i).is_one()));
    let a = (0..n - 1).map(|i| h.get(i, n - 1).clone()).collect();
    Ok(StandardForm::new(h.get(n - 1, n - 1).clone(), a)?.sorted())
}

/// Ordered factorizations d = d_1 * ... * d_n with d_1 = 1, in lexicographic
/// order.
pub fn diagonal_factorizations(n: usize, d: u64) -> Vec<Vec<u64>> {
    fn rec(rest: u64, slots: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for f in 1..=rest {
            if rest % f == 0 {
                cur.push(f);
                rec(rest / f, slots - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n == 1 {
        if d == 1 {
            out.push(vec![1]);
        }
        return out;
    }
    let mut cur = vec![1];
    rec(d, n - 1, &mut cur, &mut out);
    out
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Visits every weakly terminal n x n matrix of determinant d in
/// (diagonal, above-diagonal) lexicographic order, as row-major `i64`s.
pub fn for_each_weakly_terminal(n: usize, d: u64, mut f: impl FnMut(&[i64])) {
    for diag in diagonal_factorizations(n, d) {
        for_each_with_diagonal(n, &diag, &mut f);
    }
}

/// Same enumeration restricted to one diagonal.
pub fn for_each_with_diagonal(n: usize, diag: &[u64], f: &mut impl FnMut(&[i64])) {
    let mut m = vec![0i64; n * n];
    for i in 0..n {
        m[i * n + i] = diag[i] as i64;
    }
    let slots: Vec<(usize, usize)> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(_, j)| diag[j] > 1).collect();
    let col_ok = |m: &[i64], j: usize| -> bool {
        let mut g = diag[j];
        for i in 0..j {
            g = gcd_u64(g, m[i * n + j] as u64);
        }
        g == 1
    };
    loop {
        if (1..n).all(|j| col_ok(&m, j)) {
            f(&m);
        }
        // odometer, last slot fastest
        let mut k = slots.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            let (i, j) = slots[k];
            m[i * n + j] += 1;
            if (m[i * n + j] as u64) < diag[j] {
                break;
            }
            m[i * n + j] = 0;
        }
    }
}

/// Iterator form of the enumeration; materialises one diagonal at a time.
pub fn enumerate_weakly_terminal(n: usize, d: u64) -> impl Iterator<Item = IntMatrix> {
    diagonal_factorizations(n, d).into_iter().flat_map(move |diag| {
        let mut batch = Vec::new();
        for_each_with_diagonal(n, &diag, &mut |m: &[i64]| batch.push(IntMatrix::from_i64(n, n, m)));
        batch.into_iter()
    })
}

/// Column j of a weakly terminal matrix has content 1; used by callers that
/// build matrices directly.
pub fn columns_unimodular(m: &IntMatrix) -> bool {
    (0..m.cols()).all(|j| content(&m.column(j)).is_one())
}
