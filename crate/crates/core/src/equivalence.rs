//! Hermite and permutation-Hermite (PH) equivalence. Certificates follow
//! the convention `U * B = C * P`.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linalg::{hnf, is_ns, rational_inverse, small, AbelianGroup, IntMatrix, RatMatrix};
use crate::invariants::j_tuple;
use crate::structure::{permutations, MAX_PERM_N};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub u: IntMatrix,
    /// New column j of C*P is old column perm[j] of C (0-based).
    pub perm: Vec<usize>,
}

fn unimodular_inverse(u: &IntMatrix) -> IntMatrix {
    rational_inverse(u).ok().and_then(|r| r.to_int()).expect("transform is unimodular")
}

/// Some(U) with U * B = C when the Hermite forms agree.
pub fn hermite_equivalent(b: &IntMatrix, c: &IntMatrix) -> Result<Option<IntMatrix>> {
    if b.rows() != c.rows() || b.cols() != c.cols() {
        return Err(Error::Shape("matrices of different shapes".into()));
    }
    let hb = hnf(b);
    let hc = hnf(c);
    if hb.h != hc.h {
        return Ok(None);
    }
    Ok(Some(unimodular_inverse(&hc.u).mul(&hb.u)))
}

fn check_pair(b: &IntMatrix, c: &IntMatrix) -> Result<()> {
    if !is_ns(b) || !is_ns(c) {
        return Err(Error::NotNS);
    }
    if b.cols() != c.cols() {
        return Err(Error::Shape("matrices of different sizes".into()));
    }
    if b.cols() > MAX_PERM_N {
        return Err(Error::SizeLimit(format!("n = {} > {}", b.cols(), MAX_PERM_N)));
    }
    Ok(())
}

/// Permutations compatible with the Omega(i) tuples: column i of C*P is
/// column perm[i] of C, so J(C_Omega(perm[i])) must equal J(B_Omega(i)).
fn tuple_compatible(tb: &[AbelianGroup], tc: &[AbelianGroup]) -> Vec<Vec<usize>> {
    permutations(tb.len()).into_iter().filter(|p| (0..p.len()).all(|i| tc[p[i]] == tb[i])).collect()
}

/// Decides B ~ C under U * B = C * P by searching P, pruned by the Omega(i)
/// tuples.
pub fn ph_equivalent(b: &IntMatrix, c: &IntMatrix) -> Result<Option<Certificate>> {
    check_pair(b, c)?;
    let hb = hnf(b);
    let tb = j_tuple(b)?;
    let tc = j_tuple(c)?;
    for perm in tuple_compatible(&tb, &tc) {
        let hcp = hnf(&c.permute_columns(&perm));
        if hcp.h == hb.h {
            let u = unimodular_inverse(&hcp.u).mul(&hb.u);
            return Ok(Some(Certificate { u, perm }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinglePOutcome {
    pub perm: Vec<usize>,
    pub certificate: Option<Certificate>,
    /// First non-integral entry of C*P*B^{-1} (0-based row, col) when the
    /// test fails.
    pub offending: Option<(usize, usize, String)>,
}

/// When the Omega(i) tuple of B has pairwise distinct entries and matches
/// C's under exactly one pi, only that P can work: B ~ C iff C*P*B^{-1} is
/// integral.
pub fn single_p_test(b: &IntMatrix, c: &IntMatrix) -> Result<SinglePOutcome> {
    check_pair(b, c)?;
    let tb = j_tuple(b)?;
    let tc = j_tuple(c)?;
    for i in 0..tb.len() {
        for j in (i + 1)..tb.len() {
            if tb[i] == tb[j] {
                return Err(Error::NotApplicable(format!(
                    "J(B_Omega({})) and J(B_Omega({})) are isomorphic",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let mut cands = tuple_compatible(&tb, &tc);
    if cands.len() != 1 {
        return Err(Error::NotApplicable("tuples of B and C do not match".into()));
    }
    let perm = cands.pop().expect("one candidate");
    let binv = rational_inverse(b)?;
    let x = RatMatrix::from_int(&c.permute_columns(&perm)).mul(&binv);
    match x.to_int() {
        Some(u) => Ok(SinglePOutcome { perm: perm.clone(), certificate: Some(Certificate { u, perm }), offending: None }),
        None => {
            let (i, j, v) = x.first_non_integral().expect("non-integral");
            Ok(SinglePOutcome { perm, certificate: None, offending: Some((i, j, v.to_string())) })
        }
    }
}

fn inverse_mod(a: &BigInt, d: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(d).extended_gcd(d);
    if e.gcd.abs().is_one() {
        Some((e.x * e.gcd.signum()).mod_floor(d))
    } else {
        None
    }
}

fn check_column(a: &[BigInt], d: &BigInt) -> Result<()> {
    if d <= &BigInt::one() {
        return Err(Error::BadColumn(format!("d = {d} must exceed 1")));
    }
    if !a.iter().fold(d.clone(), |g, x| g.gcd(x)).is_one() {
        return Err(Error::BadColumn("gcd(d, a) must be 1".into()));
    }
    Ok(())
}

/// Column a' with HNF(B_a * P_pi) = B_{a'} when that HNF has a 1-block of
/// size n-1 (n = len(a) + 1, pi 0-based with new column j = old pi[j]).
pub fn realizable_column(a: &[BigInt], d: &BigInt, pi: &[usize]) -> Result<Option<Vec<BigInt>>> {
    check_column(a, d)?;
    let n = a.len() + 1;
    if pi.len() != n || (0..n).any(|k| !pi.contains(&k)) {
        return Err(Error::BadColumn(format!("not a permutation of 1..={n}")));
    }
    let last = n - 1;
    if pi[last] == last {
        return Ok(Some((0..last).map(|t| a[pi[t]].mod_floor(d)).collect()));
    }
    let pivot = &a[pi[last]];
    let Some(inv) = inverse_mod(pivot, d) else { return Ok(None) };
    let s = pi.iter().position(|&x| x == last).expect("permutation");
    Ok(Some(
        (0..last)
            .map(|t| if t == s { inv.clone() } else { (-(&a[pi[t]]) * &inv).mod_floor(d) })
            .collect(),
    ))
}

/// All standard-form columns PH-equivalent to a inside 1-block size n-1.
pub fn column_orbit(a: &[BigInt], d: &BigInt) -> Result<BTreeSet<Vec<BigInt>>> {
    check_column(a, d)?;
    let n = a.len() + 1;
    if n > MAX_PERM_N {
        return Err(Error::SizeLimit(format!("n = {n} > {MAX_PERM_N}")));
    }
    let start: Vec<BigInt> = a.iter().map(|x| x.mod_floor(d)).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        for p in &perms {
            if let Some(next) = realizable_column(&cur, d, p)? {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(seen)
}

/// Lexicographically least sorted member of the column orbit.
pub fn canonical_column(a: &[BigInt], d: &BigInt) -> Result<Vec<BigInt>> {
    Ok(column_orbit(a, d)?
        .into_iter()
        .map(|mut v| {
            v.sort();
            v
        })
        .min()
        .expect("orbit is nonempty"))
}

/// Canonical PH class representative: the HNF of B*P minimal in
/// (diagonal, above-diagonal) lexicographic order.
pub fn canonical_representative(b: &IntMatrix) -> Result<IntMatrix> {
    if !is_ns(b) {
        return Err(Error::NotNS);
    }
    let n = b.cols();
    if n > MAX_PERM_N {
        return Err(Error::SizeLimit(format!("n = {n} > {MAX_PERM_N}")));
    }
    if let Some(v) = b.to_i64() {
        let mut best: Option<Vec<i64>> = None;
        let mut buf = vec![0i64; n * n];
        let mut ok = true;
        for p in permutations(n) {
            if small::permuted_hnf(n, &v, &p, &mut buf).is_none() {
                ok = false;
                break;
            }
            if best.as_ref().is_none_or(|cur| key_i64(n, &buf) < key_i64(n, cur)) {
                best = Some(buf.clone());
            }
        }
        if ok {
            return Ok(IntMatrix::from_i64(n, n, &best.expect("n >= 1")));
        }
    }
    Ok(permutations(n)
        .into_iter()
        .map(|p| hnf(&b.permute_columns(&p)).h)
        .min_by(|x, y| x.canonical_key().cmp(&y.canonical_key()))
        .expect("n >= 1"))
}

/// Row-major key matching `IntMatrix::canonical_key`.
pub fn key_i64(n: usize, m: &[i64]) -> Vec<i64> {
    let mut k: Vec<i64> = (0..n).map(|i| m[i * n + i]).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            k.push(m[i * n + j]);
        }
    }
    k
}

/// First non-integral entry as a rational, for reports.
pub fn entry_fraction(s: &str) -> Option<BigRational> {
    let (p, q) = s.split_once('/')?;
    Some(BigRational::new(p.trim().parse().ok()?, q.trim().parse().ok()?))
}
