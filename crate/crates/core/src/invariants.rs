//! The subset-indexed cokernel family J(B_Omega), its Omega(i) tuple, and
//! matching of these families between matrices.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linalg::{cokernel, hnf, is_ns, AbelianGroup, IntMatrix};
use crate::structure::{permutations, Subset, MAX_PERM_N};

fn require_ns(b: &IntMatrix) -> Result<()> {
    if is_ns(b) {
        Ok(())
    } else {
        Err(Error::NotNS)
    }
}

/// J(B) = Z^n / Z^n B (torsion part; NS matrices have no free part).
pub fn j_group(b: &IntMatrix) -> AbelianGroup {
    cokernel(b).torsion
}

pub fn j_sub(b: &IntMatrix, omega: &Subset) -> Result<AbelianGroup> {
    require_ns(b)?;
    if omega.n != b.cols() {
        return Err(Error::BadSubset(format!("subset of {} indices for a matrix with {} columns", omega.n, b.cols())));
    }
    if omega.len() <= 1 {
        return Ok(AbelianGroup::trivial());
    }
    Ok(cokernel(&b.select_columns(&omega.members())).torsion)
}

/// (J(B_Omega(1)), ..., J(B_Omega(n))).
pub fn j_tuple(b: &IntMatrix) -> Result<Vec<AbelianGroup>> {
    require_ns(b)?;
    let n = b.cols();
    (0..n).map(|i| j_sub(b, &Subset::omega(n, i))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantLattice {
    pub n: usize,
    /// Every subset, ordered by size then lexicographically.
    pub groups: Vec<(Subset, AbelianGroup)>,
    /// |J(B)| / |J(B_Omega(i))|.
    pub kernel_orders: Vec<BigInt>,
}

impl InvariantLattice {
    pub fn get(&self, s: &Subset) -> Option<&AbelianGroup> {
        self.groups.iter().find(|(t, _)| t == s).map(|(_, g)| g)
    }
}

pub const MAX_LATTICE_N: usize = 12;

pub fn invariant_lattice(b: &IntMatrix) -> Result<InvariantLattice> {
    require_ns(b)?;
    let n = b.cols();
    if n > MAX_LATTICE_N {
        return Err(Error::SizeLimit(format!("n = {n} > {MAX_LATTICE_N}")));
    }
    let groups: Vec<(Subset, AbelianGroup)> = Subset::all(n)
        .into_iter()
        .map(|s| j_sub(b, &s).map(|g| (s, g)))
        .collect::<Result<_>>()?;
    let total = j_group(b).order();
    let kernel_orders = j_tuple(b)?.iter().map(|g| &total / g.order()).collect();
    Ok(InvariantLattice { n, groups, kernel_orders })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    DecidedIso,
    DecidedNoniso,
    NecessaryOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeMatch {
    pub verdict: Verdict,
    /// pi with J(B_Omega) = J(B'_{pi Omega}) for every Omega (0-based images).
    pub pi: Option<Vec<usize>>,
}

fn lattice_pair(b: &IntMatrix, c: &IntMatrix) -> Result<(Vec<AbelianGroup>, HashMap<u64, AbelianGroup>)> {
    require_ns(b)?;
    require_ns(c)?;
    if b.cols() != c.cols() {
        return Err(Error::Shape("matrices of different sizes".into()));
    }
    let n = b.cols();
    if n > MAX_PERM_N {
        return Err(Error::SizeLimit(format!("n = {n} > {MAX_PERM_N}")));
    }
    let lb: Vec<AbelianGroup> = Subset::all(n).iter().map(|s| j_sub(b, s)).collect::<Result<_>>()?;
    let lc: HashMap<u64, AbelianGroup> =
        Subset::all(n).iter().map(|s| j_sub(c, s).map(|g| (s.mask, g))).collect::<Result<_>>()?;
    Ok((lb, lc))
}

/// First pi (lexicographic) matching the two families subset by subset.
fn matching_perms(b: &IntMatrix, c: &IntMatrix) -> Result<Vec<Vec<usize>>> {
    let (lb, lc) = lattice_pair(b, c)?;
    let n = b.cols();
    let subsets = Subset::all(n);
    Ok(permutations(n)
        .into_iter()
        .filter(|p| subsets.iter().zip(&lb).all(|(s, g)| lc[&s.map(p).mask] == *g))
        .collect())
}

/// Searches for pi matching every J(B_Omega) with J(B'_{pi Omega}).
pub fn lattice_match(b: &IntMatrix, c: &IntMatrix) -> Result<LatticeMatch> {
    let found = matching_perms(b, c)?.into_iter().next();
    let verdict = match (&found, j_group(b).is_cyclic()) {
        (None, _) => Verdict::DecidedNoniso,
        (Some(_), true) => Verdict::DecidedIso,
        (Some(_), false) => Verdict::NecessaryOnly,
    };
    Ok(LatticeMatch { verdict, pi: found })
}

/// Elements of J(B) = Z^n / rowspace(H) in reduced coordinates
/// 0 <= v_j < H_jj, H the HNF of B.
struct Quotient {
    n: usize,
    h: Vec<i64>,
    order: usize,
}

impl Quotient {
    fn new(b: &IntMatrix) -> Option<Self> {
        let n = b.cols();
        let h = hnf(b).h.to_i64()?;
        let order = (0..n).try_fold(1usize, |acc, i| acc.checked_mul(h[i * n + i] as usize))?;
        Some(Quotient { n, h, order })
    }

    fn reduce(&self, v: &mut [i64]) {
        let n = self.n;
        for j in 0..n {
            let q = v[j].div_euclid(self.h[j * n + j]);
            if q != 0 {
                for k in j..n {
                    v[k] -= q * self.h[j * n + k];
                }
            }
        }
    }

    fn index(&self, v: &[i64]) -> usize {
        let n = self.n;
        let mut idx = 0usize;
        for j in 0..n {
            idx = idx * self.h[j * n + j] as usize + v[j] as usize;
        }
        idx
    }

    fn basis(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.n];
        v[i] = 1;
        self.reduce(&mut v);
        v
    }

    fn add_scaled(&self, acc: &mut [i64], v: &[i64], k: i64) {
        for j in 0..self.n {
            acc[j] += k * v[j];
        }
        self.reduce(acc);
    }

    fn element_order(&self, v: &[i64]) -> i64 {
        let mut acc = vec![0; self.n];
        let mut k = 0;
        loop {
            self.add_scaled(&mut acc, v, 1);
            k += 1;
            if acc.iter().all(|x| *x == 0) {
                return k;
            }
        }
    }
}

/// Bound on |J(B)| for the exhaustive isomorphism search.
pub const EXHAUSTIVE_ORDER_LIMIT: u64 = 10_000;

/// Decides lattice isomorphism through the kernel-subgroup criterion: there
/// is an isomorphism phi: J(B) -> J(B') and pi with phi<e_i> = <e'_{pi i}>,
/// e_i the image of the i-th basis row. Exhaustive, so only for small groups.
pub fn lattice_match_exhaustive(b: &IntMatrix, c: &IntMatrix) -> Result<LatticeMatch> {
    let candidates = matching_perms(b, c)?;
    if candidates.is_empty() {
        return Ok(LatticeMatch { verdict: Verdict::DecidedNoniso, pi: None });
    }
    let jb = j_group(b);
    if jb.is_cyclic() {
        return Ok(LatticeMatch { verdict: Verdict::DecidedIso, pi: candidates.into_iter().next() });
    }
    if jb.order() > BigInt::from(EXHAUSTIVE_ORDER_LIMIT) {
        return Err(Error::SizeLimit(format!("|J(B)| = {} exceeds {}", jb.order(), EXHAUSTIVE_ORDER_LIMIT)));
    }
    let n = b.cols();
    let (qb, qc) = match (Quotient::new(b), Quotient::new(c)) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::SizeLimit("entries too large".into())),
    };
    let hb = hnf(b).h.to_i64().expect("checked above");
    let ec: Vec<Vec<i64>> = (0..n).map(|i| qc.basis(i)).collect();
    let ord: Vec<i64> = (0..n).map(|i| qc.element_order(&ec[i])).collect();
    let mut budget: u64 = 50_000_000;
    for pi in candidates {
        // generators of <e'_{pi i}>: unit multiples of e'_{pi i}
        let choices: Vec<Vec<Vec<i64>>> = (0..n)
            .map(|i| {
                let t = pi[i];
                (1..=ord[t].max(1))
                    .filter(|k| k.gcd(&ord[t]) == 1)
                    .map(|k| {
                        let mut v = vec![0; n];
                        qc.add_scaled(&mut v, &ec[t], k);
                        v
                    })
                    .collect()
            })
            .collect();
        let mut pick = vec![0usize; n];
        loop {
            if budget == 0 {
                return Err(Error::Budget("automorphism search".into()));
            }
            budget -= 1;
            let y: Vec<&Vec<i64>> = (0..n).map(|i| &choices[i][pick[i]]).collect();
            if is_isomorphism(&qb, &qc, &hb, &y) {
                return Ok(LatticeMatch { verdict: Verdict::DecidedIso, pi: Some(pi) });
            }
            let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
            if !advance(&mut pick, &sizes) {
                break;
            }
        }
    }
    Ok(LatticeMatch { verdict: Verdict::DecidedNoniso, pi: None })
}

/// E_i -> y_i defines a well-defined bijection J(B) -> J(B').
fn is_isomorphism(qb: &Quotient, qc: &Quotient, hb: &[i64], y: &[&Vec<i64>]) -> bool {
    let n = qb.n;
    for r in 0..n {
        let mut acc = vec![0; n];
        for j in 0..n {
            let k = hb[r * n + j].rem_euclid(qc.order.max(1) as i64);
            if k != 0 {
                qc.add_scaled(&mut acc, y[j], k);
            }
        }
        if acc.iter().any(|x| *x != 0) {
            return false;
        }
    }
    if qb.order != qc.order {
        return false;
    }
    // injective on J(B): walk all reduced elements of J(B) and check images
    let mut seen = vec![false; qc.order];
    let mut v = vec![0i64; n];
    let diag: Vec<i64> = (0..n).map(|i| qb.h[i * n + i]).collect();
    loop {
        let mut img = vec![0; n];
        for j in 0..n {
            if v[j] != 0 {
                qc.add_scaled(&mut img, y[j], v[j]);
            }
        }
        let idx = qc.index(&img);
        if seen[idx] {
            return false;
        }
        seen[idx] = true;
        if !advance(&mut v, &diag) {
            return true;
        }
    }
}

/// Odometer step, last digit fastest; false after the final state.
fn advance<T>(digits: &mut [T], bounds: &[T]) -> bool
where
    T: Copy + PartialOrd + std::ops::AddAssign + From<u8>,
{
    for k in (0..digits.len()).rev() {
        digits[k] += T::from(1u8);
        if digits[k] < bounds[k] {
            return true;
        }
        digits[k] = T::from(0u8);
    }
    false
}

/// Order of the kernel of J(B) -> J(B_Omega(i)); equals m(i).
pub fn kernel_order(b: &IntMatrix, i: usize) -> Result<BigInt> {
    let n = b.cols();
    Ok(j_group(b).order() / j_sub(b, &Subset::omega(n, i))?.order())
}
