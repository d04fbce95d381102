//! The opposite matrix B^op = (Delta B^{-1})^T, splitting tests, and the
//! dual-compatibility / dual-conjugacy deciders for standard forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linalg::{cokernel, is_ns, rational_inverse, AbelianGroup, IntMatrix};
use crate::invariants::j_group;
use crate::structure::{is_weakly_indecomposable, max_one_block, to_standard_form, StandardForm};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualData {
    pub b: IntMatrix,
    pub bop: IntMatrix,
    /// Diagonal of Delta.
    pub m: Vec<BigInt>,
}

impl DualData {
    pub fn delta(&self) -> IntMatrix {
        let n = self.m.len();
        let mut d = IntMatrix::zeros(n, n);
        for (i, x) in self.m.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

pub fn opposite(b: &IntMatrix) -> Result<DualData> {
    if !is_ns(b) {
        return Err(Error::NotNS);
    }
    let inv = rational_inverse(b)?;
    let n = b.rows();
    let m: Vec<BigInt> = (0..n).map(|i| inv.row_denominator_lcm(i)).collect();
    let mut bop = IntMatrix::zeros(n, n);
    for i in 0..n {
        let s = BigRational::from_integer(m[i].clone());
        for j in 0..n {
            // (Delta B^{-1})_{ij} lands at (j, i)
            let v = &s * inv.get(i, j);
            debug_assert!(v.is_integer());
            bop.set(j, i, v.to_integer());
        }
    }
    Ok(DualData { b: b.clone(), bop, m })
}

/// (B^op)^op = B and the m-lists agree as multisets.
pub fn involution_check(b: &IntMatrix) -> Result<bool> {
    let d1 = opposite(b)?;
    let d2 = opposite(&d1.bop)?;
    let mut m1 = d1.m.clone();
    let mut m2 = d2.m.clone();
    m1.sort();
    m2.sort();
    Ok(d2.bop == *b && m1 == m2)
}

/// I(B), computed as J(B^op).
pub fn i_group(b: &IntMatrix) -> Result<AbelianGroup> {
    Ok(j_group(&opposite(b)?.bop))
}

/// Whether (+) Z_{m(i)} is isomorphic to J(B) (+) J(B^op).
pub fn sequence_splits(b: &IntMatrix) -> Result<bool> {
    let dd = opposite(b)?;
    let lhs = AbelianGroup::from_orders(&dd.m);
    let rhs = j_group(b).direct_sum(&j_group(&dd.bop));
    Ok(lhs == rhs)
}

/// r(B) + r(B^op) = Z^n, decided by the cokernel of the stacked matrix.
pub fn super_splits(b: &IntMatrix) -> Result<bool> {
    let dd = opposite(b)?;
    let c = cokernel(&b.vstack(&dd.bop));
    Ok(c.free_rank == 0 && c.torsion.is_trivial())
}

fn check_restricted(b: &IntMatrix) -> Result<StandardForm> {
    if !is_ns(b) {
        return Err(Error::NotNS);
    }
    let n = b.cols();
    if !is_weakly_indecomposable(b)? {
        return Err(Error::NotApplicable("matrix is not weakly indecomposable".into()));
    }
    let mob = max_one_block(b)?;
    if mob != n - 1 {
        return Err(Error::NotApplicable(format!("largest 1-block is {mob}, need {}", n - 1)));
    }
    to_standard_form(b)
}

/// d/(d, a_i) pairwise coprime with product d, none equal to 1.
pub fn compatible_standard_form(sf: &StandardForm) -> bool {
    let d = &sf.d;
    let parts: Vec<BigInt> = sf.a.iter().map(|a| d / d.gcd(a)).collect();
    if parts.iter().any(|x| x.is_one()) {
        return false;
    }
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            if !parts[i].gcd(&parts[j]).is_one() {
                return false;
            }
        }
    }
    parts.iter().product::<BigInt>() == *d
}

/// The congruence 1 + sum a_i^2/(a_i, d) = 0 mod d, i.e.
/// sum v_i^2 (a_i, d) = -1 with v_i = a_i/(a_i, d).
pub fn conjugacy_congruence(sf: &StandardForm) -> bool {
    let d = &sf.d;
    let s: BigInt = sf.a.iter().map(|a| a * a / a.gcd(d)).sum();
    (s + 1u32).mod_floor(d).is_zero()
}

pub fn is_dual_compatible(b: &IntMatrix) -> Result<bool> {
    let sf = check_restricted(b)?;
    Ok(compatible_standard_form(&sf))
}

pub fn is_dual_conjugate(b: &IntMatrix) -> Result<bool> {
    let sf = check_restricted(b)?;
    Ok(compatible_standard_form(&sf) && conjugacy_congruence(&sf))
}

/// For n = 2: some a with a^2 = -1 mod d exists iff 4 does not divide d
/// and every odd prime factor of d is 1 mod 4.
pub fn n2_conjugate_exists(d: u64) -> bool {
    if d % 4 == 0 {
        return false;
    }
    let mut x = d;
    let mut p = 3;
    while x % 2 == 0 {
        x /= 2;
    }
    while p * p <= x {
        if x % p == 0 {
            if p % 4 != 1 {
                return false;
            }
            while x % p == 0 {
                x /= p;
            }
        }
        p += 2;
    }
    x == 1 || x % 4 == 1
}
