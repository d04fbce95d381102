//! Matrices over Z_d, the F_i(n, k) strata, W(n) x GL(k) orbits over Z_p,
//! the kernel duality M -> N and the B(X) experiment.
//!
//! Over a field the right GL(k) action is absorbed by passing to the column
//! space of M: two points of F(n, k) are in one GL(k) orbit iff their column
//! spaces agree, and a column space is stored as the reduced row echelon form
//! of M^T packed into a u64. W(n) then acts on subspaces of F_p^n through
//! coordinate permutations and coordinate scalings.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::arith::is_prime;
use crate::error::{Error, Result};
use crate::exact_linalg::{small, IntMatrix};
use crate::invariants::{lattice_match, lattice_match_exhaustive, LatticeMatch, Verdict};
use crate::structure::permutations;

/// Bound on the number of k-dimensional subspaces walked by a census.
pub const MAX_SUBSPACES: u64 = 3_000_000;
/// Bound on |W(n)| / scalars for the brute-force orbit and stabilizer searches.
pub const MAX_GROUP_WALK: u64 = 20_000_000;
pub const MAX_LAB_N: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModMatrix {
    pub modulus: u64,
    pub rows: usize,
    pub cols: usize,
    /// Row-major, entries in [0, modulus).
    pub data: Vec<u64>,
}

impl ModMatrix {
    pub fn new(modulus: u64, rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::RangeError("modulus must be at least 2".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows} x {cols} matrix", data.len())));
        }
        let m = modulus as i64;
        Ok(ModMatrix { modulus, rows, cols, data: data.into_iter().map(|x| x.rem_euclid(m) as u64).collect() })
    }

    pub fn from_rows(modulus: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(modulus, r, c, rows.concat())
    }

    pub fn from_int(modulus: u64, m: &IntMatrix) -> Result<Self> {
        let d = BigInt::from(modulus);
        let data: Vec<i64> = m.data().iter().map(|x| x.mod_floor(&d).to_i64().expect("reduced")).collect();
        Self::new(modulus, m.rows(), m.cols(), data)
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> ModMatrix {
        let data = (0..self.cols).flat_map(|j| (0..self.rows).map(move |i| (i, j))).map(|(i, j)| self.get(i, j)).collect();
        ModMatrix { modulus: self.modulus, rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, o: &ModMatrix) -> Result<ModMatrix> {
        if self.cols != o.rows || self.modulus != o.modulus {
            return Err(Error::Shape("incompatible product".into()));
        }
        let d = self.modulus as u128;
        let mut data = vec![0u64; self.rows * o.cols];
        for i in 0..self.rows {
            for j in 0..o.cols {
                let s: u128 = (0..self.cols).map(|t| self.get(i, t) as u128 * o.get(t, j) as u128 % d).sum();
                data[i * o.cols + j] = (s % d) as u64;
            }
        }
        Ok(ModMatrix { modulus: self.modulus, rows: self.rows, cols: o.cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Row subsets (sorted) whose square submatrix is invertible mod d.
    pub fn invertible_row_sets(&self) -> Vec<Vec<usize>> {
        let k = self.cols;
        let d = self.modulus as i128;
        small::subsets(self.rows, k)
            .into_iter()
            .filter(|rows| {
                let det = small::det(k, |i, j| self.get(rows[i], j) as i64).expect("small entries");
                det.rem_euclid(d).gcd(&d) == 1
            })
            .collect()
    }
}

/// Number of k-row subsets of M forming an invertible matrix over Z_d.
pub fn f_index(m: &ModMatrix) -> Result<usize> {
    if m.rows <= m.cols {
        return Err(Error::Shape(format!("need rows > cols, got {} x {}", m.rows, m.cols)));
    }
    if m.cols == 0 {
        return Err(Error::Shape("need at least one column".into()));
    }
    Ok(m.invertible_row_sets().len())
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::RangeError(format!("{p} is not prime")))
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors: Vec<u64> = (2..p).filter(|&q| (p - 1) % q == 0 && is_prime(q)).collect();
    (2..p).find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).expect("primes have primitive roots")
}

/// Row space of a k x n matrix over F_p, as an RREF. `rank` may be below k.
#[derive(Clone, Debug)]
struct Space {
    n: usize,
    p: u64,
    rows: Vec<Vec<u64>>,
}

impl Space {
    fn from_rows(n: usize, p: u64, mut a: Vec<Vec<u64>>) -> Space {
        let mut r = 0;
        for c in 0..n {
            let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
            a.swap(r, piv);
            let inv = inv_mod(a[r][c], p);
            for x in a[r].iter_mut() {
                *x = *x * inv % p;
            }
            for i in 0..a.len() {
                if i != r && a[i][c] != 0 {
                    let f = a[i][c];
                    for j in 0..n {
                        a[i][j] = (a[i][j] + p * p - f * a[r][j]) % p;
                    }
                }
            }
            r += 1;
        }
        a.truncate(r);
        Space { n, p, rows: a }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn code(&self) -> u64 {
        self.rows.iter().flatten().fold(0u64, |acc, &x| acc * self.p + x)
    }

    fn from_code(n: usize, k: usize, p: u64, mut code: u64) -> Space {
        let mut flat = vec![0u64; n * k];
        for x in flat.iter_mut().rev() {
            *x = code % p;
            code /= p;
        }
        Space { n, p, rows: flat.chunks(n).map(<[u64]>::to_vec).collect() }
    }

    /// Coordinates permuted (new coordinate j is old perm[j]) and then
    /// coordinate j scaled by scale[j].
    fn act(&self, perm: &[usize], scale: &[u64]) -> Space {
        let rows = self.rows.iter().map(|r| (0..self.n).map(|j| r[perm[j]] * scale[j] % self.p).collect()).collect();
        Space::from_rows(self.n, self.p, rows)
    }

    /// Orthogonal complement under the standard dot product.
    fn perp(&self) -> Space {
        let pivots: Vec<usize> = self.rows.iter().map(|r| r.iter().position(|&x| x != 0).expect("nonzero row")).collect();
        let basis = (0..self.n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![0u64; self.n];
                v[free] = 1;
                for (r, &pc) in self.rows.iter().zip(&pivots) {
                    v[pc] = (self.p - r[free]) % self.p;
                }
                v
            })
            .collect();
        Space::from_rows(self.n, self.p, basis)
    }

    /// Number of coordinate subsets of size dim on which the projection is onto.
    fn f_index(&self) -> usize {
        let k = self.dim();
        let p = self.p as i128;
        small::subsets(self.n, k)
            .iter()
            .filter(|cols| {
                let det = small::det(k, |i, j| self.rows[i][cols[j]] as i64).expect("small entries");
                det.rem_euclid(p) != 0
            })
            .count()
    }

    /// The n x k matrix whose columns span the space.
    fn as_columns(&self) -> ModMatrix {
        let k = self.dim();
        let data = (0..self.n).flat_map(|i| self.rows.iter().map(move |r| r[i])).collect();
        ModMatrix { modulus: self.p, rows: self.n, cols: k, data }
    }
}

fn column_space(m: &ModMatrix) -> Space {
    let t = m.transpose();
    Space::from_rows(m.rows, m.modulus, t.data.chunks(t.cols).map(<[u64]>::to_vec).collect())
}

fn require_f(m: &ModMatrix) -> Result<Space> {
    require_prime(m.modulus)?;
    if m.rows <= m.cols || m.cols == 0 {
        return Err(Error::Shape(format!("need rows > cols >= 1, got {} x {}", m.rows, m.cols)));
    }
    if m.rows > MAX_LAB_N {
        return Err(Error::SizeLimit(format!("n = {} > {MAX_LAB_N}", m.rows)));
    }
    let s = column_space(m);
    if s.dim() < m.cols {
        return Err(Error::NotInF);
    }
    Ok(s)
}

/// N with M^T N = 0 whose columns are a basis of ker M^T, for M in F(n, k)
/// over a prime field. Defined up to the right GL(n - k) action.
pub fn dual_space(m: &ModMatrix) -> Result<ModMatrix> {
    Ok(require_f(m)?.perp().as_columns())
}

/// Whether two n x k matrices over F_p have the same column space.
pub fn same_column_space(a: &ModMatrix, b: &ModMatrix) -> Result<bool> {
    require_prime(a.modulus)?;
    if (a.rows, a.modulus) != (b.rows, b.modulus) {
        return Err(Error::Shape("different ambient spaces".into()));
    }
    let (s, t) = (column_space(a), column_space(b));
    Ok(s.dim() == t.dim() && s.rows == t.rows)
}

/// `(-X; I_k)` reduced mod p.
pub fn m_of_x(x: &IntMatrix, p: u64) -> Result<ModMatrix> {
    let (r, k) = (x.rows(), x.cols());
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(r + k);
    let xm = ModMatrix::from_int(p, x)?;
    for i in 0..r {
        rows.push((0..k).map(|j| -(xm.get(i, j) as i64)).collect());
    }
    for i in 0..k {
        rows.push((0..k).map(|j| (i == j) as i64).collect());
    }
    ModMatrix::from_rows(p, &rows)
}

/// `(I_{n-k}; X^T)` reduced mod p.
pub fn n_of_x(x: &IntMatrix, p: u64) -> Result<ModMatrix> {
    let (r, k) = (x.rows(), x.cols());
    let xm = ModMatrix::from_int(p, x)?;
    let mut rows: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
    for j in 0..k {
        rows.push((0..r).map(|i| xm.get(i, j) as i64).collect());
    }
    ModMatrix::from_rows(p, &rows)
}

fn group_walk_size(n: usize, p: u64) -> Result<u64> {
    let fact: u64 = (1..=n as u64).product();
    let walk = (p - 1).checked_pow(n as u32 - 1).and_then(|d| d.checked_mul(fact));
    match walk {
        Some(w) if w <= MAX_GROUP_WALK => Ok(w),
        _ => Err(Error::Budget(format!("|W({n})| over Z_{p} is too large for a direct walk"))),
    }
}

/// Diagonal scalings with the first entry 1 (scalars act trivially).
fn scalings(n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![1u64; n]];
    for j in 1..n {
        out = out.into_iter().flat_map(|s| (1..p).map(move |a| {
            let mut t = s.clone();
            t[j] = a;
            t
        })).collect();
    }
    out
}

/// Whether M and M' lie in one W(n) x GL(k) orbit, by a direct search.
pub fn same_orbit(m: &ModMatrix, m2: &ModMatrix) -> Result<bool> {
    let (s, t) = (require_f(m)?, require_f(m2)?);
    if m.modulus != m2.modulus || m.rows != m2.rows || m.cols != m2.cols {
        return Err(Error::Shape("points of different F(n, k)".into()));
    }
    if s.f_index() != t.f_index() {
        return Ok(false);
    }
    group_walk_size(m.rows, m.modulus)?;
    let target = t.code();
    let scales = scalings(m.rows, m.modulus);
    Ok(permutations(m.rows).par_iter().any(|perm| scales.iter().any(|d| s.act(perm, d).code() == target)))
}

/// Permutations pi for which some scaling D has pi D M g = M for some g,
/// in lexicographic order.
pub fn stabilizer(m: &ModMatrix) -> Result<Vec<Vec<usize>>> {
    let s = require_f(m)?;
    group_walk_size(m.rows, m.modulus)?;
    let target = s.code();
    let scales = scalings(m.rows, m.modulus);
    let perms = permutations(m.rows);
    Ok(perms.into_par_iter().filter(|perm| scales.iter().any(|d| s.act(perm, d).code() == target)).collect())
}

/// Number of k-dimensional subspaces of F_p^n.
pub fn gaussian_binomial(n: usize, k: usize, p: u64) -> BigInt {
    let pb = BigInt::from(p);
    let num: BigInt = (0..k).map(|i| pb.pow((n - i) as u32) - 1).product();
    let den: BigInt = (0..k).map(|i| pb.pow((i + 1) as u32) - 1).product();
    num / den
}

/// |GL(k, F_p)|.
pub fn gl_order(k: usize, p: u64) -> BigInt {
    let pb = BigInt::from(p);
    (0..k).map(|i| pb.pow(k as u32) - pb.pow(i as u32)).product()
}

/// Every k-dimensional subspace as an RREF code, ascending.
fn all_codes(n: usize, k: usize, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for pivots in small::subsets(n, k) {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| ((pivots[r] + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let mut digits = vec![0u64; free.len()];
        loop {
            let mut rows = vec![vec![0u64; n]; k];
            for r in 0..k {
                rows[r][pivots[r]] = 1;
            }
            for (&(r, c), &v) in free.iter().zip(&digits) {
                rows[r][c] = v;
            }
            out.push(Space { n, p, rows }.code());
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    }
    out.sort_unstable();
    out
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

/// All orbits of W(n) x GL(k, Z_p) on F(n, k), point by point.
pub struct OrbitSpace {
    pub n: usize,
    pub k: usize,
    pub p: u64,
    codes: Vec<u64>,
    orbit: Vec<u32>,
    f: Vec<u16>,
    /// Orbit ids in order of first appearance (smallest code first).
    orbit_count: usize,
}

impl OrbitSpace {
    pub fn build(n: usize, k: usize, p: u64) -> Result<OrbitSpace> {
        require_prime(p)?;
        if !(1..n).contains(&k) || n > MAX_LAB_N {
            return Err(Error::RangeError(format!("need 1 <= k < n <= {MAX_LAB_N}")));
        }
        let total = gaussian_binomial(n, k, p);
        if total > BigInt::from(MAX_SUBSPACES) || BigInt::from(p).pow((n * k) as u32) >= BigInt::from(u64::MAX) {
            return Err(Error::Budget(format!("{total} subspaces exceeds {MAX_SUBSPACES}")));
        }
        let codes = all_codes(n, k, p);
        debug_assert_eq!(BigInt::from(codes.len()), total);
        let g = primitive_root(p);
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        let cycle: Vec<usize> = (0..n).map(|j| (j + 1) % n).collect();
        let id: Vec<usize> = (0..n).collect();
        let ones = vec![1u64; n];
        let mut scale0 = ones.clone();
        scale0[0] = g;
        let moves = [(swap, ones.clone()), (cycle, ones), (id, scale0)];
        let index = |c: u64| codes.binary_search(&c).expect("image is a k-dimensional subspace") as u32;
        let images: Vec<[u32; 3]> = codes
            .par_iter()
            .map(|&c| {
                let s = Space::from_code(n, k, p, c);
                [0, 1, 2].map(|t| index(s.act(&moves[t].0, &moves[t].1).code()))
            })
            .collect();
        let f: Vec<u16> = codes.par_iter().map(|&c| Space::from_code(n, k, p, c).f_index() as u16).collect();
        let mut parent: Vec<u32> = (0..codes.len() as u32).collect();
        for (i, im) in images.iter().enumerate() {
            for &j in im {
                let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        let mut label: BTreeMap<u32, u32> = BTreeMap::new();
        let mut orbit = vec![0u32; codes.len()];
        for i in 0..codes.len() {
            let r = find(&mut parent, i as u32);
            let next = label.len() as u32;
            orbit[i] = *label.entry(r).or_insert(next);
        }
        Ok(OrbitSpace { n, k, p, codes, orbit, f, orbit_count: label.len() })
    }

    pub fn subspaces(&self) -> usize {
        self.codes.len()
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    /// Orbit id of a point of F(n, k).
    pub fn orbit_of(&self, m: &ModMatrix) -> Result<usize> {
        if (m.rows, m.cols, m.modulus) != (self.n, self.k, self.p) {
            return Err(Error::Shape("point of a different F(n, k)".into()));
        }
        let s = require_f(m)?;
        Ok(self.orbit[self.codes.binary_search(&s.code()).expect("all subspaces listed")] as usize)
    }

    /// Every point (as a column-space representative) with its orbit and f-index.
    pub fn points(&self) -> impl Iterator<Item = (ModMatrix, usize, usize)> + '_ {
        (0..self.codes.len()).map(|i| {
            let s = Space::from_code(self.n, self.k, self.p, self.codes[i]);
            (s.as_columns(), self.orbit[i] as usize, self.f[i] as usize)
        })
    }

    pub fn census(&self) -> OrbitCensus {
        let gl = gl_order(self.k, self.p).to_u64().expect("small group");
        let mut sizes = vec![0u64; self.orbit_count];
        let mut f_of = vec![u16::MAX; self.orbit_count];
        let mut rep = vec![None; self.orbit_count];
        for (i, &o) in self.orbit.iter().enumerate() {
            let o = o as usize;
            sizes[o] += 1;
            assert!(f_of[o] == u16::MAX || f_of[o] == self.f[i], "f-index varies on an orbit");
            f_of[o] = self.f[i];
            if rep[o].is_none() {
                rep[o] = Some(i);
            }
        }
        let mut strata: BTreeMap<usize, Stratum> = BTreeMap::new();
        for o in 0..self.orbit_count {
            let st = strata.entry(f_of[o] as usize).or_insert_with(|| Stratum {
                index: f_of[o] as usize,
                orbits: 0,
                points: 0,
                orbit_sizes: Vec::new(),
                representatives: Vec::new(),
            });
            st.orbits += 1;
            st.points += sizes[o] * gl;
            st.orbit_sizes.push(sizes[o] * gl);
            let code = self.codes[rep[o].expect("nonempty orbit")];
            st.representatives.push(Space::from_code(self.n, self.k, self.p, code).as_columns());
        }
        let max_index = small::subsets(self.n, self.k).len();
        let strata: Vec<Stratum> = (1..=max_index)
            .map(|i| {
                strata.remove(&i).unwrap_or(Stratum {
                    index: i,
                    orbits: 0,
                    points: 0,
                    orbit_sizes: Vec::new(),
                    representatives: Vec::new(),
                })
            })
            .collect();
        OrbitCensus {
            n: self.n,
            k: self.k,
            p: self.p,
            subspaces: self.codes.len() as u64,
            gl_order: gl,
            points: self.codes.len() as u64 * gl,
            orbits: self.orbit_count,
            strata,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stratum {
    /// i in F_i(n, k).
    pub index: usize,
    pub orbits: usize,
    /// Points of F_i(n, k), i.e. matrices, not subspaces.
    pub points: u64,
    pub orbit_sizes: Vec<u64>,
    pub representatives: Vec<ModMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitCensus {
    pub n: usize,
    pub k: usize,
    pub p: u64,
    pub subspaces: u64,
    pub gl_order: u64,
    /// |F(n, k)|.
    pub points: u64,
    pub orbits: usize,
    /// One entry for each i = 1..C(n, k), empty strata included.
    pub strata: Vec<Stratum>,
}

impl OrbitCensus {
    pub fn stratum(&self, i: usize) -> Option<&Stratum> {
        self.strata.iter().find(|s| s.index == i)
    }
}

pub fn orbit_census(n: usize, k: usize, p: u64) -> Result<OrbitCensus> {
    Ok(OrbitSpace::build(n, k, p)?.census())
}

/// `B(X) = (I_{n-k} X; 0 d I_k)`.
pub fn b_of_x(x: &IntMatrix, d: u64) -> IntMatrix {
    let (r, k) = (x.rows(), x.cols());
    let n = r + k;
    let mut b = IntMatrix::zeros(n, n);
    for i in 0..r {
        b.set(i, i, 1.into());
        for j in 0..k {
            b.set(i, r + j, x.get(i, j).clone());
        }
    }
    for j in 0..k {
        b.set(r + j, r + j, d.into());
    }
    b
}

fn check_x(x: &IntMatrix, d: u64) -> Result<()> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::BadX("empty block".into()));
    }
    let db = BigInt::from(d);
    let coprime = |v: Vec<BigInt>| v.iter().fold(db.clone(), |g, x| g.gcd(x)).abs() == BigInt::from(1);
    if !(0..x.cols()).all(|j| coprime(x.column(j))) {
        return Err(Error::BadX(format!("a column has content sharing a factor with {d}")));
    }
    if !(0..x.rows()).all(|i| coprime(x.row(i).to_vec())) {
        return Err(Error::BadX(format!("a row has content sharing a factor with {d}")));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityReport {
    pub d: u64,
    pub b: IntMatrix,
    pub b2: IntMatrix,
    /// Subset-by-subset comparison of the two families.
    pub families: LatticeMatch,
    /// Lattice isomorphism of B(X) and B(X').
    pub lattices: LatticeMatch,
    /// Lattice isomorphism of the opposites.
    pub opposite_lattices: LatticeMatch,
    pub m_same_orbit: Option<bool>,
    pub n_same_orbit: Option<bool>,
    pub f_indices: Option<(usize, usize)>,
    /// The implications orbit(M) => orbit(N) => opposite lattices iso, and
    /// lattices iso <=> orbit(M); `None` when d is not prime.
    pub chain_holds: Option<bool>,
}

fn decided(m: &LatticeMatch) -> Option<bool> {
    match m.verdict {
        Verdict::DecidedIso => Some(true),
        Verdict::DecidedNoniso => Some(false),
        Verdict::NecessaryOnly => None,
    }
}

pub fn duality_experiment(x: &IntMatrix, x2: &IntMatrix, d: u64) -> Result<DualityReport> {
    if d < 2 {
        return Err(Error::BadX("d must be at least 2".into()));
    }
    if (x.rows(), x.cols()) != (x2.rows(), x2.cols()) {
        return Err(Error::BadX("X and X' differ in shape".into()));
    }
    check_x(x, d)?;
    check_x(x2, d)?;
    let (b, b2) = (b_of_x(x, d), b_of_x(x2, d));
    let families = lattice_match(&b, &b2)?;
    let lattices = lattice_match_exhaustive(&b, &b2)?;
    let (op, op2) = (crate::duality::opposite(&b)?.bop, crate::duality::opposite(&b2)?.bop);
    let opposite_lattices = lattice_match_exhaustive(&op, &op2)?;
    let (mut m_same, mut n_same, mut f_indices, mut chain) = (None, None, None, None);
    if is_prime(d) {
        let (m1, m2) = (m_of_x(x, d)?, m_of_x(x2, d)?);
        let (n1, n2) = (n_of_x(x, d)?, n_of_x(x2, d)?);
        let ms = same_orbit(&m1, &m2)?;
        let ns = same_orbit(&n1, &n2)?;
        f_indices = Some((f_index(&m1)?, f_index(&m2)?));
        let iso = decided(&lattices);
        let op_iso = decided(&opposite_lattices);
        chain = Some((!ms || ns) && (!ns || op_iso == Some(true)) && iso.is_none_or(|i| i == ms));
        m_same = Some(ms);
        n_same = Some(ns);
    }
    Ok(DualityReport {
        d,
        b,
        b2,
        families,
        lattices,
        opposite_lattices,
        m_same_orbit: m_same,
        n_same_orbit: n_same,
        f_indices,
        chain_holds: chain,
    })
}
