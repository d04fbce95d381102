use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{content, IntMatrix};

/// Row-style Hermite normal form `h = u * m` with `u` unimodular.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    /// Column index of each pivot, one per nonzero row of `h`.
    pub pivots: Vec<usize>,
    /// det(u), always +1 or -1 when `u` is square.
    pub det_u: i32,
}

/// `(g, s, t)` with `s*a + t*b = g >= 0`.
pub(crate) fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn combine_rows(m: &mut IntMatrix, p: usize, i: usize, coeffs: [&BigInt; 4]) {
    // row_p <- c0*row_p + c1*row_i ; row_i <- c2*row_p + c3*row_i
    let [c0, c1, c2, c3] = coeffs;
    for j in 0..m.cols() {
        let x = m.get(p, j).clone();
        let y = m.get(i, j).clone();
        if x.is_zero() && y.is_zero() {
            continue;
        }
        m.set(p, j, c0 * &x + c1 * &y);
        m.set(i, j, c2 * &x + c3 * &y);
    }
}

fn sub_multiple(m: &mut IntMatrix, target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for j in 0..m.cols() {
        let v = m.get(src, j) * q;
        if !v.is_zero() {
            let cur = m.get(target, j) - v;
            m.set(target, j, cur);
        }
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for x in m.row_mut(i) {
        *x = -std::mem::take(x);
    }
}

/// Hermite normal form: nonnegative pivots, entries above each pivot in
/// `[0, pivot)`, zero rows at the bottom.
pub fn hnf(m: &IntMatrix) -> Hnf {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut det_u = 1;
    let mut pr = 0;
    let mut pivots = Vec::new();
    for col in 0..m.cols() {
        if pr == m.rows() {
            break;
        }
        for i in (pr + 1)..m.rows() {
            if h.get(i, col).is_zero() {
                continue;
            }
            let a = h.get(pr, col).clone();
            let b = h.get(i, col).clone();
            if !a.is_zero() && b.is_multiple_of(&a) {
                let q = &b / &a;
                sub_multiple(&mut h, i, pr, &q);
                sub_multiple(&mut u, i, pr, &q);
                continue;
            }
            let (g, s, t) = xgcd(&a, &b);
            let bg = -(&b / &g);
            let ag = &a / &g;
            combine_rows(&mut h, pr, i, [&s, &t, &bg, &ag]);
            combine_rows(&mut u, pr, i, [&s, &t, &bg, &ag]);
        }
        if h.get(pr, col).is_zero() {
            continue;
        }
        if h.get(pr, col).is_negative() {
            negate_row(&mut h, pr);
            negate_row(&mut u, pr);
            det_u = -det_u;
        }
        let piv = h.get(pr, col).clone();
        for i in 0..pr {
            let q = h.get(i, col).div_floor(&piv);
            sub_multiple(&mut h, i, pr, &q);
            sub_multiple(&mut u, i, pr, &q);
        }
        pivots.push(col);
        pr += 1;
    }
    Hnf { h, u, rank: pr, pivots, det_u }
}

pub fn rank(m: &IntMatrix) -> usize {
    hnf(m).rank
}

pub fn determinant(m: &IntMatrix) -> BigInt {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let r = hnf(m);
    if r.rank < m.rows() {
        return BigInt::zero();
    }
    let d: BigInt = r.h.diagonal().iter().product();
    if r.det_u < 0 {
        -d
    } else {
        d
    }
}

/// Square, nonsingular, and every column has content 1.
pub fn is_ns(m: &IntMatrix) -> bool {
    m.is_square()
        && m.rows() > 0
        && (0..m.cols()).all(|j| content(&m.column(j)).is_one())
        && !determinant(m).is_zero()
}
