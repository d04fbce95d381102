#![allow(dead_code)]

use num_bigint::BigInt;
use phlat::IntMatrix;

pub fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn bigs(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

/// Cofactor-expansion determinant, independent of the HNF route.
pub fn det_cofactor(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return a[0][0] as i128;
    }
    let mut s = 0i128;
    for j in 0..n {
        if a[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> =
            a[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        s += sign * a[0][j] as i128 * det_cofactor(&minor);
    }
    s
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_u(a: u64, b: u64) -> u64 {
    gcd(a as i128, b as i128) as u64
}

pub fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combos(n - 1, k);
    for mut c in combos(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Determinantal divisors: gcd of all k x k minors, k = 1..rank.
pub fn determinantal_divisors(a: &[Vec<i64>]) -> Vec<i128> {
    let r = a.len();
    let c = a[0].len();
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = 0i128;
        for rows in combos(r, k) {
            for cols in combos(c, k) {
                let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j]).collect()).collect();
                g = gcd(g, det_cofactor(&sub));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g);
    }
    out
}

/// Torsion invariants from determinantal divisors (the oracle for SNF).
pub fn invariant_factors_oracle(a: &[Vec<i64>]) -> Vec<i128> {
    let dd = determinantal_divisors(a);
    let mut prev = 1i128;
    let mut out = Vec::new();
    for d in dd {
        let f = d / prev;
        if f != 1 {
            out.push(f);
        }
        prev = d;
    }
    out
}

pub fn to_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    let v = m.to_i64().expect("fits");
    v.chunks(m.cols()).map(|c| c.to_vec()).collect()
}

pub fn from_vec(r: usize, c: usize, v: &[i64]) -> IntMatrix {
    IntMatrix::from_i64(r, c, v)
}

/// Integer matrix with unit determinant built from elementary operations.
pub fn unimodular_from_ops(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut u: Vec<i64> = vec![0; n * n];
    for i in 0..n {
        u[i * n + i] = 1;
    }
    for &(a, b, k) in ops {
        let (a, b) = (a % n, b % n);
        if a == b {
            for j in 0..n {
                u.swap(a * n + j, ((a + 1) % n) * n + j);
            }
            continue;
        }
        for j in 0..n {
            u[a * n + j] += k * u[b * n + j];
        }
    }
    IntMatrix::from_i64(n, n, &u)
}

pub fn gcd_i(a: i64, b: i64) -> i64 {
    gcd(a as i128, b as i128) as i64
}

/// Euler phi by trial division, for oracles.
pub fn phi(mut n: u64) -> u64 {
    let mut r = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if n > 1 {
        r -= r / n;
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}
