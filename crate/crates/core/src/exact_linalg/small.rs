//! Machine-integer fast paths for small square matrices. Every routine
//! returns `None` on overflow so callers can fall back to `BigInt`.

fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// In-place row HNF of a square `n x n` matrix, same normalisation as the
/// exact routine.
pub fn hnf_in_place(n: usize, m: &mut [i64]) -> Option<()> {
    let mut pr = 0;
    for col in 0..n {
        for i in (pr + 1)..n {
            let b = m[i * n + col];
            if b == 0 {
                continue;
            }
            let a = m[pr * n + col];
            if a != 0 && b % a == 0 {
                let q = b / a;
                for j in col..n {
                    m[i * n + j] = m[i * n + j].checked_sub(q.checked_mul(m[pr * n + j])?)?;
                }
                continue;
            }
            let (g, s, t) = xgcd(a, b);
            let (bg, ag) = (-(b / g), a / g);
            for j in col..n {
                let x = m[pr * n + j];
                let y = m[i * n + j];
                m[pr * n + j] = s.checked_mul(x)?.checked_add(t.checked_mul(y)?)?;
                m[i * n + j] = bg.checked_mul(x)?.checked_add(ag.checked_mul(y)?)?;
            }
        }
        let piv = m[pr * n + col];
        if piv == 0 {
            continue;
        }
        if piv < 0 {
            for j in col..n {
                m[pr * n + j] = m[pr * n + j].checked_neg()?;
            }
        }
        let piv = m[pr * n + col];
        for i in 0..pr {
            let q = m[i * n + col].div_euclid(piv);
            if q != 0 {
                for j in col..n {
                    m[i * n + j] = m[i * n + j].checked_sub(q.checked_mul(m[pr * n + j])?)?;
                }
            }
        }
        pr += 1;
        if pr == n {
            break;
        }
    }
    Some(())
}

/// `HNF(c * P)` where new column j is old column `perm[j]`.
pub fn permuted_hnf(n: usize, c: &[i64], perm: &[usize], out: &mut [i64]) -> Option<()> {
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = c[i * n + perm[j]];
        }
    }
    hnf_in_place(n, out)
}

/// Fraction-free (Bareiss) determinant of a k x k matrix given by a row
/// accessor.
pub fn det(k: usize, entry: impl Fn(usize, usize) -> i64) -> Option<i128> {
    let mut a: Vec<i128> = (0..k * k).map(|x| entry(x / k, x % k) as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for c in 0..k {
        if a[c * k + c] == 0 {
            let p = (c + 1..k).find(|&r| a[r * k + c] != 0);
            match p {
                None => return Some(0),
                Some(p) => {
                    for j in 0..k {
                        a.swap(c * k + j, p * k + j);
                    }
                    sign = -sign;
                }
            }
        }
        for i in c + 1..k {
            for j in c + 1..k {
                let v = a[i * k + j]
                    .checked_mul(a[c * k + c])?
                    .checked_sub(a[i * k + c].checked_mul(a[c * k + j])?)?;
                a[i * k + j] = v / prev;
            }
        }
        prev = a[c * k + c];
    }
    if k == 0 {
        return Some(1);
    }
    Some(sign * a[k * k - 1])
}

/// All size-`k` subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// gcd of the maximal minors of the `n x |cols|` submatrix; 1 exactly when
/// the cokernel of that column selection is torsion free.
pub fn maximal_minor_gcd(n: usize, m: &[i64], cols: &[usize]) -> Option<i128> {
    let k = cols.len();
    let mut g: i128 = 0;
    for rows in subsets(n, k) {
        let mut d = det(k, |i, j| m[rows[i] * n + cols[j]])?.abs();
        while d != 0 {
            (g, d) = (d, g % d);
        }
        if g == 1 {
            return Some(1);
        }
    }
    Some(g)
}

/// Largest m such that some m-subset of columns has trivial cokernel torsion.
pub fn max_one_block(n: usize, m: &[i64]) -> Option<usize> {
    for size in (1..=n).rev() {
        for cols in subsets(n, size) {
            if maximal_minor_gcd(n, m, &cols)? == 1 {
                return Some(size);
            }
        }
    }
    Some(0)
}
