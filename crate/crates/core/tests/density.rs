mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use phlat::density::constants::{inverse_zeta_product_limit, tf_numerator};
use phlat::density::poly::{normalized_rank_count, rank_count_identity};
use phlat::density::*;
use phlat::structure::max_one_block;
use phlat::IntMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u64 = 20_000;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn inv_pow(p: u64, k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(k))
}

/// Rank over F_p by elimination on a row-major copy.
fn rank_mod_p(rows: usize, cols: usize, m: &[u64], p: u64) -> usize {
    let mut a = m.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] % p != 0) else { continue };
        for k in 0..cols {
            a.swap(r * cols + k, piv * cols + k);
        }
        let inv = (1..p).find(|x| x * a[r * cols + c] % p == 1).unwrap();
        for i in 0..rows {
            if i != r && a[i * cols + c] % p != 0 {
                let f = a[i * cols + c] * inv % p;
                for k in 0..cols {
                    a[i * cols + k] = (a[i * cols + k] + p * p - f * a[r * cols + k] % p) % p;
                }
            }
        }
        r += 1;
    }
    r
}

fn for_each_matrix_mod_p(n: usize, p: u64, mut f: impl FnMut(&[u64])) {
    let mut m = vec![0u64; n * n];
    loop {
        f(&m);
        let mut i = 0;
        while i < m.len() {
            m[i] += 1;
            if m[i] < p {
                break;
            }
            m[i] = 0;
            i += 1;
        }
        if i == m.len() {
            return;
        }
    }
}

#[test]
fn landsberg_examples_and_completeness() {
    assert_eq!(landsberg_count(2, 0, 2).unwrap(), BigInt::from(6));
    for p in [2, 3, 5, 7] {
        assert_eq!(landsberg_count(3, 3, p).unwrap(), BigInt::one());
        for n in 1..=4 {
            let total: BigInt = (0..=n).map(|s| landsberg_count(n, s, p).unwrap()).sum();
            assert_eq!(total, BigInt::from(p).pow((n * n) as u32), "n={n} p={p}");
        }
    }
    assert!(landsberg_count(2, 3, 2).is_err());
    assert!(landsberg_count(2, 0, 4).is_err());
}

#[test]
fn landsberg_matches_rank_census() {
    for (n, p) in [(2usize, 2u64), (2, 3), (2, 5), (3, 2), (3, 3)] {
        let mut by_rank = vec![0u64; n + 1];
        for_each_matrix_mod_p(n, p, |m| by_rank[rank_mod_p(n, n, m, p)] += 1);
        for s in 0..=n {
            assert_eq!(landsberg_count(n, s, p).unwrap(), BigInt::from(by_rank[n - s]), "n={n} s={s} p={p}");
            let expect = BigRational::new(BigInt::from(by_rank[n - s]), BigInt::from(p).pow((n * n) as u32));
            assert_eq!(normalized_rank_count(n, s, p), expect);
        }
    }
}

#[test]
fn rank_series_sum_to_one() {
    for n in 1..=8 {
        assert_eq!(rank_count_identity(n).unwrap(), QPolynomial::one(), "n={n}");
    }
}

/// Maclaurin coefficients of a_s through `deg` by plain integer series
/// arithmetic, independent of the polynomial division.
fn a_series(s: usize, n: Option<usize>, deg: usize) -> Vec<i64> {
    let mul = |a: &[i64], b: &[i64]| -> Vec<i64> {
        let mut out = vec![0i64; deg + 1];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let one_minus = |k: usize| {
        let mut v = vec![0i64; deg + 1];
        v[0] = 1;
        if k <= deg {
            v[k] -= 1;
        }
        v
    };
    let geometric = |k: usize| (0..=deg).map(|i| (i % k == 0) as i64).collect::<Vec<_>>();
    let mut sum = vec![0i64; deg + 1];
    for j in 0..=s {
        let mut c = vec![0i64; deg + 1];
        if j * j <= deg {
            c[j * j] = 1;
        }
        for i in 1..=j {
            c = mul(&c, &geometric(i));
            c = mul(&c, &geometric(i));
            if let Some(n) = n {
                c = mul(&c, &one_minus(n + 1 - i));
            }
        }
        for (x, y) in sum.iter_mut().zip(&c) {
            *x += y;
        }
    }
    (1..(s + 1) * (s + 1)).fold(sum, |acc, i| mul(&acc, &one_minus(i)))
}

fn coeffs_i64(a: &QPolynomial, deg: usize) -> Vec<i64> {
    (0..=deg).map(|k| a.coeff(k).to_integer().to_i64().unwrap()).collect()
}

#[test]
fn maclaurin_examples() {
    assert_eq!(maclaurin_truncation(1).unwrap(), QPolynomial::from_ints(&[1, 0, 0, 0, 0, 0, -1]));
    assert_eq!(maclaurin_truncation(1).unwrap().to_string(), "1 - z^6");
    for s in 1..=3usize {
        let a = maclaurin_truncation(s).unwrap();
        let k = (s + 1) * (s + 1) + 2;
        assert_eq!(a.coeff(0), BigRational::one());
        for d in 1..k {
            assert!(a.coeff(d).is_zero(), "s={s} degree {d}");
        }
        assert_eq!(a.coeff(k), rat(-1, 1), "s={s}");
        assert!(a.coeffs().iter().all(|c| c.is_integer()));
    }
    assert!(maclaurin_truncation(0).is_err());
    assert!(maclaurin_truncation_n(1, 5).is_err());
}

#[test]
fn maclaurin_polynomials_match_series() {
    for s in 1..=3usize {
        let a = maclaurin_truncation(s).unwrap();
        let deg = a.degree() as usize + 10;
        assert_eq!(coeffs_i64(&a, deg), a_series(s, None, deg), "s={s}");
    }
}

#[test]
fn maclaurin_n_dependent_variant() {
    for s in 1..=3usize {
        let k = (s + 1) * (s + 1) + 2;
        for n in (k..=20).filter(|&n| n > k - 1) {
            let a = maclaurin_truncation_n(s, n).unwrap();
            let deg = a.degree() as usize + 4;
            assert_eq!(coeffs_i64(&a, deg), a_series(s, Some(n), deg), "s={s} n={n}");
            let head: Vec<i64> = coeffs_i64(&a, k);
            let mut expect = vec![0i64; k + 1];
            expect[0] = 1;
            expect[k] = -1;
            assert_eq!(head, expect, "s={s} n={n}");
        }
    }
}

#[test]
fn f_constant_values() {
    let f1 = f_constant(1, 1000).unwrap();
    assert_eq!(f1.value, Real::one());
    assert_eq!(f1.tail_bound, 1e-60);
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    let f2 = f_constant(2, 1_000_000).unwrap();
    assert!((f2.to_f64() - 1.0 / zeta2).abs() < 1e-6);
    assert!((f2.to_f64() - 1.0 / zeta2).abs() <= f2.tail_bound);
    // Landau's totient constant and the carefree constant, literature digits
    let f0 = f_constant(0, 100_000).unwrap();
    assert!((f0.to_f64() - 1.943_596_436_820_759).abs() <= f0.tail_bound);
    let f3 = f_constant(3, 100_000).unwrap();
    assert!((f3.to_f64() - 0.428_249_505_677_094_4).abs() <= f3.tail_bound);
    // zeta(2) zeta(3) / zeta(6) = F(0)
    let z = |k| zeta(k, 100_000).unwrap();
    let q = z(2).mul(&z(3)).mul(&z(6).recip());
    assert!((q.to_f64() - f0.to_f64()).abs() <= q.tail_bound + f0.tail_bound);
}

#[test]
fn f_is_decreasing_and_log_convex() {
    let f: Vec<f64> = (0..=12).map(|s| f_constant(s, P).unwrap().to_f64()).collect();
    for k in 0..12 {
        assert!(f[k + 1] < f[k], "F({}) >= F({k})", k + 1);
    }
    for k in 1..12 {
        assert!(f[k] * f[k] <= f[k - 1] * f[k + 1], "log-convexity at {k}");
    }
}

#[test]
fn telescoping_partial_sums() {
    let f = constants::f_truncated(14, P).unwrap();
    for n in 0..=10usize {
        let mut partial = Real::zero();
        for j in 0..=n {
            let t = forward_difference(&f, j, 1);
            partial = if j % 2 == 0 { &partial + &t } else { &partial - &t };
        }
        let gap = (&partial - &f[0]).abs();
        let bound = forward_difference(&f, n + 1, 0).abs();
        assert!(gap <= &bound + &Real::from_ratio(&BigInt::one(), &BigInt::from(10u64.pow(15))), "N={n}");
    }
}

#[test]
fn d_sequence_decreases_to_zero() {
    let d = d_sequence(30, P).unwrap();
    let f0 = f_constant(0, P).unwrap().value;
    assert_eq!(d[0], f0);
    for n in 0..30 {
        assert!(d[n + 1] < d[n] && !d[n + 1].is_negative(), "n={n}");
    }
    assert!(d[30].to_f64() < 1e-3);
    // the substituted numerator is F(0) - D(n)
    for n in 3..=8u32 {
        let sub = tf_numerator_substituted(n, P).unwrap();
        assert!(((&f0 - &d[n as usize]).to_f64() - sub.to_f64()).abs() < 1e-30);
    }
}

#[test]
fn tail_bounds_are_honest() {
    let pairs: Vec<(PrimeProduct, PrimeProduct)> = [5_000u64, 10_000]
        .windows(2)
        .flat_map(|w| {
            let (a, b) = (w[0], w[1]);
            let mut v = Vec::new();
            for s in [0, 2, 3, 6] {
                v.push((f_constant(s, a).unwrap(), f_constant(s, b).unwrap()));
            }
            v.push((zeta(3, a).unwrap(), zeta(3, b).unwrap()));
            v.push((inverse_zeta_product(5, a).unwrap(), inverse_zeta_product(5, b).unwrap()));
            v.push((inverse_zeta_product_limit(a).unwrap(), inverse_zeta_product_limit(b).unwrap()));
            v.push((ns_density(3, a).unwrap(), ns_density(3, b).unwrap()));
            v.push((deficiency_density(None, 1, a).unwrap(), deficiency_density(None, 1, b).unwrap()));
            v.push((deficiency_density(Some(12), 2, a).unwrap(), deficiency_density(Some(12), 2, b).unwrap()));
            for n in 3..=6 {
                v.push((tf_density_formula(n, a).unwrap(), tf_density_formula(n, b).unwrap()));
            }
            v
        })
        .collect();
    for (small, large) in &pairs {
        let change = (small.to_f64() - large.to_f64()).abs();
        assert!(change <= small.tail_bound, "{}: {change} > {}", small.label, small.tail_bound);
        assert!(large.tail_bound <= small.tail_bound, "{}", small.label);
    }
}

#[test]
fn deficiency_examples() {
    let one = deficiency_density(None, 1, 100_000).unwrap();
    assert!((one.to_f64() - 0.845).abs() < 5e-3, "{}", one.to_f64());
    // zeta(2) zeta(3) / zeta(6) over prod zeta(k)
    let f0 = f_constant(0, 100_000).unwrap();
    let alt = f0.mul(&inverse_zeta_product_limit(100_000).unwrap());
    assert!((alt.to_f64() - one.to_f64()).abs() <= alt.tail_bound + one.tail_bound);
    assert!(deficiency_density(None, 2, 10_000).unwrap().interval().0 > 0.99);
    assert!(deficiency_density(None, 3, 10_000).unwrap().interval().0 > 0.9999);
    assert!(deficiency_density(Some(5), 1, 100).is_err());
    assert!(deficiency_density(None, 0, 100).is_err());
}

#[test]
fn deficiency_local_factor_counts_ranks() {
    for (n, s) in [(6u32, 1u32), (7, 1), (11, 2)] {
        for p in [2u64, 3, 5] {
            let direct: BigInt = (0..=s as usize).map(|t| landsberg_count(n as usize, t, p).unwrap()).sum();
            let expect = BigRational::new(direct, BigInt::from(p).pow(n * n));
            assert_eq!(deficiency_local_factor(n, s, p).unwrap(), expect, "n={n} s={s} p={p}");
        }
    }
}

#[test]
fn ns_density_is_zeta_power() {
    let ns = ns_density(3, 100_000).unwrap();
    let iz = inverse_zeta(3, 100_000).unwrap();
    let cube = iz.mul(&iz).mul(&iz);
    assert!((ns.to_f64() - cube.to_f64()).abs() <= ns.tail_bound + cube.tail_bound);
}

/// Local probability, by exhaustive count over F_p, that every column is
/// nonzero and, for each of the first j columns, the other n - 1 columns are
/// independent.
fn local_intersection(n: usize, j: usize, p: u64) -> BigRational {
    let mut hits = 0u64;
    for_each_matrix_mod_p(n, p, |m| {
        let nonzero = (0..n).all(|c| (0..n).any(|r| m[r * n + c] != 0));
        if !nonzero {
            return;
        }
        let ok = (0..j).all(|omit| {
            let sub: Vec<u64> = (0..n).flat_map(|r| (0..n).filter(move |&c| c != omit).map(move |c| m[r * n + c])).collect();
            rank_mod_p(n, n - 1, &sub, p) == n - 1
        });
        hits += ok as u64;
    });
    BigRational::new(BigInt::from(hits), BigInt::from(p).pow((n * n) as u32))
}

#[test]
fn inclusion_exclusion_local_factors() {
    for (n, p) in [(3usize, 2u64), (3, 3), (3, 5), (4, 2)] {
        let base: BigRational = (2..=n as u32).map(|k| BigRational::one() - inv_pow(p, k)).product();
        for j in 1..=n {
            let factor = match j {
                1 => BigRational::one() - inv_pow(p, n as u32),
                2 => BigRational::one() - inv_pow(p, 2),
                _ => f_factor(j as u32, p),
            };
            assert_eq!(local_intersection(n, j, p), factor * &base, "n={n} j={j} p={p}");
        }
    }
}

#[test]
fn tf_density_shape() {
    let v: Vec<PrimeProduct> = (3..=8).map(|n| tf_density_formula(n, 100_000).unwrap()).collect();
    for w in v.windows(2) {
        assert!(w[0].interval().1 < w[1].interval().0, "{} then {}", w[0].label, w[1].label);
    }
    let limit = deficiency_density(None, 1, 100_000).unwrap();
    assert!(v.iter().all(|t| t.interval().1 < limit.interval().0));
    // the numerator differs from the substituted one by n (1/zeta(n) - 1)
    for n in 3..=8u32 {
        let a = tf_numerator(n, P).unwrap();
        let b = tf_numerator_substituted(n, P).unwrap();
        let iz = inverse_zeta(n, P).unwrap();
        let expect = n as f64 * (iz.to_f64() - 1.0);
        assert!((a.to_f64() - b.to_f64() - expect).abs() < 1e-9);
    }
    assert!(tf_density_formula(2, 100).is_err());
}

#[test]
fn monte_carlo_is_reproducible() {
    let a = monte_carlo_tf_density(3, 50, 10_000, 7).unwrap();
    let b = monte_carlo_tf_density(3, 50, 10_000, 7).unwrap();
    assert_eq!((a.hits, a.ns_hits), (b.hits, b.ns_hits));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| monte_carlo_tf_density(3, 50, 10_000, 7).unwrap());
    assert_eq!((a.hits, a.ns_hits), (c.hits, c.ns_hits));
    let d = monte_carlo_tf_density(3, 50, 10_000, 8).unwrap();
    assert_ne!((a.hits, a.ns_hits), (d.hits, d.ns_hits));
    assert!(monte_carlo_tf_density(6, 10, 10, 1).is_err());
}

#[test]
fn monte_carlo_frequencies() {
    let r = monte_carlo_tf_density(3, 1000, 40_000, 11).unwrap();
    let ns = ns_density(3, 100_000).unwrap().to_f64();
    assert!((r.ns_estimate - ns).abs() < 4.0 * r.ns_stderr, "{} vs {ns}", r.ns_estimate);
    let tf = tf_density_formula(3, 100_000).unwrap().to_f64();
    assert!((r.estimate - tf).abs() < 4.0 * r.stderr, "{} vs {tf}", r.estimate);
    let r4 = monte_carlo_tf_density(4, 1000, 40_000, 12).unwrap();
    let tf4 = tf_density_formula(4, 100_000).unwrap().to_f64();
    assert!((r4.estimate - tf4).abs() < 4.0 * r4.stderr, "{} vs {tf4}", r4.estimate);
}

#[test]
fn classification_matches_exact_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=4usize {
        for _ in 0..600 {
            let m: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-4..=4)).collect();
            let b = IntMatrix::from_i64(n, n, &m);
            let ns = phlat::exact_linalg::is_ns(&b);
            let large = ns && max_one_block(&b).unwrap() + 1 >= n;
            assert_eq!(classify_sample(n, &m), SampleClass { ns, large_block: large }, "{m:?}");
        }
    }
}

proptest! {
    #[test]
    fn duplicate_columns_never_count(v in proptest::collection::vec(-1000i64..=1000, 6), dup in 0usize..3, src in 0usize..3) {
        let mut m = vec![0i64; 9];
        let mut k = 0;
        for r in 0..3 {
            for c in 0..3 {
                if c != dup {
                    m[r * 3 + c] = v[k];
                    k += 1;
                }
            }
        }
        let src = if src == dup { (dup + 1) % 3 } else { src };
        for r in 0..3 {
            m[r * 3 + dup] = m[r * 3 + src];
        }
        prop_assert_eq!(classify_sample(3, &m), SampleClass { ns: false, large_block: false });
    }

    #[test]
    fn real_arithmetic_tracks_f64(a in -1e6f64..1e6, b in 1e-3f64..1e6) {
        let ra = Real::from_ratio(&BigInt::from((a * 1e6) as i64), &BigInt::from(1_000_000));
        let rb = Real::from_ratio(&BigInt::from((b * 1e6) as i64), &BigInt::from(1_000_000));
        let (fa, fb) = (ra.to_f64(), rb.to_f64());
        prop_assert!(((&ra * &rb).to_f64() - fa * fb).abs() <= 1e-9 * (fa * fb).abs().max(1.0));
        prop_assert!((ra.div(&rb).to_f64() - fa / fb).abs() <= 1e-9 * (fa / fb).abs().max(1.0));
        prop_assert!(((&ra + &rb).to_f64() - (fa + fb)).abs() <= 1e-9 * (fa + fb).abs().max(1.0));
    }

    #[test]
    fn polynomial_ring_laws(a in proptest::collection::vec(-5i64..5, 0..6), b in proptest::collection::vec(-5i64..5, 0..6), c in proptest::collection::vec(-5i64..5, 1..5)) {
        let (a, b, c) = (QPolynomial::from_ints(&a), QPolynomial::from_ints(&b), QPolynomial::from_ints(&c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!((&a * &c).truncate(3), (&a.truncate(3) * &c.truncate(3)).truncate(3));
        if !c.is_zero() {
            let (qq, r) = a.div_rem(&c).unwrap();
            prop_assert_eq!(&(&qq * &c) + &r, a.clone());
            prop_assert!(r.degree() < c.degree());
            prop_assert_eq!((&a * &c).div_exact(&c).unwrap(), a.clone());
        }
        let z = rat(2, 3);
        prop_assert_eq!((&a * &b).eval(&z), a.eval(&z) * b.eval(&z));
    }
}

#[test]
fn real_formatting() {
    let third = Real::from_ratio(&BigInt::one(), &BigInt::from(3));
    assert_eq!(third.to_decimal(10), "0.3333333333");
    assert_eq!((-&third).to_decimal(3), "-0.333");
    assert_eq!(Real::from_int(7).to_decimal(0), "7");
    assert_eq!(format!("{:.2}", Real::from_int(2)), "2.00");
    let err = (&(&third * 3) - &Real::one()).abs();
    assert!(err.to_f64() < 1e-70);
}

#[test]
fn sieve_counts() {
    assert_eq!(primes_up_to(1), Vec::<u64>::new());
    assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    assert!(common::is_prime(*primes_up_to(10_000).last().unwrap()));
}
