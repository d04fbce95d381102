//! Acceptance criteria 1-12. Each test prints its sub-checks and a single
//! PASS/FAIL line straight to stdout (bypassing the harness capture), then
//! asserts every sub-check.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use phlat::counting::arith::{jordan, phi, ArithFn};
use phlat::counting::fixed::{s_fixed_enumerate, transposition_fn};
use phlat::counting::printed::deviations;
use phlat::counting::{block2_counts, nonblock2_count, ph_count_3, ph_count_3_small_shapes, ph_count_bruteforce, ClassCensus};
use phlat::density::{
    deficiency_density, f_constant, maclaurin_truncation, monte_carlo_tf_density, tf_density_formula, QPolynomial,
};
use phlat::duality::{involution_check, opposite, sequence_splits};
use phlat::equivalence::{canonical_representative, entry_fraction, ph_equivalent, single_p_test};
use phlat::exact_linalg::determinant;
use phlat::invariants::{j_group, j_tuple};
use phlat::orbitlab::{dual_space, f_index, orbit_census, OrbitSpace};
use phlat::structure::{
    class_one_block_sizes, for_each_weakly_terminal, max_one_block, permutations, weakly_terminal, StandardForm,
};
use phlat::IntMatrix;

struct Report {
    id: u32,
    title: &'static str,
    checks: Vec<(bool, String)>,
}

impl Report {
    fn new(id: u32, title: &'static str) -> Self {
        Report { id, title, checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        self.checks.push((ok, msg.into()));
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.checks.push((true, format!("note: {}", msg.into())));
    }

    fn finish(self) {
        let pass = self.checks.iter().all(|c| c.0);
        let mut out = String::new();
        for (ok, msg) in &self.checks {
            out += &format!("    [{}] {msg}\n", if *ok { "ok" } else { "FAILED" });
        }
        out += &format!("{} criterion {}: {}\n", if pass { "PASS" } else { "FAIL" }, self.id, self.title);
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(out.as_bytes()).unwrap();
        stdout.flush().unwrap();
        let failed: Vec<&String> = self.checks.iter().filter(|c| !c.0).map(|c| &c.1).collect();
        assert!(pass, "criterion {} failed: {failed:?}", self.id);
    }
}

fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn bigs(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

/// Euler phi by trial division.
fn totient(n: u64) -> u64 {
    let f = factor_count(n);
    let distinct: BTreeSet<u64> = f.into_iter().collect();
    distinct.iter().fold(n, |r, p| r / p * (p - 1))
}

fn census3() -> &'static BTreeMap<u64, ClassCensus> {
    static CENSUS: OnceLock<BTreeMap<u64, ClassCensus>> = OnceLock::new();
    CENSUS.get_or_init(|| (2..=100u64).into_par_iter().map(|d| (d, ph_count_bruteforce(3, d).unwrap())).collect())
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

fn factor_count(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        while d % p == 0 {
            out.push(p);
            d /= p;
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

#[test]
fn criterion_01_class_counts() {
    let mut r = Report::new(1, "PH-class counts 23 / 135 / 477 by formula and census, each < 60 s");
    for (d, want) in [(9u64, 23i64), (25, 135), (49, 477)] {
        let t = Instant::now();
        let formula = ph_count_3(d).unwrap();
        let el_f = t.elapsed();
        let t = Instant::now();
        let census = ph_count_bruteforce(3, d).unwrap().classes();
        let el_c = t.elapsed();
        r.check(formula == big(want), format!("d={d}: formula {formula} (want {want}), {el_f:.2?}"));
        r.check(census as i64 == want, format!("d={d}: census {census} (want {want}), {el_c:.2?}"));
        r.check(el_f < Duration::from_secs(60) && el_c < Duration::from_secs(60), format!("d={d}: both under 60 s"));
    }
    r.finish();
}

#[test]
fn criterion_02_prime_and_biprime_closed_forms() {
    let mut r = Report::new(2, "closed forms for d = p <= 50 and d = pq <= 100 equal the census");
    let census = census3();
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut shapes = Vec::new();
    for p in primes_up_to(50) {
        shapes.push(p);
    }
    for d in 2..=100u64 {
        let f = factor_count(d);
        if f.len() == 2 && f[0] != f[1] {
            shapes.push(d);
        }
    }
    for d in shapes {
        let classes = BigInt::from(census[&d].classes());
        match ph_count_3_small_shapes(d).unwrap() {
            Some(v) => {
                checked += 1;
                if v != classes {
                    bad.push(format!("d={d}: formula {v}, census {classes}"));
                }
            }
            None => r.note(format!("d={d}: outside the odd-prime hypothesis (d = p expression gives 15/6); census {classes}")),
        }
    }
    r.check(bad.is_empty(), format!("{checked} values of d agree exactly {bad:?}"));
    r.check(checked == 14 + 30, format!("coverage: {checked} of 44 shapes (d = 2 excluded)"));
    r.finish();
}

fn weakly_terminal_oracle(n: usize) -> ArithFn {
    let mut fs = vec![phi()];
    fs.extend((2..n as u32).map(jordan));
    ArithFn::convolve_all(&fs)
}

#[test]
fn criterion_03_census_identity() {
    let mut r = Report::new(3, "weakly terminal census = (phi*J_2*...*J_{n-1})(d)");
    for (n, top) in [(2usize, 200u64), (3, 200), (4, 60)] {
        let f = weakly_terminal_oracle(n);
        let bad: Vec<u64> = (1..=top)
            .into_par_iter()
            .filter(|&d| {
                let mut count = 0u64;
                for_each_weakly_terminal(n, d, |_| count += 1);
                BigInt::from(count) != f.eval(d).unwrap()
            })
            .collect();
        r.check(bad.is_empty(), format!("n={n}, d <= {top}: mismatches at {bad:?}"));
    }
    r.finish();
}

#[test]
fn criterion_04_burnside() {
    let mut r = Report::new(4, "6 * classes = sum of S(pi)(d) by enumeration; transposition convolution");
    let census = census3();
    let perms = permutations(3);
    let rows: Vec<(u64, Vec<u64>)> =
        (2..=100u64).into_par_iter().map(|d| (d, perms.iter().map(|p| s_fixed_enumerate(p, 3, d).unwrap()).collect())).collect();
    let mut burnside = Vec::new();
    let mut conv = Vec::new();
    let t = transposition_fn(3);
    for (d, s) in &rows {
        if 6 * census[d].classes() as u64 != s.iter().sum::<u64>() {
            burnside.push(*d);
        }
        for (p, v) in perms.iter().zip(s) {
            let moved = p.iter().enumerate().filter(|(i, x)| i != *x).count();
            if moved == 2 && t.eval(*d).unwrap() != BigInt::from(*v) {
                conv.push((*d, p.clone()));
            }
        }
    }
    r.check(burnside.is_empty(), format!("Burnside identity for 2 <= d <= 100, failures {burnside:?}"));
    r.check(conv.is_empty(), format!("transposition convolution vs enumeration, failures {conv:?}"));
    for dev in deviations(100).iter().filter(|d| d.formula != "prime fixed-point formula with O(j) in the exponent") {
        r.note(format!("printed {} at {}: {} vs computed {}", dev.formula, dev.argument, dev.printed, dev.computed));
    }
    r.finish();
}

#[test]
fn criterion_05_block_sizes() {
    let mut r = Report::new(5, "block2 + nonblock2 = classes; nonblock2(30) = 8; nonblock2(pqr) = phi");
    let census = census3();
    let mut bad = Vec::new();
    let mut checked = 0;
    for d in 2..=100u64 {
        let f = factor_count(d);
        if f.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        checked += 1;
        let c = &census[&d];
        let total = BigInt::from(c.classes());
        let nb = nonblock2_count(d).unwrap();
        let observed_nb = c.orbits.iter().filter(|o| o.max_one_block < 2).count();
        if block2_counts(d).unwrap().total() + &nb != total || nb != BigInt::from(observed_nb) {
            bad.push(d);
        }
        if f.len() == 3 {
            r.check(nb == BigInt::from(totient(d)), format!("d={d} = pqr: nonblock2 {nb} = phi(d) {}", totient(d)));
        }
    }
    r.check(bad.is_empty(), format!("{checked} square-free d <= 100, failures {bad:?}"));
    r.check(nonblock2_count(30).unwrap() == big(8), format!("nonblock2_count(30) = {}", nonblock2_count(30).unwrap()));
    r.finish();
}

#[test]
fn criterion_06_worked_equivalence() {
    let mut r = Report::new(6, "determinant-6 worked examples");
    let c = m(&[&[1, 1, 2], &[0, 2, 0], &[0, 0, 3]]);
    let c2 = m(&[&[1, 0, 2], &[0, 1, 3], &[0, 0, 6]]);
    let u = m(&[&[2, -1, -1], &[3, -1, -2], &[6, -3, -4]]);
    let p = m(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
    match ph_equivalent(&c, &c2).unwrap() {
        Some(cert) => {
            r.check(cert.u == u, format!("U = {}", cert.u));
            r.check(IntMatrix::permutation_matrix(&cert.perm) == p, format!("P from perm {:?}", cert.perm));
            r.check(cert.u.mul(&c) == c2.mul(&p), "U C = C' P");
        }
        None => r.check(false, "pair reported inequivalent"),
    }
    let sizes = class_one_block_sizes(&c).unwrap();
    r.check(sizes == BTreeSet::from([1, 2]), format!("class 1-block sizes {sizes:?}"));
    let a23 = StandardForm::from_i64(6, &[2, 3]).unwrap().matrix();
    let a43 = StandardForm::from_i64(6, &[4, 3]).unwrap().matrix();
    r.check(ph_equivalent(&a23, &a43).unwrap().is_none(), "a = (2,3) and (4,3) are not PH-equivalent");
    let c1 = m(&[&[1, 1, 1], &[0, 2, 0], &[0, 0, 3]]);
    r.check(ph_equivalent(&c, &c1).unwrap().is_none(), "their terminal forms are not PH-equivalent");
    r.check(
        [&c, &c1, &a23, &a43].iter().all(|x| j_group(x).factors() == [big(6)]),
        "all four have J(B) = Z_6",
    );
    r.finish();
}

#[test]
fn criterion_07_duality_invariants() {
    let mut r = Report::new(7, "duality invariants, exhaustive n = 3, d <= 30");
    let failures: Vec<String> = (1..=30u64)
        .into_par_iter()
        .flat_map_iter(|d| {
            let mut ms = Vec::new();
            for_each_weakly_terminal(3, d, |x| ms.push(IntMatrix::from_i64(3, 3, x)));
            let mut bad = Vec::new();
            for b in ms {
                let dd = opposite(&b).unwrap();
                let mut fails = Vec::new();
                if dd.bop.transpose().mul(&b) != dd.delta() {
                    fails.push("Bop^T B = Delta");
                }
                if !involution_check(&b).unwrap() {
                    fails.push("(Bop)op = B");
                }
                let lcm = dd.m.iter().fold(BigInt::one(), |a, x| a.lcm(x));
                if j_group(&b).exponent() != lcm || j_group(&dd.bop).exponent() != lcm {
                    fails.push("Exp J = lcm m(i)");
                }
                let prod: BigInt = j_tuple(&b).unwrap().iter().map(|g| g.order()).product();
                let dsq = BigInt::from(d * d);
                if !(&dsq % &prod).is_zero() || determinant(&dd.bop).abs() != dsq / prod {
                    fails.push("|det Bop| = d^2 / prod |J(B_Omega(i))|");
                }
                if !fails.is_empty() {
                    bad.push(format!("{b}: {fails:?}"));
                }
            }
            bad
        })
        .collect();
    let total: u64 = (1..=30).map(|d| phlat::counting::weakly_terminal_count(3, d).unwrap().try_into().unwrap_or(0u64)).sum();
    r.check(failures.is_empty(), format!("{total} matrices, failures {:?}", &failures[..failures.len().min(5)]));
    for p in [2i64, 3] {
        let b = m(&[&[1, 1, 1], &[0, p, p * p], &[0, 0, p * p * p]]);
        let dd = opposite(&b).unwrap();
        r.check(!sequence_splits(&b).unwrap(), format!("p={p}: sequence does not split"));
        r.check(dd.m == bigs(&[p * p * p, p * p, p * p * p]), format!("p={p}: m = {:?}", dd.m));
    }
    r.finish();
}

#[test]
fn criterion_08_maclaurin_exactness() {
    let mut r = Report::new(8, "truncated product identities, exact");
    let t = Instant::now();
    let a1 = maclaurin_truncation(1).unwrap();
    r.check(a1 == QPolynomial::from_ints(&[1, 0, 0, 0, 0, 0, -1]), format!("a_1 = {a1}"));
    for s in [2usize, 3] {
        let a = maclaurin_truncation(s).unwrap();
        let k = (s + 1) * (s + 1) + 2;
        let zero = (1..k).all(|d| a.coeff(d).is_zero());
        r.check(a.coeff(0).is_one() && zero, format!("s={s}: coefficients 1..{} vanish", k - 1));
        r.check(a.coeff(k) == BigRational::from_integer(big(-1)), format!("s={s}: coefficient {k} = {}", a.coeff(k)));
    }
    let el = t.elapsed();
    r.check(el < Duration::from_secs(1), format!("{el:.2?}"));
    r.finish();
}

#[test]
fn criterion_09_density_constants() {
    let mut r = Report::new(9, "density constants at P_max = 10^6");
    let pm = 1_000_000;
    let f0 = f_constant(0, pm).unwrap();
    let f3 = f_constant(3, pm).unwrap();
    let round4 = |x: f64| (x * 1e4).round() / 1e4;
    r.check(round4(f0.to_f64()) == 1.9436, format!("F(0) = {:.8} (+- {:.1e}), quoted 1.943596", f0.to_f64(), f0.tail_bound));
    r.check(round4(f3.to_f64()) == 0.4262, format!("F(3) = {:.8} (+- {:.1e}), quoted 0.42624", f3.to_f64(), f3.tail_bound));
    let def = deficiency_density(None, 1, pm).unwrap();
    r.check((def.to_f64() - 0.8450).abs() <= 0.001, format!("deficiency limit s=1: {:.10}, quoted 0.8450 +- 0.001", def.to_f64()));
    let quoted = [0.55, 0.6, 0.7, 0.8];
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    for (n, q) in (3..=6u32).zip(quoted) {
        let tf = tf_density_formula(n, pm).unwrap().to_f64();
        r.check((tf - q).abs() <= 0.05, format!("tf({n}) = {tf:.6}, quoted {q} +- 0.05"));
        monotone &= tf > prev;
        prev = tf;
    }
    r.check(monotone, "tf(3..6) increasing");
    r.finish();
}

#[test]
fn criterion_10_monte_carlo() {
    let mut r = Report::new(10, "Monte Carlo n = 3, bound 1000, 10^5 samples within 3 SE of the formula");
    let t = Instant::now();
    let mc = monte_carlo_tf_density(3, 1000, 100_000, 42).unwrap();
    let el = t.elapsed();
    let tf = tf_density_formula(3, 1_000_000).unwrap().to_f64();
    let z = (mc.estimate - tf) / mc.stderr;
    r.check(z.abs() <= 3.0, format!("seed 42: {:.5} +- {:.5} vs {tf:.6} ({z:+.2} SE)", mc.estimate, mc.stderr));
    r.check(el < Duration::from_secs(120), format!("{el:.2?}"));
    r.finish();
}

#[test]
fn criterion_11_orbit_lab() {
    let mut r = Report::new(11, "F_10(5,2) orbit census and dual strata");
    for p in [2u64, 3] {
        let c = orbit_census(5, 2, p).unwrap();
        r.check(c.stratum(10).unwrap().points == 0, format!("Z_{p}: F_10 empty"));
    }
    for p in [5u64, 7] {
        let c = orbit_census(5, 2, p).unwrap();
        let o = c.stratum(10).unwrap().orbits;
        r.check(o == 1, format!("Z_{p}: {o} orbit(s) on F_10"));
    }
    let c = orbit_census(5, 2, 11).unwrap();
    let top = c.stratum(10).unwrap();
    r.check(top.orbits > 2, format!("Z_11: {} orbits on F_10 (sizes {:?}), quoted more than two", top.orbits, top.orbit_sizes));
    for p in [2u64, 3, 5, 7, 11] {
        let space = OrbitSpace::build(5, 2, p).unwrap();
        let pts: Vec<_> = space.points().collect();
        let bad = pts
            .par_iter()
            .filter(|(m, _, f)| f_index(&dual_space(m).unwrap()).unwrap() != *f)
            .count();
        r.check(bad == 0, format!("Z_{p}: dual preserves F_i on all {} points (column spaces)", pts.len()));
    }
    r.finish();
}

#[test]
fn criterion_12_finale() {
    let mut r = Report::new(12, "determinant-30 pair and the unit action");
    let c = m(&[&[1, 1, 4], &[0, 2, 5], &[0, 0, 15]]);
    let d = m(&[&[1, 2, 4], &[0, 3, 5], &[0, 0, 10]]);
    let cop = weakly_terminal(&opposite(&c).unwrap().bop).unwrap();
    r.check(ph_equivalent(&cop, &d).unwrap().is_some(), "D is a form of C^op");
    let sp = single_p_test(&c, &d).unwrap();
    r.check(sp.perm == vec![2, 1, 0], format!("forced permutation {:?} (the transposition (13))", sp.perm));
    match &sp.offending {
        Some((i, j, v)) => {
            r.check((*i, *j) == (0, 2), format!("non-integral witness at ({}, {})", i + 1, j + 1));
            let val = entry_fraction(v).unwrap();
            r.check(val == BigRational::new(big(1), big(6)), format!("witness value {v}, quoted 1/6"));
        }
        None => r.check(false, "no non-integral witness"),
    }
    r.check(ph_equivalent(&c, &d).unwrap().is_none(), "ph_equivalent(C, D) = None");
    let units: Vec<i64> = (1..30).filter(|u| u.gcd(&30) == 1).collect();
    let classes: BTreeSet<String> = units
        .iter()
        .map(|u| {
            let (x, y) = ((2 * u).rem_euclid(15), (5 * u).rem_euclid(15));
            canonical_representative(&m(&[&[1, 1, 2 * x], &[0, 2, y], &[0, 0, 15]])).unwrap().to_string()
        })
        .collect();
    r.check(classes.len() == 8, format!("(2,5) times the {} units mod 15: {} classes", units.len(), classes.len()));
    let census: Vec<&IntMatrix> =
        census3()[&30].orbits.iter().filter(|o| o.max_one_block < 2).map(|o| &o.representative).collect();
    let canon: BTreeSet<String> = census.iter().map(|m| canonical_representative(m).unwrap().to_string()).collect();
    r.check(canon == classes, "they are exactly the census classes without a 1-block of size two");
    r.check(census.iter().all(|m| max_one_block(m).unwrap() < 2), "none has a terminal form with 1-block size two");
    r.finish();
}
