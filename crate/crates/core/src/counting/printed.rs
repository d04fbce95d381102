//! Closed forms exactly as they are usually quoted, kept only to report
//! where they disagree with the convolution and enumeration values.

use num_bigint::BigInt;
use num_traits::pow;
use serde::{Deserialize, Serialize};

use super::arith::{self, factorize, h, jordan, m, n_k, p_fn, phi};
use super::fixed::{prime_formula, s132_congruence, s_fixed_enumerate};
use crate::structure::permutations;

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// `(phi * J_2)(p^m) = (p^{m-2}(p+1)^2 + 1) p^{m-1}(p-1)`, m >= 2.
pub fn phi_j2(p: u64, m: u32) -> Option<BigInt> {
    (m >= 2).then(|| (pow(big(p), (m - 2) as usize) * big((p + 1) * (p + 1)) + 1) * pow(big(p), (m - 1) as usize) * big(p - 1))
}

/// Transposition count at p^m: `p^m + p^{m-1} + 1 + (p^{m/2} - p^{m/2-1} | -p^{(m-1)/2})`
/// for odd p, and the five-way table at p = 2.
pub fn transposition_prime_power(p: u64, m: u32) -> BigInt {
    let pw = |e: u32| pow(big(p), e as usize);
    if p != 2 {
        let tail = if m % 2 == 0 { pw(m / 2) - pw(m / 2 - 1) } else { -pw((m - 1) / 2) };
        return pw(m) + pw(m - 1) + 1 + tail;
    }
    match m {
        1 => big(2),
        2 => big(7),
        3 => big(12),
        _ if m % 2 == 0 => pw(m) + pw(m - 3) + pw(m / 2) - 1,
        _ => pw(m) + pw(m - 3) + pw((m - 1) / 2) + pw((m - 3) / 2),
    }
}

/// S((132))(p^m) by the residue-class table.
pub fn s132_prime_power(p: u64, m: u32) -> u64 {
    let m64 = m as u64;
    match p % 3 {
        2 => h(m) as u64,
        1 => {
            if m % 2 == 0 {
                3 * m64 + 3
            } else {
                3 * m64
            }
        }
        _ if m == 1 => 1,
        _ if m % 2 == 0 => 3 * m64 + 4,
        _ => 3 * m64 + 1,
    }
}

/// The combined S((132))(d) formula:
/// `2^{#p=2 (3), m even} 3^{w'} prod_{p=1 (3)} (m + H(m) - 1) * {1; 3m(3)+4; 3m(3)+1}`.
pub fn s132_combined(d: u64) -> BigInt {
    let fac = factorize(d).expect("report range");
    let mut out = BigInt::from(1);
    for (p, m) in fac {
        out *= match p % 3 {
            2 => big(if m % 2 == 0 { 2 } else { 1 }),
            1 => big(3 * (m as u64 + h(m) as u64 - 1)),
            _ if m <= 1 => big(1),
            _ if m % 2 == 0 => big(3 * m as u64 + 4),
            _ => big(3 * m as u64 + 1),
        };
    }
    out
}

/// `M_2(2^m) = 3 * 2^{m-2} + 4` for m >= 3.
pub fn m_two_power(m: u32) -> Option<BigInt> {
    (m >= 3).then(|| 3 * pow(big(2), (m - 2) as usize) + 4)
}

/// `N_k(p^m) = p^{min(v_p(k), m-1)} * (gcd(p-1, k) | 2)`.
pub fn n_k_prime_power(k: u64, p: u64, m: u32) -> BigInt {
    let mut v = 0;
    let mut kk = k;
    while kk % p == 0 {
        kk /= p;
        v += 1;
    }
    let lead = pow(big(p), v.min(m - 1) as usize);
    if p == 2 && m >= 2 {
        lead * 2
    } else {
        lead * big(num_integer::gcd(p - 1, k))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub formula: String,
    pub argument: String,
    pub printed: String,
    pub computed: String,
}

fn dev(out: &mut Vec<Deviation>, formula: &str, argument: String, printed: BigInt, computed: BigInt) {
    if printed != computed {
        out.push(Deviation {
            formula: formula.into(),
            argument,
            printed: printed.to_string(),
            computed: computed.to_string(),
        });
    }
}

/// Every disagreement between the quoted closed forms and the computed
/// values over prime powers `p^m <= max_q` (and `d <= max_q` for the combined
/// formula). Computed values come from convolutions and enumeration.
pub fn deviations(max_q: u64) -> Vec<Deviation> {
    let mut out = Vec::new();
    let pp: Vec<(u64, u32, u64)> = (2..=max_q)
        .filter_map(|q| match factorize(q).ok()?[..] {
            [(p, m)] => Some((p, m, q)),
            _ => None,
        })
        .collect();
    let fj2 = phi().convolve(&jordan(2));
    let trans = p_fn().convolve(&m());
    for &(p, m_, q) in &pp {
        if let Some(v) = phi_j2(p, m_) {
            dev(&mut out, "(phi*J2)(p^m) closed form", format!("{p}^{m_}"), v, fj2.prime_power(p, m_));
        }
        dev(
            &mut out,
            "transposition closed form",
            format!("{p}^{m_}"),
            transposition_prime_power(p, m_),
            trans.prime_power(p, m_),
        );
        dev(
            &mut out,
            "S(132) residue-class table",
            format!("{p}^{m_}"),
            big(s132_prime_power(p, m_)),
            big(s132_congruence(q)),
        );
        if p == 2 {
            if let Some(v) = m_two_power(m_) {
                dev(&mut out, "M_2(2^m)", format!("2^{m_}"), v, m().prime_power(2, m_));
            }
        }
        for k in 1..=6u64 {
            dev(
                &mut out,
                "N_k(p^m)",
                format!("k={k}, {p}^{m_}"),
                n_k_prime_power(k, p, m_),
                n_k(k).prime_power(p, m_),
            );
        }
    }
    for d in 2..=max_q {
        dev(&mut out, "S(132) combined formula", d.to_string(), s132_combined(d), super::fixed::s132(d).expect("in range"));
    }
    for n in 3..=4usize {
        for p in (2..=max_q.min(13)).filter(|&p| arith::is_prime(p)) {
            for pi in permutations(n) {
                let enumerated = s_fixed_enumerate(&pi, n, p).expect("small census");
                dev(
                    &mut out,
                    "prime fixed-point formula with O(j) in the exponent",
                    format!("n={n}, pi={pi:?}, p={p}"),
                    prime_formula(&pi, p, true),
                    big(enumerated),
                );
            }
        }
    }
    out
}
