//! Brute-force PH class census: orbits of the column-permutation action on
//! weakly terminal matrices.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::arith::weakly_terminal_fn;
use crate::equivalence::key_i64;
use crate::error::{Error, Result};
use crate::exact_linalg::{small, AbelianGroup, IntMatrix};
use crate::invariants::j_tuple;
use crate::structure::{diagonal_factorizations, for_each_with_diagonal, permutations};

/// Default bound on (weakly terminal count) * n!.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;
pub const MAX_CENSUS_N: usize = 6;
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub representative: IntMatrix,
    pub size: u64,
    pub max_one_block: usize,
    pub j_tuple: Vec<AbelianGroup>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedCount {
    pub perm: Vec<usize>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCensus {
    pub n: usize,
    pub d: u64,
    pub weakly_terminal: u64,
    /// Sorted by the canonical key of the representative.
    pub orbits: Vec<OrbitRecord>,
    /// S(pi)(d) for every pi, permutations in lexicographic order.
    pub fixed: Vec<FixedCount>,
}

impl ClassCensus {
    pub fn classes(&self) -> usize {
        self.orbits.len()
    }

    pub fn fixed_count(&self, perm: &[usize]) -> Option<u64> {
        self.fixed.iter().find(|f| f.perm == perm).map(|f| f.count)
    }
}

struct Shard {
    reps: Vec<(Vec<i64>, u64)>,
    fixed: Vec<u64>,
    total: u64,
}

pub fn ph_count_bruteforce(n: usize, d: u64) -> Result<ClassCensus> {
    ph_count_bruteforce_with_budget(n, d, DEFAULT_BUDGET)
}

pub fn ph_count_bruteforce_with_budget(n: usize, d: u64, budget: u64) -> Result<ClassCensus> {
    if n == 0 || n > MAX_CENSUS_N {
        return Err(Error::SizeLimit(format!("census needs 1 <= n <= {MAX_CENSUS_N}")));
    }
    if d == 0 {
        return Err(Error::RangeError("d must be positive".into()));
    }
    let expected = weakly_terminal_fn(n).eval(d)?;
    let perms = permutations(n);
    let work = expected.to_u64().and_then(|f| f.checked_mul(perms.len() as u64));
    if work.is_none_or(|w| w > budget) {
        return Err(Error::Budget(format!("{expected} matrices x {} permutations exceeds {budget}", perms.len())));
    }

    let shards: Vec<Shard> = diagonal_factorizations(n, d)
        .par_iter()
        .map(|diag| {
            let mut shard = Shard { reps: Vec::new(), fixed: vec![0; perms.len()], total: 0 };
            let mut images: Vec<Vec<i64>> = vec![vec![0; n * n]; perms.len()];
            for_each_with_diagonal(n, diag, &mut |c: &[i64]| {
                shard.total += 1;
                for (k, p) in perms.iter().enumerate() {
                    small::permuted_hnf(n, c, p, &mut images[k]).expect("census entries fit in i64");
                    if images[k] == c {
                        shard.fixed[k] += 1;
                    }
                }
                let ck = key_i64(n, c);
                if images.iter().all(|im| key_i64(n, im) >= ck) {
                    let mut distinct = images.clone();
                    distinct.sort_unstable();
                    distinct.dedup();
                    shard.reps.push((c.to_vec(), distinct.len() as u64));
                }
            });
            shard
        })
        .collect();

    let mut fixed = vec![0u64; perms.len()];
    let mut reps = Vec::new();
    let mut total = 0;
    for s in shards {
        total += s.total;
        for (f, x) in fixed.iter_mut().zip(&s.fixed) {
            *f += x;
        }
        reps.extend(s.reps);
    }
    reps.sort_by_key(|(c, _)| key_i64(n, c));

    let orbits: Vec<OrbitRecord> = reps
        .into_par_iter()
        .map(|(c, size)| {
            let m = IntMatrix::from_i64(n, n, &c);
            Ok(OrbitRecord {
                max_one_block: small::max_one_block(n, &c).expect("small entries"),
                j_tuple: j_tuple(&m)?,
                representative: m,
                size,
            })
        })
        .collect::<Result<_>>()?;

    assert_eq!(Some(total), expected.to_u64(), "enumeration count");
    assert_eq!(orbits.iter().map(|o| o.size).sum::<u64>(), total, "orbit sizes partition");
    assert_eq!(fixed.iter().sum::<u64>(), orbits.len() as u64 * perms.len() as u64, "Burnside identity");

    Ok(ClassCensus {
        n,
        d,
        weakly_terminal: total,
        orbits,
        fixed: perms.into_iter().zip(fixed).map(|(perm, count)| FixedCount { perm, count }).collect(),
    })
}

/// `$PHLAT_CACHE`, or `phlat-cache` under the system temp directory.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("PHLAT_CACHE")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("phlat-cache"))
}

pub fn cache_path(dir: &Path, n: usize, d: u64) -> PathBuf {
    dir.join("census").join(format!("n{n}_d{d}.jsonl"))
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    n: usize,
    d: u64,
    weakly_terminal: u64,
    classes: usize,
    fixed: Vec<FixedCount>,
}

/// Census through the JSON-lines cache: one header line, then one line per
/// orbit. Unreadable or stale entries are recomputed and overwritten.
pub fn census_cached(dir: &Path, n: usize, d: u64, budget: u64) -> Result<ClassCensus> {
    let path = cache_path(dir, n, d);
    if let Some(c) = read_cache(&path).filter(|c| c.n == n && c.d == d) {
        return Ok(c);
    }
    let census = ph_count_bruteforce_with_budget(n, d, budget)?;
    write_cache(&path, &census)?;
    Ok(census)
}

pub fn read_cache(path: &Path) -> Option<ClassCensus> {
    let file = fs::File::open(path).ok()?;
    let mut lines = BufReader::new(file).lines();
    let header: Header = serde_json::from_str(&lines.next()?.ok()?).ok()?;
    if header.format_version != CACHE_FORMAT_VERSION {
        return None;
    }
    let orbits: Vec<OrbitRecord> =
        lines.map(|l| serde_json::from_str(&l.ok()?).ok()).collect::<Option<_>>()?;
    if orbits.len() != header.classes {
        return None;
    }
    Some(ClassCensus { n: header.n, d: header.d, weakly_terminal: header.weakly_terminal, orbits, fixed: header.fixed })
}

pub fn write_cache(path: &Path, c: &ClassCensus) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let header = Header {
        format_version: CACHE_FORMAT_VERSION,
        n: c.n,
        d: c.d,
        weakly_terminal: c.weakly_terminal,
        classes: c.orbits.len(),
        fixed: c.fixed.clone(),
    };
    let tmp = path.with_extension("jsonl.tmp");
    let mut f = fs::File::create(&tmp).map_err(io)?;
    writeln!(f, "{}", serde_json::to_string(&header).expect("header serializes")).map_err(io)?;
    for o in &c.orbits {
        writeln!(f, "{}", serde_json::to_string(o).expect("orbit serializes")).map_err(io)?;
    }
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}
