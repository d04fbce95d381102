//! Command-line front end. Every subcommand builds one JSON value; text mode
//! renders a short human summary of the same data.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use phlat::counting::census::{cache_dir, census_cached, ph_count_bruteforce_with_budget, DEFAULT_BUDGET};
use phlat::counting::{ph_count_3, ClassCensus};
use phlat::density::constants::DEFAULT_P_MAX;
use phlat::density::{self, PrimeProduct};
use phlat::duality::{involution_check, opposite, sequence_splits, super_splits};
use phlat::equivalence::{canonical_column, column_orbit, ph_equivalent, single_p_test};
use phlat::exact_linalg::determinant;
use phlat::invariants::{invariant_lattice, j_group, j_tuple, lattice_match, Verdict};
use phlat::orbitlab::{duality_experiment, orbit_census};
use phlat::structure::{
    class_one_block_sizes, enumerate_weakly_terminal, is_terminal, max_one_block, one_block_size,
    to_standard_form, weakly_terminal, Subset,
};
use phlat::{AbelianGroup, Error, IntMatrix};

pub const OUTPUT_VERSION: u32 = 1;

/// Bad flag combinations that clap cannot express.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(String);

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() || e.downcast_ref::<clap::Error>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(err) => err.exit_code() as u8,
        None => 3,
    }
}

#[derive(Parser, Debug)]
#[command(name = "phlat", version, about = "Permutation-Hermite equivalence of integer matrices")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weakly terminal form, terminal flag and 1-block data.
    Reduce { matrix: String },
    /// J(B), the Omega(i) tuple and kernel orders.
    Invariants {
        matrix: String,
        /// Include J(B_S) for every column subset S.
        #[arg(long)]
        all_subsets: bool,
    },
    /// B^op, Delta, J(B), J(B^op) and splitting flags.
    Op { matrix: String },
    /// Decide PH-equivalence.
    Equiv {
        a: String,
        b: String,
        /// Verify the certificate, or name a distinguishing invariant.
        #[arg(long)]
        certificate: bool,
    },
    /// Canonical class data for a matrix, or the column orbit of a standard form.
    Orbit {
        #[arg(conflicts_with_all = ["d", "column"])]
        matrix: Option<String>,
        #[arg(long, requires = "column")]
        d: Option<u64>,
        /// Standard-form column a_1 ... a_{n-1}.
        #[arg(long, requires = "d", allow_hyphen_values = true)]
        column: Option<String>,
    },
    /// Stream every weakly terminal n x n matrix of determinant d.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Number of PH classes of n x n NS matrices with |det| = d.
    Count {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Skip the census cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Densities of NS and TF-within-NS matrices.
    Density {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = DEFAULT_P_MAX)]
        pmax: u64,
    },
    /// F(0..8), Landau totient, carefree, prod zeta(k).
    Constants {
        #[arg(long, default_value_t = DEFAULT_P_MAX)]
        pmax: u64,
    },
    /// Monte Carlo estimate of the TF-within-NS frequency.
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bound: i64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Stratified W(n) x GL(k) orbit census of F(n,k) over Z_p.
    Orbitlab {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u64,
        /// X block for the duality experiment (needs --x2).
        #[arg(long, requires = "x2")]
        x: Option<String>,
        #[arg(long, requires = "x")]
        x2: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Formula,
    Census,
    Both,
}

struct Output {
    json: Value,
    text: String,
}

pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> Result<()> {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            e.print()?;
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(UsageError("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("thread pool")?;
    }
    let out = match cli.command {
        Command::Reduce { matrix } => reduce(&parse(&matrix)?)?,
        Command::Invariants { matrix, all_subsets } => invariants(&parse(&matrix)?, all_subsets)?,
        Command::Op { matrix } => op(&parse(&matrix)?)?,
        Command::Equiv { a, b, certificate } => equiv(&parse(&a)?, &parse(&b)?, certificate)?,
        Command::Orbit { matrix, d, column } => match (matrix, d, column) {
            (Some(m), _, _) => orbit_matrix(&parse(&m)?)?,
            (None, Some(d), Some(c)) => orbit_column(d, &c)?,
            _ => return Err(UsageError("orbit needs a matrix or --d with --column".into()).into()),
        },
        Command::Enumerate { n, d, limit } => return enumerate(n, d, limit, cli.json),
        Command::Count { n, d, method, no_cache } => count(n, d, method, no_cache)?,
        Command::Density { n, pmax } => density_cmd(n, pmax)?,
        Command::Constants { pmax } => constants_cmd(pmax)?,
        Command::Mc { n, bound, samples, seed } => mc(n, bound, samples, seed)?,
        Command::Orbitlab { n, k, p, x, x2 } => orbitlab(n, k, p, x.as_deref(), x2.as_deref())?,
    };
    let mut stdout = io::stdout().lock();
    if cli.json {
        let mut json = out.json;
        json["version"] = json!(OUTPUT_VERSION);
        serde_json::to_writer_pretty(&mut stdout, &json)?;
        writeln!(stdout)?;
    } else {
        write!(stdout, "{}", out.text)?;
    }
    Ok(())
}

fn parse(s: &str) -> Result<IntMatrix> {
    Ok(s.parse::<IntMatrix>()?)
}

fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

fn group(g: &AbelianGroup) -> Value {
    ints(g.factors())
}

fn group_text(g: &AbelianGroup) -> String {
    if g.is_trivial() {
        return "0".into();
    }
    g.factors().iter().map(|f| format!("Z_{f}")).collect::<Vec<_>>().join(" + ")
}

fn subset_json(s: &Subset) -> Value {
    json!(s.members().iter().map(|i| i + 1).collect::<Vec<_>>())
}

fn perm_json(p: &[usize]) -> Value {
    json!(p.iter().map(|i| i + 1).collect::<Vec<_>>())
}

fn product_json(p: &PrimeProduct) -> Value {
    serde_json::to_value(p).expect("product serializes")
}

fn product_text(p: &PrimeProduct) -> String {
    format!("{:.12} (+- {:.1e})", p.value, p.tail_bound)
}

fn reduce(b: &IntMatrix) -> Result<Output> {
    let wt = weakly_terminal(b)?;
    let block = one_block_size(&wt)?;
    let max_block = max_one_block(b)?;
    let sizes = class_one_block_sizes(b)?;
    let n = b.cols();
    let sf = if max_block + 1 == n && n > 1 { to_standard_form(b).ok() } else { None };
    let mut text = String::new();
    writeln!(text, "weakly terminal: {wt}")?;
    writeln!(text, "terminal: {}", is_terminal(&wt))?;
    writeln!(text, "1-block size: {block}")?;
    writeln!(text, "max 1-block size: {max_block}")?;
    writeln!(text, "class 1-block sizes: {sizes:?}")?;
    if let Some(sf) = &sf {
        writeln!(text, "standard form: d = {}, a = {:?}", sf.d, sf.a.iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
    }
    let json = json!({
        "command": "reduce",
        "input": b.to_json(),
        "weakly_terminal": wt.to_json(),
        "terminal": is_terminal(&wt),
        "input_terminal": is_terminal(b),
        "one_block_size": block,
        "max_one_block": max_block,
        "class_one_block_sizes": sizes.into_iter().collect::<Vec<_>>(),
        "standard_form": sf.map(|s| json!({"d": int(&s.d), "a": ints(&s.a)})),
    });
    Ok(Output { json, text })
}

fn invariants(b: &IntMatrix, all_subsets: bool) -> Result<Output> {
    let jb = j_group(b);
    let tuple = j_tuple(b)?;
    let lattice = invariant_lattice(b)?;
    let mut text = String::new();
    writeln!(text, "J(B) = {}", group_text(&jb))?;
    for (i, g) in tuple.iter().enumerate() {
        writeln!(text, "J(B_Omega({})) = {}   kernel order m({}) = {}", i + 1, group_text(g), i + 1, lattice.kernel_orders[i])?;
    }
    let mut json = json!({
        "command": "invariants",
        "input": b.to_json(),
        "j": group(&jb),
        "j_tuple": tuple.iter().map(group).collect::<Vec<_>>(),
        "kernel_orders": ints(&lattice.kernel_orders),
    });
    if all_subsets {
        let entries: Vec<Value> = lattice
            .groups
            .iter()
            .map(|(s, g)| json!({"subset": subset_json(s), "group": group(g)}))
            .collect();
        for (s, g) in &lattice.groups {
            let members: Vec<String> = s.members().iter().map(|i| (i + 1).to_string()).collect();
            writeln!(text, "J(B_{{{}}}) = {}", members.join(","), group_text(g))?;
        }
        json["lattice"] = Value::Array(entries);
    }
    Ok(Output { json, text })
}

fn op(b: &IntMatrix) -> Result<Output> {
    let dd = opposite(b)?;
    let jb = j_group(b);
    let jop = j_group(&dd.bop);
    let seq = sequence_splits(b)?;
    let sup = super_splits(b)?;
    let inv = involution_check(b)?;
    let mut text = String::new();
    writeln!(text, "B^op: {}", dd.bop)?;
    writeln!(text, "Delta: {}", dd.delta())?;
    writeln!(text, "J(B) = {}", group_text(&jb))?;
    writeln!(text, "J(B^op) = {}", group_text(&jop))?;
    writeln!(text, "sequence splits: {seq}")?;
    writeln!(text, "super splits: {sup}")?;
    let json = json!({
        "command": "op",
        "input": b.to_json(),
        "bop": dd.bop.to_json(),
        "delta": ints(&dd.m),
        "j": group(&jb),
        "j_op": group(&jop),
        "sequence_splits": seq,
        "super_splits": sup,
        "involution": inv,
    });
    Ok(Output { json, text })
}

/// Cheapest invariant that separates two inequivalent matrices.
fn distinguishing(b: &IntMatrix, c: &IntMatrix) -> Result<Value> {
    let (db, dc) = (determinant(b), determinant(c));
    if db.magnitude() != dc.magnitude() {
        return Ok(json!({"invariant": "determinant", "a": int(&db), "b": int(&dc)}));
    }
    let (jb, jc) = (j_group(b), j_group(c));
    if jb != jc {
        return Ok(json!({"invariant": "J", "a": group(&jb), "b": group(&jc)}));
    }
    let mut tb = j_tuple(b)?;
    let mut tc = j_tuple(c)?;
    tb.sort();
    tc.sort();
    if tb != tc {
        return Ok(json!({"invariant": "j_tuple", "a": tb.iter().map(group).collect::<Vec<_>>(), "b": tc.iter().map(group).collect::<Vec<_>>()}));
    }
    if let Ok(sp) = single_p_test(b, c) {
        if let Some((i, j, v)) = sp.offending {
            return Ok(json!({"invariant": "forced_permutation", "perm": perm_json(&sp.perm), "entry": [i + 1, j + 1], "value": v}));
        }
    }
    let lm = lattice_match(b, c)?;
    if lm.verdict == Verdict::DecidedNoniso {
        return Ok(json!({"invariant": "lattice"}));
    }
    Ok(json!({"invariant": "none", "note": "all permutations tested"}))
}

fn equiv(b: &IntMatrix, c: &IntMatrix, certificate: bool) -> Result<Output> {
    let cert = ph_equivalent(b, c)?;
    let mut text = String::new();
    let mut json = json!({"command": "equiv", "a": b.to_json(), "b": c.to_json(), "equivalent": cert.is_some()});
    match &cert {
        Some(cert) => {
            writeln!(text, "EQUIVALENT")?;
            writeln!(text, "U = {}", cert.u)?;
            writeln!(text, "P: column j of B*P is column perm[j] of B, perm = {:?}", cert.perm.iter().map(|i| i + 1).collect::<Vec<_>>())?;
            let holds = cert.u.mul(b) == c.permute_columns(&cert.perm);
            if certificate {
                writeln!(text, "U*A = B*P: {holds}")?;
            }
            json["certificate"] = json!({
                "u": cert.u.to_json(),
                "perm": perm_json(&cert.perm),
                "p": IntMatrix::permutation_matrix(&cert.perm).to_json(),
                "verified": holds,
            });
        }
        None => {
            writeln!(text, "NOT EQUIVALENT")?;
            if certificate {
                let why = distinguishing(b, c)?;
                writeln!(text, "distinguished by: {why}")?;
                json["distinguishing"] = why;
            }
        }
    }
    Ok(Output { json, text })
}

fn column_json(orbit: &std::collections::BTreeSet<Vec<BigInt>>) -> Value {
    Value::Array(orbit.iter().map(|a| ints(a)).collect())
}

fn orbit_matrix(b: &IntMatrix) -> Result<Output> {
    let rep = phlat::equivalence::canonical_representative(b)?;
    let sizes = class_one_block_sizes(b)?;
    let mut text = String::new();
    writeln!(text, "canonical representative: {rep}")?;
    writeln!(text, "class 1-block sizes: {sizes:?}")?;
    let mut json = json!({
        "command": "orbit",
        "input": b.to_json(),
        "canonical": rep.to_json(),
        "class_one_block_sizes": sizes.into_iter().collect::<Vec<_>>(),
    });
    if let Ok(sf) = to_standard_form(b) {
        let orbit = column_orbit(&sf.a, &sf.d)?;
        writeln!(text, "column orbit (d = {}): {} columns", sf.d, orbit.len())?;
        json["d"] = int(&sf.d);
        json["column_orbit"] = column_json(&orbit);
        json["canonical_column"] = ints(&canonical_column(&sf.a, &sf.d)?);
    }
    Ok(Output { json, text })
}

fn orbit_column(d: u64, column: &str) -> Result<Output> {
    let a: Vec<BigInt> = column
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {s:?}"))))
        .collect::<std::result::Result<_, _>>()?;
    let d = BigInt::from(d);
    let orbit = column_orbit(&a, &d)?;
    let canon = canonical_column(&a, &d)?;
    let mut text = String::new();
    for v in &orbit {
        writeln!(text, "{}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))?;
    }
    writeln!(text, "{} columns; canonical {}", orbit.len(), canon.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))?;
    let json = json!({
        "command": "orbit",
        "d": int(&d),
        "column": ints(&a),
        "column_orbit": column_json(&orbit),
        "canonical_column": ints(&canon),
    });
    Ok(Output { json, text })
}

fn enumerate(n: usize, d: u64, limit: Option<u64>, as_json: bool) -> Result<()> {
    if n == 0 || n > phlat::structure::MAX_PERM_N {
        return Err(Error::RangeError(format!("n must lie in 1..={}", phlat::structure::MAX_PERM_N)).into());
    }
    if d == 0 {
        return Err(Error::RangeError("d must be positive".into()).into());
    }
    let mut out = BufWriter::new(io::stdout().lock());
    for (i, m) in enumerate_weakly_terminal(n, d).enumerate() {
        if limit.is_some_and(|l| i as u64 >= l) {
            break;
        }
        let res = if as_json {
            let rec = json!({"command": "enumerate", "version": OUTPUT_VERSION, "n": n, "d": d, "index": i, "matrix": m.to_json()});
            serde_json::to_writer(&mut out, &rec).map_err(io::Error::from).and_then(|_| writeln!(out))
        } else {
            writeln!(out, "{m}")
        };
        match res {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => return Ok(()),
            r => r?,
        }
    }
    match out.flush() {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn count(n: usize, d: u64, method: Method, no_cache: bool) -> Result<Output> {
    let formula = match method {
        Method::Census => None,
        _ if n != 3 => return Err(Error::NotApplicable("closed-form counts exist for n = 3 only".into()).into()),
        _ => Some(ph_count_3(d)?),
    };
    let census: Option<ClassCensus> = match method {
        Method::Formula => None,
        _ if no_cache => Some(ph_count_bruteforce_with_budget(n, d, DEFAULT_BUDGET)?),
        _ => Some(census_cached(&cache_dir(), n, d, DEFAULT_BUDGET)?),
    };
    let classes = census.as_ref().map(|c| c.classes());
    let mut text = String::new();
    match (&formula, classes) {
        (Some(f), Some(c)) => writeln!(text, "{f} / {c}")?,
        (Some(f), None) => writeln!(text, "{f}")?,
        (None, Some(c)) => writeln!(text, "{c}")?,
        (None, None) => unreachable!(),
    }
    let agree = match (&formula, classes) {
        (Some(f), Some(c)) => Some(*f == BigInt::from(c)),
        _ => None,
    };
    if agree == Some(false) {
        writeln!(text, "formula and census disagree")?;
    }
    let json = json!({
        "command": "count",
        "n": n,
        "d": d,
        "method": format!("{method:?}").to_lowercase(),
        "formula": formula.as_ref().map(int),
        "census": classes,
        "weakly_terminal": census.as_ref().map(|c| c.weakly_terminal),
        "agree": agree,
    });
    Ok(Output { json, text })
}

fn density_cmd(n: u32, pmax: u64) -> Result<Output> {
    let ns = density::ns_density(n, pmax)?;
    let tf = density::tf_density_formula(n, pmax)?;
    let sub = density::tf_numerator_substituted(n, pmax)?;
    let mut text = String::new();
    writeln!(text, "NS density: {}", product_text(&ns))?;
    writeln!(text, "TF density within NS: {}", product_text(&tf))?;
    writeln!(text, "substituted numerator: {}", product_text(&sub))?;
    let json = json!({
        "command": "density",
        "n": n,
        "p_max": pmax,
        "ns_density": product_json(&ns),
        "tf_density": product_json(&tf),
        "tf_numerator_substituted": product_json(&sub),
    });
    Ok(Output { json, text })
}

fn constants_cmd(pmax: u64) -> Result<Output> {
    let r = density::constants(pmax)?;
    let mut text = String::new();
    for (s, f) in r.f.iter().enumerate() {
        writeln!(text, "F({s}) = {}", product_text(f))?;
    }
    writeln!(text, "Landau totient = {}", product_text(&r.landau_totient))?;
    writeln!(text, "carefree = {}", product_text(&r.carefree))?;
    writeln!(text, "prod 1/zeta(k) = {}", product_text(&r.inverse_zeta_product_limit))?;
    writeln!(text, "prod zeta(k) = {}", product_text(&r.zeta_product_limit))?;
    writeln!(text, "deficiency limit (s = 1) = {}", product_text(&r.deficiency_one_limit))?;
    let mut json = serde_json::to_value(&r)?;
    json["command"] = json!("constants");
    Ok(Output { json, text })
}

fn mc(n: usize, bound: i64, samples: u64, seed: u64) -> Result<Output> {
    let r = density::monte_carlo_tf_density(n, bound, samples, seed)?;
    let formula = if n >= 3 { Some(density::tf_density_formula(n as u32, DEFAULT_P_MAX)?) } else { None };
    let mut text = String::new();
    writeln!(text, "seed: {} ({})", r.seed, r.rng)?;
    writeln!(text, "samples: {}, bound: {}", r.samples, r.bound)?;
    writeln!(text, "NS frequency: {:.6} +- {:.6}", r.ns_estimate, r.ns_stderr)?;
    writeln!(text, "TF frequency within NS: {:.6} +- {:.6}", r.estimate, r.stderr)?;
    if let Some(f) = &formula {
        writeln!(text, "formula: {:.6} ({:.2} standard errors)", f.to_f64(), (r.estimate - f.to_f64()) / r.stderr)?;
    }
    let mut json = serde_json::to_value(&r)?;
    json["command"] = json!("mc");
    json["formula"] = formula.as_ref().map(product_json).unwrap_or(Value::Null);
    Ok(Output { json, text })
}

fn orbitlab(n: usize, k: usize, p: u64, x: Option<&str>, x2: Option<&str>) -> Result<Output> {
    let census = orbit_census(n, k, p)?;
    let mut text = String::new();
    writeln!(text, "F({n},{k}) over Z_{p}: {} points, {} subspaces, {} orbits", census.points, census.subspaces, census.orbits)?;
    for s in census.strata.iter().filter(|s| s.points > 0) {
        writeln!(text, "  F_{}: {} orbits, {} points, sizes {:?}", s.index, s.orbits, s.points, s.orbit_sizes)?;
    }
    let mut json = serde_json::to_value(&census)?;
    json["command"] = json!("orbitlab");
    if let (Some(x), Some(x2)) = (x, x2) {
        let r = duality_experiment(&parse(x)?, &parse(x2)?, p)?;
        writeln!(text, "J(B_Omega) families: {:?}", r.families.verdict)?;
        writeln!(text, "lattices: {:?}; opposite lattices: {:?}", r.lattices.verdict, r.opposite_lattices.verdict)?;
        writeln!(text, "M same orbit: {:?}; N same orbit: {:?}", r.m_same_orbit, r.n_same_orbit)?;
        writeln!(text, "implication chain holds: {:?}", r.chain_holds)?;
        json["duality"] = serde_json::to_value(&r)?;
    }
    Ok(Output { json, text })
}
