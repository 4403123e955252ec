//! Command-line front end for the arcring library.

pub mod report;

use std::collections::BTreeMap;

use arcring::arc_ring::{idempotent, unit, ArcElement, ArcRing, RingSpec};
use arcring::bimodule::{tensor_over, Bimodule};
use arcring::braid::euler_check;
use arcring::k0::{
    braid_check, canonical_basis_check, gram_matrix, laurent_det, sigma_k0, transition_q_to_z, transpose_weight,
    K0Action, K0Basis, K0Class,
};
use arcring::planar::{enumerate_matchings_bounded, Endpoint, FlatTangle, Matching, PointSeq, DEFAULT_MATCHING_BOUND};
use arcring::slnaction::{apply_word, monomial_presentation, verify_relation, ProjectiveOrbit, Weight, RELATIONS};
use arcring::{Laurent, LaurentPoly};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use report::*;

pub const TOOL: &str = "arcring";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default sweep bounds, lifted by `--allow-large`.
pub const MAX_N: usize = 6;
pub const MAX_M: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "arcring", version, about = "Arc rings, tangle bimodules and categorified sl(n) actions")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads for sweeps; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Permit n > 6 or m > 4.
    #[arg(long, global = true)]
    pub allow_large: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Enumerate crossingless matchings of 2m points.
    Catalan {
        #[arg(long)]
        m: usize,
    },
    /// Check the ring axioms of H^m and optionally print its table.
    Ring {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        table: bool,
        /// Associativity samples when m = 4 or more.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Check the functor relations on every projective of V(2ω_k).
    VerifyRelations {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        relation: Option<String>,
    },
    /// Gram matrix of the bilinear form on one weight space.
    Gram {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        lambda: String,
    },
    /// Transition matrices and the canonical basis check.
    Canonical {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// A word of divided powers presenting one projective.
    Present {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        lambda: String,
        /// Pairs of positions, as in `1-6,2-3` or `(1,6)(2,3)`.
        #[arg(long)]
        matching: String,
    },
    /// Braid operators on K0 and their Euler characteristic check.
    BraidK0 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Tensor products of elementary tangle bimodules against composition.
    TensorCheck {
        #[arg(long)]
        m: usize,
    },
}

/// Fully resolved configuration, echoed in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub lambda: Option<Vec<u8>>,
    pub matching: Option<Vec<(i64, i64)>>,
    pub relation: Option<String>,
    pub table: bool,
    pub samples: Option<usize>,
    pub format: Format,
    pub threads: usize,
    pub seed: u64,
    pub max_n: usize,
    pub max_m: usize,
    pub allow_large: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    /// Invalid or inconsistent arguments.
    Usage(String),
    /// The library refused a valid request.
    Internal(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(s) => write!(f, "usage error: {s}"),
            RunError::Internal(s) => write!(f, "error: {s}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Internal(_) => 1,
        }
    }
}

fn internal(e: arcring::Error) -> RunError {
    RunError::Internal(e.to_string())
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn parse_lambda(s: &str) -> Result<Weight, RunError> {
    s.parse().map_err(|e: arcring::Error| usage(format!("--lambda {s:?}: {e}")))
}

/// Reads consecutive integers as pairs, ignoring any separators.
pub fn parse_pairs(s: &str) -> Result<Vec<(i64, i64)>, RunError> {
    let nums: Vec<i64> = s
        .split(|c: char| !c.is_ascii_digit())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| usage(format!("--matching: bad number {t:?}"))))
        .collect::<Result<_, _>>()?;
    if nums.len() % 2 != 0 {
        return Err(usage(format!("--matching {s:?} has an odd number of endpoints")));
    }
    Ok(nums.chunks(2).map(|c| (c[0], c[1])).collect())
}

fn check_nk(n: usize, k: usize, max_n: usize) -> Result<(), RunError> {
    if n < 2 || k == 0 || k >= n {
        return Err(usage(format!("need 1 <= k <= n-1, got n={n}, k={k}")));
    }
    if n > max_n {
        return Err(usage(format!("n = {n} exceeds the bound {max_n}; pass --allow-large")));
    }
    Ok(())
}

fn check_m(m: usize, max_m: usize) -> Result<(), RunError> {
    if m > max_m {
        return Err(usage(format!("m = {m} exceeds the bound {max_m}; pass --allow-large")));
    }
    Ok(())
}

/// `n` and `k` from a weight, checked against any explicit values.
fn weight_nk(lambda: &Weight, n: Option<usize>, k: Option<usize>) -> Result<(usize, usize), RunError> {
    let (ln, lk) = (lambda.n(), lambda.k());
    if n.is_some_and(|n| n != ln) || k.is_some_and(|k| k != lk) {
        return Err(usage(format!("--lambda {lambda} has n = {ln}, k = {lk}, inconsistent with --n/--k")));
    }
    Ok((ln, lk))
}

impl Cli {
    pub fn resolve(&self) -> Result<RunConfig, RunError> {
        let (max_n, max_m) = if self.allow_large { (usize::MAX, usize::MAX) } else { (MAX_N, MAX_M) };
        let threads = match self.threads {
            Some(0) => return Err(usage("--threads must be positive")),
            Some(t) => t,
            None => std::thread::available_parallelism().map_or(1, |t| t.get()),
        };
        let mut cfg = RunConfig {
            command: String::new(),
            n: None,
            k: None,
            m: None,
            lambda: None,
            matching: None,
            relation: None,
            table: false,
            samples: None,
            format: self.format,
            threads,
            seed: self.seed,
            max_n: MAX_N,
            max_m: MAX_M,
            allow_large: self.allow_large,
        };
        match &self.command {
            Command::Catalan { m } => {
                cfg.command = "catalan".into();
                if !self.allow_large && *m > DEFAULT_MATCHING_BOUND {
                    return Err(usage(format!("m = {m} exceeds the bound {DEFAULT_MATCHING_BOUND}; pass --allow-large")));
                }
                cfg.m = Some(*m);
            }
            Command::Ring { m, table, samples } => {
                cfg.command = "ring".into();
                check_m(*m, max_m)?;
                cfg.m = Some(*m);
                cfg.table = *table;
                cfg.samples = Some(*samples);
            }
            Command::VerifyRelations { n, k, relation } => {
                cfg.command = "verify-relations".into();
                check_nk(*n, *k, max_n)?;
                if let Some(r) = relation {
                    if !RELATIONS.contains(&r.as_str()) {
                        return Err(usage(format!("unknown relation {r:?}; known: {}", RELATIONS.join(", "))));
                    }
                }
                (cfg.n, cfg.k, cfg.relation) = (Some(*n), Some(*k), relation.clone());
            }
            Command::Gram { n, k, lambda } => {
                cfg.command = "gram".into();
                let l = parse_lambda(lambda)?;
                let (n, k) = weight_nk(&l, *n, *k)?;
                check_nk(n, k, max_n)?;
                check_m(l.m(), max_m)?;
                (cfg.n, cfg.k, cfg.m, cfg.lambda) = (Some(n), Some(k), Some(l.m()), Some(l.entries().to_vec()));
            }
            Command::Canonical { n, k } => {
                cfg.command = "canonical".into();
                check_nk(*n, *k, max_n)?;
                (cfg.n, cfg.k) = (Some(*n), Some(*k));
            }
            Command::Present { n, k, lambda, matching } => {
                cfg.command = "present".into();
                let l = parse_lambda(lambda)?;
                let (n, k) = weight_nk(&l, *n, *k)?;
                check_nk(n, k, max_n)?;
                let pairs = parse_pairs(matching)?;
                Matching::from_pairs(l.s(), &pairs).map_err(|e| usage(format!("--matching on {l}: {e}")))?;
                (cfg.n, cfg.k, cfg.m, cfg.lambda) = (Some(n), Some(k), Some(l.m()), Some(l.entries().to_vec()));
                cfg.matching = Some(pairs);
            }
            Command::BraidK0 { n, k } => {
                cfg.command = "braid-k0".into();
                check_nk(*n, *k, max_n)?;
                (cfg.n, cfg.k) = (Some(*n), Some(*k));
            }
            Command::TensorCheck { m } => {
                cfg.command = "tensor-check".into();
                check_m(*m, max_m)?;
                cfg.m = Some(*m);
            }
        }
        Ok(cfg)
    }
}

fn matching_label(a: &Matching) -> String {
    a.coord_arcs().iter().map(|(x, y)| format!("({x},{y})")).collect()
}

fn strings<C: arcring::Coeff>(m: &[Vec<LaurentPoly<C>>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn field<T: Copy>(x: Option<T>, name: &str) -> Result<T, RunError> {
    x.ok_or_else(|| usage(format!("missing --{name}")))
}

/// Executes a resolved configuration. Sweeps run on the current rayon pool.
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let (passed, result) = match cfg.command.as_str() {
        "catalan" => catalan(field(cfg.m, "m")?, cfg.allow_large)?,
        "ring" => ring(field(cfg.m, "m")?, cfg.table, cfg.samples.unwrap_or(10_000), cfg.seed)?,
        "verify-relations" => relations(field(cfg.n, "n")?, field(cfg.k, "k")?, cfg.relation.as_deref())?,
        "gram" | "present" => {
            let entries = cfg.lambda.clone().ok_or_else(|| usage("missing --lambda"))?;
            let lambda = Weight::new(entries).map_err(|e| usage(e.to_string()))?;
            if cfg.command == "gram" {
                gram(&lambda)?
            } else {
                let pairs = cfg.matching.as_ref().ok_or_else(|| usage("missing --matching"))?;
                let a = Matching::from_pairs(lambda.s(), pairs).map_err(|e| usage(e.to_string()))?;
                present(&lambda, &a)?
            }
        }
        "canonical" => canonical(field(cfg.n, "n")?, field(cfg.k, "k")?)?,
        "braid-k0" => braid(field(cfg.n, "n")?, field(cfg.k, "k")?)?,
        "tensor-check" => tensor_check(field(cfg.m, "m")?, if cfg.allow_large { usize::MAX } else { cfg.max_m })?,
        other => return Err(usage(format!("unknown command {other:?}"))),
    };
    Ok(Report { tool: TOOL.into(), version: VERSION.into(), config: cfg.clone(), passed, result })
}

fn catalan(m: usize, allow_large: bool) -> Result<(bool, CommandResult), RunError> {
    let bound = if allow_large { m } else { DEFAULT_MATCHING_BOUND };
    let ms = enumerate_matchings_bounded(m, bound).map_err(internal)?;
    let matchings = (m <= MAX_M).then(|| ms.iter().map(matching_label).collect());
    Ok((true, CommandResult::Catalan(CatalanResult { m, count: ms.len() as u64, matchings })))
}

fn product(ring: &ArcRing, x: &BTreeMap<usize, i64>, y: &BTreeMap<usize, i64>) -> BTreeMap<usize, i64> {
    let mut out = BTreeMap::new();
    for (&i, &a) in x {
        for (&j, &b) in y {
            for (k, c) in ring.multiply_basis(i, j) {
                *out.entry(k).or_insert(0) += a * b * c;
            }
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn assoc_failure(ring: &ArcRing, i: usize, j: usize, k: usize) -> Option<String> {
    let e = |i: usize| BTreeMap::from([(i, 1i64)]);
    let l = product(ring, &product(ring, &e(i), &e(j)), &e(k));
    let r = product(ring, &e(i), &product(ring, &e(j), &e(k)));
    (l != r).then(|| format!("(e{i} e{j}) e{k} != e{i} (e{j} e{k})"))
}

fn ring(m: usize, table: bool, samples: usize, seed: u64) -> Result<(bool, CommandResult), RunError> {
    let ring = ArcRing::get(m).map_err(internal)?;
    let d = ring.dim();
    let sampled = m >= 4;
    let triples: Vec<(usize, usize, usize)> = if sampled {
        // composable triples only, so no check is vacuous
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = ring.matchings().len();
        (0..samples)
            .map(|_| {
                let i = rng.gen_range(0..d);
                let a1 = rng.gen_range(0..n);
                let r1 = ring.block_range(ring.basis()[i].a, a1);
                let j = r1.start + rng.gen_range(0..r1.len());
                let a2 = rng.gen_range(0..n);
                let r2 = ring.block_range(a1, a2);
                (i, j, r2.start + rng.gen_range(0..r2.len()))
            })
            .collect()
    } else {
        (0..d).flat_map(|i| (0..d).flat_map(move |j| (0..d).map(move |k| (i, j, k)))).collect()
    };
    let mut failures: Vec<String> = triples.par_iter().filter_map(|&(i, j, k)| assoc_failure(&ring, i, j, k)).collect();

    let spec = RingSpec::standard(m);
    let one = unit::<i64>(&spec).map_err(internal)?;
    for i in 0..d {
        let x = ArcElement::basis(spec.clone(), i);
        if one.multiply(&x).map_err(internal)? != x || x.multiply(&one).map_err(internal)? != x {
            failures.push(format!("unit law fails on e{i}"));
        }
    }
    let grading: Vec<String> = (0..d)
        .into_par_iter()
        .flat_map_iter(|i| {
            let ring = &ring;
            (0..d).filter_map(move |j| {
                let want = ring.degree(i) + ring.degree(j);
                ring.multiply_basis(i, j).iter().any(|&(k, _)| ring.degree(k) != want).then(|| format!("e{i} e{j} is not homogeneous"))
            })
        })
        .collect();
    failures.extend(grading);
    for a in ring.matchings() {
        let ea = idempotent::<i64>(&spec, a).map_err(internal)?;
        for b in ring.matchings() {
            let eb = idempotent::<i64>(&spec, b).map_err(internal)?;
            let want = if a == b { ea.clone() } else { ArcElement::zero(spec.clone()) };
            if ea.multiply(&eb).map_err(internal)? != want {
                failures.push(format!("1_{} 1_{} is wrong", matching_label(a), matching_label(b)));
            }
        }
    }

    let table = table.then(|| {
        let dump = ring.dump();
        RingTable {
            matchings: ring.matchings().iter().map(matching_label).collect(),
            basis: dump.basis.into_iter().map(|b| RingBasisRow { index: b.index, b: b.b, a: b.a, labels: b.labels, degree: b.degree }).collect(),
            products: dump.products.into_iter().map(|p| ProductRow { left: p.left, right: p.right, terms: p.terms }).collect(),
        }
    });
    let graded: Laurent = ring.graded_dim();
    let result = RingResult {
        m,
        dim: d,
        graded_dim: graded.to_string(),
        associativity_triples: triples.len(),
        sampled,
        failures,
        table,
    };
    Ok((result.failures.is_empty(), CommandResult::Ring(result)))
}

fn relations(n: usize, k: usize, only: Option<&str>) -> Result<(bool, CommandResult), RunError> {
    let ids: Vec<&str> = match only {
        Some(r) => vec![r],
        None => RELATIONS.to_vec(),
    };
    let mut rows = Vec::new();
    for id in ids {
        let r = verify_relation(id, n, k).map_err(internal)?;
        rows.push(RelationRow {
            relation: r.relation,
            cases: r.cases_checked,
            mismatches: r.mismatches.len(),
            first_mismatch: r.mismatches.first().map(|x| {
                format!("i={}, j={} on Q({}, {}): {:?} vs {:?}", x.i, x.j, x.lambda, matching_label(&x.matching), x.lhs, x.rhs)
            }),
        });
    }
    let passed = rows.iter().all(|r| r.mismatches == 0);
    Ok((passed, CommandResult::VerifyRelations(RelationsResult { n, k, relations: rows })))
}

fn gram(lambda: &Weight) -> Result<(bool, CommandResult), RunError> {
    let (n, k) = (lambda.n(), lambda.k());
    let g = gram_matrix::<arcring::BigInt>(n, k, lambda).map_err(internal)?;
    let basis = K0Basis::get(n, k).map_err(internal)?;
    let w = basis.weight_index(lambda).ok_or_else(|| usage(format!("{lambda} is not a weight of V(2ω_{k})")))?;
    let labels = basis.block(w).map(|i| matching_label(&basis.elts()[i].1)).collect();
    let triangular = g.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, v)| if i == j { v.in_one_plus_q_inv_z_q_inv() } else { v.in_q_inv_z_q_inv() })
    });
    let det = laurent_det(g.clone());
    let result = GramResult {
        n,
        k,
        lambda: lambda.to_string(),
        basis: labels,
        matrix: strings(&g),
        determinant: det.to_string(),
        triangular,
    };
    Ok((triangular, CommandResult::Gram(result)))
}

fn canonical(n: usize, k: usize) -> Result<(bool, CommandResult), RunError> {
    let r = canonical_basis_check::<i64>(n, k).map_err(internal)?;
    let basis = K0Basis::get(n, k).map_err(internal)?;
    let transitions = transition_q_to_z::<i64>(n, k)
        .map_err(internal)?
        .into_iter()
        .map(|(lambda, m)| {
            let w = basis.weight_index(&lambda).expect("weight of the basis");
            WeightMatrix {
                lambda: lambda.to_string(),
                target: lambda.to_string(),
                basis: basis.block(w).map(|i| matching_label(&basis.elts()[i].1)).collect(),
                matrix: strings(&m),
            }
        })
        .collect();
    let presentations = r
        .presentations
        .iter()
        .map(|p| PresentationRow {
            index: basis.index_of(&p.lambda, &p.matching).unwrap_or(usize::MAX),
            lambda: p.lambda.to_string(),
            matching: matching_label(&p.matching),
            word: p.word.iter().map(ToString::to_string).collect(),
        })
        .collect();
    let result = CanonicalResult { n, k, vectors: r.vectors, transitions, presentations, failures: r.failures };
    Ok((result.failures.is_empty(), CommandResult::Canonical(result)))
}

fn present(lambda: &Weight, a: &Matching) -> Result<(bool, CommandResult), RunError> {
    let (n, k) = (lambda.n(), lambda.k());
    let word = monomial_presentation(lambda, a).map_err(internal)?;
    let start = ProjectiveOrbit::highest(n, k).map_err(internal)?;
    let target = ProjectiveOrbit::single(lambda.clone(), a.clone(), 0).map_err(internal)?;
    let verified_functors = apply_word(&word, &start).map_err(internal)? == target;
    let act = K0Action::<i64>::new(n, k).map_err(internal)?;
    let eta = K0Class::<i64>::eta(n, k).map_err(internal)?.to_vector(&act.basis).map_err(internal)?;
    let idx = act.basis.index_of(lambda, a).ok_or_else(|| usage(format!("no projective for {lambda}")))?;
    let verified_k0 = act.word(&word).map_err(internal)?.apply(&eta) == BTreeMap::from([(idx, LaurentPoly::one())]);
    let result = PresentResult {
        n,
        k,
        lambda: lambda.to_string(),
        matching: matching_label(a),
        word: word.iter().map(ToString::to_string).collect(),
        verified_functors,
        verified_k0,
    };
    Ok((verified_functors && verified_k0, CommandResult::Present(result)))
}

fn braid(n: usize, k: usize) -> Result<(bool, CommandResult), RunError> {
    let r = braid_check::<i64>(n, k).map_err(internal)?;
    let act = K0Action::<i64>::new(n, k).map_err(internal)?;
    let e = euler_check(&act).map_err(internal)?;
    let b = &act.basis;
    let mut sigma = Vec::new();
    for i in 1..n {
        let s = sigma_k0(&act, i).map_err(internal)?;
        for (w, lambda) in b.weights().iter().enumerate() {
            let target = transpose_weight(lambda, i);
            let tw = b.weight_index(&target).expect("permuted weight present");
            let block = s.block(tw, w);
            sigma.push(SigmaBlock {
                i,
                determinant: laurent_det(block.clone()).to_string(),
                block: WeightMatrix {
                    lambda: lambda.to_string(),
                    target: target.to_string(),
                    basis: b.block(w).map(|j| matching_label(&b.elts()[j].1)).collect(),
                    matrix: strings(&block),
                },
            });
        }
    }
    let euler = b
        .weights()
        .iter()
        .flat_map(|lambda| (1..n).map(move |i| (i, lambda)))
        .map(|(i, lambda)| EulerRow { i, lambda: lambda.to_string(), agrees: e.weights[&format!("{i}:{lambda}")] })
        .collect();
    let mut failures = r.failures;
    failures.extend(e.failures);
    let result = BraidResult { n, k, sigma, braid_cases: r.braid_cases, far_cases: r.far_cases, euler, failures };
    Ok((result.failures.is_empty(), CommandResult::BraidK0(result)))
}

/// The identity, every cap and every cup on `2m` standard points.
fn elementary_on(m: usize) -> Result<Vec<FlatTangle>, RunError> {
    let mut out = vec![FlatTangle::identity(&PointSeq::standard(2 * m))];
    for pos in 0..(2 * m).saturating_sub(1) {
        out.push(FlatTangle::positional_cap(m, pos).map_err(internal)?);
    }
    for pos in 0..=2 * m {
        out.push(FlatTangle::positional_cup(m, pos).map_err(internal)?);
    }
    Ok(out)
}

fn tangle_label(t: &FlatTangle) -> String {
    let end = |e: &Endpoint| match e {
        Endpoint::Bottom(i) => format!("b{}", i + 1),
        Endpoint::Top(i) => format!("t{}", i + 1),
    };
    let arcs: Vec<String> = t.arcs().iter().map(|(a, b)| format!("{}-{}", end(a), end(b))).collect();
    format!("{}->{} [{}]", t.bottom_size(), t.top_size(), arcs.join(" "))
}

fn tensor_row(upper: &FlatTangle, lower: &FlatTangle) -> arcring::Result<TensorRow> {
    let rep = tensor_over(
        &Bimodule::from_tangle(upper.clone())?,
        &Bimodule::from_tangle(lower.clone())?,
        &RingSpec::new(lower.top().clone())?,
    )?;
    let direct: Laurent = Bimodule::from_tangle(FlatTangle::compose(upper, lower)?)?.graded_dim();
    let rank: Laurent = rep.graded_rank();
    Ok(TensorRow {
        upper: tangle_label(upper),
        lower: tangle_label(lower),
        tensor_rank: rank.to_string(),
        composed_dim: direct.to_string(),
        torsion_free: rep.is_torsion_free(),
        agrees: rank == direct,
    })
}

fn tensor_check(m: usize, max_m: usize) -> Result<(bool, CommandResult), RunError> {
    let mut cases = Vec::new();
    for lower in elementary_on(m)? {
        let mid = lower.top_size();
        if mid > max_m {
            continue;
        }
        for upper in elementary_on(mid)? {
            if upper.top_size() <= max_m {
                cases.push((upper, lower.clone()));
            }
        }
    }
    let pairs = cases.par_iter().map(|(u, l)| tensor_row(u, l)).collect::<arcring::Result<Vec<_>>>().map_err(internal)?;
    let passed = pairs.iter().all(|p| p.agrees && p.torsion_free);
    Ok((passed, CommandResult::TensorCheck(TensorResult { m, pairs })))
}

/// Renders a report in the configured format.
pub fn render(report: &Report) -> String {
    match report.config.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("arcring").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn pairs_accept_any_separators() {
        let want = vec![(1, 6), (2, 3)];
        for s in ["1-6,2-3", "(1,6)(2,3)", "1 6 2 3", "[[1,6],[2,3]]"] {
            assert_eq!(parse_pairs(s).unwrap(), want, "{s}");
        }
        assert!(matches!(parse_pairs("1,6,2"), Err(RunError::Usage(_))));
    }

    #[test]
    fn lambda_determines_n_and_k() {
        let cfg = cli(&["gram", "--lambda", "2,1,1,0"]).resolve().unwrap();
        assert_eq!((cfg.n, cfg.k, cfg.m), (Some(4), Some(2), Some(1)));
        let err = cli(&["gram", "--n", "5", "--lambda", "2,1,1,0"]).resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = cli(&["gram", "--k", "1", "--lambda", "2,1,1,0"]).resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bounds_need_acknowledgment() {
        assert!(cli(&["canonical", "--n", "7", "--k", "2"]).resolve().is_err());
        assert!(cli(&["ring", "--m", "5"]).resolve().is_err());
        let cfg = cli(&["--allow-large", "ring", "--m", "5"]).resolve().unwrap();
        assert!(cfg.allow_large);
    }

    #[test]
    fn matching_must_live_on_the_weight() {
        let err = cli(&["present", "--lambda", "1,1,1,0,2,1", "--matching", "1-2,3-4"]).resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn catalan_counts() {
        let cfg = cli(&["catalan", "--m", "5"]).resolve().unwrap();
        let r = run(&cfg).unwrap();
        let CommandResult::Catalan(c) = r.result else { panic!() };
        assert_eq!(c.count, 42);
    }
}
