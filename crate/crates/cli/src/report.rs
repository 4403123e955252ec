//! Report types and their text and CSV renderings.

use serde::{Deserialize, Serialize};

use crate::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub passed: bool,
    pub result: CommandResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandResult {
    Catalan(CatalanResult),
    Ring(RingResult),
    VerifyRelations(RelationsResult),
    Gram(GramResult),
    Canonical(CanonicalResult),
    Present(PresentResult),
    BraidK0(BraidResult),
    TensorCheck(TensorResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalanResult {
    pub m: usize,
    pub count: u64,
    pub matchings: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingResult {
    pub m: usize,
    pub dim: usize,
    pub graded_dim: String,
    pub associativity_triples: usize,
    pub sampled: bool,
    pub failures: Vec<String>,
    pub table: Option<RingTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingTable {
    pub matchings: Vec<String>,
    pub basis: Vec<RingBasisRow>,
    pub products: Vec<ProductRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingBasisRow {
    pub index: usize,
    pub b: usize,
    pub a: usize,
    pub labels: String,
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub left: usize,
    pub right: usize,
    pub terms: Vec<(usize, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationsResult {
    pub n: usize,
    pub k: usize,
    pub relations: Vec<RelationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationRow {
    pub relation: String,
    pub cases: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramResult {
    pub n: usize,
    pub k: usize,
    pub lambda: String,
    pub basis: Vec<String>,
    pub matrix: Vec<Vec<String>>,
    pub determinant: String,
    pub triangular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalResult {
    pub n: usize,
    pub k: usize,
    pub vectors: usize,
    pub transitions: Vec<WeightMatrix>,
    pub presentations: Vec<PresentationRow>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    pub lambda: String,
    pub target: String,
    pub basis: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresentationRow {
    pub index: usize,
    pub lambda: String,
    pub matching: String,
    pub word: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresentResult {
    pub n: usize,
    pub k: usize,
    pub lambda: String,
    pub matching: String,
    pub word: Vec<String>,
    pub verified_functors: bool,
    pub verified_k0: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidResult {
    pub n: usize,
    pub k: usize,
    pub sigma: Vec<SigmaBlock>,
    pub braid_cases: usize,
    pub far_cases: usize,
    pub euler: Vec<EulerRow>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaBlock {
    pub i: usize,
    pub block: WeightMatrix,
    pub determinant: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerRow {
    pub i: usize,
    pub lambda: String,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorResult {
    pub m: usize,
    pub pairs: Vec<TensorRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorRow {
    pub upper: String,
    pub lower: String,
    pub tensor_rank: String,
    pub composed_dim: String,
    pub torsion_free: bool,
    pub agrees: bool,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_row<S: AsRef<str>>(fields: impl IntoIterator<Item = S>) -> String {
    fields.into_iter().map(|f| csv_field(f.as_ref())).collect::<Vec<_>>().join(",")
}

/// A matrix with a header of column indices and rows labeled by row index.
fn csv_matrix(out: &mut Vec<String>, m: &[Vec<String>]) {
    let cols = m.first().map_or(0, Vec::len);
    out.push(csv_row(std::iter::once(String::new()).chain((0..cols).map(|j| j.to_string()))));
    for (i, row) in m.iter().enumerate() {
        out.push(csv_row(std::iter::once(i.to_string()).chain(row.iter().cloned())));
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    fn header(&self, prefix: &str) -> Vec<String> {
        vec![
            format!("{prefix}{} {}", self.tool, self.version),
            format!("{prefix}config: {}", serde_json::to_string(&self.config).expect("config serializes")),
            format!("{prefix}status: {}", if self.passed { "pass" } else { "fail" }),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header("# ");
        match &self.result {
            CommandResult::Catalan(r) => {
                out.push("m,count".into());
                out.push(format!("{},{}", r.m, r.count));
            }
            CommandResult::Ring(r) => match &r.table {
                Some(t) => {
                    out.push("left,right,terms".into());
                    for p in &t.products {
                        let terms: Vec<String> = p.terms.iter().map(|(k, c)| format!("{c}*e{k}")).collect();
                        out.push(csv_row([p.left.to_string(), p.right.to_string(), terms.join(" + ")]));
                    }
                }
                None => {
                    out.push("m,dim,graded_dim,associativity_triples,failures".into());
                    out.push(csv_row([
                        r.m.to_string(),
                        r.dim.to_string(),
                        r.graded_dim.clone(),
                        r.associativity_triples.to_string(),
                        r.failures.len().to_string(),
                    ]));
                }
            },
            CommandResult::VerifyRelations(r) => {
                out.push("relation,cases,mismatches".into());
                for row in &r.relations {
                    out.push(csv_row([row.relation.clone(), row.cases.to_string(), row.mismatches.to_string()]));
                }
            }
            CommandResult::Gram(r) => csv_matrix(&mut out, &r.matrix),
            CommandResult::Canonical(r) => {
                out.push("index,lambda,matching,word".into());
                for p in &r.presentations {
                    out.push(csv_row([p.index.to_string(), p.lambda.clone(), p.matching.clone(), p.word.join(" ")]));
                }
            }
            CommandResult::Present(r) => {
                out.push("lambda,matching,word,verified".into());
                out.push(csv_row([
                    r.lambda.clone(),
                    r.matching.clone(),
                    r.word.join(" "),
                    (r.verified_functors && r.verified_k0).to_string(),
                ]));
            }
            CommandResult::BraidK0(r) => {
                out.push("i,lambda,target,determinant,euler_agrees".into());
                for s in &r.sigma {
                    let agrees = r.euler.iter().find(|e| e.i == s.i && e.lambda == s.block.lambda).is_some_and(|e| e.agrees);
                    out.push(csv_row([
                        s.i.to_string(),
                        s.block.lambda.clone(),
                        s.block.target.clone(),
                        s.determinant.clone(),
                        agrees.to_string(),
                    ]));
                }
            }
            CommandResult::TensorCheck(r) => {
                out.push("upper,lower,tensor_rank,composed_dim,torsion_free,agrees".into());
                for p in &r.pairs {
                    out.push(csv_row([
                        p.upper.clone(),
                        p.lower.clone(),
                        p.tensor_rank.clone(),
                        p.composed_dim.clone(),
                        p.torsion_free.to_string(),
                        p.agrees.to_string(),
                    ]));
                }
            }
        }
        out.join("\n") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = self.header("");
        let matrix = |out: &mut Vec<String>, m: &[Vec<String>]| {
            for row in m {
                out.push(format!("  [{}]", row.join(", ")));
            }
        };
        let failures = |out: &mut Vec<String>, f: &[String]| {
            for x in f {
                out.push(format!("failure: {x}"));
            }
        };
        match &self.result {
            CommandResult::Catalan(r) => {
                out.push(format!("|B^{}| = {}", r.m, r.count));
                for x in r.matchings.iter().flatten() {
                    out.push(format!("  {x}"));
                }
            }
            CommandResult::Ring(r) => {
                out.push(format!("H^{}: rank {}, graded dimension {}", r.m, r.dim, r.graded_dim));
                let how = if r.sampled { "sampled" } else { "exhaustive" };
                out.push(format!("associativity: {} triples ({how})", r.associativity_triples));
                failures(&mut out, &r.failures);
                if let Some(t) = &r.table {
                    for b in &t.basis {
                        out.push(format!("  e{} = ({}, {}) labels {} degree {}", b.index, b.b, b.a, b.labels, b.degree));
                    }
                    for p in &t.products {
                        let terms: Vec<String> = p.terms.iter().map(|(k, c)| format!("{c}*e{k}")).collect();
                        out.push(format!("  e{} * e{} = {}", p.left, p.right, terms.join(" + ")));
                    }
                }
            }
            CommandResult::VerifyRelations(r) => {
                for row in &r.relations {
                    out.push(format!("{}: {} cases, {} mismatches", row.relation, row.cases, row.mismatches));
                    if let Some(x) = &row.first_mismatch {
                        out.push(format!("  first mismatch: {x}"));
                    }
                }
            }
            CommandResult::Gram(r) => {
                out.push(format!("Gram matrix at {} (n = {}, k = {})", r.lambda, r.n, r.k));
                out.push(format!("basis: {}", r.basis.join(" ")));
                matrix(&mut out, &r.matrix);
                out.push(format!("determinant: {}", r.determinant));
            }
            CommandResult::Canonical(r) => {
                out.push(format!("{} canonical vectors", r.vectors));
                for t in &r.transitions {
                    out.push(format!("Q to Z at {}:", t.lambda));
                    matrix(&mut out, &t.matrix);
                }
                for p in &r.presentations {
                    out.push(format!("  Q({}, {}) = {} η", p.lambda, p.matching, p.word.join(" ")));
                }
                failures(&mut out, &r.failures);
            }
            CommandResult::Present(r) => {
                out.push(format!("Q({}, {}) = {} η", r.lambda, r.matching, r.word.join(" ")));
                out.push(format!("verified on functors: {}, in K0: {}", r.verified_functors, r.verified_k0));
            }
            CommandResult::BraidK0(r) => {
                for s in &r.sigma {
                    out.push(format!("σ{} from {} to {} (det {}):", s.i, s.block.lambda, s.block.target, s.determinant));
                    matrix(&mut out, &s.block.matrix);
                }
                out.push(format!("braid relations: {}, far commutations: {}", r.braid_cases, r.far_cases));
                let bad = r.euler.iter().filter(|e| !e.agrees).count();
                out.push(format!("Euler characteristic agrees on {} of {} weights", r.euler.len() - bad, r.euler.len()));
                failures(&mut out, &r.failures);
            }
            CommandResult::TensorCheck(r) => {
                for p in &r.pairs {
                    let mark = if p.agrees && p.torsion_free { "ok" } else { "MISMATCH" };
                    out.push(format!("{mark} {} over {}: {}", p.upper, p.lower, p.tensor_rank));
                }
            }
        }
        out.join("\n") + "\n"
    }
}
