//! The Grothendieck group `K_0` of the categorified representation.
//!
//! All computation happens in the basis of balanced projectives
//! `[Q_{λ,a}]`, indexed by [`K0Basis`]. Operators are sparse column maps
//! with Laurent polynomial entries; `[M{1}] = q[M]`.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::bareiss_det;
use crate::planar::{enumerate_matchings, glue_closed, Matching};
use crate::scalar::Coeff;
use crate::slnaction::{
    admissible_weights, apply_functor, cartan, monomial_presentation, FunctorTag, ProjectiveOrbit, Weight,
};

/// Which basis the coordinates of a [`K0Class`] refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BasisKind {
    Z,
    Q,
}

/// The projective basis of `K_0` for `V(2ω_k)` with `n` entries, grouped by
/// weight.
#[derive(Debug)]
pub struct K0Basis {
    n: usize,
    k: usize,
    elts: Vec<(Weight, Matching)>,
    index: HashMap<(Weight, Matching), usize>,
    weights: Vec<Weight>,
    blocks: Vec<Range<usize>>,
    weight_of: Vec<usize>,
    circles: Vec<Vec<usize>>,
}

impl K0Basis {
    /// The cached basis for `(n, k)`.
    pub fn get(n: usize, k: usize) -> Result<Arc<K0Basis>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<K0Basis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.lock().unwrap().get(&(n, k)) {
            return Ok(b.clone());
        }
        let b = Arc::new(Self::build(n, k)?);
        Ok(cache.lock().unwrap().entry((n, k)).or_insert(b).clone())
    }

    fn build(n: usize, k: usize) -> Result<Self> {
        let weights = admissible_weights(n, k)?;
        let mut elts = Vec::new();
        let mut blocks = Vec::new();
        let mut weight_of = Vec::new();
        let mut circles = Vec::new();
        for (w, lambda) in weights.iter().enumerate() {
            let ms = crate::planar::matchings_on(&lambda.s());
            let start = elts.len();
            let r: Vec<usize> = ms
                .iter()
                .flat_map(|b| ms.iter().map(move |a| glue_closed(b, a).expect("same points").count))
                .collect();
            circles.push(r);
            for a in ms {
                elts.push((lambda.clone(), a));
                weight_of.push(w);
            }
            blocks.push(start..elts.len());
        }
        let index = elts.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Ok(Self { n, k, elts, index, weights, blocks, weight_of, circles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.elts.len()
    }

    pub fn elts(&self) -> &[(Weight, Matching)] {
        &self.elts
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn index_of(&self, lambda: &Weight, a: &Matching) -> Option<usize> {
        self.index.get(&(lambda.clone(), a.clone())).copied()
    }

    pub fn weight_index(&self, lambda: &Weight) -> Option<usize> {
        self.weights.iter().position(|w| w == lambda)
    }

    pub fn block(&self, w: usize) -> Range<usize> {
        self.blocks[w].clone()
    }

    /// Index of the weight of basis element `i`.
    pub fn weight_of(&self, i: usize) -> usize {
        self.weight_of[i]
    }

    /// Circle count of `W(a_i) a_j`, or `None` across weights.
    pub fn circles(&self, i: usize, j: usize) -> Option<usize> {
        let w = self.weight_of[i];
        if self.weight_of[j] != w {
            return None;
        }
        let r = &self.blocks[w];
        let size = r.len();
        Some(self.circles[w][(i - r.start) * size + (j - r.start)])
    }

    /// `m(λ)` of basis element `i`.
    pub fn m_of(&self, i: usize) -> usize {
        self.elts[i].0.m()
    }
}

/// Sparse coordinate vector over a [`K0Basis`].
pub type K0Vector<C = i64> = BTreeMap<usize, LaurentPoly<C>>;

fn add_into<C: Coeff>(v: &mut K0Vector<C>, i: usize, p: &LaurentPoly<C>) {
    if p.is_zero() {
        return;
    }
    let e = v.entry(i).or_insert_with(LaurentPoly::zero);
    *e += p;
    if e.is_zero() {
        v.remove(&i);
    }
}

fn combine<C: Coeff>(x: &K0Vector<C>, y: &K0Vector<C>, c: &LaurentPoly<C>) -> K0Vector<C> {
    let mut out = x.clone();
    for (&i, p) in y {
        add_into(&mut out, i, &(p * c));
    }
    out
}

/// A class in `K_0`, stored by `(λ, a)` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K0Class<C: Coeff = i64> {
    pub basis: BasisKind,
    pub n: usize,
    pub k: usize,
    pub coords: BTreeMap<(Weight, Matching), LaurentPoly<C>>,
}

impl<C: Coeff> K0Class<C> {
    pub fn zero(basis: BasisKind, n: usize, k: usize) -> Self {
        Self { basis, n, k, coords: BTreeMap::new() }
    }

    /// `[Q_{λ,a}]` or `[Z(λ,a)]`.
    pub fn basis_vector(basis: BasisKind, lambda: &Weight, a: &Matching) -> Result<Self> {
        if *a.points() != lambda.s() {
            return Err(Error::Weight(format!("{a:?} is not a matching of s{lambda}")));
        }
        let mut x = Self::zero(basis, lambda.n(), lambda.k());
        x.coords.insert((lambda.clone(), a.clone()), LaurentPoly::one());
        Ok(x)
    }

    /// `η = [Q_{2ω_k}]`.
    pub fn eta(n: usize, k: usize) -> Result<Self> {
        Self::basis_vector(BasisKind::Q, &Weight::highest(n, k)?, &Matching::empty())
    }

    /// The class of a direct sum of shifted balanced projectives.
    pub fn from_orbit(n: usize, k: usize, orbit: &ProjectiveOrbit) -> Self {
        let mut x = Self::zero(BasisKind::Q, n, k);
        for (p, &mult) in orbit.terms() {
            let key = (p.lambda.clone(), p.a.clone());
            let term = LaurentPoly::monomial(p.shift as i32, C::from_int(mult as i64));
            let e = x.coords.entry(key.clone()).or_insert_with(LaurentPoly::zero);
            *e += &term;
            if e.is_zero() {
                x.coords.remove(&key);
            }
        }
        x
    }

    pub fn scale(&self, c: &LaurentPoly<C>) -> Self {
        let coords = self.coords.iter().map(|(k, p)| (k.clone(), p * c)).filter(|(_, p)| !p.is_zero()).collect();
        Self { coords, ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.basis, self.n, self.k) != (other.basis, other.n, other.k) {
            return Err(Error::Structural("adding classes of different spaces".into()));
        }
        let mut out = self.clone();
        for (key, p) in &other.coords {
            let e = out.coords.entry(key.clone()).or_insert_with(LaurentPoly::zero);
            *e += p;
            if e.is_zero() {
                out.coords.remove(key);
            }
        }
        Ok(out)
    }

    pub fn to_vector(&self, basis: &K0Basis) -> Result<K0Vector<C>> {
        let mut v = BTreeMap::new();
        for ((l, a), p) in &self.coords {
            let i = basis.index_of(l, a).ok_or_else(|| Error::Weight(format!("({l}, {a:?}) not in the basis")))?;
            add_into(&mut v, i, p);
        }
        Ok(v)
    }

    pub fn from_vector(kind: BasisKind, basis: &K0Basis, v: &K0Vector<C>) -> Self {
        let mut x = Self::zero(kind, basis.n(), basis.k());
        for (&i, p) in v {
            x.coords.insert(basis.elts()[i].clone(), p.clone());
        }
        x
    }
}

/// A `Z[q, q^-1]`-linear endomorphism of `K_0` in the `Q`-basis.
#[derive(Debug, Clone)]
pub struct K0Operator<C: Coeff = i64> {
    pub name: String,
    basis: Arc<K0Basis>,
    cols: Vec<K0Vector<C>>,
}

impl<C: Coeff> PartialEq for K0Operator<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cols == other.cols
    }
}

impl<C: Coeff> K0Operator<C> {
    pub fn from_columns(name: impl Into<String>, basis: Arc<K0Basis>, cols: Vec<K0Vector<C>>) -> Self {
        assert_eq!(cols.len(), basis.dim());
        Self { name: name.into(), basis, cols }
    }

    pub fn identity(basis: Arc<K0Basis>) -> Self {
        let cols = (0..basis.dim()).map(|i| BTreeMap::from([(i, LaurentPoly::one())])).collect();
        Self::from_columns("Id", basis, cols)
    }

    pub fn zero(basis: Arc<K0Basis>) -> Self {
        let cols = vec![BTreeMap::new(); basis.dim()];
        Self::from_columns("0", basis, cols)
    }

    pub fn basis(&self) -> &Arc<K0Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &K0Vector<C> {
        &self.cols[j]
    }

    pub fn entry(&self, i: usize, j: usize) -> LaurentPoly<C> {
        self.cols[j].get(&i).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(BTreeMap::is_empty)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn apply(&self, v: &K0Vector<C>) -> K0Vector<C> {
        let mut out = BTreeMap::new();
        for (&j, c) in v {
            for (&i, p) in &self.cols[j] {
                add_into(&mut out, i, &(p * c));
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let cols = other.cols.iter().map(|c| self.apply(c)).collect();
        Self::from_columns(format!("{}{}", self.name, other.name), self.basis.clone(), cols)
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, other: &Self, c: &LaurentPoly<C>) -> Self {
        let cols = self.cols.iter().zip(&other.cols).map(|(x, y)| combine(x, y, c)).collect();
        Self::from_columns(self.name.clone(), self.basis.clone(), cols)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, &LaurentPoly::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, &-LaurentPoly::one())
    }

    pub fn scale(&self, c: &LaurentPoly<C>) -> Self {
        Self::zero(self.basis.clone()).add_scaled(self, c).named(self.name.clone())
    }

    /// Entrywise `q -> q^-1`.
    pub fn bar(&self) -> Self {
        let cols = self.cols.iter().map(|c| c.iter().map(|(&i, p)| (i, p.bar())).collect()).collect();
        Self::from_columns(self.name.clone(), self.basis.clone(), cols)
    }

    /// The dense block from weight `col` to weight `row`.
    pub fn block(&self, row: usize, col: usize) -> Vec<Vec<LaurentPoly<C>>> {
        let (rr, cr) = (self.basis.block(row), self.basis.block(col));
        rr.map(|i| cr.clone().map(|j| self.entry(i, j)).collect()).collect()
    }

    /// Whether every column of weight `λ` is supported on weight `f(λ)`
    /// (and vanishes where `f` is `None`).
    pub fn respects_weights(&self, f: impl Fn(&Weight) -> Option<Weight>) -> bool {
        let b = &self.basis;
        (0..self.dim()).all(|j| {
            let target = f(&b.elts()[j].0).and_then(|t| b.weight_index(&t));
            self.cols[j].keys().all(|&i| Some(b.weight_of(i)) == target)
        })
    }

    pub fn dump(&self) -> OperatorDump {
        let b = &self.basis;
        let mut blocks = Vec::new();
        for col in 0..b.weights().len() {
            for row in 0..b.weights().len() {
                let block = self.block(row, col);
                if block.iter().flatten().any(|p| !p.is_zero()) {
                    let entries = block.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect();
                    blocks.push(BlockDump { row_weight: b.weights()[row].clone(), col_weight: b.weights()[col].clone(), entries });
                }
            }
        }
        OperatorDump { name: self.name.clone(), n: b.n(), k: b.k(), blocks }
    }
}

/// Nonzero weight blocks of an operator, entries as Laurent strings.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorDump {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub blocks: Vec<BlockDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockDump {
    pub row_weight: Weight,
    pub col_weight: Weight,
    pub entries: Vec<Vec<String>>,
}

/// The matrix of a functor: column `(λ, a)` is the class of its image of
/// `Q_{λ,a}`.
pub fn operator_matrix<C: Coeff>(tag: FunctorTag, n: usize, k: usize) -> Result<K0Operator<C>> {
    let basis = K0Basis::get(n, k)?;
    let cols = basis
        .elts()
        .par_iter()
        .map(|(l, a)| {
            let img = apply_functor(tag, &ProjectiveOrbit::single(l.clone(), a.clone(), 0)?)?;
            K0Class::<C>::from_orbit(n, k, &img).to_vector(&basis)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(K0Operator::from_columns(tag.to_string(), basis, cols))
}

/// All generator matrices for one `(n, k)`, indexed by `i - 1`.
#[derive(Debug, Clone)]
pub struct K0Action<C: Coeff = i64> {
    pub basis: Arc<K0Basis>,
    pub e: Vec<K0Operator<C>>,
    pub f: Vec<K0Operator<C>>,
    pub k: Vec<K0Operator<C>>,
    pub kinv: Vec<K0Operator<C>>,
    pub e2: Vec<K0Operator<C>>,
    pub f2: Vec<K0Operator<C>>,
}

impl<C: Coeff> K0Action<C> {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let basis = K0Basis::get(n, k)?;
        let all = |t: fn(usize) -> FunctorTag| (1..n).map(|i| operator_matrix(t(i), n, k)).collect::<Result<Vec<_>>>();
        Ok(Self {
            basis,
            e: all(FunctorTag::E)?,
            f: all(FunctorTag::F)?,
            k: all(FunctorTag::K)?,
            kinv: all(FunctorTag::Kinv)?,
            e2: all(FunctorTag::E2)?,
            f2: all(FunctorTag::F2)?,
        })
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn id(&self) -> K0Operator<C> {
        K0Operator::identity(self.basis.clone())
    }

    /// The matrix of a generator tag.
    pub fn generator(&self, tag: FunctorTag) -> Result<K0Operator<C>> {
        let n = self.n();
        let pick = |v: &Vec<K0Operator<C>>, i: usize| {
            if i == 0 || i >= n {
                Err(Error::Weight(format!("index {i} outside 1..{n}")))
            } else {
                Ok(v[i - 1].clone())
            }
        };
        match tag {
            FunctorTag::E(i) => pick(&self.e, i),
            FunctorTag::F(i) => pick(&self.f, i),
            FunctorTag::K(i) => pick(&self.k, i),
            FunctorTag::Kinv(i) => pick(&self.kinv, i),
            FunctorTag::E2(i) => pick(&self.e2, i),
            FunctorTag::F2(i) => pick(&self.f2, i),
            FunctorTag::Shift(j) => Ok(self.id().scale(&LaurentPoly::q_pow(j as i32)).named(tag.to_string())),
            FunctorTag::Id => Ok(self.id()),
        }
    }

    /// The product of a word; the rightmost letter acts first.
    pub fn word(&self, word: &[FunctorTag]) -> Result<K0Operator<C>> {
        word.iter().try_fold(self.id(), |acc, &t| Ok(acc.compose(&self.generator(t)?)))
    }

    /// The diagonal matrix `[λ_i − λ_{i+1}]`.
    pub fn quantum_diag(&self, i: usize) -> K0Operator<C> {
        let b = &self.basis;
        let cols = (0..b.dim())
            .map(|j| {
                let mut c = BTreeMap::new();
                add_into(&mut c, j, &LaurentPoly::quantum_integer(b.elts()[j].0.k_exponent(i)));
                c
            })
            .collect();
        K0Operator::from_columns(format!("[h{i}]"), b.clone(), cols)
    }
}

/// Outcome of one relation family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl FamilyReport {
    fn new(family: &str) -> Self {
        Self { family: family.into(), cases: 0, failures: Vec::new() }
    }

    fn check<C: Coeff>(&mut self, label: String, lhs: &K0Operator<C>, rhs: &K0Operator<C>) {
        self.cases += 1;
        if lhs != rhs {
            self.failures.push(label);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QRelReport {
    pub n: usize,
    pub k: usize,
    pub families: Vec<FamilyReport>,
}

impl QRelReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(FamilyReport::passed)
    }
}

/// The nine quantum group relation families as exact matrix identities,
/// with the divided power identities `E^2 = [2] E^(2)`, `F^2 = [2] F^(2)`
/// and the vanishing of `E E^(2)` and `F F^(2)`.
pub fn verify_qrel<C: Coeff>(n: usize, k: usize) -> Result<QRelReport> {
    let act = K0Action::<C>::new(n, k)?;
    verify_qrel_with(&act)
}

pub fn verify_qrel_with<C: Coeff>(act: &K0Action<C>) -> Result<QRelReport> {
    let n = act.n();
    let id = act.id();
    let zero = K0Operator::zero(act.basis.clone());
    let q = |e: i32| LaurentPoly::<C>::q_pow(e);
    let two = LaurentPoly::<C>::q_plus_q_inv();
    let idx = |i: usize| i - 1;
    let mut fam: Vec<FamilyReport> =
        ["k-inverse", "k-commute", "k-e", "k-f", "ef-cartan", "e-far", "f-far", "serre-e", "serre-f", "divided-powers", "nilpotent"]
            .iter()
            .map(|s| FamilyReport::new(s))
            .collect();
    for i in 1..n {
        let (e, f, kk, ki) = (&act.e[idx(i)], &act.f[idx(i)], &act.k[idx(i)], &act.kinv[idx(i)]);
        fam[0].check(format!("K{i}K{i}^-1"), &kk.compose(ki), &id);
        fam[0].check(format!("K{i}^-1K{i}"), &ki.compose(kk), &id);
        fam[9].check(format!("E{i}^2"), &e.compose(e), &act.e2[idx(i)].scale(&two));
        fam[9].check(format!("F{i}^2"), &f.compose(f), &act.f2[idx(i)].scale(&two));
        fam[10].check(format!("E{i}E{i}^(2)"), &e.compose(&act.e2[idx(i)]), &zero);
        fam[10].check(format!("F{i}F{i}^(2)"), &f.compose(&act.f2[idx(i)]), &zero);
        for j in 1..n {
            let (ej, fj, kj) = (&act.e[idx(j)], &act.f[idx(j)], &act.k[idx(j)]);
            let c = cartan(i, j) as i32;
            fam[1].check(format!("K{i}K{j}"), &kk.compose(kj), &kj.compose(kk));
            fam[2].check(format!("K{i}E{j}K{i}^-1"), &kk.compose(ej).compose(ki), &ej.scale(&q(c)));
            fam[3].check(format!("K{i}F{j}K{i}^-1"), &kk.compose(fj).compose(ki), &fj.scale(&q(-c)));
            let comm = e.compose(fj).sub(&fj.compose(e));
            if i == j {
                let cleared = comm.scale(&(&q(1) - &q(-1)));
                fam[4].check(format!("(E{i}F{i}-F{i}E{i})(q-q^-1)"), &cleared, &kk.sub(ki));
                fam[4].check(format!("E{i}F{i}-F{i}E{i}=[h{i}]"), &comm, &act.quantum_diag(i));
            } else {
                fam[4].check(format!("E{i}F{j}-F{j}E{i}"), &comm, &zero);
            }
            match i.abs_diff(j) {
                0 => {}
                1 => {
                    let serre = |x: &K0Operator<C>, y: &K0Operator<C>| {
                        x.compose(x).compose(y).sub(&x.compose(y).compose(x).scale(&two)).add(&y.compose(x).compose(x))
                    };
                    fam[7].check(format!("serre E{i},E{j}"), &serre(e, ej), &zero);
                    fam[8].check(format!("serre F{i},F{j}"), &serre(f, fj), &zero);
                }
                _ => {
                    fam[5].check(format!("E{i}E{j}"), &e.compose(ej), &ej.compose(e));
                    fam[6].check(format!("F{i}F{j}"), &f.compose(fj), &fj.compose(f));
                }
            }
        }
    }
    Ok(QRelReport { n, k: act.basis.k(), families: fam })
}

/// Per-weight transition matrix from the `Q`-basis to the `Z`-basis: entry
/// `(b, a)` is `(q + q^-1)^{r(b, a)}`.
pub fn transition_q_to_z<C: Coeff>(n: usize, k: usize) -> Result<Vec<(Weight, Vec<Vec<LaurentPoly<C>>>)>> {
    let basis = K0Basis::get(n, k)?;
    Ok((0..basis.weights().len())
        .map(|w| {
            let r = basis.block(w);
            let m = r.clone().map(|b| r.clone().map(|a| circle_poly(basis.circles(b, a).unwrap())).collect()).collect();
            (basis.weights()[w].clone(), m)
        })
        .collect())
}

/// The transition block for `m` arcs on standard points.
pub fn transition_block<C: Coeff>(m: usize) -> Result<Vec<Vec<LaurentPoly<C>>>> {
    let ms = enumerate_matchings(m)?;
    ms.iter().map(|b| ms.iter().map(|a| Ok(circle_poly(glue_closed(b, a)?.count))).collect()).collect()
}

/// Determinant of [`transition_block`] at `q = 1`.
pub fn transition_det_at_one(m: usize) -> Result<BigInt> {
    let ms = enumerate_matchings(m)?;
    let rows: Vec<Vec<BigInt>> = ms
        .iter()
        .map(|b| ms.iter().map(|a| Ok(BigInt::from(1) << glue_closed(b, a)?.count)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    Ok(bareiss_det(rows, BigInt::from(0), BigInt::from(1), |a, b| a / b))
}

fn circle_poly<C: Coeff>(r: usize) -> LaurentPoly<C> {
    LaurentPoly::q_plus_q_inv().pow(r as u32)
}

/// Laurent determinant of a square matrix.
pub fn laurent_det<C: Coeff>(m: Vec<Vec<LaurentPoly<C>>>) -> LaurentPoly<C> {
    bareiss_det(m, LaurentPoly::zero(), LaurentPoly::one(), |a, b| a.div_exact(b).expect("exact Bareiss division"))
}

/// `⟨Q_i, Q_j⟩ = q^m (q + q^-1)^r` on basis elements.
fn hom_entry<C: Coeff>(b: &K0Basis, i: usize, j: usize) -> LaurentPoly<C> {
    match b.circles(i, j) {
        Some(r) => circle_poly::<C>(r).shift(b.m_of(i) as i32),
        None => LaurentPoly::zero(),
    }
}

/// `(Q_i, Q_j) = q^-m (q + q^-1)^r` on basis elements.
fn bilinear_entry<C: Coeff>(b: &K0Basis, i: usize, j: usize) -> LaurentPoly<C> {
    match b.circles(i, j) {
        Some(r) => circle_poly::<C>(r).shift(-(b.m_of(i) as i32)),
        None => LaurentPoly::zero(),
    }
}

/// The Hom form on coordinate vectors: antilinear in `x`, linear in `y`.
pub fn hom_form_vec<C: Coeff>(b: &K0Basis, x: &K0Vector<C>, y: &K0Vector<C>) -> LaurentPoly<C> {
    let mut total = LaurentPoly::zero();
    for (&i, xi) in x {
        let xb = xi.bar();
        for (&j, yj) in y {
            let g = hom_entry::<C>(b, i, j);
            if !g.is_zero() {
                total += &(&(&xb * yj) * &g);
            }
        }
    }
    total
}

/// The symmetric bilinear form on coordinate vectors.
pub fn bilinear_form_vec<C: Coeff>(b: &K0Basis, x: &K0Vector<C>, y: &K0Vector<C>) -> LaurentPoly<C> {
    let mut total = LaurentPoly::zero();
    for (&i, xi) in x {
        for (&j, yj) in y {
            let g = bilinear_entry::<C>(b, i, j);
            if !g.is_zero() {
                total += &(&(xi * yj) * &g);
            }
        }
    }
    total
}

/// `⟨x, y⟩ = rk Hom(x, y)` with `x` in the `Q`-basis and `y` in either basis;
/// `⟨Q_{λ,a}, Z(λ,b)⟩ = q^m δ_{a,b}`.
pub fn hom_form<C: Coeff>(x: &K0Class<C>, y: &K0Class<C>) -> Result<LaurentPoly<C>> {
    if x.basis != BasisKind::Q {
        return Err(Error::Structural("the first argument of the Hom form must be projective".into()));
    }
    if (x.n, x.k) != (y.n, y.k) {
        return Err(Error::Structural("classes of different spaces".into()));
    }
    let b = K0Basis::get(x.n, x.k)?;
    let (xv, yv) = (x.to_vector(&b)?, y.to_vector(&b)?);
    Ok(match y.basis {
        BasisKind::Q => hom_form_vec(&b, &xv, &yv),
        BasisKind::Z => {
            let mut total = LaurentPoly::zero();
            for (i, xi) in &xv {
                if let Some(yi) = yv.get(i) {
                    total += &(&xi.bar() * yi).shift(b.m_of(*i) as i32);
                }
            }
            total
        }
    })
}

/// `([Q_{λ,a}], [Q_{μ,b}]) = δ_{λ,μ} (q + q^-1)^r q^-m`, extended bilinearly.
pub fn bilinear_form<C: Coeff>(x: &K0Class<C>, y: &K0Class<C>) -> Result<LaurentPoly<C>> {
    if x.basis != BasisKind::Q || y.basis != BasisKind::Q {
        return Err(Error::Structural("the bilinear form is defined on projective classes".into()));
    }
    if (x.n, x.k) != (y.n, y.k) {
        return Err(Error::Structural("classes of different spaces".into()));
    }
    let b = K0Basis::get(x.n, x.k)?;
    Ok(bilinear_form_vec(&b, &x.to_vector(&b)?, &y.to_vector(&b)?))
}

/// Gram matrix of the bilinear form on one weight block.
pub fn gram_matrix<C: Coeff>(n: usize, k: usize, lambda: &Weight) -> Result<Vec<Vec<LaurentPoly<C>>>> {
    let b = K0Basis::get(n, k)?;
    let w = b.weight_index(lambda).ok_or_else(|| Error::Weight(format!("{lambda} is not a weight of V(2ω_{k}) for n = {n}")))?;
    Ok(b.block(w).map(|i| b.block(w).map(|j| bilinear_entry(&b, i, j)).collect()).collect())
}

/// Gram matrix of the Hom form on one weight block.
pub fn hom_gram_matrix<C: Coeff>(n: usize, k: usize, lambda: &Weight) -> Result<Vec<Vec<LaurentPoly<C>>>> {
    let b = K0Basis::get(n, k)?;
    let w = b.weight_index(lambda).ok_or_else(|| Error::Weight(format!("{lambda} is not a weight of V(2ω_{k}) for n = {n}")))?;
    Ok(b.block(w).map(|i| b.block(w).map(|j| hom_entry(&b, i, j)).collect()).collect())
}

/// `ψ_V`: bars the coordinates of a class in the `Q`-basis.
pub fn bar_involution<C: Coeff>(x: &K0Class<C>) -> Result<K0Class<C>> {
    if x.basis != BasisKind::Q {
        return Err(Error::Structural("the bar involution is computed in the projective basis".into()));
    }
    Ok(K0Class { coords: x.coords.iter().map(|(k, p)| (k.clone(), p.bar())).collect(), ..x.clone() })
}

/// `ψ_V` on coordinate vectors.
pub fn bar_vec<C: Coeff>(v: &K0Vector<C>) -> K0Vector<C> {
    v.iter().map(|(&i, p)| (i, p.bar())).collect()
}

/// Failures of an adjointness identity over all basis pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormReport {
    pub n: usize,
    pub k: usize,
    pub pairs_checked: usize,
    pub failures: Vec<String>,
}

impl FormReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn unit<C: Coeff>(i: usize) -> K0Vector<C> {
    BTreeMap::from([(i, LaurentPoly::one())])
}

fn contravariance<C: Coeff>(
    act: &K0Action<C>,
    form: fn(&K0Basis, &K0Vector<C>, &K0Vector<C>) -> LaurentPoly<C>,
    image: impl Fn(FunctorTag) -> Result<K0Operator<C>>,
) -> Result<FormReport> {
    let b = &act.basis;
    let mut report = FormReport { n: b.n(), k: b.k(), pairs_checked: 0, failures: Vec::new() };
    for i in 1..act.n() {
        for tag in [FunctorTag::E(i), FunctorTag::F(i), FunctorTag::K(i)] {
            let x = act.generator(tag)?;
            let y = image(tag)?;
            for p in 0..b.dim() {
                let xp = x.apply(&unit(p));
                for r in 0..b.dim() {
                    report.pairs_checked += 1;
                    let lhs = form(b, &xp, &unit(r));
                    let rhs = form(b, &unit(p), &y.apply(&unit(r)));
                    if lhs != rhs {
                        report.failures.push(format!("{tag} on ({p}, {r}): {lhs} != {rhs}"));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `τ(E_i) = q F_i K_i^-1`, `τ(F_i) = q E_i K_i`, `τ(K_i) = K_i^-1`.
pub fn tau<C: Coeff>(act: &K0Action<C>, tag: FunctorTag) -> Result<K0Operator<C>> {
    use FunctorTag::*;
    let q = LaurentPoly::<C>::q();
    match tag {
        E(i) => Ok(act.word(&[F(i), Kinv(i)])?.scale(&q)),
        F(i) => Ok(act.word(&[E(i), K(i)])?.scale(&q)),
        K(i) => act.generator(Kinv(i)),
        Kinv(i) => act.generator(K(i)),
        t => Err(Error::Structural(format!("τ is only tabulated on generators, not {t}"))),
    }
}

/// `ρ(E_i) = q K_i F_i`, `ρ(F_i) = q K_i^-1 E_i`, `ρ(K_i) = K_i`.
pub fn rho<C: Coeff>(act: &K0Action<C>, tag: FunctorTag) -> Result<K0Operator<C>> {
    use FunctorTag::*;
    let q = LaurentPoly::<C>::q();
    match tag {
        E(i) => Ok(act.word(&[K(i), F(i)])?.scale(&q)),
        F(i) => Ok(act.word(&[Kinv(i), E(i)])?.scale(&q)),
        K(_) | Kinv(_) => act.generator(tag),
        t => Err(Error::Structural(format!("ρ is only tabulated on generators, not {t}"))),
    }
}

/// `⟨x v, w⟩ = ⟨v, τ(x) w⟩` for generators `x` on all basis pairs.
pub fn tau_check<C: Coeff>(act: &K0Action<C>) -> Result<FormReport> {
    contravariance(act, hom_form_vec, |t| tau(act, t))
}

/// `(x v, w) = (v, ρ(x) w)` for generators `x` on all basis pairs.
pub fn rho_check<C: Coeff>(act: &K0Action<C>) -> Result<FormReport> {
    contravariance(act, bilinear_form_vec, |t| rho(act, t))
}

/// One presentation of a canonical basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub lambda: Weight,
    pub matching: Matching,
    pub word: Vec<FunctorTag>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalReport {
    pub n: usize,
    pub k: usize,
    pub vectors: usize,
    pub presentations: Vec<Presentation>,
    pub failures: Vec<String>,
}

impl CanonicalReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Certifies `{[Q_{λ,a}]}` as the canonical basis: `ψ_V`-invariance through
/// compatibility with the generators, near-orthonormality of the bilinear
/// form, and an `F`-monomial presentation of each vector from `η`.
pub fn canonical_basis_check<C: Coeff>(n: usize, k: usize) -> Result<CanonicalReport> {
    let act = K0Action::<C>::new(n, k)?;
    let b = act.basis.clone();
    let mut failures = Vec::new();
    for i in 1..n {
        for (x, name) in [(&act.e, "E"), (&act.f, "F"), (&act.e2, "E^(2)"), (&act.f2, "F^(2)")] {
            if x[i - 1].bar() != x[i - 1] {
                failures.push(format!("ψ_V does not commute with {name}{i}"));
            }
        }
        if act.k[i - 1].bar() != act.kinv[i - 1] {
            failures.push(format!("ψ_V K{i} != K{i}^-1 ψ_V"));
        }
    }
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            let v = bilinear_entry::<C>(&b, i, j);
            let ok = match b.circles(i, j) {
                None => v.is_zero(),
                Some(_) if i == j => v.in_one_plus_q_inv_z_q_inv(),
                Some(_) => v.in_q_inv_z_q_inv(),
            };
            if !ok {
                failures.push(format!("form value ({i}, {j}) = {v}"));
            }
        }
    }
    let eta = K0Class::<C>::eta(n, k)?.to_vector(&b)?;
    if bar_vec(&eta) != eta {
        failures.push("ψ_V(η) != η".into());
    }
    let presentations: Vec<Presentation> = b
        .elts()
        .par_iter()
        .map(|(l, a)| Ok(Presentation { lambda: l.clone(), matching: a.clone(), word: monomial_presentation(l, a)? }))
        .collect::<Result<_>>()?;
    for (i, p) in presentations.iter().enumerate() {
        let v = act.word(&p.word)?.apply(&eta);
        if v != unit(i) {
            failures.push(format!("word {:?} does not give Q_({}, {:?})", p.word, p.lambda, p.matching));
        }
        if bar_vec(&v) != v {
            failures.push(format!("Q_({}, {:?}) is not ψ_V-invariant", p.lambda, p.matching));
        }
    }
    Ok(CanonicalReport { n, k, vectors: b.dim(), presentations, failures })
}

/// `σ_i v = Σ_{−a+b−c=r} (−1)^b q^{b−ac} E^(a) F^(b) E^(c) v` on each weight
/// vector, `r = λ_i − λ_{i+1}`, with divided powers above 2 checked to vanish.
pub fn sigma_k0<C: Coeff>(act: &K0Action<C>, i: usize) -> Result<K0Operator<C>> {
    if i == 0 || i >= act.n() {
        return Err(Error::Weight(format!("index {i} outside 1..{}", act.n())));
    }
    let (e, f) = (&act.e[i - 1], &act.f[i - 1]);
    let (e2, f2) = (&act.e2[i - 1], &act.f2[i - 1]);
    if !e.compose(e2).is_zero() || !f.compose(f2).is_zero() {
        return Err(Error::Structural(format!("third divided powers of E{i}, F{i} do not vanish")));
    }
    let id = act.id();
    let ep = [&id, e, e2];
    let fp = [&id, f, f2];
    let b = &act.basis;
    let cols = (0..b.dim())
        .map(|j| {
            let r = b.elts()[j].0.k_exponent(i);
            let mut out = BTreeMap::new();
            for a in 0..=2i64 {
                for c in 0..=2i64 {
                    let bb = r + a + c;
                    if !(0..=2).contains(&bb) {
                        continue;
                    }
                    let v = ep[a as usize].apply(&fp[bb as usize].apply(&ep[c as usize].apply(&unit(j))));
                    let sign = if bb % 2 == 0 { C::one() } else { -C::one() };
                    let coef = LaurentPoly::monomial((bb - a * c) as i32, sign);
                    out = combine(&out, &v, &coef);
                }
            }
            out
        })
        .collect();
    Ok(K0Operator::from_columns(format!("σ{i}"), b.clone(), cols))
}

/// `π_i λ`: `λ` with entries `i`, `i + 1` swapped.
pub fn transpose_weight(lambda: &Weight, i: usize) -> Weight {
    let mut v = lambda.entries().to_vec();
    v.swap(i - 1, i);
    Weight::new(v).expect("a permuted weight is admissible")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BraidReport {
    pub n: usize,
    pub k: usize,
    pub braid_cases: usize,
    pub far_cases: usize,
    /// `det` of each `σ_i` weight block, keyed by `"i:λ"`.
    pub block_determinants: BTreeMap<String, String>,
    pub failures: Vec<String>,
}

impl BraidReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Whether a Laurent polynomial is `±q^s`.
pub fn is_laurent_unit<C: Coeff>(p: &LaurentPoly<C>) -> bool {
    p.num_terms() == 1 && p.terms().all(|(_, c)| c.is_unit())
}

/// Braid and far-commutation relations of the `σ_i`, the weight
/// permutation `λ → π_i λ` and invertibility on every weight block.
pub fn braid_check<C: Coeff>(n: usize, k: usize) -> Result<BraidReport> {
    let act = K0Action::<C>::new(n, k)?;
    let sig: Vec<K0Operator<C>> = (1..n).map(|i| sigma_k0(&act, i)).collect::<Result<_>>()?;
    let b = &act.basis;
    let mut report = BraidReport { n, k, braid_cases: 0, far_cases: 0, block_determinants: BTreeMap::new(), failures: Vec::new() };
    for i in 1..n {
        let s = &sig[i - 1];
        if !s.respects_weights(|l| Some(transpose_weight(l, i))) {
            report.failures.push(format!("σ{i} does not map λ to π_{i}λ"));
        }
        for (w, lambda) in b.weights().iter().enumerate() {
            let tw = b.weight_index(&transpose_weight(lambda, i)).expect("permuted weight present");
            let det = laurent_det(s.block(tw, w));
            if !is_laurent_unit(&det) {
                report.failures.push(format!("σ{i} block at {lambda} has determinant {det}"));
            }
            report.block_determinants.insert(format!("{i}:{lambda}"), det.to_string());
        }
        for j in i + 1..n {
            let t = &sig[j - 1];
            if j == i + 1 {
                report.braid_cases += 1;
                if s.compose(t).compose(s) != t.compose(s).compose(t) {
                    report.failures.push(format!("σ{i}σ{j}σ{i} != σ{j}σ{i}σ{j}"));
                }
            } else {
                report.far_cases += 1;
                if s.compose(t) != t.compose(s) {
                    report.failures.push(format!("σ{i}σ{j} != σ{j}σ{i}"));
                }
            }
        }
    }
    Ok(report)
}
