//! The graded arc rings `H^m` and their decorations `H(s)`.
//!
//! A basis element is a triple `(b, a, mask)`: matchings `b, a` of `2m`
//! points and a `{1, X}` labeling of the circles of `W(b)a`. Its degree is
//! `#X − #1 + m`. Product `(c, b', x)·(b, a, y)` is zero unless `b' = b`; if
//! so, the circles of `W(c)b` and `W(b)a` are contracted along `b`.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::planar::{enumerate_matchings, Matching, PointSeq};
use crate::scalar::Coeff;
use crate::tqft::{evaluate_contraction, transfer_labels, ClosedDiagram, SaddleStep, SurgerySchedule, TqftCombo};

/// Largest `m` whose full multiplication table is precomputed.
pub const TABLE_BOUND: usize = 4;

/// A basis element `(b, a, mask)` of `H^m`, by matching indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisElt {
    pub b: usize,
    pub a: usize,
    pub mask: u64,
}

/// `H^m` decorated with the endpoint coordinates it is built on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RingSpec {
    pub m: usize,
    pub points: PointSeq,
}

impl RingSpec {
    pub fn standard(m: usize) -> Self {
        Self { m, points: PointSeq::standard(2 * m) }
    }

    pub fn new(points: PointSeq) -> Result<Self> {
        if points.len() % 2 == 1 {
            return Err(Error::Construction(format!("odd point sequence {points:?}")));
        }
        Ok(Self { m: points.len() / 2, points })
    }
}

/// Tables of `H^m`: matchings, blocks, basis and products.
#[derive(Debug)]
pub struct ArcRing {
    m: usize,
    matchings: Vec<Matching>,
    index: HashMap<Vec<usize>, usize>,
    /// Circle count of block `(b, a)` at `b * n + a`.
    circles: Vec<usize>,
    /// First basis index of block `(b, a)` at `b * n + a`.
    offsets: Vec<usize>,
    basis: Vec<BasisElt>,
    table: OnceLock<Vec<Vec<(usize, usize, i64)>>>,
}

fn ring_cache() -> &'static RwLock<HashMap<usize, Arc<ArcRing>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<ArcRing>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

impl ArcRing {
    /// The shared instance of `H^m`.
    pub fn get(m: usize) -> Result<Arc<ArcRing>> {
        if let Some(r) = ring_cache().read().unwrap().get(&m) {
            return Ok(r.clone());
        }
        let ring = Arc::new(Self::build(m)?);
        Ok(ring_cache().write().unwrap().entry(m).or_insert(ring).clone())
    }

    fn build(m: usize) -> Result<Self> {
        let matchings = enumerate_matchings(m)?;
        let n = matchings.len();
        let index = matchings.iter().enumerate().map(|(i, x)| (x.partner().to_vec(), i)).collect();
        let mut circles = Vec::with_capacity(n * n);
        let mut offsets = Vec::with_capacity(n * n);
        let mut basis = Vec::new();
        for b in 0..n {
            for a in 0..n {
                let r = block_diagram(&matchings[b], &matchings[a]).circle_count();
                circles.push(r);
                offsets.push(basis.len());
                basis.extend((0..1u64 << r).map(|mask| BasisElt { b, a, mask }));
            }
        }
        Ok(Self { m, matchings, index, circles, offsets, basis, table: OnceLock::new() })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    /// Index of a matching, compared positionally.
    pub fn matching_index(&self, x: &Matching) -> Option<usize> {
        self.index.get(x.partner()).copied()
    }

    pub fn basis(&self) -> &[BasisElt] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn circles(&self, b: usize, a: usize) -> usize {
        self.circles[b * self.matchings.len() + a]
    }

    pub fn block_range(&self, b: usize, a: usize) -> Range<usize> {
        let k = b * self.matchings.len() + a;
        self.offsets[k]..self.offsets[k] + (1usize << self.circles[k])
    }

    pub fn basis_index(&self, e: BasisElt) -> usize {
        self.block_range(e.b, e.a).start + e.mask as usize
    }

    /// Degree `#X − #1 + m` of a basis element.
    pub fn degree(&self, i: usize) -> i64 {
        let e = self.basis[i];
        2 * e.mask.count_ones() as i64 - self.circles(e.b, e.a) as i64 + self.m as i64
    }

    pub fn block_diagram(&self, b: usize, a: usize) -> ClosedDiagram {
        block_diagram(&self.matchings[b], &self.matchings[a])
    }

    /// Saddles contracting `W(c)b` (upper) with `W(b)a` (lower) along `b`, on
    /// the disjoint union with lower nodes offset by `2m`.
    fn contraction(&self, c: usize, b: usize, a: usize) -> (ClosedDiagram, SurgerySchedule, ClosedDiagram, Vec<usize>) {
        let m = self.m;
        let upper = self.block_diagram(c, b);
        let lower = self.block_diagram(b, a);
        let mut edges = upper.edges().to_vec();
        edges.extend(lower.edges().iter().map(|&(u, v)| (u + 2 * m, v + 2 * m)));
        let combined = ClosedDiagram::new(4 * m, edges).expect("disjoint union of closed diagrams");
        let steps = self.matchings[b]
            .arcs()
            .into_iter()
            .enumerate()
            .map(|(k, (p, q))| SaddleStep {
                arc: k,
                remove: [m + k, 2 * m + k],
                add: [(p, 2 * m + p), (q, 2 * m + q)],
            })
            .collect();
        let target = self.block_diagram(c, a);
        let node_map = (0..2 * m).map(|p| 2 * m + p).collect();
        (combined, SurgerySchedule { steps }, target, node_map)
    }

    /// The default contraction schedule for `(c, b)·(b, a)`.
    pub fn schedule(&self, c: usize, b: usize, a: usize) -> SurgerySchedule {
        self.contraction(c, b, a).1
    }

    /// Product of labelings `x` on `W(c)b` and `y` on `W(b)a` under the given
    /// saddle order (a permutation of the arcs of `b`).
    pub fn contract_with_order(&self, c: usize, b: usize, a: usize, x: u64, y: u64, order: &[usize]) -> Result<TqftCombo> {
        let (combined, schedule, target, node_map) = self.contraction(c, b, a);
        let r_upper = self.circles(c, b);
        let v = TqftCombo::basis(x | (y << r_upper));
        let (after, out) = evaluate_contraction(&combined, &v, &schedule.permuted(order))?;
        transfer_labels(&after, &out, &target, &node_map)
    }

    fn compute_product(&self, i: usize, j: usize) -> Vec<(usize, i64)> {
        let x = self.basis[i];
        let y = self.basis[j];
        if x.a != y.b {
            return Vec::new();
        }
        let order: Vec<usize> = (0..self.m).collect();
        let out = self.contract_with_order(x.b, x.a, y.a, x.mask, y.mask, &order).expect("contraction is well formed");
        let start = self.block_range(x.b, y.a).start;
        out.terms().iter().map(|(&mask, &c)| (start + mask as usize, c)).collect()
    }

    fn table(&self) -> &Vec<Vec<(usize, usize, i64)>> {
        // row i lists (j, k, coefficient) for nonzero entries of basis_i * basis_j
        self.table.get_or_init(|| {
            (0..self.dim())
                .into_par_iter()
                .map(|i| {
                    let x = self.basis[i];
                    let n = self.matchings.len();
                    let mut row = Vec::new();
                    for a in 0..n {
                        for j in self.block_range(x.a, a) {
                            row.extend(self.compute_product(i, j).into_iter().map(|(k, c)| (j, k, c)));
                        }
                    }
                    row
                })
                .collect()
        })
    }

    /// Structure constants of `basis_i * basis_j`.
    pub fn multiply_basis(&self, i: usize, j: usize) -> Vec<(usize, i64)> {
        if self.m <= TABLE_BOUND {
            let row = &self.table()[i];
            let lo = row.partition_point(|&(jj, _, _)| jj < j);
            row[lo..].iter().take_while(|&&(jj, _, _)| jj == j).map(|&(_, k, c)| (k, c)).collect()
        } else {
            self.compute_product(i, j)
        }
    }

    /// The full table as `(i, j) → [(k, coefficient)]`, nonzero products only.
    pub fn multiplication_table(&self) -> Vec<((usize, usize), Vec<(usize, i64)>)> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            let x = self.basis[i];
            for a in 0..self.matchings.len() {
                for j in self.block_range(x.a, a) {
                    let p = self.multiply_basis(i, j);
                    if !p.is_empty() {
                        out.push(((i, j), p));
                    }
                }
            }
        }
        out
    }

    /// `q^m (q + q^-1)^r` for the block `(b, a)`.
    pub fn graded_dim_block<C: Coeff>(&self, b: usize, a: usize) -> LaurentPoly<C> {
        LaurentPoly::q_pow(self.m as i32) * LaurentPoly::q_plus_q_inv().pow(self.circles(b, a) as u32)
    }

    /// Graded dimension of the whole ring.
    pub fn graded_dim<C: Coeff>(&self) -> LaurentPoly<C> {
        let n = self.matchings.len();
        let mut total = LaurentPoly::zero();
        for b in 0..n {
            for a in 0..n {
                total += &self.graded_dim_block(b, a);
            }
        }
        total
    }

    /// Graded dimension of `Q_a = ⊕_b F(W(b)a)`.
    pub fn graded_dim_q<C: Coeff>(&self, a: usize) -> LaurentPoly<C> {
        (0..self.matchings.len()).map(|b| LaurentPoly::q_plus_q_inv().pow(self.circles(b, a) as u32)).sum()
    }
}

/// `W(b)a` on nodes `0..2m`: edges are the arcs of `b`, then those of `a`.
pub fn block_diagram(b: &Matching, a: &Matching) -> ClosedDiagram {
    let n = a.points().len();
    let edges = b.arcs().into_iter().chain(a.arcs()).collect();
    ClosedDiagram::new(n, edges).expect("two matchings glue to circles")
}

/// An element of `H(s)` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcElement<C: Coeff = i64> {
    spec: RingSpec,
    terms: BTreeMap<usize, C>,
}

impl<C: Coeff> ArcElement<C> {
    pub fn zero(spec: RingSpec) -> Self {
        Self { spec, terms: BTreeMap::new() }
    }

    pub fn basis(spec: RingSpec, i: usize) -> Self {
        let mut x = Self::zero(spec);
        x.add_term(i, C::one());
        x
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn terms(&self) -> &BTreeMap<usize, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, i: usize, c: C) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(i).or_insert_with(C::zero);
        *e = e.add_ck(&c);
        if e.is_zero() {
            self.terms.remove(&i);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::Structural("elements of different rings".into()));
        }
        let mut out = self.clone();
        for (&i, c) in &other.terms {
            out.add_term(i, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.spec.clone());
        for (&i, x) in &self.terms {
            out.add_term(i, x.mul_ck(c));
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::Structural(format!(
                "cannot multiply elements of H({:?}) and H({:?})",
                self.spec.points, other.spec.points
            )));
        }
        let ring = ArcRing::get(self.spec.m)?;
        let mut out = Self::zero(self.spec.clone());
        for (&i, x) in &self.terms {
            for (&j, y) in &other.terms {
                for (k, c) in ring.multiply_basis(i, j) {
                    out.add_term(k, x.mul_ck(y).mul_ck(&C::from_int(c)));
                }
            }
        }
        Ok(out)
    }

    /// The antiinvolution swapping `b` and `a`; circles of `W(b)a` and
    /// `W(a)b` are the same node sets, so labelings carry over.
    pub fn chi(&self) -> Self {
        let ring = ArcRing::get(self.spec.m).expect("ring of an existing element");
        let mut out = Self::zero(self.spec.clone());
        for (&i, c) in &self.terms {
            let e = ring.basis[i];
            out.add_term(ring.basis_index(BasisElt { b: e.a, a: e.b, mask: e.mask }), c.clone());
        }
        out
    }

    /// Degree of a homogeneous element; `None` for zero or mixed degree.
    pub fn degree(&self) -> Option<i64> {
        let ring = ArcRing::get(self.spec.m).ok()?;
        let mut it = self.terms.keys().map(|&i| ring.degree(i));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }
}

/// The minimal idempotent `1_a`: all circles of `W(a)a` labeled `1`.
pub fn idempotent<C: Coeff>(spec: &RingSpec, a: &Matching) -> Result<ArcElement<C>> {
    let ring = ArcRing::get(spec.m)?;
    let ai = ring
        .matching_index(a)
        .ok_or_else(|| Error::Construction(format!("{a:?} is not a matching of {} points", 2 * spec.m)))?;
    Ok(ArcElement::basis(spec.clone(), ring.basis_index(BasisElt { b: ai, a: ai, mask: 0 })))
}

/// The unit `Σ_a 1_a`.
pub fn unit<C: Coeff>(spec: &RingSpec) -> Result<ArcElement<C>> {
    let ring = ArcRing::get(spec.m)?;
    let mut out = ArcElement::zero(spec.clone());
    for a in 0..ring.matchings.len() {
        out.add_term(ring.basis_index(BasisElt { b: a, a, mask: 0 }), C::one());
    }
    Ok(out)
}

/// JSON dump of the multiplication table of `H^m`.
#[derive(Debug, Clone, Serialize)]
pub struct RingTableDump {
    pub m: usize,
    pub matchings: Vec<Matching>,
    pub basis: Vec<BasisDump>,
    pub products: Vec<ProductDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisDump {
    pub index: usize,
    pub b: usize,
    pub a: usize,
    pub labels: String,
    pub degree: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductDump {
    pub left: usize,
    pub right: usize,
    pub terms: Vec<(usize, i64)>,
}

impl ArcRing {
    pub fn dump(&self) -> RingTableDump {
        let basis = (0..self.dim())
            .map(|i| {
                let e = self.basis[i];
                let r = self.circles(e.b, e.a);
                let labels = (0..r).map(|k| if (e.mask >> k) & 1 == 1 { 'X' } else { '1' }).collect();
                BasisDump { index: i, b: e.b, a: e.a, labels, degree: self.degree(i) }
            })
            .collect();
        let products = self
            .multiplication_table()
            .into_iter()
            .map(|((left, right), terms)| ProductDump { left, right, terms })
            .collect();
        RingTableDump { m: self.m, matchings: self.matchings.clone(), basis, products }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Laurent;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn l(s: &str) -> Laurent {
        s.parse().unwrap()
    }

    #[test]
    fn h1() {
        let ring = ArcRing::get(1).unwrap();
        assert_eq!(ring.dim(), 2);
        let spec = RingSpec::standard(1);
        let a = &ring.matchings()[0];
        assert_eq!(unit::<i64>(&spec).unwrap(), idempotent(&spec, a).unwrap());
        let one = ArcElement::<i64>::basis(spec.clone(), 0);
        let x = ArcElement::<i64>::basis(spec.clone(), 1);
        assert!(x.multiply(&x).unwrap().is_zero());
        assert_eq!(one.multiply(&x).unwrap(), x);
        assert_eq!(ring.graded_dim::<num_bigint::BigInt>(), l("q^2 + 1"));
        assert_eq!(one.degree(), Some(0));
        assert_eq!(x.degree(), Some(2));
    }

    #[test]
    fn idempotents_and_peirce() {
        let ring = ArcRing::get(2).unwrap();
        let spec = RingSpec::standard(2);
        let e: Vec<ArcElement> = ring.matchings().iter().map(|a| idempotent(&spec, a).unwrap()).collect();
        assert_eq!(e[0].multiply(&e[0]).unwrap(), e[0]);
        assert!(e[0].multiply(&e[1]).unwrap().is_zero());
        assert_eq!(e[0].degree(), Some(0));
        let u = unit::<i64>(&spec).unwrap();
        for i in 0..ring.dim() {
            let x = ArcElement::basis(spec.clone(), i);
            assert_eq!(u.multiply(&x).unwrap(), x);
            assert_eq!(x.multiply(&u).unwrap(), x);
            let be = ring.basis()[i];
            assert_eq!(e[be.b].multiply(&x).unwrap().multiply(&e[be.a]).unwrap(), x);
        }
    }

    #[test]
    fn graded_dims() {
        let ring = ArcRing::get(2).unwrap();
        assert_eq!(ring.graded_dim_block::<num_bigint::BigInt>(0, 0), l("q^4 + 2*q^2 + 1"));
        assert_eq!(ring.graded_dim_block::<num_bigint::BigInt>(0, 1), l("q^3 + q"));
        for m in 0..=4 {
            let ring = ArcRing::get(m).unwrap();
            for a in 0..ring.matchings().len() {
                let q: Laurent = ring.graded_dim_q(a);
                assert_eq!(q.max_exp(), Some(m as i32));
                assert_eq!(q.min_exp(), Some(-(m as i32)));
                assert!(q.is_bar_invariant());
            }
            let mut by_degree = BTreeMap::new();
            for i in 0..ring.dim() {
                *by_degree.entry(ring.degree(i) as i32).or_insert(0i64) += 1;
            }
            let from_count = LaurentPoly::<i64>::from_terms(by_degree);
            assert_eq!(from_count, ring.graded_dim::<i64>());
        }
    }

    fn check_associative(ring: &ArcRing, spec: &RingSpec, i: usize, j: usize, k: usize) {
        let x = ArcElement::<i64>::basis(spec.clone(), i);
        let y = ArcElement::<i64>::basis(spec.clone(), j);
        let z = ArcElement::<i64>::basis(spec.clone(), k);
        let l = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let r = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        assert_eq!(l, r, "({i},{j},{k}) in H^{}", ring.m());
    }

    #[test]
    fn associativity_exhaustive_small() {
        for m in 0..=3 {
            let ring = ArcRing::get(m).unwrap();
            let spec = RingSpec::standard(m);
            let n = ring.matchings().len();
            for (i, x) in ring.basis().iter().enumerate() {
                for a in 0..n {
                    for j in ring.block_range(x.a, a) {
                        for c in 0..n {
                            for k in ring.block_range(a, c) {
                                check_associative(&ring, &spec, i, j, k);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn associativity_random_h4() {
        let ring = ArcRing::get(4).unwrap();
        let spec = RingSpec::standard(4);
        let n = ring.matchings().len();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let i = rng.gen_range(0..ring.dim());
            let x = ring.basis()[i];
            let a = rng.gen_range(0..n);
            let j = rng.gen_range(ring.block_range(x.a, a));
            let c = rng.gen_range(0..n);
            let k = rng.gen_range(ring.block_range(a, c));
            check_associative(&ring, &spec, i, j, k);
        }
    }

    #[test]
    fn grading_and_nonnegativity() {
        for m in 0..=3 {
            let ring = ArcRing::get(m).unwrap();
            for ((i, j), terms) in ring.multiplication_table() {
                for (k, c) in terms {
                    assert!(c > 0);
                    assert_eq!(ring.degree(k), ring.degree(i) + ring.degree(j));
                }
            }
        }
    }

    #[test]
    fn schedule_order_independence() {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        for m in 1..=3 {
            let ring = ArcRing::get(m).unwrap();
            let n = ring.matchings().len();
            let orders = perms(m);
            for c in 0..n {
                for b in 0..n {
                    for a in 0..n {
                        for x in 0..1u64 << ring.circles(c, b) {
                            for y in 0..1u64 << ring.circles(b, a) {
                                let base = ring.contract_with_order(c, b, a, x, y, &orders[0]).unwrap();
                                for o in &orders[1..] {
                                    assert_eq!(ring.contract_with_order(c, b, a, x, y, o).unwrap(), base);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn chi_is_antiinvolution() {
        let ring = ArcRing::get(2).unwrap();
        let spec = RingSpec::standard(2);
        for a in ring.matchings() {
            let e = idempotent::<i64>(&spec, a).unwrap();
            assert_eq!(e.chi(), e);
        }
        for i in 0..ring.dim() {
            let x = ArcElement::<i64>::basis(spec.clone(), i);
            assert_eq!(x.chi().chi(), x);
            for j in 0..ring.dim() {
                let y = ArcElement::<i64>::basis(spec.clone(), j);
                assert_eq!(x.multiply(&y).unwrap().chi(), y.chi().multiply(&x.chi()).unwrap());
            }
        }
    }

    #[test]
    fn decorated_rings() {
        let s = PointSeq::new(vec![3, 4, 5, 7]).unwrap();
        let spec = RingSpec::new(s.clone()).unwrap();
        assert_eq!(spec.m, 2);
        let std = RingSpec::standard(2);
        let x = ArcElement::<i64>::basis(spec.clone(), 3);
        let y = ArcElement::<i64>::basis(std.clone(), 3);
        assert!(matches!(x.multiply(&y), Err(Error::Structural(_))));
        let ring = ArcRing::get(2).unwrap();
        for i in 0..ring.dim() {
            for j in 0..ring.dim() {
                let d = ArcElement::<i64>::basis(spec.clone(), i).multiply(&ArcElement::basis(spec.clone(), j)).unwrap();
                let p = ArcElement::<i64>::basis(std.clone(), i).multiply(&ArcElement::basis(std.clone(), j)).unwrap();
                assert_eq!(d.terms(), p.terms());
            }
        }
        let relabeled = ring.matchings()[1].relabel(s).unwrap();
        assert_eq!(relabeled.coord_arcs(), vec![(3, 7), (4, 5)]);
        assert_eq!(ring.matching_index(&relabeled), Some(1));
    }

    #[test]
    fn coefficient_types_agree() {
        let spec = RingSpec::standard(2);
        let ring = ArcRing::get(2).unwrap();
        let mut x = ArcElement::<num_bigint::BigInt>::zero(spec.clone());
        let mut y = ArcElement::<i64>::zero(spec.clone());
        for i in 0..ring.dim() {
            x.add_term(i, num_bigint::BigInt::from(i as i64 + 1));
            y.add_term(i, i as i64 + 1);
        }
        let px = x.multiply(&x).unwrap();
        let py = y.multiply(&y).unwrap();
        for (k, c) in py.terms() {
            assert_eq!(&px.terms()[k], &num_bigint::BigInt::from(*c));
        }
        assert_eq!(px.terms().len(), py.terms().len());
    }
}
