//! Bimodules `F(T)` of flat tangles over the arc rings.
//!
//! For a flat `(l, m)`-tangle `T`, `F(T) = ⊕_{b, a} F(W(b) T a){m}` with
//! `b ∈ B^l`, `a ∈ B^m`. The closure `W(b) T a` is a [`ClosedDiagram`] on
//! nodes `0..2l` (top endpoints), `2l..2l+2m` (bottom endpoints) and one
//! extra node per free circle of `T`. Its edges are, in order: the arcs of
//! `b`, the arcs of `T`, the arcs of `a`, and a loop for each free circle.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::arc_ring::{ArcElement, ArcRing, RingSpec};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{cokernel, AbelianGroup, SparseRow};
pub use crate::linalg::IntMatrix;
use crate::planar::{Endpoint, FlatTangle, Matching};
use crate::scalar::Coeff;
use crate::tqft::{evaluate_contraction, transfer_labels, ClosedDiagram, SaddleStep, SurgerySchedule, TqftCombo};

/// A flat tangle together with the rings acting on either side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BimoduleSpec {
    pub tangle: FlatTangle,
    pub left_ring: RingSpec,
    pub right_ring: RingSpec,
}

impl BimoduleSpec {
    pub fn new(tangle: FlatTangle) -> Self {
        let left_ring = RingSpec { m: tangle.top_size(), points: tangle.top().clone() };
        let right_ring = RingSpec { m: tangle.bottom_size(), points: tangle.bottom().clone() };
        Self { tangle, left_ring, right_ring }
    }
}

/// Basis element `(b, a, mask)` of `F(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BimodBasisElt {
    pub b: usize,
    pub a: usize,
    pub mask: u64,
}

/// The graded basis of `F(T)` and its two actions.
#[derive(Debug, Clone)]
pub struct Bimodule {
    spec: BimoduleSpec,
    left: Arc<ArcRing>,
    right: Arc<ArcRing>,
    circles: Vec<usize>,
    offsets: Vec<usize>,
    basis: Vec<BimodBasisElt>,
}

/// Finite integer combination of basis elements of a bimodule.
pub type BimodElement<C = i64> = BTreeMap<usize, C>;

fn add_into<C: Coeff>(v: &mut BTreeMap<usize, C>, i: usize, c: C) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(i).or_insert_with(C::zero);
    *e = e.add_ck(&c);
    if e.is_zero() {
        v.remove(&i);
    }
}

impl Bimodule {
    pub fn build(spec: BimoduleSpec) -> Result<Self> {
        let t = &spec.tangle;
        if spec.left_ring.points != *t.top() || spec.right_ring.points != *t.bottom() {
            return Err(Error::Structural("tangle boundary does not match the rings".into()));
        }
        let left = ArcRing::get(t.top_size())?;
        let right = ArcRing::get(t.bottom_size())?;
        let (nl, nr) = (left.matchings().len(), right.matchings().len());
        let mut me = Self { spec, left, right, circles: Vec::new(), offsets: Vec::new(), basis: Vec::new() };
        for b in 0..nl {
            for a in 0..nr {
                let r = me.diagram(b, a).circle_count();
                me.circles.push(r);
                me.offsets.push(me.basis.len());
                me.basis.extend((0..1u64 << r).map(|mask| BimodBasisElt { b, a, mask }));
            }
        }
        Ok(me)
    }

    pub fn from_tangle(t: FlatTangle) -> Result<Self> {
        Self::build(BimoduleSpec::new(t))
    }

    pub fn spec(&self) -> &BimoduleSpec {
        &self.spec
    }

    pub fn tangle(&self) -> &FlatTangle {
        &self.spec.tangle
    }

    pub fn left_ring(&self) -> &ArcRing {
        &self.left
    }

    pub fn right_ring(&self) -> &ArcRing {
        &self.right
    }

    pub fn basis(&self) -> &[BimodBasisElt] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn l(&self) -> usize {
        self.left.m()
    }

    fn m(&self) -> usize {
        self.right.m()
    }

    fn n_nodes(&self) -> usize {
        2 * self.l() + 2 * self.m() + self.tangle().circles()
    }

    pub fn circles(&self, b: usize, a: usize) -> usize {
        self.circles[b * self.right.matchings().len() + a]
    }

    pub fn block_range(&self, b: usize, a: usize) -> Range<usize> {
        let k = b * self.right.matchings().len() + a;
        self.offsets[k]..self.offsets[k] + (1usize << self.circles[k])
    }

    pub fn basis_index(&self, e: BimodBasisElt) -> usize {
        self.block_range(e.b, e.a).start + e.mask as usize
    }

    /// Degree `#X − #1 + m` with `m` the bottom size.
    pub fn degree(&self, i: usize) -> i64 {
        let e = self.basis[i];
        2 * e.mask.count_ones() as i64 - self.circles(e.b, e.a) as i64 + self.m() as i64
    }

    /// The closure `W(b) T a`.
    pub fn diagram(&self, b: usize, a: usize) -> ClosedDiagram {
        let (l, m) = (self.l(), self.m());
        let t = self.tangle();
        let node = |e: Endpoint| match e {
            Endpoint::Top(p) => p,
            Endpoint::Bottom(p) => 2 * l + p,
        };
        let mut edges: Vec<(usize, usize)> = self.left.matchings()[b].arcs();
        edges.extend(t.arcs().into_iter().map(|(x, y)| (node(x), node(y))));
        edges.extend(self.right.matchings()[a].arcs().into_iter().map(|(p, q)| (2 * l + p, 2 * l + q)));
        let free = 2 * l + 2 * m;
        edges.extend((0..t.circles()).map(|k| (free + k, free + k)));
        ClosedDiagram::new(self.n_nodes(), edges).expect("closure of a flat tangle")
    }

    /// `q^m (q + q^-1)^r` for the block `(b, a)`.
    pub fn graded_dim_block<C: Coeff>(&self, b: usize, a: usize) -> LaurentPoly<C> {
        LaurentPoly::q_pow(self.m() as i32) * LaurentPoly::q_plus_q_inv().pow(self.circles(b, a) as u32)
    }

    pub fn graded_dim<C: Coeff>(&self) -> LaurentPoly<C> {
        let mut total = LaurentPoly::zero();
        for i in 0..self.dim() {
            total.add_term(self.degree(i) as i32, &C::one());
        }
        total
    }

    /// `basis_h · basis_v` for `h` in the left ring.
    pub fn act_left_basis(&self, h: usize, v: usize) -> Vec<(usize, i64)> {
        let he = self.left.basis()[h];
        let ve = self.basis[v];
        if he.a != ve.b {
            return Vec::new();
        }
        let l = self.l();
        let off = 2 * l;
        let upper = self.left.block_diagram(he.b, he.a);
        let lower = self.diagram(ve.b, ve.a);
        let mut edges = upper.edges().to_vec();
        edges.extend(lower.edges().iter().map(|&(u, w)| (u + off, w + off)));
        let combined = ClosedDiagram::new(off + lower.n_nodes(), edges).expect("disjoint union");
        let steps = self.left.matchings()[ve.b]
            .arcs()
            .into_iter()
            .enumerate()
            .map(|(k, (p, q))| SaddleStep { arc: k, remove: [l + k, 2 * l + k], add: [(p, off + p), (q, off + q)] })
            .collect();
        let r_upper = self.left.circles(he.b, he.a);
        let v0 = TqftCombo::<i64>::basis(he.mask | (ve.mask << r_upper));
        let (after, out) = evaluate_contraction(&combined, &v0, &SurgerySchedule { steps }).expect("left action saddles");
        let target = self.diagram(he.b, ve.a);
        let node_map: Vec<usize> = (0..target.n_nodes()).map(|j| off + j).collect();
        let out = transfer_labels(&after, &out, &target, &node_map).expect("left action target");
        let start = self.block_range(he.b, ve.a).start;
        out.terms().iter().map(|(&mask, &c)| (start + mask as usize, c)).collect()
    }

    /// `basis_v · basis_h` for `h` in the right ring.
    pub fn act_right_basis(&self, v: usize, h: usize) -> Vec<(usize, i64)> {
        let ve = self.basis[v];
        let he = self.right.basis()[h];
        if ve.a != he.b {
            return Vec::new();
        }
        let (l, m) = (self.l(), self.m());
        let upper = self.diagram(ve.b, ve.a);
        let off = upper.n_nodes();
        let lower = self.right.block_diagram(he.b, he.a);
        let n_upper_edges = upper.edges().len();
        let mut edges = upper.edges().to_vec();
        edges.extend(lower.edges().iter().map(|&(u, w)| (u + off, w + off)));
        let combined = ClosedDiagram::new(off + 2 * m, edges).expect("disjoint union");
        let a_edge0 = l + self.tangle().arcs().len();
        let steps = self.right.matchings()[ve.a]
            .arcs()
            .into_iter()
            .enumerate()
            .map(|(k, (p, q))| SaddleStep {
                arc: k,
                remove: [a_edge0 + k, n_upper_edges + k],
                add: [(2 * l + p, off + p), (2 * l + q, off + q)],
            })
            .collect();
        let r_upper = self.circles(ve.b, ve.a);
        let v0 = TqftCombo::<i64>::basis(ve.mask | (he.mask << r_upper));
        let (after, out) = evaluate_contraction(&combined, &v0, &SurgerySchedule { steps }).expect("right action saddles");
        let target = self.diagram(ve.b, he.a);
        let node_map: Vec<usize> = (0..target.n_nodes()).collect();
        let out = transfer_labels(&after, &out, &target, &node_map).expect("right action target");
        let start = self.block_range(ve.b, he.a).start;
        out.terms().iter().map(|(&mask, &c)| (start + mask as usize, c)).collect()
    }

    pub fn act_left<C: Coeff>(&self, h: &ArcElement<C>, v: &BimodElement<C>) -> Result<BimodElement<C>> {
        if *h.spec() != self.spec.left_ring {
            return Err(Error::Structural("left ring mismatch".into()));
        }
        let mut out = BTreeMap::new();
        for (&i, x) in h.terms() {
            for (&j, y) in v {
                for (k, c) in self.act_left_basis(i, j) {
                    add_into(&mut out, k, x.mul_ck(y).mul_ck(&C::from_int(c)));
                }
            }
        }
        Ok(out)
    }

    pub fn act_right<C: Coeff>(&self, v: &BimodElement<C>, h: &ArcElement<C>) -> Result<BimodElement<C>> {
        if *h.spec() != self.spec.right_ring {
            return Err(Error::Structural("right ring mismatch".into()));
        }
        let mut out = BTreeMap::new();
        for (&j, y) in v {
            for (&i, x) in h.terms() {
                for (k, c) in self.act_right_basis(j, i) {
                    add_into(&mut out, k, y.mul_ck(x).mul_ck(&C::from_int(c)));
                }
            }
        }
        Ok(out)
    }
}

/// Graded free ranks and torsion of a tensor product, degree by degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TensorReport {
    pub degrees: BTreeMap<i64, AbelianGroup>,
}

impl TensorReport {
    pub fn graded_rank<C: Coeff>(&self) -> LaurentPoly<C> {
        let mut p = LaurentPoly::zero();
        for (&d, g) in &self.degrees {
            p.add_term(d as i32, &C::from_int(g.rank as i64));
        }
        p
    }

    pub fn is_torsion_free(&self) -> bool {
        self.degrees.values().all(AbelianGroup::is_free)
    }
}

/// `left ⊗_{over} right`, presented by generators `x ⊗ y` over compatible
/// middle matchings and relations `x·h ⊗ y − x ⊗ h·y` for every basis element
/// `h` of positive degree of the middle ring.
pub fn tensor_over(left: &Bimodule, right: &Bimodule, over: &RingSpec) -> Result<TensorReport> {
    if left.spec.right_ring != *over || right.spec.left_ring != *over {
        return Err(Error::Structural("tensor factors do not share the middle ring".into()));
    }
    let ring = left.right.clone();
    let n_mid = ring.matchings().len();
    let nl = left.left.matchings().len();
    let nr = right.right.matchings().len();

    // generators grouped by degree
    let mut gens: BTreeMap<i64, HashMap<(usize, usize), usize>> = BTreeMap::new();
    for c in 0..nl {
        for b in 0..n_mid {
            for x in left.block_range(c, b) {
                for a in 0..nr {
                    for y in right.block_range(b, a) {
                        let d = left.degree(x) + right.degree(y);
                        let g = gens.entry(d).or_default();
                        let idx = g.len();
                        g.insert((x, y), idx);
                    }
                }
            }
        }
    }

    // relation rows, keyed by degree
    let mut rels: BTreeMap<i64, Vec<Vec<(usize, usize, i64)>>> = BTreeMap::new();
    let mut right_cache: HashMap<(usize, usize), Vec<(usize, i64)>> = HashMap::new();
    for x in 0..left.dim() {
        let bp = left.basis[x].a;
        for b in 0..n_mid {
            for h in ring.block_range(bp, b) {
                if ring.degree(h) == 0 {
                    continue;
                }
                let xh = left.act_right_basis(x, h);
                for a in 0..nr {
                    for y in right.block_range(b, a) {
                        let hy = right_cache.entry((h, y)).or_insert_with(|| right.act_left_basis(h, y)).clone();
                        let mut row: Vec<(usize, usize, i64)> = xh.iter().map(|&(k, c)| (k, y, c)).collect();
                        row.extend(hy.iter().map(|&(k, c)| (x, k, -c)));
                        if row.is_empty() {
                            continue;
                        }
                        let d = left.degree(x) + ring.degree(h) + right.degree(y);
                        rels.entry(d).or_default().push(row);
                    }
                }
            }
        }
    }

    let degrees: BTreeMap<i64, AbelianGroup> = gens
        .par_iter()
        .map(|(&d, g)| {
            let rows = rels.get(&d).map(Vec::as_slice).unwrap_or(&[]);
            let sparse = rows.iter().map(|row| {
                let mut r = SparseRow::new();
                for &(x, y, c) in row {
                    let e = r.entry(g[&(x, y)]).or_insert(0);
                    *e += c;
                }
                r.retain(|_, c| *c != 0);
                r
            });
            (d, cokernel(g.len(), sparse))
        })
        .collect();
    Ok(TensorReport { degrees })
}

/// A multiset of grading shifts `{s}`, stored as shift → multiplicity.
pub type ShiftMultiset = BTreeMap<i64, usize>;

/// Shifts of `A^{⊗c}`: every sum of `c` signs.
pub fn circle_shifts(c: usize) -> ShiftMultiset {
    let mut out = ShiftMultiset::new();
    for k in 0..=c {
        // k circles contribute −1, the rest +1
        let s = c as i64 - 2 * k as i64;
        *out.entry(s).or_default() += binomial(c, k);
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Removes the closed circles of a tangle; `F(T) ≅ F(T') ⊗ A^{⊗c}`.
pub fn deloop(spec: &BimoduleSpec) -> (BimoduleSpec, ShiftMultiset) {
    let (t, c) = spec.tangle.strip_circles();
    (BimoduleSpec { tangle: t, ..spec.clone() }, circle_shifts(c))
}

/// `F(T) ⊗ Q_a ≅ ⊕ Q_b{s}`: the summands as (matching, shift) with
/// multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectiveDecomposition {
    pub summands: Vec<(Matching, i64, usize)>,
}

impl ProjectiveDecomposition {
    /// `Σ mult · q^shift` for the single target matching.
    pub fn shift_polynomial<C: Coeff>(&self) -> LaurentPoly<C> {
        let mut p = LaurentPoly::zero();
        for (_, s, k) in &self.summands {
            p.add_term(*s as i32, &C::from_int(*k as i64));
        }
        p
    }
}

pub fn decompose_on_projective(spec: &BimoduleSpec, a: &Matching) -> Result<ProjectiveDecomposition> {
    if a.points() != spec.tangle.bottom() {
        return Err(Error::Structural(format!("{a:?} does not sit under the tangle")));
    }
    let composite = FlatTangle::compose(&spec.tangle, &a.as_tangle_below())?;
    let (clean, c) = composite.strip_circles();
    let b = clean.top_matching()?;
    let summands = circle_shifts(c).into_iter().rev().map(|(s, k)| (b.clone(), s, k)).collect();
    Ok(ProjectiveDecomposition { summands })
}

/// `Q_a` as the bimodule of the `(m, 0)`-tangle `a`.
pub fn projective_module(a: &Matching) -> Result<Bimodule> {
    Bimodule::from_tangle(a.as_tangle_below())
}
