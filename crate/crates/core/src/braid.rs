//! The braid complexes `Σ_i`.
//!
//! On a weight with `(λ_i, λ_{i+1}) = (1, 1)`, `Σ_i` is the two-term complex
//! `F_i E_i {1} → Id` with `Id` in cohomological degree 0 and a single saddle
//! as differential. On every other weight it is the relabeling `Y_λ [x]{x}`
//! with `x = max(0, λ_i − λ_{i+1})`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bimodule::Bimodule;
use crate::error::{Error, Result};
use crate::k0::{is_laurent_unit, laurent_det, sigma_k0, transpose_weight, K0Action, K0Operator, K0Vector};
use crate::laurent::LaurentPoly;
use crate::planar::{Endpoint, FlatTangle, Matching};
use crate::scalar::Coeff;
use crate::slnaction::{functor_bimodule, FunctorAction, FunctorTag, Weight};
use crate::tqft::{evaluate_contraction, transfer_labels, SaddleStep, SurgerySchedule, TqftCombo};

/// Integer matrix stored by columns: `cols[v]` is the image of basis element `v`.
pub type SparseMap = Vec<Vec<(usize, i64)>>;

/// One term `F(T){shift}` in cohomological degree `degree`, realizing the
/// functor `word`.
#[derive(Debug, Clone)]
pub struct ComplexTerm {
    pub degree: i64,
    pub shift: i64,
    pub word: Vec<FunctorTag>,
    pub bimodule: Bimodule,
}

/// A bounded complex of bimodules; `differentials[t]` maps term `t` to
/// term `t + 1`.
#[derive(Debug, Clone)]
pub struct BimoduleComplex {
    pub terms: Vec<ComplexTerm>,
    pub differentials: Vec<SparseMap>,
}

impl BimoduleComplex {
    /// A complex with one term in degree 0.
    pub fn single(bimodule: Bimodule) -> Self {
        Self { terms: vec![ComplexTerm { degree: 0, shift: 0, word: Vec::new(), bimodule }], differentials: Vec::new() }
    }
}

/// `Σ_i = Y_λ [x]{x}` on a weight that is not `(1, 1)` at `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftFunctorDesc {
    pub i: usize,
    pub lambda: Weight,
    pub target: Weight,
    pub x: i64,
}

impl ShiftFunctorDesc {
    /// `Q_{λ,a} ↦ Q_{π_i λ, a'}` with `a'` the same matching on the new points.
    pub fn relabel(&self, a: &Matching) -> Result<Matching> {
        a.relabel(self.target.s())
    }
}

#[derive(Debug, Clone)]
pub enum SigmaComplex {
    Complex(BimoduleComplex),
    Shift(ShiftFunctorDesc),
}

fn tangle_of(tag: FunctorTag, lambda: &Weight) -> Result<(Weight, FlatTangle)> {
    match functor_bimodule(tag, lambda)? {
        FunctorAction::Tangle { target, tangle } => Ok((target, tangle)),
        other => Err(Error::Structural(format!("{tag} on {lambda} is {other:?}, not a tangle"))),
    }
}

fn arc_index(t: &FlatTangle, x: Endpoint, y: Endpoint) -> Result<usize> {
    t.arcs()
        .iter()
        .position(|&(u, w)| (u, w) == (x, y) || (u, w) == (y, x))
        .ok_or_else(|| Error::Structural(format!("no arc {x:?}-{y:?}")))
}

/// The complex or shift descriptor of `Σ_i` on the weight `λ`.
pub fn sigma_complex(i: usize, lambda: &Weight) -> Result<SigmaComplex> {
    if i == 0 || i >= lambda.n() {
        return Err(Error::Weight(format!("index {i} outside 1..{}", lambda.n())));
    }
    let (a, b) = lambda.pair(i);
    if (a, b) != (1, 1) {
        let x = (a as i64 - b as i64).max(0);
        return Ok(SigmaComplex::Shift(ShiftFunctorDesc { i, lambda: lambda.clone(), target: transpose_weight(lambda, i), x }));
    }
    let s = lambda.s();
    let (mid, cap) = tangle_of(FunctorTag::E(i), lambda)?;
    let (_, cup) = tangle_of(FunctorTag::F(i), &mid)?;
    let t = FlatTangle::compose(&cup, &cap)?;
    let upper = Bimodule::from_tangle(t.clone())?;
    let lower = Bimodule::from_tangle(FlatTangle::identity(&s))?;
    let p = s.position(i as i64).expect("i lies in s(λ)");
    let l = upper.left_ring().m();
    let cap_e = l + arc_index(&t, Endpoint::Bottom(p), Endpoint::Bottom(p + 1))?;
    let cup_e = l + arc_index(&t, Endpoint::Top(p), Endpoint::Top(p + 1))?;
    let schedule = SurgerySchedule {
        steps: vec![SaddleStep { arc: 0, remove: [cap_e, cup_e], add: [(p, 2 * l + p), (p + 1, 2 * l + p + 1)] }],
    };
    let d = upper
        .basis()
        .iter()
        .map(|e| {
            let (after, out) = evaluate_contraction(&upper.diagram(e.b, e.a), &TqftCombo::<i64>::basis(e.mask), &schedule)?;
            let target = lower.diagram(e.b, e.a);
            let node_map: Vec<usize> = (0..target.n_nodes()).collect();
            let out = transfer_labels(&after, &out, &target, &node_map)?;
            let start = lower.block_range(e.b, e.a).start;
            Ok(out.terms().iter().map(|(&mask, &c)| (start + mask as usize, c)).collect())
        })
        .collect::<Result<SparseMap>>()?;
    Ok(SigmaComplex::Complex(BimoduleComplex {
        terms: vec![
            ComplexTerm { degree: -1, shift: 1, word: vec![FunctorTag::F(i), FunctorTag::E(i)], bimodule: upper },
            ComplexTerm { degree: 0, shift: 0, word: Vec::new(), bimodule: lower },
        ],
        differentials: vec![d],
    }))
}

fn apply_map(d: &SparseMap, v: &BTreeMap<usize, i64>) -> BTreeMap<usize, i64> {
    let mut out = BTreeMap::new();
    for (&j, &c) in v {
        for &(i, x) in &d[j] {
            *out.entry(i).or_insert(0) += c * x;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn from_pairs(v: Vec<(usize, i64)>) -> BTreeMap<usize, i64> {
    apply_map(&vec![v], &BTreeMap::from([(0, 1)]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexReport {
    pub terms: usize,
    pub maps_checked: usize,
    pub failures: Vec<String>,
}

impl ComplexReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `d ∘ d = 0`, degree preservation with the term shifts, and commutation of
/// every differential with both ring actions on all basis elements.
pub fn check_complex(c: &BimoduleComplex) -> ComplexReport {
    let mut rep = ComplexReport { terms: c.terms.len(), maps_checked: c.differentials.len(), failures: Vec::new() };
    for (t, pair) in c.differentials.windows(2).enumerate() {
        for v in 0..pair[0].len() {
            let dd = apply_map(&pair[1], &from_pairs(pair[0][v].clone()));
            if !dd.is_empty() {
                rep.failures.push(format!("d∘d nonzero on term {t} element {v}"));
            }
        }
    }
    for (t, d) in c.differentials.iter().enumerate() {
        let (src, dst) = (&c.terms[t], &c.terms[t + 1]);
        let (x, y) = (&src.bimodule, &dst.bimodule);
        for (v, col) in d.iter().enumerate() {
            for &(w, _) in col {
                if x.degree(v) + src.shift != y.degree(w) + dst.shift {
                    rep.failures.push(format!("d on term {t} changes degree at {v} -> {w}"));
                }
            }
        }
        for h in 0..x.left_ring().dim() {
            for v in 0..x.dim() {
                let lhs = apply_map(d, &from_pairs(x.act_left_basis(h, v)));
                let dv = from_pairs(d[v].clone());
                let mut rhs = BTreeMap::new();
                for (&w, &cw) in &dv {
                    for (u, cu) in y.act_left_basis(h, w) {
                        *rhs.entry(u).or_insert(0) += cw * cu;
                    }
                }
                rhs.retain(|_, c: &mut i64| *c != 0);
                if lhs != rhs {
                    rep.failures.push(format!("d on term {t} is not left linear at h={h}, v={v}"));
                }
            }
        }
        for h in 0..x.right_ring().dim() {
            for v in 0..x.dim() {
                let lhs = apply_map(d, &from_pairs(x.act_right_basis(v, h)));
                let dv = from_pairs(d[v].clone());
                let mut rhs = BTreeMap::new();
                for (&w, &cw) in &dv {
                    for (u, cu) in y.act_right_basis(w, h) {
                        *rhs.entry(u).or_insert(0) += cw * cu;
                    }
                }
                rhs.retain(|_, c: &mut i64| *c != 0);
                if lhs != rhs {
                    rep.failures.push(format!("d on term {t} is not right linear at v={v}, h={h}"));
                }
            }
        }
    }
    rep
}

/// For the `(1, 1)` complex at index `i`: the differential is nonzero and
/// every idempotent `1_a` with `a` joining the two points at `i, i + 1` is
/// the image of a basis element.
pub fn identity_in_image(c: &BimoduleComplex, lambda: &Weight, i: usize) -> Result<bool> {
    let [_, last] = &c.terms[..] else {
        return Err(Error::Structural("expected a two-term complex".into()));
    };
    let d = &c.differentials[0];
    if d.iter().all(Vec::is_empty) {
        return Ok(false);
    }
    let s = lambda.s();
    let p = s.position(i as i64).expect("i lies in s(λ)");
    let ring = last.bimodule.left_ring();
    for (ai, a) in ring.matchings().iter().enumerate() {
        if a.partner()[p] != p + 1 {
            continue;
        }
        let one = last.bimodule.block_range(ai, ai).start;
        if !d.iter().any(|col| col.as_slice() == [(one, 1)] || col.as_slice() == [(one, -1)]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The Euler characteristic of `Σ_i` on all of `K_0`: the `(1, 1)` weights
/// contribute `[Id] − q[F_i E_i]`, the others `(−1)^x q^x` times the
/// relabeling.
pub fn euler_characteristic<C: Coeff>(act: &K0Action<C>, i: usize) -> Result<K0Operator<C>> {
    let b = act.basis.clone();
    let mut cache: BTreeMap<Weight, SigmaComplex> = BTreeMap::new();
    let mut cols = Vec::with_capacity(b.dim());
    for j in 0..b.dim() {
        let (lambda, a) = &b.elts()[j];
        if !cache.contains_key(lambda) {
            cache.insert(lambda.clone(), sigma_complex(i, lambda)?);
        }
        let unit: K0Vector<C> = BTreeMap::from([(j, LaurentPoly::one())]);
        let col = match &cache[lambda] {
            SigmaComplex::Shift(desc) => {
                let target = b.index_of(&desc.target, &desc.relabel(a)?).expect("relabeled projective in basis");
                let sign = if desc.x % 2 == 0 { C::one() } else { -C::one() };
                BTreeMap::from([(target, LaurentPoly::monomial(desc.x as i32, sign))])
            }
            SigmaComplex::Complex(c) => {
                let mut out: K0Vector<C> = BTreeMap::new();
                for term in &c.terms {
                    let sign = if term.degree % 2 == 0 { C::one() } else { -C::one() };
                    let coef = LaurentPoly::monomial(term.shift as i32, sign);
                    for (r, p) in act.word(&term.word)?.apply(&unit) {
                        let e = out.entry(r).or_insert_with(LaurentPoly::zero);
                        *e += &(&p * &coef);
                        if e.is_zero() {
                            out.remove(&r);
                        }
                    }
                }
                out
            }
        };
        cols.push(col);
    }
    Ok(K0Operator::from_columns(format!("χ(Σ{i})"), b, cols))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub n: usize,
    pub k: usize,
    /// Agreement of `χ(Σ_i)` with `σ_i`, keyed by `"i:λ"`.
    pub weights: BTreeMap<String, bool>,
    pub failures: Vec<String>,
}

impl EulerReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares `χ(Σ_i)` with `σ_i` column block by column block.
pub fn euler_check<C: Coeff>(act: &K0Action<C>) -> Result<EulerReport> {
    let b = &act.basis;
    let mut rep = EulerReport { n: b.n(), k: b.k(), weights: BTreeMap::new(), failures: Vec::new() };
    for i in 1..act.n() {
        let chi = euler_characteristic(act, i)?;
        let sigma = sigma_k0(act, i)?;
        for (w, lambda) in b.weights().iter().enumerate() {
            let ok = b.block(w).all(|j| chi.column(j) == sigma.column(j));
            rep.weights.insert(format!("{i}:{lambda}"), ok);
            if !ok {
                rep.failures.push(format!("χ(Σ{i}) != σ{i} on {lambda}"));
            }
        }
    }
    Ok(rep)
}

/// `χ(Σ_i)` on `π_i λ` after `χ(Σ_i)` on `λ` has a unit determinant on every
/// weight block.
pub fn invertibility_check<C: Coeff>(act: &K0Action<C>) -> Result<Vec<String>> {
    let b = &act.basis;
    let mut failures = Vec::new();
    for i in 1..act.n() {
        let chi = euler_characteristic(act, i)?;
        let sq = chi.compose(&chi);
        for (w, lambda) in b.weights().iter().enumerate() {
            let det = laurent_det(sq.block(w, w));
            if !is_laurent_unit(&det) {
                failures.push(format!("χ(Σ{i})² on {lambda} has determinant {det}"));
            }
        }
    }
    Ok(failures)
}

/// The differential of a two-term complex as a dense integer matrix,
/// rows indexed by the target basis.
pub fn differential_matrix(c: &BimoduleComplex, t: usize) -> Vec<Vec<i64>> {
    let d = &c.differentials[t];
    let rows = c.terms[t + 1].bimodule.dim();
    let mut m = vec![vec![0i64; d.len()]; rows];
    for (v, col) in d.iter().enumerate() {
        for &(w, x) in col {
            m[w][v] += x;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wt(s: &str) -> Weight {
        s.parse().unwrap()
    }

    fn complex(i: usize, l: &str) -> BimoduleComplex {
        match sigma_complex(i, &wt(l)).unwrap() {
            SigmaComplex::Complex(c) => c,
            SigmaComplex::Shift(d) => panic!("expected a complex, got {d:?}"),
        }
    }

    #[test]
    fn shift_descriptors() {
        let SigmaComplex::Shift(d) = sigma_complex(1, &wt("20")).unwrap() else { panic!() };
        assert_eq!((d.x, d.target.clone()), (2, wt("02")));
        let SigmaComplex::Shift(d) = sigma_complex(1, &wt("02")).unwrap() else { panic!() };
        assert_eq!(d.x, 0);
        let SigmaComplex::Shift(d) = sigma_complex(3, &wt("2110")).unwrap() else { panic!() };
        assert_eq!((d.x, d.target.clone()), (1, wt("2101")));
        assert!(matches!(sigma_complex(2, &wt("2110")).unwrap(), SigmaComplex::Complex(_)));
        assert!(sigma_complex(4, &wt("2110")).is_err());
    }

    #[test]
    fn m1_differential() {
        let c = complex(1, "11");
        assert_eq!(c.terms[0].bimodule.dim(), 4);
        assert_eq!(c.terms[1].bimodule.dim(), 2);
        // two circles merge into one: 1⊗1→1, 1⊗X→X, X⊗1→X, X⊗X→0
        let d = differential_matrix(&c, 0);
        let (x, y) = (&c.terms[0].bimodule, &c.terms[1].bimodule);
        let mut want = vec![vec![0i64; 4]; 2];
        for v in 0..4 {
            let pop = x.basis()[v].mask.count_ones();
            if pop < 2 {
                let w = (0..2).find(|&w| y.basis()[w].mask.count_ones() == pop).unwrap();
                want[w][v] = 1;
            }
        }
        assert_eq!(d, want);
    }

    #[test]
    fn complexes_are_bimodule_maps() {
        for (i, l) in [(1, "11"), (1, "1111"), (2, "1111"), (3, "1111"), (2, "2110"), (2, "0112")] {
            let c = complex(i, l);
            let r = check_complex(&c);
            assert!(r.passed(), "{i} {l}: {:?}", &r.failures[..r.failures.len().min(4)]);
            assert!(identity_in_image(&c, &wt(l), i).unwrap(), "{i} {l}");
        }
    }

    #[test]
    fn identity_complex_is_valid() {
        let s = wt("1111").s();
        let c = BimoduleComplex::single(Bimodule::from_tangle(FlatTangle::identity(&s)).unwrap());
        assert!(check_complex(&c).passed());
    }

    #[test]
    fn euler_matches_sigma_small() {
        for (n, k) in [(2, 1), (3, 1), (4, 2)] {
            let act = K0Action::<i64>::new(n, k).unwrap();
            let r = euler_check(&act).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(invertibility_check(&act).unwrap().is_empty());
        }
    }
}
