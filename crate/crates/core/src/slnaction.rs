//! Weights of `V(2ω_k)` and the functors `E_i, F_i, K_i` on balanced
//! projectives.
//!
//! Functors act on finite direct sums of shifted balanced projectives
//! `Q_{λ,a}{s}` ([`ProjectiveOrbit`]): each summand is pushed through the
//! flat tangle of the case table, closed circles are removed and recorded as
//! grading shifts. Words of functors are written left to right and applied
//! right to left, as compositions are.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bimodule::circle_shifts;
use crate::error::{Error, Result};
use crate::planar::{matchings_on, ElementaryKind, FlatTangle, Matching, PointSeq};

/// An admissible weight `λ ∈ {0,1,2}^n` with an even number of 1s.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Weight(Vec<u8>);

impl Weight {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Weight("empty weight".into()));
        }
        if let Some(x) = entries.iter().find(|&&x| x > 2) {
            return Err(Error::Weight(format!("entry {x} outside 0..=2 in {entries:?}")));
        }
        let ones = entries.iter().filter(|&&x| x == 1).count();
        if ones % 2 == 1 {
            return Err(Error::Weight(format!("{entries:?} has an odd number of 1s")));
        }
        Ok(Self(entries))
    }

    /// `2ω_k = (2^k 0^{n−k})`.
    pub fn highest(n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        Self::new((0..n).map(|i| if i < k { 2 } else { 0 }).collect())
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn k(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum::<usize>() / 2
    }

    /// Half the number of 1s.
    pub fn m(&self) -> usize {
        self.0.iter().filter(|&&x| x == 1).count() / 2
    }

    /// Coordinates (1-based) of the 1s.
    pub fn s(&self) -> PointSeq {
        PointSeq::new(self.0.iter().enumerate().filter(|(_, &x)| x == 1).map(|(i, _)| i as i64 + 1).collect()).unwrap()
    }

    /// `(λ_i, λ_{i+1})` for 1-based `i`.
    pub fn pair(&self, i: usize) -> (u8, u8) {
        (self.0[i - 1], self.0[i])
    }

    fn shifted(&self, i: usize, up: bool, times: u8) -> Option<Self> {
        if i == 0 || i >= self.n() {
            return None;
        }
        let (a, b) = self.pair(i);
        let (na, nb) = if up { (a + times, b.checked_sub(times)?) } else { (a.checked_sub(times)?, b + times) };
        if na > 2 || nb > 2 {
            return None;
        }
        let mut v = self.0.clone();
        v[i - 1] = na;
        v[i] = nb;
        Self::new(v).ok()
    }

    /// `λ + ε_i`, if admissible.
    pub fn plus_eps(&self, i: usize) -> Option<Self> {
        self.shifted(i, true, 1)
    }

    /// `λ − ε_i`, if admissible.
    pub fn minus_eps(&self, i: usize) -> Option<Self> {
        self.shifted(i, false, 1)
    }

    /// `λ_i − λ_{i+1}`, the `K_i` eigenvalue exponent.
    pub fn k_exponent(&self, i: usize) -> i64 {
        let (a, b) = self.pair(i);
        a as i64 - b as i64
    }
}

impl TryFrom<Vec<u8>> for Weight {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Weight> for Vec<u8> {
    fn from(w: Weight) -> Vec<u8> {
        w.0
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Accepts `021111`, `0,2,1,1,1,1` or `(0,2,1,1,1,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = if t.contains(',') { t.split(',').map(str::trim).collect() } else { t.split("").filter(|x| !x.is_empty()).collect() };
        let entries = parts
            .iter()
            .map(|p| p.parse::<u8>().map_err(|_| Error::Parse(format!("bad weight entry {p:?} in {s:?}"))))
            .collect::<Result<Vec<u8>>>()?;
        Self::new(entries)
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::Weight(format!("need 1 <= k <= n-1, got n={n}, k={k}")));
    }
    Ok(())
}

/// All admissible weights with `Σλ = 2k`, in decreasing lexicographic
/// order (so `2ω_k` comes first).
pub fn admissible_weights(n: usize, k: usize) -> Result<Vec<Weight>> {
    check_nk(n, k)?;
    fn rec(n: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Weight>) {
        if cur.len() == n {
            if left == 0 {
                if let Ok(w) = Weight::new(cur.clone()) {
                    out.push(w);
                }
            }
            return;
        }
        for x in (0..=2u8).rev() {
            if (x as usize) <= left && left - x as usize <= 2 * (n - cur.len() - 1) {
                cur.push(x);
                rec(n, left - x as usize, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, 2 * k, &mut Vec::new(), &mut out);
    Ok(out)
}

/// A functor of the categorified action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctorTag {
    E(usize),
    F(usize),
    K(usize),
    Kinv(usize),
    E2(usize),
    F2(usize),
    Shift(i64),
    Id,
}

impl fmt::Display for FunctorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorTag::E(i) => write!(f, "E{i}"),
            FunctorTag::F(i) => write!(f, "F{i}"),
            FunctorTag::K(i) => write!(f, "K{i}"),
            FunctorTag::Kinv(i) => write!(f, "K{i}^-1"),
            FunctorTag::E2(i) => write!(f, "E{i}^(2)"),
            FunctorTag::F2(i) => write!(f, "F{i}^(2)"),
            FunctorTag::Shift(j) => write!(f, "{{{j}}}"),
            FunctorTag::Id => write!(f, "Id"),
        }
    }
}

impl FromStr for FunctorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad functor {s:?}"));
        if s == "Id" {
            return Ok(FunctorTag::Id);
        }
        if let Some(j) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            return j.parse().map(FunctorTag::Shift).map_err(|_| bad());
        }
        let (head, rest) = s.split_at(1);
        let (num, suffix) = rest.split_at(rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len()));
        let i: usize = num.parse().map_err(|_| bad())?;
        match (head, suffix) {
            ("E", "") => Ok(FunctorTag::E(i)),
            ("F", "") => Ok(FunctorTag::F(i)),
            ("K", "") => Ok(FunctorTag::K(i)),
            ("K", "^-1") => Ok(FunctorTag::Kinv(i)),
            ("E", "^(2)" | "(2)") => Ok(FunctorTag::E2(i)),
            ("F", "^(2)" | "(2)") => Ok(FunctorTag::F2(i)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for FunctorTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FunctorTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// What a functor does on one weight space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorAction {
    Zero,
    /// Tensoring with `F(tangle)`, landing in `target`.
    Tangle { target: Weight, tangle: FlatTangle },
    /// The canonical ring isomorphism `H_λ ≅ H_target`.
    RingIso { target: Weight },
    /// Grading shift, weight unchanged.
    Shift(i64),
}

/// The case table: which bimodule realizes `tag` on `C(λ)`.
pub fn functor_bimodule(tag: FunctorTag, lambda: &Weight) -> Result<FunctorAction> {
    let check = |i: usize| -> Result<()> {
        if i == 0 || i >= lambda.n() {
            Err(Error::Weight(format!("index {i} outside 1..{}", lambda.n())))
        } else {
            Ok(())
        }
    };
    let s = lambda.s();
    let tangle = |kind: ElementaryKind, target: Weight| -> Result<FunctorAction> {
        let t = FlatTangle::elementary(kind, &s)?;
        debug_assert_eq!(*t.top(), target.s());
        Ok(FunctorAction::Tangle { target, tangle: t })
    };
    match tag {
        FunctorTag::Id => Ok(FunctorAction::Shift(0)),
        FunctorTag::Shift(j) => Ok(FunctorAction::Shift(j)),
        FunctorTag::K(i) => {
            check(i)?;
            Ok(FunctorAction::Shift(lambda.k_exponent(i)))
        }
        FunctorTag::Kinv(i) => {
            check(i)?;
            Ok(FunctorAction::Shift(-lambda.k_exponent(i)))
        }
        FunctorTag::E(i) => {
            check(i)?;
            let Some(target) = lambda.plus_eps(i) else { return Ok(FunctorAction::Zero) };
            let ii = i as i64;
            match lambda.pair(i) {
                (1, 2) => tangle(ElementaryKind::IdShiftUp(ii), target),
                (0, 1) => tangle(ElementaryKind::IdShiftDown(ii), target),
                (0, 2) => tangle(ElementaryKind::Cup(ii), target),
                (1, 1) => tangle(ElementaryKind::Cap(ii), target),
                p => unreachable!("λ+ε_i admissible for pair {p:?}"),
            }
        }
        FunctorTag::F(i) => {
            check(i)?;
            let Some(target) = lambda.minus_eps(i) else { return Ok(FunctorAction::Zero) };
            let ii = i as i64;
            match lambda.pair(i) {
                (1, 0) => tangle(ElementaryKind::IdShiftUp(ii), target),
                (2, 1) => tangle(ElementaryKind::IdShiftDown(ii), target),
                (2, 0) => tangle(ElementaryKind::Cup(ii), target),
                (1, 1) => tangle(ElementaryKind::Cap(ii), target),
                p => unreachable!("λ−ε_i admissible for pair {p:?}"),
            }
        }
        FunctorTag::E2(i) => {
            check(i)?;
            match lambda.pair(i) {
                (0, 2) => Ok(FunctorAction::RingIso { target: lambda.shifted(i, true, 2).unwrap() }),
                _ => Ok(FunctorAction::Zero),
            }
        }
        FunctorTag::F2(i) => {
            check(i)?;
            match lambda.pair(i) {
                (2, 0) => Ok(FunctorAction::RingIso { target: lambda.shifted(i, false, 2).unwrap() }),
                _ => Ok(FunctorAction::Zero),
            }
        }
    }
}

/// A balanced projective `Q_{λ,a}{shift}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectiveId {
    pub lambda: Weight,
    pub a: Matching,
    pub shift: i64,
}

/// A finite direct sum of shifted balanced projectives.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ProjectiveOrbit {
    terms: BTreeMap<ProjectiveId, usize>,
}

impl ProjectiveOrbit {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single summand `Q_{λ,a}{shift}`.
    pub fn single(lambda: Weight, a: Matching, shift: i64) -> Result<Self> {
        if *a.points() != lambda.s() {
            return Err(Error::Weight(format!("{a:?} is not a matching of s{lambda} = {:?}", lambda.s())));
        }
        let mut o = Self::zero();
        o.add(ProjectiveId { lambda, a, shift }, 1);
        Ok(o)
    }

    /// `Q_{2ω_k}` for `V(2ω_k)` with `n` entries.
    pub fn highest(n: usize, k: usize) -> Result<Self> {
        Self::single(Weight::highest(n, k)?, Matching::empty(), 0)
    }

    pub fn add(&mut self, p: ProjectiveId, mult: usize) {
        if mult > 0 {
            *self.terms.entry(p).or_default() += mult;
        }
    }

    pub fn terms(&self) -> &BTreeMap<ProjectiveId, usize> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total number of indecomposable summands.
    pub fn len(&self) -> usize {
        self.terms.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn shifted(&self, s: i64) -> Self {
        let mut out = Self::zero();
        for (p, &k) in &self.terms {
            out.add(ProjectiveId { shift: p.shift + s, ..p.clone() }, k);
        }
        out
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, &k) in &other.terms {
            out.add(p.clone(), k);
        }
        out
    }

    /// The summand of an orbit that is one indecomposable, shifted or not.
    pub fn as_single(&self) -> Option<&ProjectiveId> {
        match (self.terms.len(), self.terms.iter().next()) {
            (1, Some((p, 1))) => Some(p),
            _ => None,
        }
    }
}

impl Serialize for ProjectiveOrbit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            lambda: &'a Weight,
            matching: &'a Matching,
            shift: i64,
            multiplicity: usize,
        }
        let v: Vec<Term> = self
            .terms
            .iter()
            .map(|(p, &k)| Term { lambda: &p.lambda, matching: &p.a, shift: p.shift, multiplicity: k })
            .collect();
        v.serialize(s)
    }
}

/// Applies one functor to a direct sum of balanced projectives.
pub fn apply_functor(tag: FunctorTag, orbit: &ProjectiveOrbit) -> Result<ProjectiveOrbit> {
    let mut out = ProjectiveOrbit::zero();
    for (p, &mult) in &orbit.terms {
        match functor_bimodule(tag, &p.lambda)? {
            FunctorAction::Zero => {}
            FunctorAction::Shift(j) => out.add(ProjectiveId { shift: p.shift + j, ..p.clone() }, mult),
            FunctorAction::RingIso { target } => {
                let a = p.a.relabel(target.s())?;
                out.add(ProjectiveId { lambda: target, a, shift: p.shift }, mult);
            }
            FunctorAction::Tangle { target, tangle } => {
                let composite = FlatTangle::compose(&tangle, &p.a.as_tangle_below())?;
                let (clean, c) = composite.strip_circles();
                let b = clean.top_matching()?;
                for (s, k) in circle_shifts(c) {
                    out.add(ProjectiveId { lambda: target.clone(), a: b.clone(), shift: p.shift + s }, mult * k);
                }
            }
        }
    }
    Ok(out)
}

/// Applies a word, written left to right, to an orbit: the rightmost letter
/// acts first.
pub fn apply_word(word: &[FunctorTag], orbit: &ProjectiveOrbit) -> Result<ProjectiveOrbit> {
    word.iter().rev().try_fold(orbit.clone(), |acc, &t| apply_functor(t, &acc))
}

/// `c_{i,j}`: 2 on the diagonal, −1 for neighbours, 0 otherwise.
pub fn cartan(i: usize, j: usize) -> i64 {
    match i.abs_diff(j) {
        0 => 2,
        1 => -1,
        _ => 0,
    }
}

/// One side of a functor isomorphism: a direct sum of shifted words.
pub type Side = Vec<(Vec<FunctorTag>, i64)>;

/// Identifiers of the checked isomorphisms.
pub const RELATIONS: &[&str] = &[
    "kk-inverse",
    "kk-commute",
    "ke",
    "kf",
    "ef-commute",
    "ee-far",
    "ff-far",
    "serre-e",
    "serre-f",
    "ef-cartan",
    "e-square",
    "f-square",
    "red-one",
    "red-two",
];

/// The two sides of relation `id` at indices `(i, j)` on `C(λ)`, or `None`
/// when the relation does not apply to this index pair.
pub fn relation_sides(id: &str, i: usize, j: usize, lambda: &Weight) -> Result<Option<(Side, Side)>> {
    use FunctorTag::*;
    let w = |v: &[FunctorTag]| v.to_vec();
    let near = i.abs_diff(j) == 1;
    let far = i.abs_diff(j) > 1;
    let sides = match id {
        "kk-inverse" if i == j => Some((vec![(w(&[K(i), Kinv(i)]), 0), (w(&[Kinv(i), K(i)]), 0)], vec![(w(&[Id]), 0), (w(&[Id]), 0)])),
        "kk-commute" => Some((vec![(w(&[K(i), K(j)]), 0)], vec![(w(&[K(j), K(i)]), 0)])),
        "ke" => Some((vec![(w(&[K(i), E(j)]), 0)], vec![(w(&[E(j), K(i)]), cartan(i, j))])),
        "kf" => Some((vec![(w(&[K(i), F(j)]), 0)], vec![(w(&[F(j), K(i)]), -cartan(i, j))])),
        "ef-commute" if i != j => Some((vec![(w(&[E(i), F(j)]), 0)], vec![(w(&[F(j), E(i)]), 0)])),
        "ee-far" if far => Some((vec![(w(&[E(i), E(j)]), 0)], vec![(w(&[E(j), E(i)]), 0)])),
        "ff-far" if far => Some((vec![(w(&[F(i), F(j)]), 0)], vec![(w(&[F(j), F(i)]), 0)])),
        "serre-e" if near => Some((
            vec![(w(&[E(i), E(i), E(j)]), 0), (w(&[E(j), E(i), E(i)]), 0)],
            vec![(w(&[E(i), E(j), E(i)]), 1), (w(&[E(i), E(j), E(i)]), -1)],
        )),
        "serre-f" if near => Some((
            vec![(w(&[F(i), F(i), F(j)]), 0), (w(&[F(j), F(i), F(i)]), 0)],
            vec![(w(&[F(i), F(j), F(i)]), 1), (w(&[F(i), F(j), F(i)]), -1)],
        )),
        "ef-cartan" if i == j => {
            let ef = (w(&[E(i), F(i)]), 0);
            let fe = (w(&[F(i), E(i)]), 0);
            match (lambda.pair(i), lambda.k_exponent(i)) {
                ((2, 0), _) => Some((vec![ef], vec![fe, (w(&[Id]), 1), (w(&[Id]), -1)])),
                (_, 1) => Some((vec![ef], vec![fe, (w(&[Id]), 0)])),
                (_, 0) => Some((vec![ef], vec![fe])),
                (_, -1) => Some((vec![ef, (w(&[Id]), 0)], vec![fe])),
                ((0, 2), _) => Some((vec![ef, (w(&[Id]), 1), (w(&[Id]), -1)], vec![fe])),
                _ => None,
            }
        }
        "e-square" if i == j => Some((vec![(w(&[E(i), E(i)]), 0)], vec![(w(&[E2(i)]), 1), (w(&[E2(i)]), -1)])),
        "f-square" if i == j => Some((vec![(w(&[F(i), F(i)]), 0)], vec![(w(&[F2(i)]), 1), (w(&[F2(i)]), -1)])),
        "red-one" if near => Some((vec![(w(&[E(i), E(j), E(i)]), 0)], vec![(w(&[E2(i), E(j)]), 0), (w(&[E(j), E2(i)]), 0)])),
        "red-two" if near => Some((vec![(w(&[F(i), F(j), F(i)]), 0)], vec![(w(&[F2(i), F(j)]), 0), (w(&[F(j), F2(i)]), 0)])),
        _ if RELATIONS.contains(&id) => None,
        _ => return Err(Error::Parse(format!("unknown relation {id:?}"))),
    };
    Ok(sides)
}

/// Evaluates a side on an orbit.
pub fn evaluate_side(side: &Side, orbit: &ProjectiveOrbit) -> Result<ProjectiveOrbit> {
    let mut out = ProjectiveOrbit::zero();
    for (word, s) in side {
        out = out.direct_sum(&apply_word(word, orbit)?.shifted(*s));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub lambda: Weight,
    pub matching: Matching,
    pub i: usize,
    pub j: usize,
    pub lhs: ProjectiveOrbit,
    pub rhs: ProjectiveOrbit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub relation: String,
    pub n: usize,
    pub k: usize,
    pub cases_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Every balanced indecomposable projective `Q_{λ,a}` for `V(2ω_k)`.
pub fn all_projectives(n: usize, k: usize) -> Result<Vec<(Weight, Matching)>> {
    let mut out = Vec::new();
    for lambda in admissible_weights(n, k)? {
        for a in matchings_on(&lambda.s()) {
            out.push((lambda.clone(), a));
        }
    }
    Ok(out)
}

/// Checks relation `id` on every `Q_{λ,a}` and every applicable `(i, j)`.
pub fn verify_relation(id: &str, n: usize, k: usize) -> Result<RelationReport> {
    relation_sides(id, 1, 1, &Weight::highest(n, k)?)?;
    let projectives = all_projectives(n, k)?;
    let results: Vec<Result<(usize, Vec<Mismatch>)>> = projectives
        .par_iter()
        .map(|(lambda, a)| {
            let start = ProjectiveOrbit::single(lambda.clone(), a.clone(), 0)?;
            let mut checked = 0;
            let mut bad = Vec::new();
            for i in 1..n {
                for j in 1..n {
                    let Some((l, r)) = relation_sides(id, i, j, lambda)? else { continue };
                    checked += 1;
                    let lhs = evaluate_side(&l, &start)?;
                    let rhs = evaluate_side(&r, &start)?;
                    if lhs != rhs {
                        bad.push(Mismatch { lambda: lambda.clone(), matching: a.clone(), i, j, lhs, rhs });
                    }
                }
            }
            Ok((checked, bad))
        })
        .collect();
    let mut report = RelationReport { relation: id.to_string(), n, k, cases_checked: 0, mismatches: Vec::new() };
    for r in results {
        let (c, bad) = r?;
        report.cases_checked += c;
        report.mismatches.extend(bad);
    }
    Ok(report)
}

/// Graded rank of `Hom(Q_{λ,a}{s}, Q_{λ,b}{t})`, as exponent → coefficient
/// contributions `q^{t−s+m} (q+q^{-1})^r`; zero across different weights.
pub fn hom_rank(p: &ProjectiveId, q: &ProjectiveId) -> crate::laurent::LaurentPoly<i64> {
    use crate::laurent::LaurentPoly;
    if p.lambda != q.lambda {
        return LaurentPoly::zero();
    }
    let r = crate::planar::glue_closed(&p.a, &q.a).expect("same weight").count;
    let m = p.lambda.m() as i32;
    LaurentPoly::q_pow((q.shift - p.shift) as i32 + m) * LaurentPoly::q_plus_q_inv().pow(r as u32)
}

/// Graded rank of `Hom(P, M)` for direct sums, additive in both arguments.
pub fn hom_rank_orbits(p: &ProjectiveOrbit, m: &ProjectiveOrbit) -> crate::laurent::LaurentPoly<i64> {
    let mut total = crate::laurent::LaurentPoly::zero();
    for (x, &kx) in &p.terms {
        for (y, &ky) in &m.terms {
            total += &hom_rank(x, y).scale(&((kx * ky) as i64));
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjunctionReport {
    pub i: usize,
    pub n: usize,
    pub k: usize,
    pub pairs_checked: usize,
    pub failures: Vec<String>,
}

/// `Hom(E_i P, M) ≅ Hom(P, F_i K_i^{-1} M{1})` and
/// `Hom(F_i P, M) ≅ Hom(P, E_i K_i M{1})` on graded ranks, for all pairs of
/// balanced indecomposable projectives.
pub fn adjunction_check(i: usize, n: usize, k: usize) -> Result<AdjunctionReport> {
    use FunctorTag::*;
    let all = all_projectives(n, k)?;
    let mut report = AdjunctionReport { i, n, k, pairs_checked: 0, failures: Vec::new() };
    let singles: Vec<ProjectiveOrbit> = all.iter().map(|(l, a)| ProjectiveOrbit::single(l.clone(), a.clone(), 0)).collect::<Result<_>>()?;
    for p in &singles {
        let ep = apply_functor(E(i), p)?;
        let fp = apply_functor(F(i), p)?;
        for m in &singles {
            report.pairs_checked += 1;
            let right_e = apply_word(&[F(i), Kinv(i), Shift(1)], m)?;
            let right_f = apply_word(&[E(i), K(i), Shift(1)], m)?;
            let (a, b) = (hom_rank_orbits(&ep, m), hom_rank_orbits(p, &right_e));
            if a != b {
                report.failures.push(format!("E{i}: {p:?} vs {m:?}: {a} != {b}"));
            }
            let (a, b) = (hom_rank_orbits(&fp, m), hom_rank_orbits(p, &right_f));
            if a != b {
                report.failures.push(format!("F{i}: {p:?} vs {m:?}: {a} != {b}"));
            }
        }
    }
    Ok(report)
}

/// The moves of a presentation, in the order they are tried.
fn presentation_moves(n: usize) -> Vec<FunctorTag> {
    (1..n).flat_map(|i| [FunctorTag::F(i), FunctorTag::F2(i)]).collect()
}

/// A word `F_{i_r}^{(j_r)} … F_{i_1}^{(j_1)}` with
/// `word · Q_{2ω_k} ≅ Q_{λ,a}`, shortest possible, and among those the
/// lexicographically smallest in application order.
pub fn monomial_presentation(lambda: &Weight, a: &Matching) -> Result<Vec<FunctorTag>> {
    let (n, k) = (lambda.n(), lambda.k());
    let target = ProjectiveOrbit::single(lambda.clone(), a.clone(), 0)?;
    let target_id = target.as_single().unwrap().clone();
    let moves = presentation_moves(n);

    // clean edges: a move taking one unshifted summand to one unshifted summand
    let states = all_projectives(n, k)?;
    let index: HashMap<(Weight, Matching), usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut succ: Vec<Vec<(FunctorTag, usize)>> = vec![Vec::new(); states.len()];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (u, (l, x)) in states.iter().enumerate() {
        let o = ProjectiveOrbit::single(l.clone(), x.clone(), 0)?;
        for &mv in &moves {
            let out = apply_functor(mv, &o)?;
            if let Some(p) = out.as_single() {
                if p.shift == 0 {
                    let v = index[&(p.lambda.clone(), p.a.clone())];
                    succ[u].push((mv, v));
                    pred[v].push(u);
                }
            }
        }
    }
    // backward breadth-first search from the target
    let t = index[&(target_id.lambda.clone(), target_id.a.clone())];
    let mut dist = vec![usize::MAX; states.len()];
    dist[t] = 0;
    let mut queue = VecDeque::from([t]);
    while let Some(v) = queue.pop_front() {
        for &u in &pred[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let h = Weight::highest(n, k)?;
    let mut cur = index[&(h, Matching::empty())];
    if dist[cur] == usize::MAX {
        return Err(Error::Search(format!("no F-monomial reaches Q_{{{lambda},{a:?}}}")));
    }
    let mut applied = Vec::new();
    while cur != t {
        let (mv, next) = succ[cur]
            .iter()
            .filter(|(_, v)| dist[*v] != usize::MAX && dist[*v] + 1 == dist[cur])
            .min_by_key(|(mv, _)| *mv)
            .copied()
            .expect("distance decreases along a shortest path");
        applied.push(mv);
        cur = next;
    }
    applied.reverse();
    Ok(applied)
}

#[cfg(test)]
mod tests {
    use super::FunctorTag::*;
    use super::*;

    fn wt(s: &str) -> Weight {
        s.parse().unwrap()
    }

    fn catalan(m: usize) -> usize {
        (0..m).fold(1usize, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    /// Semistandard tableaux of shape `2^k` with entries `1..=n`, counted by content.
    fn ssyt_contents(n: usize, k: usize) -> BTreeMap<Vec<u8>, usize> {
        fn rec(n: usize, k: usize, rows: &mut Vec<(usize, usize)>, out: &mut BTreeMap<Vec<u8>, usize>) {
            if rows.len() == k {
                let mut content = vec![0u8; n];
                for &(a, b) in rows.iter() {
                    content[a - 1] += 1;
                    content[b - 1] += 1;
                }
                *out.entry(content).or_default() += 1;
                return;
            }
            for a in 1..=n {
                for b in a..=n {
                    if let Some(&(pa, pb)) = rows.last() {
                        if a <= pa || b <= pb {
                            continue;
                        }
                    }
                    rows.push((a, b));
                    rec(n, k, rows, out);
                    rows.pop();
                }
            }
        }
        let mut out = BTreeMap::new();
        rec(n, k, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn weights_basics() {
        let all = admissible_weights(2, 1).unwrap();
        assert_eq!(all, vec![wt("20"), wt("11"), wt("02")]);
        let l = wt("0,2,1,1,1,0,1");
        assert_eq!(l.m(), 2);
        assert_eq!(l.s().coords(), &[3, 4, 5, 7]);
        assert_eq!(wt("(2,2,0,0)").m(), 0);
        assert!("111".parse::<Weight>().is_err());
        assert!("3,1".parse::<Weight>().is_err());
        assert!(admissible_weights(3, 3).is_err());
        assert_eq!(serde_json::to_string(&wt("021111")).unwrap(), "[0,2,1,1,1,1]");
        assert!(serde_json::from_str::<Weight>("[0,2,1]").is_err());
    }

    #[test]
    fn weight_multiplicities_match_tableaux() {
        for n in 2..=6 {
            for k in 1..n {
                let contents = ssyt_contents(n, k);
                let weights = admissible_weights(n, k).unwrap();
                assert_eq!(weights.len(), contents.len());
                for w in &weights {
                    assert_eq!(contents[w.entries()], catalan(w.m()), "{w}");
                }
            }
        }
    }

    #[test]
    fn case_table() {
        let e = functor_bimodule(E(1), &wt("1111")).unwrap();
        let FunctorAction::Tangle { target, tangle } = e else { panic!() };
        assert_eq!(target, wt("2011"));
        assert_eq!(tangle.top().coords(), &[3, 4]);
        assert_eq!(functor_bimodule(E(1), &wt("2011")).unwrap(), FunctorAction::Zero);
        let f = functor_bimodule(F(1), &wt("2011")).unwrap();
        let FunctorAction::Tangle { target, tangle } = f else { panic!() };
        assert_eq!(target, wt("1111"));
        assert_eq!(tangle.top().coords(), &[1, 2, 3, 4]);
        assert_eq!(functor_bimodule(K(2), &wt("2011")).unwrap(), FunctorAction::Shift(-1));
        assert!(functor_bimodule(E(4), &wt("2011")).is_err());
    }

    #[test]
    fn case_exclusivity() {
        for n in 2..=6 {
            for k in 1..n {
                for l in admissible_weights(n, k).unwrap() {
                    for i in 1..n {
                        let e = functor_bimodule(E(i), &l).unwrap();
                        assert_eq!(e == FunctorAction::Zero, l.plus_eps(i).is_none());
                        let f = functor_bimodule(F(i), &l).unwrap();
                        assert_eq!(f == FunctorAction::Zero, l.minus_eps(i).is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn apply_examples() {
        let l = wt("1111");
        let a = Matching::from_pairs(l.s(), &[(1, 2), (3, 4)]).unwrap();
        let o = ProjectiveOrbit::single(l.clone(), a.clone(), 0).unwrap();
        assert_eq!(apply_functor(Id, &o).unwrap(), o);
        let e = apply_functor(E(1), &o).unwrap();
        let b = Matching::from_pairs(wt("2011").s(), &[(3, 4)]).unwrap();
        let mut want = ProjectiveOrbit::zero();
        want.add(ProjectiveId { lambda: wt("2011"), a: b.clone(), shift: 1 }, 1);
        want.add(ProjectiveId { lambda: wt("2011"), a: b, shift: -1 }, 1);
        assert_eq!(e, want);
        assert!(apply_functor(E(1), &e).unwrap().is_zero());
        assert!(apply_functor(E(1), &ProjectiveOrbit::zero()).unwrap().is_zero());
    }

    #[test]
    fn weight_changes() {
        for (l, a) in all_projectives(5, 2).unwrap() {
            let o = ProjectiveOrbit::single(l.clone(), a, 0).unwrap();
            for i in 1..5 {
                for p in apply_functor(E(i), &o).unwrap().terms().keys() {
                    assert_eq!(Some(p.lambda.clone()), l.plus_eps(i));
                }
                for p in apply_functor(F(i), &o).unwrap().terms().keys() {
                    assert_eq!(Some(p.lambda.clone()), l.minus_eps(i));
                }
                for p in apply_functor(K(i), &o).unwrap().terms().keys() {
                    assert_eq!(p.lambda, l);
                }
            }
        }
    }

    #[test]
    fn six_point_monomial() {
        let word: Vec<FunctorTag> = ["F2", "F4^(2)", "F3^(2)", "F5", "F1", "F4", "F2", "F3"].iter().map(|s| s.parse().unwrap()).collect();
        let out = apply_word(&word, &ProjectiveOrbit::highest(6, 3).unwrap()).unwrap();
        let l = wt("111021");
        let a = Matching::from_pairs(l.s(), &[(1, 6), (2, 3)]).unwrap();
        assert_eq!(out, ProjectiveOrbit::single(l.clone(), a.clone(), 0).unwrap());
        let found = monomial_presentation(&l, &a).unwrap();
        assert_eq!(apply_word(&found, &ProjectiveOrbit::highest(6, 3).unwrap()).unwrap(), ProjectiveOrbit::single(l, a, 0).unwrap());
        assert!(found.len() <= word.len());
    }

    #[test]
    fn presentations_round_trip() {
        for n in 2..=5 {
            for k in 1..n {
                for (l, a) in all_projectives(n, k).unwrap() {
                    let word = monomial_presentation(&l, &a).unwrap();
                    assert!(word.iter().all(|t| matches!(t, F(_) | F2(_))));
                    let out = apply_word(&word, &ProjectiveOrbit::highest(n, k).unwrap()).unwrap();
                    assert_eq!(out, ProjectiveOrbit::single(l, a, 0).unwrap());
                }
            }
        }
        assert!(monomial_presentation(&Weight::highest(4, 2).unwrap(), &Matching::empty()).unwrap().is_empty());
    }

    #[test]
    fn relations_small() {
        for id in RELATIONS {
            for (n, k) in [(2, 1), (3, 1), (4, 2)] {
                let r = verify_relation(id, n, k).unwrap();
                assert!(r.passed(), "{id} n={n} k={k}: {:?}", r.mismatches.first());
            }
        }
        assert!(verify_relation("nope", 3, 1).is_err());
    }

    #[test]
    fn serre_worked_case() {
        // (λ_i, λ_{i+1}, λ_{i+2}) = (0,1,2): E_{i+1}E_i^2 vanishes
        let l = wt("0121");
        let a = Matching::from_pairs(l.s(), &[(2, 4)]).unwrap();
        let o = ProjectiveOrbit::single(l, a, 0).unwrap();
        assert!(apply_word(&[E(2), E(1), E(1)], &o).unwrap().is_zero());
        let lhs = apply_word(&[E(1), E(1), E(2)], &o).unwrap();
        let mid = apply_word(&[E(1), E(2), E(1)], &o).unwrap();
        assert_eq!(lhs, mid.shifted(1).direct_sum(&mid.shifted(-1)));
    }

    #[test]
    fn adjunctions() {
        for (n, k) in [(2, 1), (3, 1), (4, 2)] {
            for i in 1..n {
                let r = adjunction_check(i, n, k).unwrap();
                assert!(r.failures.is_empty(), "{:?}", r.failures.first());
            }
        }
        let h = ProjectiveOrbit::highest(3, 1).unwrap();
        assert_eq!(hom_rank_orbits(&h, &h), crate::laurent::LaurentPoly::one());
    }

    #[test]
    fn functor_tag_text() {
        for t in [E(3), F(1), K(2), Kinv(4), E2(1), F2(5), Shift(-2), Id] {
            assert_eq!(t.to_string().parse::<FunctorTag>().unwrap(), t);
        }
        assert_eq!("F4(2)".parse::<FunctorTag>().unwrap(), F2(4));
        assert!("G1".parse::<FunctorTag>().is_err());
    }
}
