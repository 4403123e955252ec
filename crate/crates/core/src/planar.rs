//! Crossingless matchings and flat tangles.
//!
//! Endpoints are always addressed by *position* inside a [`PointSeq`]; the
//! sequence itself only records the real-line coordinates. Two rings or
//! tangles whose sequences differ but whose positional data agree are
//! canonically isomorphic, and the rest of the crate relies on that.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `m` accepted by [`enumerate_matchings`] unless a caller asks for
/// more through [`enumerate_matchings_bounded`].
pub const DEFAULT_MATCHING_BOUND: usize = 10;

/// Strictly increasing real-line coordinates of endpoints.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct PointSeq(Vec<i64>);

impl PointSeq {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Construction(format!("point sequence {coords:?} is not strictly increasing")));
        }
        Ok(Self(coords))
    }

    /// `1, 2, ..., n`.
    pub fn standard(n: usize) -> Self {
        Self((1..=n as i64).collect())
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn position(&self, coord: i64) -> Option<usize> {
        self.0.binary_search(&coord).ok()
    }

    pub fn contains(&self, coord: i64) -> bool {
        self.position(coord).is_some()
    }
}

impl TryFrom<Vec<i64>> for PointSeq {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PointSeq> for Vec<i64> {
    fn from(p: PointSeq) -> Vec<i64> {
        p.0
    }
}

impl fmt::Debug for PointSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Plain union-find with path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so numbering by smallest member is cheap
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Component label for every element, numbered `0..count` by smallest member.
    pub(crate) fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut count = 0;
        for x in 0..n {
            let r = self.find(x);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            out[x] = label[r];
        }
        (out, count)
    }
}

/// A crossingless matching of the points of a [`PointSeq`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    points: PointSeq,
    partner: Vec<usize>,
}

impl Matching {
    /// Builds a matching from coordinate pairs.
    pub fn from_pairs(points: PointSeq, pairs: &[(i64, i64)]) -> Result<Self> {
        let n = points.len();
        let mut partner = vec![usize::MAX; n];
        for &(x, y) in pairs {
            let (px, py) = match (points.position(x), points.position(y)) {
                (Some(px), Some(py)) if px != py => (px, py),
                _ => return Err(Error::Construction(format!("arc ({x},{y}) not on {points:?}"))),
            };
            if partner[px] != usize::MAX || partner[py] != usize::MAX {
                return Err(Error::Construction(format!("point reused in arc ({x},{y})")));
            }
            partner[px] = py;
            partner[py] = px;
        }
        Self::from_partner(points, partner)
    }

    /// Builds a matching from a positional involution.
    pub fn from_partner(points: PointSeq, partner: Vec<usize>) -> Result<Self> {
        let n = points.len();
        if partner.len() != n || n % 2 == 1 {
            return Err(Error::Construction("matching needs an even number of points".into()));
        }
        for (i, &j) in partner.iter().enumerate() {
            if j >= n || j == i || partner[j] != i {
                return Err(Error::Construction(format!("position {i} is not properly paired")));
            }
        }
        if !noncrossing(&partner) {
            return Err(Error::Construction("matching has crossing arcs".into()));
        }
        Ok(Self { points, partner })
    }

    /// The unique matching of zero points.
    pub fn empty() -> Self {
        Self { points: PointSeq::empty(), partner: Vec::new() }
    }

    pub fn points(&self) -> &PointSeq {
        &self.points
    }

    pub fn partner(&self) -> &[usize] {
        &self.partner
    }

    /// Number of arcs.
    pub fn size(&self) -> usize {
        self.partner.len() / 2
    }

    /// Arcs as position pairs `(left, right)`, ordered by left endpoint.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|(i, j)| i < *j)
            .map(|(i, &j)| (i, j))
            .collect()
    }

    /// Arcs as coordinate pairs.
    pub fn coord_arcs(&self) -> Vec<(i64, i64)> {
        let c = self.points.coords();
        self.arcs().into_iter().map(|(i, j)| (c[i], c[j])).collect()
    }

    /// Same positional pairing on another point sequence of equal length.
    pub fn relabel(&self, points: PointSeq) -> Result<Self> {
        if points.len() != self.points.len() {
            return Err(Error::Boundary(format!("cannot relabel {:?} onto {:?}", self.points, points)));
        }
        Ok(Self { points, partner: self.partner.clone() })
    }

    /// The matching as a flat `(m, 0)`-tangle: endpoints on the top boundary.
    pub fn as_tangle_below(&self) -> FlatTangle {
        let mut partner = vec![0; self.partner.len()];
        partner.copy_from_slice(&self.partner);
        FlatTangle { bottom: PointSeq::empty(), top: self.points.clone(), partner, circles: 0 }
    }

    /// The reflection `W(b)` as a flat `(0, m)`-tangle.
    pub fn as_tangle_above(&self) -> FlatTangle {
        self.as_tangle_below().reflect()
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coord_arcs())
    }
}

impl Serialize for Matching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[i64; 2]> = self.coord_arcs().into_iter().map(|(a, b)| [a, b]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[i64; 2]> = Vec::deserialize(d)?;
        let mut coords: Vec<i64> = pairs.iter().flatten().copied().collect();
        coords.sort_unstable();
        let points = PointSeq::new(coords).map_err(serde::de::Error::custom)?;
        let pairs: Vec<(i64, i64)> = pairs.iter().map(|p| (p[0], p[1])).collect();
        Matching::from_pairs(points, &pairs).map_err(serde::de::Error::custom)
    }
}

/// Non-crossing test on a positional involution of a line of points.
fn noncrossing(partner: &[usize]) -> bool {
    let mut stack = Vec::new();
    for (i, &j) in partner.iter().enumerate() {
        if j > i {
            stack.push(i);
        } else if stack.pop() != Some(j) {
            return false;
        }
    }
    stack.is_empty()
}

fn positional_cache() -> &'static RwLock<HashMap<usize, Arc<Vec<Vec<usize>>>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Vec<Vec<usize>>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Positional crossingless matchings of `2m` points in enumeration order:
/// lexicographic on the list of arcs sorted by left endpoint.
pub(crate) fn positional_matchings(m: usize) -> Arc<Vec<Vec<usize>>> {
    if let Some(v) = positional_cache().read().unwrap().get(&m) {
        return v.clone();
    }
    fn rec(lo: usize, hi: usize, out: &mut Vec<Vec<(usize, usize)>>) {
        // all matchings of positions lo..hi (hi exclusive), arcs in left-endpoint order
        if lo >= hi {
            out.push(Vec::new());
            return;
        }
        for p in (lo + 1..hi).step_by(2) {
            let mut inner = Vec::new();
            rec(lo + 1, p, &mut inner);
            let mut outer = Vec::new();
            rec(p + 1, hi, &mut outer);
            for i in &inner {
                for o in &outer {
                    let mut arcs = Vec::with_capacity(1 + i.len() + o.len());
                    arcs.push((lo, p));
                    arcs.extend_from_slice(i);
                    arcs.extend_from_slice(o);
                    out.push(arcs);
                }
            }
        }
    }
    let mut lists = Vec::new();
    rec(0, 2 * m, &mut lists);
    lists.sort();
    let partners: Vec<Vec<usize>> = lists
        .into_iter()
        .map(|arcs| {
            let mut partner = vec![0; 2 * m];
            for (i, j) in arcs {
                partner[i] = j;
                partner[j] = i;
            }
            partner
        })
        .collect();
    let arc = Arc::new(partners);
    positional_cache().write().unwrap().insert(m, arc.clone());
    arc
}

/// All crossingless matchings of the points `1..=2m`, in the crate's
/// canonical order. Fails above [`DEFAULT_MATCHING_BOUND`].
pub fn enumerate_matchings(m: usize) -> Result<Vec<Matching>> {
    enumerate_matchings_bounded(m, DEFAULT_MATCHING_BOUND)
}

pub fn enumerate_matchings_bounded(m: usize, bound: usize) -> Result<Vec<Matching>> {
    if m > bound {
        return Err(Error::SizeBound { what: "m", value: m, bound });
    }
    Ok(matchings_on(&PointSeq::standard(2 * m)))
}

/// All crossingless matchings on an arbitrary even point sequence.
pub fn matchings_on(points: &PointSeq) -> Vec<Matching> {
    assert!(points.len() % 2 == 0, "odd point sequence");
    positional_matchings(points.len() / 2)
        .iter()
        .map(|partner| Matching { points: points.clone(), partner: partner.clone() })
        .collect()
}

/// Circle structure of the closed diagram `W(b)a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CirclePartition {
    pub count: usize,
    /// Circle index for each arc: the arcs of `a` first, then those of `W(b)`,
    /// each in left-endpoint order.
    pub membership: Vec<usize>,
    /// Circle index for each endpoint position.
    pub point_circle: Vec<usize>,
}

/// Glues `W(b)` on top of `a` and extracts the circles. Circles are numbered
/// by their smallest endpoint position.
pub fn glue_closed(b: &Matching, a: &Matching) -> Result<CirclePartition> {
    if b.points != a.points {
        return Err(Error::Boundary(format!("cannot glue {:?} onto {:?}", b.points, a.points)));
    }
    let n = a.partner.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        uf.union(i, a.partner[i]);
        uf.union(i, b.partner[i]);
    }
    let (point_circle, count) = uf.labels();
    let membership = a.arcs().into_iter().chain(b.arcs()).map(|(i, _)| point_circle[i]).collect();
    Ok(CirclePartition { count, membership, point_circle })
}

/// An endpoint of a flat tangle, by position on its boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Bottom(usize),
    Top(usize),
}

/// A crossingless diagram of arcs and closed circles in a horizontal strip.
///
/// Endpoints are indexed `0..nb` for the bottom boundary and `nb..nb+nt` for
/// the top. A flat `(l, m)`-tangle has `2m` bottom and `2l` top endpoints.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlatTangle {
    bottom: PointSeq,
    top: PointSeq,
    partner: Vec<usize>,
    circles: usize,
}

/// The elementary tangles used by the functor case tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementaryKind {
    Id,
    /// `Id_i^{i+1}`: the strand at `i` moves to `i+1`.
    IdShiftUp(i64),
    /// `Id_{i+1}^i`: the strand at `i+1` moves to `i`.
    IdShiftDown(i64),
    /// `∪^{i,i+1}`: new top endpoints `i, i+1` joined by a cup.
    Cup(i64),
    /// `∩_{i,i+1}`: bottom endpoints `i, i+1` joined by a cap.
    Cap(i64),
}

impl FlatTangle {
    pub fn new(bottom: PointSeq, top: PointSeq, arcs: &[(Endpoint, Endpoint)], circles: usize) -> Result<Self> {
        let nb = bottom.len();
        let nt = top.len();
        if nb % 2 == 1 || nt % 2 == 1 {
            return Err(Error::Construction("tangle boundaries must have even size".into()));
        }
        let idx = |e: Endpoint| -> Result<usize> {
            match e {
                Endpoint::Bottom(p) if p < nb => Ok(p),
                Endpoint::Top(p) if p < nt => Ok(nb + p),
                _ => Err(Error::Construction(format!("endpoint {e:?} out of range"))),
            }
        };
        let mut partner = vec![usize::MAX; nb + nt];
        for &(x, y) in arcs {
            let (i, j) = (idx(x)?, idx(y)?);
            if i == j || partner[i] != usize::MAX || partner[j] != usize::MAX {
                return Err(Error::Construction(format!("endpoint reused in arc {x:?}-{y:?}")));
            }
            partner[i] = j;
            partner[j] = i;
        }
        if partner.contains(&usize::MAX) {
            return Err(Error::Construction("tangle leaves an endpoint unpaired".into()));
        }
        let t = Self { bottom, top, partner, circles };
        if !t.is_planar() {
            return Err(Error::Construction("tangle arcs cross".into()));
        }
        Ok(t)
    }

    pub fn identity(s: &PointSeq) -> Self {
        let n = s.len();
        let partner = (0..2 * n).map(|i| if i < n { i + n } else { i - n }).collect();
        Self { bottom: s.clone(), top: s.clone(), partner, circles: 0 }
    }

    pub fn bottom(&self) -> &PointSeq {
        &self.bottom
    }

    pub fn top(&self) -> &PointSeq {
        &self.top
    }

    pub fn circles(&self) -> usize {
        self.circles
    }

    /// Half the number of bottom endpoints (`m` of an `(l, m)`-tangle).
    pub fn bottom_size(&self) -> usize {
        self.bottom.len() / 2
    }

    /// Half the number of top endpoints (`l` of an `(l, m)`-tangle).
    pub fn top_size(&self) -> usize {
        self.top.len() / 2
    }

    pub fn endpoint(&self, idx: usize) -> Endpoint {
        let nb = self.bottom.len();
        if idx < nb {
            Endpoint::Bottom(idx)
        } else {
            Endpoint::Top(idx - nb)
        }
    }

    pub fn endpoint_index(&self, e: Endpoint) -> usize {
        match e {
            Endpoint::Bottom(p) => p,
            Endpoint::Top(p) => self.bottom.len() + p,
        }
    }

    pub fn partner_of(&self, e: Endpoint) -> Endpoint {
        self.endpoint(self.partner[self.endpoint_index(e)])
    }

    /// Raw positional involution on `bottom ++ top` endpoints.
    pub fn partner(&self) -> &[usize] {
        &self.partner
    }

    /// Arcs as endpoint pairs, ordered by their first endpoint index.
    pub fn arcs(&self) -> Vec<(Endpoint, Endpoint)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|(i, j)| i < *j)
            .map(|(i, &j)| (self.endpoint(i), self.endpoint(j)))
            .collect()
    }

    /// Nesting criterion after unfolding the boundary into a circle: bottom
    /// left to right, then top right to left.
    pub fn is_planar(&self) -> bool {
        let nb = self.bottom.len();
        let nt = self.top.len();
        let circ = |i: usize| if i < nb { i } else { nb + (nt - 1 - (i - nb)) };
        let mut order = vec![0usize; nb + nt];
        for i in 0..nb + nt {
            order[circ(i)] = circ(self.partner[i]);
        }
        noncrossing(&order)
    }

    pub fn reflect(&self) -> Self {
        let nb = self.bottom.len();
        let nt = self.top.len();
        // new bottom = old top, new top = old bottom
        let to_new = |i: usize| if i < nb { nt + i } else { i - nb };
        let mut partner = vec![0; nb + nt];
        for i in 0..nb + nt {
            partner[to_new(i)] = to_new(self.partner[i]);
        }
        Self { bottom: self.top.clone(), top: self.bottom.clone(), partner, circles: self.circles }
    }

    /// Stacks `upper` on top of `lower`, identifying `lower.top` with
    /// `upper.bottom`. Closed loops formed in the middle are added to the
    /// circle count.
    pub fn compose(upper: &FlatTangle, lower: &FlatTangle) -> Result<FlatTangle> {
        if upper.bottom != lower.top {
            return Err(Error::Boundary(format!(
                "cannot stack bottom {:?} on top {:?}",
                upper.bottom, lower.top
            )));
        }
        let nb = lower.bottom.len();
        let nm = lower.top.len();
        let nt = upper.top.len();

        // Walk from an outer endpoint until another outer endpoint is reached.
        // States: (in_lower, endpoint index within that tangle).
        let mut visited_mid = vec![false; nm];
        let mut partner = vec![usize::MAX; nb + nt];
        let outer = |in_lower: bool, idx: usize| -> Option<usize> {
            if in_lower && idx < nb {
                Some(idx)
            } else if !in_lower && idx >= nm {
                Some(nb + idx - nm)
            } else {
                None
            }
        };
        for start in 0..nb + nt {
            if partner[start] != usize::MAX {
                continue;
            }
            let (mut in_lower, mut idx) = if start < nb { (true, start) } else { (false, nm + start - nb) };
            loop {
                let next = if in_lower { lower.partner[idx] } else { upper.partner[idx] };
                if let Some(o) = outer(in_lower, next) {
                    partner[start] = o;
                    partner[o] = start;
                    break;
                }
                // `next` is a middle point; cross to the other tangle
                let mid = if in_lower { next - nb } else { next };
                visited_mid[mid] = true;
                if in_lower {
                    in_lower = false;
                    idx = mid;
                } else {
                    in_lower = true;
                    idx = nb + mid;
                }
            }
        }
        let mut loops = 0;
        for j in 0..nm {
            if visited_mid[j] {
                continue;
            }
            loops += 1;
            let mut cur = j;
            loop {
                visited_mid[cur] = true;
                let up = upper.partner[cur];
                visited_mid[up] = true;
                cur = lower.partner[nb + up] - nb;
                if cur == j {
                    break;
                }
            }
        }
        let t = FlatTangle {
            bottom: lower.bottom.clone(),
            top: upper.top.clone(),
            partner,
            circles: upper.circles + lower.circles + loops,
        };
        debug_assert!(t.is_planar());
        Ok(t)
    }

    /// Removes all closed circles, returning the circle-free tangle and the
    /// number removed.
    pub fn strip_circles(&self) -> (FlatTangle, usize) {
        (FlatTangle { circles: 0, ..self.clone() }, self.circles)
    }

    /// For a tangle with empty bottom, the matching formed on the top points.
    pub fn top_matching(&self) -> Result<Matching> {
        if !self.bottom.is_empty() {
            return Err(Error::Structural("tangle has bottom endpoints".into()));
        }
        Matching::from_partner(self.top.clone(), self.partner.clone())
    }

    /// Elementary tangle with bottom boundary `s`.
    pub fn elementary(kind: ElementaryKind, s: &PointSeq) -> Result<FlatTangle> {
        let c = s.coords();
        let n = c.len();
        let err = |msg: String| Err(Error::Construction(msg));
        match kind {
            ElementaryKind::Id => Ok(Self::identity(s)),
            ElementaryKind::IdShiftUp(i) | ElementaryKind::IdShiftDown(i) => {
                let (from, to) = match kind {
                    ElementaryKind::IdShiftUp(_) => (i, i + 1),
                    _ => (i + 1, i),
                };
                if !s.contains(from) || s.contains(to) {
                    return err(format!("{kind:?} needs {from} in and {to} out of {s:?}"));
                }
                let top = PointSeq::new(c.iter().map(|&x| if x == from { to } else { x }).collect())?;
                let mut t = Self::identity(s);
                t.top = top;
                Ok(t)
            }
            ElementaryKind::Cap(i) => {
                let (Some(p), true) = (s.position(i), s.contains(i + 1)) else {
                    return err(format!("cap at {i} needs {i},{} in {s:?}", i + 1));
                };
                let top = PointSeq::new(c.iter().copied().filter(|&x| x != i && x != i + 1).collect())?;
                let mut arcs = vec![(Endpoint::Bottom(p), Endpoint::Bottom(p + 1))];
                arcs.extend((0..n).filter(|&q| q != p && q != p + 1).enumerate().map(|(t, q)| (Endpoint::Bottom(q), Endpoint::Top(t))));
                Self::new(s.clone(), top, &arcs, 0)
            }
            ElementaryKind::Cup(i) => {
                if s.contains(i) || s.contains(i + 1) {
                    return err(format!("cup at {i} needs {i},{} outside {s:?}", i + 1));
                }
                let mut tc: Vec<i64> = c.to_vec();
                tc.push(i);
                tc.push(i + 1);
                tc.sort_unstable();
                let top = PointSeq::new(tc)?;
                let p = top.position(i).unwrap();
                let mut arcs = vec![(Endpoint::Top(p), Endpoint::Top(p + 1))];
                arcs.extend((0..n + 2).filter(|&q| q != p && q != p + 1).enumerate().map(|(b, q)| (Endpoint::Bottom(b), Endpoint::Top(q))));
                Self::new(s.clone(), top, &arcs, 0)
            }
        }
    }

    /// A cap joining bottom positions `pos, pos+1` of `1..=2m`; the top is
    /// renumbered `1..=2m-2`.
    pub fn positional_cap(m: usize, pos: usize) -> Result<FlatTangle> {
        if m == 0 || pos + 1 >= 2 * m {
            return Err(Error::Construction(format!("no cap at position {pos} for m={m}")));
        }
        let mut arcs = vec![(Endpoint::Bottom(pos), Endpoint::Bottom(pos + 1))];
        arcs.extend((0..2 * m).filter(|&q| q != pos && q != pos + 1).enumerate().map(|(t, q)| (Endpoint::Bottom(q), Endpoint::Top(t))));
        Self::new(PointSeq::standard(2 * m), PointSeq::standard(2 * m - 2), &arcs, 0)
    }

    /// A cup creating top positions `pos, pos+1` over the points `1..=2m`; the
    /// top is renumbered `1..=2m+2`.
    pub fn positional_cup(m: usize, pos: usize) -> Result<FlatTangle> {
        Ok(Self::positional_cap(m + 1, pos)?.reflect())
    }

    /// Adds `c` free circles.
    pub fn with_extra_circles(&self, c: usize) -> FlatTangle {
        FlatTangle { circles: self.circles + c, ..self.clone() }
    }
}

impl fmt::Debug for FlatTangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlatTangle")
            .field("bottom", &self.bottom)
            .field("top", &self.top)
            .field("arcs", &self.arcs())
            .field("circles", &self.circles)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct TangleRepr {
    bottom: PointSeq,
    top: PointSeq,
    arcs: Vec<(Endpoint, Endpoint)>,
    circles: usize,
}

impl Serialize for FlatTangle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TangleRepr { bottom: self.bottom.clone(), top: self.top.clone(), arcs: self.arcs(), circles: self.circles }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlatTangle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TangleRepr::deserialize(d)?;
        FlatTangle::new(r.bottom, r.top, &r.arcs, r.circles).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(v: &[i64]) -> PointSeq {
        PointSeq::new(v.to_vec()).unwrap()
    }

    /// Brute force: every fixed-point-free involution of 2m points that passes
    /// the quadruple test.
    fn brute_force_count(m: usize) -> usize {
        fn rec(partner: &mut Vec<usize>, count: &mut usize) {
            let Some(i) = partner.iter().position(|&p| p == usize::MAX) else {
                let n = partner.len();
                let crossing = (0..n).any(|i| {
                    (0..n).any(|j| {
                        let l = partner[i];
                        let p = partner[j];
                        i < j && j < l && l < p
                    })
                });
                if !crossing {
                    *count += 1;
                }
                return;
            };
            for j in i + 1..partner.len() {
                if partner[j] == usize::MAX {
                    partner[i] = j;
                    partner[j] = i;
                    rec(partner, count);
                    partner[i] = usize::MAX;
                    partner[j] = usize::MAX;
                }
            }
        }
        let mut partner = vec![usize::MAX; 2 * m];
        let mut count = 0;
        rec(&mut partner, &mut count);
        count
    }

    #[test]
    fn enumeration_examples() {
        let b2 = enumerate_matchings(2).unwrap();
        assert_eq!(b2.len(), 2);
        assert_eq!(b2[0].coord_arcs(), vec![(1, 2), (3, 4)]);
        assert_eq!(b2[1].coord_arcs(), vec![(1, 4), (2, 3)]);
        let b0 = enumerate_matchings(0).unwrap();
        assert_eq!(b0.len(), 1);
        assert_eq!(b0[0].size(), 0);
        assert_eq!(enumerate_matchings(5).unwrap().len(), brute_force_count(5));
        assert_eq!(brute_force_count(5), 42);
        assert!(matches!(enumerate_matchings(11), Err(Error::SizeBound { .. })));
    }

    #[test]
    fn catalan_counts() {
        let expected = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (m, &c) in expected.iter().enumerate() {
            assert_eq!(enumerate_matchings(m).unwrap().len(), c);
        }
    }

    #[test]
    fn enumeration_is_lexicographic() {
        for m in 0..=5 {
            let all = enumerate_matchings(m).unwrap();
            for w in all.windows(2) {
                assert!(w[0].coord_arcs() < w[1].coord_arcs());
            }
        }
    }

    #[test]
    fn matching_validation() {
        assert!(Matching::from_pairs(seq(&[1, 2, 3, 4]), &[(1, 3), (2, 4)]).is_err());
        assert!(Matching::from_pairs(seq(&[1, 2, 3, 4]), &[(1, 2)]).is_err());
        assert!(Matching::from_pairs(seq(&[1, 2, 3, 4]), &[(1, 4), (2, 3)]).is_ok());
    }

    #[test]
    fn glue_examples() {
        let b2 = enumerate_matchings(2).unwrap();
        assert_eq!(glue_closed(&b2[0], &b2[0]).unwrap().count, 2);
        assert_eq!(glue_closed(&b2[1], &b2[0]).unwrap().count, 1);
        let b1 = enumerate_matchings(1).unwrap();
        assert_eq!(glue_closed(&b1[0], &b1[0]).unwrap().count, 1);
        let other = Matching::from_pairs(seq(&[2, 5]), &[(2, 5)]).unwrap();
        assert!(matches!(glue_closed(&other, &b1[0]), Err(Error::Boundary(_))));
    }

    #[test]
    fn glue_matches_tangle_composition() {
        for m in 0..=4 {
            let all = enumerate_matchings(m).unwrap();
            for a in &all {
                for b in &all {
                    let closed = FlatTangle::compose(&b.as_tangle_above(), &a.as_tangle_below()).unwrap();
                    assert_eq!(closed.circles(), glue_closed(b, a).unwrap().count);
                }
            }
        }
    }

    #[test]
    fn circle_count_bounds() {
        for m in 1..=5 {
            let all = enumerate_matchings(m).unwrap();
            for a in &all {
                for b in &all {
                    let r = glue_closed(b, a).unwrap().count;
                    let r_rev = glue_closed(a, b).unwrap().count;
                    assert_eq!(r, r_rev);
                    assert!(r >= 1 && r <= m);
                    assert_eq!(r == m, a == b);
                }
            }
        }
    }

    #[test]
    fn partition_numbering() {
        let b2 = enumerate_matchings(2).unwrap();
        let p = glue_closed(&b2[0], &b2[0]).unwrap();
        assert_eq!(p.point_circle, vec![0, 0, 1, 1]);
        assert_eq!(p.membership, vec![0, 1, 0, 1]);
    }

    #[test]
    fn elementary_tangles() {
        let s = seq(&[3, 4, 5, 7]);
        // the strand at 3 cannot move to 4, which is occupied
        assert!(FlatTangle::elementary(ElementaryKind::IdShiftUp(3), &s).is_err());
        let t = FlatTangle::elementary(ElementaryKind::IdShiftUp(5), &s).unwrap();
        assert_eq!(t.top().coords(), &[3, 4, 6, 7]);
        let d = FlatTangle::elementary(ElementaryKind::IdShiftDown(2), &s).unwrap();
        assert_eq!(d.top().coords(), &[2, 4, 5, 7]);

        let cap = FlatTangle::elementary(ElementaryKind::Cap(3), &s).unwrap();
        assert_eq!(cap.bottom().len(), 4);
        assert_eq!(cap.top().coords(), &[5, 7]);
        assert_eq!(cap.partner_of(Endpoint::Bottom(0)), Endpoint::Bottom(1));
        assert!(FlatTangle::elementary(ElementaryKind::Cap(5), &s).is_err());

        let cup = FlatTangle::elementary(ElementaryKind::Cup(1), &s).unwrap();
        assert_eq!(cup.top().coords(), &[1, 2, 3, 4, 5, 7]);
        assert_eq!(cup.partner_of(Endpoint::Top(0)), Endpoint::Top(1));
        let capped = FlatTangle::elementary(ElementaryKind::Cap(1), cup.top()).unwrap();
        assert_eq!(cup.reflect(), capped);
    }

    #[test]
    fn reflect_identity() {
        let s = seq(&[1, 2, 5, 6]);
        let id = FlatTangle::identity(&s);
        assert_eq!(id.reflect(), id);
    }

    #[test]
    fn cap_on_cup_is_one_circle() {
        let s = seq(&[]);
        let cup = FlatTangle::elementary(ElementaryKind::Cup(1), &s).unwrap();
        let cap = FlatTangle::elementary(ElementaryKind::Cap(1), cup.top()).unwrap();
        let c = FlatTangle::compose(&cap, &cup).unwrap();
        assert!(c.bottom().is_empty() && c.top().is_empty());
        assert_eq!(c.circles(), 1);

        let s = seq(&[1, 2, 3, 4]);
        let id = FlatTangle::identity(&s);
        let t = FlatTangle::elementary(ElementaryKind::Cap(2), &s).unwrap();
        assert_eq!(FlatTangle::compose(&FlatTangle::identity(t.top()), &t).unwrap(), t);
        assert_eq!(FlatTangle::compose(&t, &id).unwrap(), t);
        assert!(FlatTangle::compose(&id, &t).is_err());
    }

    #[test]
    fn far_apart_tangles_commute() {
        // E_1 then F_3 versus F_3 then E_1 starting from weight (0,2,1,1,1,1)
        let s = seq(&[3, 4, 5, 6]);
        let cup1 = FlatTangle::elementary(ElementaryKind::Cup(1), &s).unwrap();
        let cap3_after = FlatTangle::elementary(ElementaryKind::Cap(3), cup1.top()).unwrap();
        let one = FlatTangle::compose(&cap3_after, &cup1).unwrap();
        let cap3 = FlatTangle::elementary(ElementaryKind::Cap(3), &s).unwrap();
        let cup1_after = FlatTangle::elementary(ElementaryKind::Cup(1), cap3.top()).unwrap();
        let two = FlatTangle::compose(&cup1_after, &cap3).unwrap();
        assert_eq!(one, two);
        assert_eq!(one.top().coords(), &[1, 2, 5, 6]);
    }

    #[test]
    fn tangle_json() {
        let s = seq(&[3, 4, 5, 7]);
        let cap = FlatTangle::elementary(ElementaryKind::Cap(3), &s).unwrap();
        let js = serde_json::to_string(&cap).unwrap();
        let back: FlatTangle = serde_json::from_str(&js).unwrap();
        assert_eq!(back, cap);
        let m = enumerate_matchings(2).unwrap()[1].clone();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[1,4],[2,3]]");
        let back: Matching = serde_json::from_str("[[1,4],[2,3]]").unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matching>("[[1,3],[2,4]]").is_err());
    }

    #[test]
    fn crossing_tangle_rejected() {
        let s = PointSeq::standard(2);
        let arcs = [(Endpoint::Bottom(0), Endpoint::Top(1)), (Endpoint::Bottom(1), Endpoint::Top(0))];
        assert!(FlatTangle::new(s.clone(), s, &arcs, 0).is_err());
    }

    /// Random composable stacks of positional caps, cups and identities.
    fn arb_stack() -> impl Strategy<Value = Vec<(u8, usize)>> {
        proptest::collection::vec((0u8..3, 0usize..8), 3)
    }

    fn build(m: usize, step: (u8, usize)) -> FlatTangle {
        match step.0 {
            0 => FlatTangle::identity(&PointSeq::standard(2 * m)),
            1 if m > 0 => FlatTangle::positional_cap(m, step.1 % (2 * m - 1)).unwrap(),
            _ if m < 4 => FlatTangle::positional_cup(m, step.1 % (2 * m + 1)).unwrap(),
            _ => FlatTangle::identity(&PointSeq::standard(2 * m)),
        }
    }

    proptest! {
        #[test]
        fn reflect_is_involution(steps in arb_stack(), m in 0usize..3) {
            let t = build(m, steps[0]);
            prop_assert_eq!(t.reflect().reflect(), t.clone());
            prop_assert!(t.reflect().is_planar());
        }

        #[test]
        fn compose_is_associative(steps in arb_stack(), m in 0usize..3) {
            let t1 = build(m, steps[0]);
            let t2 = build(t1.top_size(), steps[1]);
            let t3 = build(t2.top_size(), steps[2]);
            let left = FlatTangle::compose(&t3, &FlatTangle::compose(&t2, &t1).unwrap()).unwrap();
            let right = FlatTangle::compose(&FlatTangle::compose(&t3, &t2).unwrap(), &t1).unwrap();
            prop_assert!(left.is_planar());
            prop_assert_eq!(left, right);
        }
    }
}
