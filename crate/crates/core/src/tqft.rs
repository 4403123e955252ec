//! The Frobenius algebra `A = Z[X]/(X^2)` and evaluation of saddle cobordisms
//! on labeled circle configurations.
//!
//! A closed one-manifold is stored as a [`ClosedDiagram`]: nodes joined by
//! edges, every node of degree two. Its circles are the connected
//! components, numbered by smallest node. A labeling of the circles by
//! `{1, X}` is a bitmask with bit `k` set when circle `k` carries `X`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::planar::UnionFind;
use crate::scalar::Coeff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FrobeniusLabel {
    One,
    X,
}

impl FrobeniusLabel {
    pub fn degree(self) -> i64 {
        match self {
            FrobeniusLabel::One => -1,
            FrobeniusLabel::X => 1,
        }
    }

    fn from_bit(bit: bool) -> Self {
        if bit {
            FrobeniusLabel::X
        } else {
            FrobeniusLabel::One
        }
    }

    fn bit(self) -> bool {
        self == FrobeniusLabel::X
    }
}

/// Multiplication `A ⊗ A → A`; `None` is zero.
pub fn merge(x: FrobeniusLabel, y: FrobeniusLabel) -> Option<FrobeniusLabel> {
    use FrobeniusLabel::*;
    match (x, y) {
        (One, One) => Some(One),
        (One, X) | (X, One) => Some(X),
        (X, X) => None,
    }
}

/// Comultiplication `A → A ⊗ A`, all coefficients `+1`.
pub fn split(x: FrobeniusLabel) -> Vec<(FrobeniusLabel, FrobeniusLabel)> {
    use FrobeniusLabel::*;
    match x {
        One => vec![(One, X), (X, One)],
        X => vec![(X, X)],
    }
}

/// The trace `A → Z`: capping a circle off with a disk.
pub fn trace(x: FrobeniusLabel) -> i64 {
    match x {
        FrobeniusLabel::One => 0,
        FrobeniusLabel::X => 1,
    }
}

/// The unit `Z → A`: a newborn circle carries `1`.
pub fn unit() -> FrobeniusLabel {
    FrobeniusLabel::One
}

/// Nodes and edges of a closed one-manifold; every node has degree two.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedDiagram {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl ClosedDiagram {
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut deg = vec![0u32; n_nodes];
        for &(u, v) in &edges {
            if u >= n_nodes || v >= n_nodes {
                return Err(Error::Construction(format!("edge ({u},{v}) out of range")));
            }
            deg[u] += 1;
            deg[v] += 1;
        }
        if deg.iter().any(|&d| d != 2) {
            return Err(Error::Construction("every node of a closed diagram needs degree two".into()));
        }
        Ok(Self { n_nodes, edges })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Circle label of every node, and the number of circles.
    pub fn node_circles(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.n_nodes);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.labels()
    }

    pub fn circle_count(&self) -> usize {
        self.node_circles().1
    }

    /// Internal degree `#X − #1` of a labeling.
    pub fn label_degree(&self, mask: u64) -> i64 {
        let r = self.circle_count() as i64;
        2 * mask.count_ones() as i64 - r
    }

    fn apply(&mut self, step: &SaddleStep) {
        self.edges[step.remove[0]] = step.add[0];
        self.edges[step.remove[1]] = step.add[1];
    }
}

/// A saddle: two edges are cut and their four endpoints rejoined in pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaddleStep {
    /// Middle-matching arc this saddle contracts.
    pub arc: usize,
    pub remove: [usize; 2],
    pub add: [(usize, usize); 2],
}

/// An ordered list of saddles.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SurgerySchedule {
    pub steps: Vec<SaddleStep>,
}

impl SurgerySchedule {
    /// Same saddles applied in the order given by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self { steps: perm.iter().map(|&i| self.steps[i].clone()).collect() }
    }

    /// The contracted arcs, in application order.
    pub fn arc_ids(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.arc).collect()
    }
}

/// Integer combination of labelings of one fixed diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TqftCombo<C: Coeff = i64> {
    terms: BTreeMap<u64, C>,
}

impl<C: Coeff> Default for TqftCombo<C> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> TqftCombo<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(mask: u64) -> Self {
        let mut c = Self::zero();
        c.add_term(mask, C::one());
        c
    }

    pub fn add_term(&mut self, mask: u64, c: C) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(C::zero);
        *entry = entry.add_ck(&c);
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn terms(&self) -> &BTreeMap<u64, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Applies the saddles of `schedule` to `v`, a combination of labelings of
/// `diagram`. Returns the final diagram and the image of `v`, labeled
/// against the final diagram's circle numbering.
pub fn evaluate_contraction<C: Coeff>(
    diagram: &ClosedDiagram,
    v: &TqftCombo<C>,
    schedule: &SurgerySchedule,
) -> Result<(ClosedDiagram, TqftCombo<C>)> {
    let mut cur = diagram.clone();
    let mut val = v.clone();
    for step in &schedule.steps {
        let (next, out) = saddle(&cur, &val, step)?;
        cur = next;
        val = out;
    }
    Ok((cur, val))
}

fn saddle<C: Coeff>(diagram: &ClosedDiagram, v: &TqftCombo<C>, step: &SaddleStep) -> Result<(ClosedDiagram, TqftCombo<C>)> {
    let [e1, e2] = step.remove;
    if e1 == e2 || e1 >= diagram.edges.len() || e2 >= diagram.edges.len() {
        return Err(Error::Structural(format!("saddle edges {e1},{e2} invalid")));
    }
    let mut before: Vec<usize> = [diagram.edges[e1], diagram.edges[e2]].iter().flat_map(|&(u, v)| [u, v]).collect();
    let mut after: Vec<usize> = step.add.iter().flat_map(|&(u, v)| [u, v]).collect();
    before.sort_unstable();
    after.sort_unstable();
    if before != after {
        return Err(Error::Structural("saddle does not reconnect the cut endpoints".into()));
    }
    let (old_nc, _) = diagram.node_circles();
    let mut next = diagram.clone();
    next.apply(step);
    let (new_nc, _) = next.node_circles();

    let o1 = old_nc[diagram.edges[e1].0];
    let o2 = old_nc[diagram.edges[e2].0];
    let n1 = new_nc[step.add[0].0];
    let n2 = new_nc[step.add[1].0];
    // every untouched circle survives unchanged; record where it goes
    let mut carry: Vec<(usize, usize)> = Vec::new();
    let mut seen = vec![false; old_nc.len()];
    for node in 0..diagram.n_nodes {
        let oc = old_nc[node];
        if oc != o1 && oc != o2 && !seen[oc] {
            seen[oc] = true;
            carry.push((oc, new_nc[node]));
        }
    }
    let moved = |mask: u64| -> u64 { carry.iter().fold(0u64, |acc, &(o, n)| acc | (((mask >> o) & 1) << n)) };

    let mut out = TqftCombo::zero();
    if o1 != o2 && n1 == n2 {
        for (&mask, c) in &v.terms {
            let x = FrobeniusLabel::from_bit((mask >> o1) & 1 == 1);
            let y = FrobeniusLabel::from_bit((mask >> o2) & 1 == 1);
            if let Some(z) = merge(x, y) {
                out.add_term(moved(mask) | ((z.bit() as u64) << n1), c.clone());
            }
        }
    } else if o1 == o2 && n1 != n2 {
        for (&mask, c) in &v.terms {
            let x = FrobeniusLabel::from_bit((mask >> o1) & 1 == 1);
            for (y, z) in split(x) {
                out.add_term(moved(mask) | ((y.bit() as u64) << n1) | ((z.bit() as u64) << n2), c.clone());
            }
        }
    } else {
        return Err(Error::Structural(format!("saddle on arc {} is neither a merge nor a split", step.arc)));
    }
    Ok((next, out))
}

/// Re-expresses a labeling of `source` against `target`, where both
/// diagrams have the same circles up to the node correspondence
/// `node_map[target node] = source node`.
pub fn transfer_labels<C: Coeff>(
    source: &ClosedDiagram,
    v: &TqftCombo<C>,
    target: &ClosedDiagram,
    node_map: &[usize],
) -> Result<TqftCombo<C>> {
    let (snc, sr) = source.node_circles();
    let (tnc, tr) = target.node_circles();
    let mut circle_map = vec![usize::MAX; tr];
    let mut hit = vec![false; sr];
    for (t, &s) in node_map.iter().enumerate() {
        let tc = tnc[t];
        let sc = snc[s];
        if circle_map[tc] == usize::MAX {
            circle_map[tc] = sc;
            hit[sc] = true;
        } else if circle_map[tc] != sc {
            return Err(Error::Structural("target circle meets two source circles".into()));
        }
    }
    if circle_map.contains(&usize::MAX) || hit.contains(&false) || sr != tr {
        return Err(Error::Structural("circle structures do not correspond".into()));
    }
    let mut out = TqftCombo::zero();
    for (&mask, c) in &v.terms {
        let m = circle_map.iter().enumerate().fold(0u64, |acc, (t, &s)| acc | (((mask >> s) & 1) << t));
        out.add_term(m, c.clone());
    }
    Ok(out)
}
