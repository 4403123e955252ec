//! Exact integer linear algebra: cokernels of relation matrices.
//!
//! A cokernel `Z^n / (row span)` is computed in two phases. Rows with a unit
//! entry are used as pivots and eliminated sparsely; whatever survives lives
//! in the non-pivot columns and is brought to Smith normal form densely.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::scalar::Coeff;

/// Dense integer matrix with labeled rows and columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix<C: Coeff = BigInt> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<C>>,
}

impl<C: Coeff> IntMatrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![vec![C::zero(); cols]; rows] }
    }

    pub fn from_rows(data: Vec<Vec<C>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Self { rows, cols, data }
    }

    /// Diagonal of the Smith normal form, nonzero entries only, each dividing
    /// the next, all positive.
    pub fn smith_diagonal(&self) -> Vec<C> {
        let mut a = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut diag = Vec::new();
        let mut t = 0;
        while t < rows.min(cols) {
            // smallest nonzero entry in the remaining block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            loop {
                let p = a[t][t].clone();
                let mut dirty = false;
                for i in t + 1..rows {
                    let (q, r) = a[i][t].div_mod_floor(&p);
                    if !q.is_zero() {
                        for j in t..cols {
                            let v = a[i][j].sub_ck(&q.mul_ck(&a[t][j]));
                            a[i][j] = v;
                        }
                    }
                    if !r.is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..cols {
                    let (q, r) = a[t][j].div_mod_floor(&p);
                    if !q.is_zero() {
                        for i in t..rows {
                            let v = a[i][j].sub_ck(&q.mul_ck(&a[i][t]));
                            a[i][j] = v;
                        }
                    }
                    if !r.is_zero() {
                        dirty = true;
                    }
                }
                if !dirty {
                    // pivot divides its row and column; check it divides the rest
                    let bad = (t + 1..rows).find_map(|i| (t + 1..cols).find(|&j| !a[i][j].is_multiple_of(&p)).map(|j| (i, j)));
                    match bad {
                        None => break,
                        Some((i, _)) => {
                            for j in t..cols {
                                let v = a[t][j].add_ck(&a[i][j]);
                                a[t][j] = v;
                            }
                            continue;
                        }
                    }
                }
                // move the smallest nonzero entry of row/column t to the pivot
                let mut best = (t, t);
                for i in t..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
            diag.push(a[t][t].abs());
            t += 1;
        }
        diag
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.smith_diagonal().len()
    }
}

/// Free rank and torsion invariants of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub rank: usize,
    /// Invariant factors greater than one, as decimal strings.
    pub torsion: Vec<String>,
}

impl AbelianGroup {
    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

/// Sparse row over `i64`, keyed by column.
pub type SparseRow = BTreeMap<usize, i64>;

fn axpy(target: &mut SparseRow, c: i64, src: &SparseRow) {
    for (&j, &x) in src {
        let e = target.entry(j).or_insert(0);
        *e = e.add_ck(&c.mul_ck(&x));
        if *e == 0 {
            target.remove(&j);
        }
    }
}

/// Cokernel of the map `Z^rows → Z^n` whose image is spanned by `relations`.
pub fn cokernel(n: usize, relations: impl IntoIterator<Item = SparseRow>) -> AbelianGroup {
    // pivot rows are fully reduced: they contain no other pivot column
    let mut pivots: HashMap<usize, SparseRow> = HashMap::new();
    let mut occurs: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    let mut leftover: Vec<SparseRow> = Vec::new();

    fn reduce(row: &mut SparseRow, pivots: &HashMap<usize, SparseRow>) {
        let hits: Vec<(usize, i64)> = row.iter().filter(|(j, _)| pivots.contains_key(j)).map(|(&j, &c)| (j, c)).collect();
        for (j, c) in hits {
            axpy(row, -c, &pivots[&j]);
        }
    }

    fn add_pivot(row: SparseRow, pivots: &mut HashMap<usize, SparseRow>, occurs: &mut HashMap<usize, BTreeSet<usize>>) -> bool {
        let Some((&j, &c)) = row.iter().find(|(_, c)| c.abs() == 1) else {
            return false;
        };
        let row: SparseRow = row.into_iter().map(|(k, x)| (k, x * c)).collect();
        if let Some(users) = occurs.remove(&j) {
            for p in users {
                let pr = pivots.get_mut(&p).unwrap();
                let Some(&coef) = pr.get(&j) else { continue };
                let before: Vec<usize> = pr.keys().copied().collect();
                axpy(pr, -coef, &row);
                for k in before {
                    if !pr.contains_key(&k) {
                        if let Some(s) = occurs.get_mut(&k) {
                            s.remove(&p);
                        }
                    }
                }
                for &k in pr.keys() {
                    if k != p {
                        occurs.entry(k).or_default().insert(p);
                    }
                }
            }
        }
        for &k in row.keys() {
            if k != j {
                occurs.entry(k).or_default().insert(j);
            }
        }
        pivots.insert(j, row);
        true
    }

    for mut row in relations {
        reduce(&mut row, &pivots);
        if row.is_empty() {
            continue;
        }
        if !add_pivot(row.clone(), &mut pivots, &mut occurs) {
            leftover.push(row);
        }
    }
    // later pivots may expose units in earlier leftovers
    loop {
        let mut progressed = false;
        let mut still = Vec::new();
        for mut row in std::mem::take(&mut leftover) {
            reduce(&mut row, &pivots);
            if row.is_empty() {
                progressed = true;
                continue;
            }
            if add_pivot(row.clone(), &mut pivots, &mut occurs) {
                progressed = true;
            } else {
                still.push(row);
            }
        }
        leftover = still;
        if !progressed {
            break;
        }
    }

    let free_cols: Vec<usize> = (0..n).filter(|j| !pivots.contains_key(j)).collect();
    let pos: HashMap<usize, usize> = free_cols.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    let dense: Vec<Vec<BigInt>> = leftover
        .iter()
        .map(|row| {
            let mut v = vec![BigInt::zero(); free_cols.len()];
            for (j, &c) in row {
                v[pos[j]] = BigInt::from(c);
            }
            v
        })
        .collect();
    let diag = if dense.is_empty() { Vec::new() } else { IntMatrix::from_rows(dense).smith_diagonal() };
    let torsion = diag.iter().filter(|d| !d.is_one()).map(|d| d.to_string()).collect();
    AbelianGroup { rank: free_cols.len() - diag.len(), torsion }
}

/// Determinant by fraction-free elimination over any exact integral domain
/// with exact division.
pub fn bareiss_det<T, F>(mut a: Vec<Vec<T>>, zero: T, one: T, div_exact: F) -> T
where
    T: Clone + PartialEq + std::ops::Neg<Output = T>,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T> + std::ops::Sub<&'x T, Output = T>,
    F: Fn(&T, &T) -> T,
{
    let n = a.len();
    if n == 0 {
        return one;
    }
    let mut sign = false;
    let mut prev = one;
    for k in 0..n - 1 {
        if a[k][k] == zero {
            let Some(s) = (k + 1..n).find(|&i| a[i][k] != zero) else { return zero };
            a.swap(k, s);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = div_exact(&num, &prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}
