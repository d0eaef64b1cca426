//! Exact sparse row reduction over the rationals.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::rational::Q;

pub type SparseVec = BTreeMap<usize, Q>;

pub fn add_scaled(target: &mut SparseVec, c: &Q, v: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        let e = target.entry(*k).or_insert_with(Q::zero);
        *e += c * x;
        if e.is_zero() {
            target.remove(k);
        }
    }
}

/// Row echelon form maintained incrementally. The pivot of a row is its
/// smallest column, so the pivot set is an invariant of the row space.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Reduces `v` so that it has no entry in a pivot column.
    pub fn reduce(&self, v: &mut SparseVec) {
        let mut cursor = 0usize;
        loop {
            let next = v
                .range(cursor..)
                .find(|(k, _)| self.pivot_row.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((col, c)) = next else { break };
            let row = &self.rows[self.pivot_row[&col]];
            add_scaled(v, &-c, row);
            cursor = col + 1;
        }
    }

    /// Adds `v` to the row space; returns false if it was already contained.
    pub fn insert(&mut self, mut v: SparseVec) -> bool {
        self.reduce(&mut v);
        let Some((&lead, c)) = v.iter().next() else {
            return false;
        };
        if !c.is_one() {
            let inv = c.recip();
            for x in v.values_mut() {
                *x *= &inv;
            }
        }
        self.pivot_row.insert(lead, self.rows.len());
        self.rows.push(v);
        true
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }
}

#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub values: Vec<Q>,
    pub rank: usize,
    pub free: Vec<usize>,
}

/// Solves `sum_j a_ij u_j = b_i` exactly. Free unknowns are set to zero.
/// Returns `Err(rank)` when the system is inconsistent.
pub fn solve_affine(rows: &[(SparseVec, Q)], n: usize) -> Result<AffineSolution, usize> {
    solve_affine_with(rows, n, |_| Q::zero())
}

/// As [`solve_affine`], with the free unknowns set by `free_value`.
pub fn solve_affine_with(
    rows: &[(SparseVec, Q)],
    n: usize,
    free_value: impl Fn(usize) -> Q,
) -> Result<AffineSolution, usize> {
    let mut ech = Echelon::new();
    for (a, b) in rows {
        let mut v = a.clone();
        if !b.is_zero() {
            v.insert(n, b.clone());
        }
        ech.insert(v);
    }
    if ech.is_pivot(n) {
        return Err(ech.rank() - 1);
    }
    let mut values: Vec<Q> = (0..n).map(|j| if ech.is_pivot(j) { Q::zero() } else { free_value(j) }).collect();
    let mut pivots: Vec<usize> = ech.pivots().collect();
    pivots.sort_unstable_by(|a, b| b.cmp(a));
    for p in &pivots {
        let row = &ech.rows()[ech.pivot_row[p]];
        let mut x = row.get(&n).cloned().unwrap_or_else(Q::zero);
        for (j, c) in row.range(p + 1..n) {
            x -= c * &values[*j];
        }
        values[*p] = x;
    }
    let free = (0..n).filter(|j| !ech.is_pivot(*j)).collect();
    Ok(AffineSolution { values, rank: ech.rank(), free })
}
