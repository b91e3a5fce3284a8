//! Exact integer matrices.
//!
//! All arithmetic is checked `i64`; any overflow surfaces as
//! [`Error::OverflowDetected`] instead of wrapping.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

#[inline]
fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::OverflowDetected)
}

#[inline]
fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::OverflowDetected)
}

/// `a - q * b`, checked.
#[inline]
fn sub_mul(a: i64, q: i64, b: i64) -> Result<i64> {
    a.checked_sub(mul(q, b)?).ok_or(Error::OverflowDetected)
}

/// Sparse integer matrix stored by columns; each column holds its nonzero
/// `(row, value)` entries sorted by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for (j, col) in m.columns.iter_mut().enumerate() {
            col.push((j, 1));
        }
        m
    }

    /// From row-major nested vectors.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.columns[j].push((i, v));
                }
            }
        }
        m
    }

    /// From sparse columns; entries are summed and zeros dropped.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Result<Self> {
        let cols = columns.len();
        let mut out = Vec::with_capacity(cols);
        for col in columns {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (i, v) in col {
                assert!(i < rows, "row index {i} out of range {rows}");
                let e = acc.entry(i).or_insert(0);
                *e = add(*e, v)?;
            }
            out.push(acc.into_iter().filter(|&(_, v)| v != 0).collect());
        }
        Ok(Self {
            rows,
            cols,
            columns: out,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.columns[j]
            .binary_search_by_key(&i, |&(r, _)| r)
            .map_or(0, |k| self.columns[j][k].1)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] = v;
            }
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut cols = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                cols[i].push((j, v));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            columns: cols,
        }
    }

    /// Keeps only the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut row_pos = vec![usize::MAX; self.rows];
        for (k, &i) in rows.iter().enumerate() {
            row_pos[i] = k;
        }
        let columns = cols
            .iter()
            .map(|&j| {
                let mut c: Vec<(usize, i64)> = self.columns[j]
                    .iter()
                    .filter(|&&(i, _)| row_pos[i] != usize::MAX)
                    .map(|&(i, v)| (row_pos[i], v))
                    .collect();
                c.sort_unstable();
                c
            })
            .collect();
        Self {
            rows: rows.len(),
            cols: cols.len(),
            columns,
        }
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &IntegerMatrix) -> Result<IntegerMatrix> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut columns = Vec::with_capacity(rhs.cols);
        for rcol in &rhs.columns {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(k, b) in rcol {
                for &(i, a) in &self.columns[k] {
                    let e = acc.entry(i).or_insert(0);
                    *e = add(*e, mul(a, b)?)?;
                }
            }
            columns.push(acc.into_iter().filter(|&(_, v)| v != 0).collect());
        }
        Ok(IntegerMatrix {
            rows: self.rows,
            cols: rhs.cols,
            columns,
        })
    }

    /// `self * v` for a dense vector.
    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        let mut out = vec![0; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            if v[j] == 0 {
                continue;
            }
            for &(i, a) in col {
                out[i] = add(out[i], mul(a, v[j])?)?;
            }
        }
        Ok(out)
    }
}

/// Invariant factors `d_1 | d_2 | …` (all positive) of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub factors: Vec<u64>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Factors greater than one, i.e. the torsion they contribute to a cokernel.
    pub fn torsion(&self) -> Vec<u64> {
        self.factors.iter().copied().filter(|&d| d > 1).collect()
    }
}

/// Invariant factors of `m`.
///
/// Unit pivots are eliminated sparsely first (row operations only clear the
/// pivot column; the pivot row is then removed, which column operations would
/// achieve without touching other entries). Whatever remains has no unit
/// entries and is finished by a dense smallest-pivot reduction.
pub fn smith_normal_form(m: &IntegerMatrix) -> Result<SmithForm> {
    let mut work = SparseWork::new(m);
    let units = work.eliminate_units()?;
    let mut rest = work.remaining_dense();
    let mut factors = vec![1u64; units];
    factors.extend(dense_smith(&mut rest)?);
    factors.sort_unstable();
    Ok(SmithForm { factors })
}

pub fn rank(m: &IntegerMatrix) -> Result<usize> {
    Ok(smith_normal_form(m)?.rank())
}

struct SparseWork {
    rows: Vec<BTreeMap<usize, i64>>,
    col_rows: Vec<BTreeSet<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
}

impl SparseWork {
    fn new(m: &IntegerMatrix) -> Self {
        let mut rows = vec![BTreeMap::new(); m.rows];
        let mut col_rows = vec![BTreeSet::new(); m.cols];
        for (j, col) in m.columns.iter().enumerate() {
            for &(i, v) in col {
                rows[i].insert(j, v);
                col_rows[j].insert(i);
            }
        }
        Self {
            rows,
            col_rows,
            row_alive: vec![true; m.rows],
            col_alive: vec![true; m.cols],
        }
    }

    /// Returns the number of unit pivots eliminated.
    fn eliminate_units(&mut self) -> Result<usize> {
        let mut count = 0;
        loop {
            let mut progress = false;
            for c in 0..self.col_rows.len() {
                if !self.col_alive[c] {
                    continue;
                }
                let pivot = self.col_rows[c]
                    .iter()
                    .copied()
                    .filter(|&r| self.rows[r][&c].abs() == 1)
                    .min_by_key(|&r| self.rows[r].len());
                let Some(p) = pivot else { continue };
                self.pivot_on(p, c)?;
                count += 1;
                progress = true;
            }
            if !progress {
                return Ok(count);
            }
        }
    }

    fn pivot_on(&mut self, p: usize, c: usize) -> Result<()> {
        let pv = self.rows[p][&c];
        let pivot_row: Vec<(usize, i64)> = self.rows[p].iter().map(|(&j, &v)| (j, v)).collect();
        let others: Vec<usize> = self.col_rows[c].iter().copied().filter(|&r| r != p).collect();
        for r in others {
            // pv = ±1, so the multiplier is exact.
            let q = mul(self.rows[r][&c], pv)?;
            for &(j, v) in &pivot_row {
                let entry = self.rows[r].get(&j).copied().unwrap_or(0);
                let nv = sub_mul(entry, q, v)?;
                if nv == 0 {
                    self.rows[r].remove(&j);
                    self.col_rows[j].remove(&r);
                } else {
                    self.rows[r].insert(j, nv);
                    self.col_rows[j].insert(r);
                }
            }
        }
        for &(j, _) in &pivot_row {
            self.col_rows[j].remove(&p);
        }
        self.rows[p].clear();
        self.row_alive[p] = false;
        self.col_alive[c] = false;
        Ok(())
    }

    fn remaining_dense(&self) -> Vec<Vec<i64>> {
        let cols: Vec<usize> = (0..self.col_rows.len())
            .filter(|&c| self.col_alive[c] && !self.col_rows[c].is_empty())
            .collect();
        let mut col_pos = vec![usize::MAX; self.col_rows.len()];
        for (k, &c) in cols.iter().enumerate() {
            col_pos[c] = k;
        }
        self.rows
            .iter()
            .enumerate()
            .filter(|(r, row)| self.row_alive[*r] && !row.is_empty())
            .map(|(_, row)| {
                let mut dense = vec![0; cols.len()];
                for (&j, &v) in row {
                    dense[col_pos[j]] = v;
                }
                dense
            })
            .collect()
    }
}

/// Dense Smith reduction in place; returns the nonzero invariant factors.
fn dense_smith(a: &mut [Vec<i64>]) -> Result<Vec<u64>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut factors = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero magnitude in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && best.is_none_or(|(bi, bj)| v.unsigned_abs() < a[bi][bj].unsigned_abs()) {
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
            let mut dirty = false;
            for i in (t + 1)..m {
                if a[i][t] == 0 {
                    continue;
                }
                let q = a[i][t] / a[t][t];
                for j in t..n {
                    a[i][j] = sub_mul(a[i][j], q, a[t][j])?;
                }
                if a[i][t] != 0 {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            for j in (t + 1)..n {
                if a[t][j] == 0 {
                    continue;
                }
                let q = a[t][j] / a[t][t];
                for row in a.iter_mut().skip(t) {
                    row[j] = sub_mul(row[j], q, row[t])?;
                }
                if a[t][j] != 0 {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Row and column clear; enforce divisibility of the trailing block.
            let d = a[t][t];
            let offender = ((t + 1)..m).find(|&i| ((t + 1)..n).any(|j| a[i][j] % d != 0));
            match offender {
                Some(i) => {
                    for j in t..n {
                        a[t][j] = add(a[t][j], a[i][j])?;
                    }
                }
                None => break,
            }
        }
        factors.push(a[t][t].unsigned_abs());
        t += 1;
    }
    Ok(factors)
}

/// A `Z`-basis of the integer kernel of a matrix, with a way to express
/// kernel vectors in that basis.
#[derive(Clone, Debug)]
pub struct IntegerKernel {
    /// Basis vectors, each of length `cols` of the source matrix.
    pub basis: Vec<Vec<i64>>,
    /// Rank of the source matrix.
    pub rank: usize,
    /// Rows of `V⁻¹` for the kernel columns of the unimodular `V`.
    coordinate_rows: Vec<Vec<i64>>,
}

impl IntegerKernel {
    /// Coordinates of `v` in [`Self::basis`]. `None` if `v` is not in the kernel
    /// lattice (the reconstruction does not reproduce `v`).
    pub fn coordinates(&self, v: &[i64]) -> Result<Option<Vec<i64>>> {
        let mut coords = Vec::with_capacity(self.coordinate_rows.len());
        for row in &self.coordinate_rows {
            let mut s = 0i64;
            for (a, b) in row.iter().zip(v) {
                if *a != 0 && *b != 0 {
                    s = add(s, mul(*a, *b)?)?;
                }
            }
            coords.push(s);
        }
        let mut back = vec![0i64; v.len()];
        for (c, vec) in coords.iter().zip(&self.basis) {
            if *c == 0 {
                continue;
            }
            for (k, x) in vec.iter().enumerate() {
                back[k] = add(back[k], mul(*c, *x)?)?;
            }
        }
        Ok((back == v).then_some(coords))
    }
}

/// Column-style Hermite reduction with unimodular tracking: finds unimodular
/// `V` with `M V = [H | 0]`; the trailing columns of `V` span the kernel.
pub fn integer_kernel(m: &IntegerMatrix) -> Result<IntegerKernel> {
    let mut a = m.to_dense();
    let n = m.cols();
    let rows = m.rows();
    // v: columns of V, stored as v[col][row]; vinv stored by rows.
    let mut v: Vec<Vec<i64>> = (0..n).map(|j| unit(n, j)).collect();
    let mut vinv: Vec<Vec<i64>> = (0..n).map(|j| unit(n, j)).collect();
    let mut pc = 0;
    for i in 0..rows {
        if pc == n {
            break;
        }
        loop {
            let best = (pc..n)
                .filter(|&j| a[i][j] != 0)
                .min_by_key(|&j| a[i][j].unsigned_abs());
            let Some(j) = best else { break };
            if j != pc {
                for row in a.iter_mut() {
                    row.swap(pc, j);
                }
                v.swap(pc, j);
                vinv.swap(pc, j);
            }
            let mut clean = true;
            for k in (pc + 1)..n {
                if a[i][k] == 0 {
                    continue;
                }
                let q = a[i][k] / a[i][pc];
                // col_k -= q col_pc
                for row in a.iter_mut() {
                    row[k] = sub_mul(row[k], q, row[pc])?;
                }
                let (lo, hi) = v.split_at_mut(k);
                for (x, y) in hi[0].iter_mut().zip(&lo[pc]) {
                    *x = sub_mul(*x, q, *y)?;
                }
                // Inverse: row_pc(V⁻¹) += q row_k(V⁻¹)
                let (lo, hi) = vinv.split_at_mut(k);
                for (x, y) in lo[pc].iter_mut().zip(&hi[0]) {
                    *x = add(*x, mul(q, *y)?)?;
                }
                if a[i][k] != 0 {
                    clean = false;
                }
            }
            if clean {
                pc += 1;
                break;
            }
        }
    }
    Ok(IntegerKernel {
        basis: v[pc..].to_vec(),
        rank: pc,
        coordinate_rows: vinv[pc..].to_vec(),
    })
}

fn unit(n: usize, j: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[j] = 1;
    e
}
