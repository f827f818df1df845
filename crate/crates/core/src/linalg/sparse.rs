//! Compressed sparse row storage for real and signed-integer matrices.

use std::fmt::Write as _;

use crate::scalar::Real;

/// Real sparse matrix in CSR layout with sorted, deduplicated columns per row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Assembles from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![T::zero(); triplets.len()];
        for &(r, c, v) in triplets {
            cols[fill[r]] = c;
            vals[fill[r]] = v;
            fill[r] += 1;
        }

        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, T)> = Vec::new();
        for r in 0..nrows {
            scratch.clear();
            scratch.extend((counts[r]..counts[r + 1]).map(|k| (cols[k], vals[k])));
            scratch.sort_by_key(|e| e.0);
            for &(c, v) in &scratch {
                match col_idx.last() {
                    Some(&last) if last == c && col_idx.len() > row_ptr[r] => {
                        let n = values.len();
                        values[n - 1] += v;
                    }
                    _ => {
                        col_idx.push(c);
                        values.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates the stored entries of one row as (column, value).
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.nrows)
            .map(|r| self.row(r).fold(T::zero(), |a, (_, v)| a + v.abs()))
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }

    /// Largest |A_ij - A_ji| over stored entries.
    pub fn asymmetry(&self) -> T {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Returns `self + diag(d)`.
    pub fn add_diagonal(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.nrows);
        let mut t: Vec<_> = self.triplets().collect();
        t.extend(d.iter().enumerate().map(|(i, &v)| (i, i, v)));
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Symmetric restriction to the listed indices (in the given order).
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.ncols];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut t = Vec::new();
        for (new_r, &old_r) in keep.iter().enumerate() {
            for (c, v) in self.row(old_r) {
                if map[c] != usize::MAX {
                    t.push((new_r, map[c], v));
                }
            }
        }
        Self::from_triplets(keep.len(), keep.len(), &t)
    }

    /// Coordinate text dump, one `row col value` line per stored entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "% {} {} {}", self.nrows, self.ncols, self.nnz());
        for (r, c, v) in self.triplets() {
            let _ = writeln!(s, "{r} {c} {:.17e}", v.to_f64_lossy());
        }
        s
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<T> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }
}

/// Sparse matrix with entries in {-1, 0, +1}, used for coboundary operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, i8)>>,
}

impl Incidence {
    pub fn new(nrows: usize, ncols: usize, rows: Vec<Vec<(usize, i8)>>) -> Self {
        assert_eq!(rows.len(), nrows);
        Self { nrows, ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[(usize, i8)] {
        &self.rows[r]
    }

    pub fn apply<T: Real>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        self.rows
            .iter()
            .map(|row| {
                row.iter().fold(T::zero(), |acc, &(c, s)| {
                    if s > 0 {
                        acc + x[c]
                    } else {
                        acc - x[c]
                    }
                })
            })
            .collect()
    }

    pub fn apply_transpose<T: Real>(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.nrows);
        let mut x = vec![T::zero(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, s) in row {
                if s > 0 {
                    x[c] += y[r];
                } else {
                    x[c] -= y[r];
                }
            }
        }
        x
    }

    pub fn apply_int(&self, x: &[i64]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, s)| s as i64 * x[c]).sum())
            .collect()
    }

    /// Exact integer product `self * rhs`, entries kept even when they cancel to zero.
    pub fn compose(&self, rhs: &Incidence) -> Vec<Vec<(usize, i64)>> {
        assert_eq!(self.ncols, rhs.nrows);
        self.rows
            .iter()
            .map(|row| {
                let mut acc: Vec<(usize, i64)> = Vec::new();
                for &(mid, s) in row {
                    for &(c, t) in &rhs.rows[mid] {
                        match acc.iter_mut().find(|e| e.0 == c) {
                            Some(e) => e.1 += (s as i64) * (t as i64),
                            None => acc.push((c, (s as i64) * (t as i64))),
                        }
                    }
                }
                acc.sort_by_key(|e| e.0);
                acc
            })
            .collect()
    }

    pub fn to_csr<T: Real>(&self) -> CsrMatrix<T> {
        let t: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, s)| (r, c, T::lit(s as f64))))
            .collect();
        CsrMatrix::from_triplets(self.nrows, self.ncols, &t)
    }
}

/// `A^T diag(w) A` for an incidence matrix `A`.
pub fn weighted_gram<T: Real>(a: &Incidence, w: &[T]) -> CsrMatrix<T> {
    assert_eq!(w.len(), a.nrows());
    let mut t = Vec::with_capacity(4 * a.nrows());
    for r in 0..a.nrows() {
        let row = a.row(r);
        for &(i, si) in row {
            for &(j, sj) in row {
                let s = T::lit((si as i32 * sj as i32) as f64);
                t.push((i, j, s * w[r]));
            }
        }
    }
    CsrMatrix::from_triplets(a.ncols(), a.ncols(), &t)
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn weighted_dot<T: Real>(a: &[T], w: &[T], b: &[T]) -> T {
    a.iter().zip(w).zip(b).fold(T::zero(), |acc, ((&x, &m), &y)| acc + x * m * y)
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let m = CsrMatrix::from_triplets(2, 3, &[(0, 2, 1.0), (0, 0, 2.0), (0, 2, 3.0), (1, 1, -1.0)]);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 2), 4.0);
        assert_eq!(m.row(0).map(|e| e.0).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![6.0, -1.0]);
    }

    #[test]
    fn transpose_and_gram() {
        let a = Incidence::new(2, 3, vec![vec![(0, -1), (1, 1)], vec![(1, -1), (2, 1)]]);
        let g = weighted_gram(&a, &[2.0, 3.0]);
        assert_eq!(g.get(1, 1), 5.0);
        assert_eq!(g.get(0, 1), -2.0);
        assert_eq!(g.mul_vec(&[1.0; 3]), vec![0.0; 3]);
        assert_eq!(g.asymmetry(), 0.0);
        let at = a.to_csr::<f64>().transpose();
        assert_eq!(at.get(2, 1), 1.0);
        assert_eq!(a.apply_transpose(&[1.0, 1.0]), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn coordinate_text_lists_entries() {
        let m = CsrMatrix::from_diagonal(&[1.5f64, 2.0]);
        let s = m.to_coordinate_text();
        assert!(s.starts_with("% 2 2 2"));
        assert_eq!(s.lines().count(), 3);
    }
}
