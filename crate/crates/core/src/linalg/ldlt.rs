//! Envelope (skyline) LDL^T factorization under a reverse Cuthill-McKee
//! ordering. No pivoting: by Sylvester's law the signs of the pivots give the
//! inertia of the matrix, which is what the Morse index needs.

use std::collections::VecDeque;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reverse Cuthill-McKee permutation; `perm[new] = old`.
pub fn reverse_cuthill_mckee<T: Real>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.nrows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|r| a.row(r).map(|(c, _)| c).filter(|&c| c != r).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, visited: &[bool]| -> (usize, usize) {
        // returns (last vertex of deepest level, depth)
        let mut seen = visited.to_vec();
        let mut frontier = vec![start];
        seen[start] = true;
        let mut depth = 0;
        let mut last = start;
        while !frontier.is_empty() {
            last = *frontier.iter().min_by_key(|&&v| degree[v]).unwrap();
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            depth += 1;
            frontier = next;
        }
        (last, depth)
    };

    while order.len() < n {
        let seed = (0..n).filter(|&v| !visited[v]).min_by_key(|&v| degree[v]).unwrap();
        // pseudo-peripheral start
        let mut start = seed;
        let (mut far, mut depth) = bfs_levels(start, &visited);
        for _ in 0..4 {
            let (far2, depth2) = bfs_levels(far, &visited);
            if depth2 <= depth {
                break;
            }
            start = far;
            far = far2;
            depth = depth2;
        }
        let start = if depth > 0 { far } else { start };

        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// `P A P^T = L D L^T` with `L` unit lower triangular, stored by rows over
/// the envelope of the permuted matrix.
#[derive(Clone, Debug)]
pub struct EnvelopeLdlt<T> {
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    lower: Vec<T>,
    diag: Vec<T>,
}

impl<T: Real> EnvelopeLdlt<T> {
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        Self::factor_with_ordering(a, perm)
    }

    pub fn factor_with_ordering(a: &CsrMatrix<T>, perm: Vec<usize>) -> Result<Self> {
        let n = a.nrows();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new_r, &old_r) in perm.iter().enumerate() {
            for (c, _) in a.row(old_r) {
                let nc = inv[c];
                if nc < first[new_r] {
                    first[new_r] = nc;
                }
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            offset.push(offset[i] + (i - first[i]));
        }
        let mut lower = vec![T::zero(); offset[n]];
        let mut diag = vec![T::zero(); n];
        for (new_r, &old_r) in perm.iter().enumerate() {
            for (c, v) in a.row(old_r) {
                let nc = inv[c];
                if nc < new_r {
                    lower[offset[new_r] + nc - first[new_r]] += v;
                } else if nc == new_r {
                    diag[new_r] += v;
                }
            }
        }

        let scale = if a.max_abs() > T::zero() { a.max_abs() } else { T::one() };
        let tiny = scale * T::lit(1e-14);
        for i in 0..n {
            let fi = first[i];
            let row_start = offset[i];
            // lower[row_start + (k - fi)] holds a_ik on entry; turn it into u_ik = l_ik d_k
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = lower[row_start + j - fi];
                for k in k0..j {
                    let u_ik = lower[row_start + k - fi];
                    let l_jk = lower[offset[j] + k - fj];
                    s -= u_ik * l_jk;
                }
                lower[row_start + j - fi] = s;
            }
            let mut d = diag[i];
            for k in fi..i {
                let u = lower[row_start + k - fi];
                let l = u / diag[k];
                d -= u * l;
                lower[row_start + k - fi] = l;
            }
            if d.abs() <= tiny || !d.is_finite() {
                return Err(Error::FactorizationFailure(i));
            }
            diag[i] = d;
        }
        Ok(Self { perm, first, offset, lower, diag })
    }

    /// (negative, positive) pivot counts.
    pub fn inertia(&self) -> (usize, usize) {
        let neg = self.diag.iter().filter(|&&d| d < T::zero()).count();
        (neg, self.diag.len() - neg)
    }

    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.diag.len();
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let mut s = y[i];
            for k in fi..i {
                s -= self.lower[self.offset[i] + k - fi] * y[k];
            }
            y[i] = s;
        }
        for i in 0..n {
            y[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let yi = y[i];
            for k in fi..i {
                let l = self.lower[self.offset[i] + k - fi];
                y[k] -= l * yi;
            }
        }
        let mut x = vec![T::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_laplacian(m: usize) -> CsrMatrix<f64> {
        let idx = |i: usize, j: usize| i * m + j;
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let mut push = |a: usize, b: usize| {
                    t.extend([(a, a, 1.0), (b, b, 1.0), (a, b, -1.0), (b, a, -1.0)]);
                };
                if i + 1 < m {
                    push(idx(i, j), idx(i + 1, j));
                }
                if j + 1 < m {
                    push(idx(i, j), idx(i, j + 1));
                }
            }
        }
        CsrMatrix::from_triplets(m * m, m * m, &t)
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = grid_laplacian(7);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..49).collect::<Vec<_>>());
    }

    #[test]
    fn solves_shifted_laplacian() {
        let a = grid_laplacian(12).add_diagonal(&[0.5; 144]);
        let f = EnvelopeLdlt::factor(&a).unwrap();
        assert_eq!(f.inertia(), (0, 144));
        let x_true: Vec<f64> = (0..144).map(|i| (i as f64 * 0.7).cos()).collect();
        let b = a.mul_vec(&x_true);
        let x = f.solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn inertia_matches_dense_spectrum() {
        // eigenvalues of the grid Laplacian shifted by -1.5: count those below zero
        let a = grid_laplacian(6);
        let shifted = a.add_diagonal(&[-1.5; 36]);
        let dense = nalgebra::SymmetricEigen::new(shifted.to_dense());
        let expect = dense.eigenvalues.iter().filter(|&&e| e < 0.0).count();
        let f = EnvelopeLdlt::factor(&shifted).unwrap();
        assert_eq!(f.inertia().0, expect);
    }

    #[test]
    fn singular_pivot_is_reported() {
        let a = grid_laplacian(4);
        assert!(matches!(EnvelopeLdlt::factor(&a), Err(Error::FactorizationFailure(_))));
    }
}
