//! Lowest eigenpairs of a symmetric pencil `(S, M)` with diagonal positive `M`.
//!
//! Shift-invert block Krylov: the shift `sigma` is certified to lie below the
//! spectrum by the inertia of `S - sigma M`, the Krylov space of
//! `(S - sigma M)^{-1} M` is grown a block at a time with full
//! M-reorthogonalization, and Ritz pairs are extracted from `(Q^T S Q, I)`.
//! Blocks make repeated eigenvalues come out with their full multiplicity.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ldlt::EnvelopeLdlt;
use super::sparse::{weighted_dot, CsrMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Gate on `||S v - eta M v|| / ||v||` for every returned pair.
    pub residual_tol: f64,
    pub seed: u64,
    /// Hard cap on the Krylov dimension.
    pub max_dim: usize,
    /// A value believed to lie below the spectrum. Verified by inertia; the
    /// Gershgorin bound is used when it fails.
    pub shift_hint: Option<f64>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-8, seed: 0x5eed, max_dim: 900, shift_hint: None }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPairs<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// One M-orthonormal vector per value.
    pub vectors: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    pub shift: T,
}

/// Lower bound on the generalized spectrum from Gershgorin discs of
/// `M^{-1/2} S M^{-1/2}`.
pub fn gershgorin_lower_bound<T: Real>(s: &CsrMatrix<T>, mass: &[T]) -> T {
    (0..s.nrows())
        .map(|i| {
            let mut centre = T::zero();
            let mut radius = T::zero();
            for (j, v) in s.row(i) {
                let scaled = v / (mass[i] * mass[j]).sqrt();
                if i == j {
                    centre += scaled;
                } else {
                    radius += scaled.abs();
                }
            }
            centre - radius
        })
        .fold(T::max_value().unwrap_or(T::lit(f64::MAX)), |a, b| a.min(b))
}

fn factor_below_spectrum<T: Real>(
    s: &CsrMatrix<T>,
    mass: &[T],
    hint: Option<f64>,
) -> Result<(T, EnvelopeLdlt<T>)> {
    let shifted = |sigma: T| {
        let d: Vec<T> = mass.iter().map(|&m| -sigma * m).collect();
        s.add_diagonal(&d)
    };
    if let Some(h) = hint {
        let sigma = T::lit(h);
        if let Ok(f) = EnvelopeLdlt::factor(&shifted(sigma)) {
            if f.inertia().0 == 0 {
                return Ok((sigma, f));
            }
        }
    }
    let g = gershgorin_lower_bound(s, mass);
    let sigma = g - T::lit(1e-3) * (g.abs() + T::one());
    let f = EnvelopeLdlt::factor(&shifted(sigma))?;
    if f.inertia().0 != 0 {
        return Err(Error::FactorizationFailure(0));
    }
    Ok((sigma, f))
}

fn m_orthogonalize<T: Real>(v: &mut [T], basis: &[Vec<T>], mass: &[T]) {
    for _ in 0..2 {
        for q in basis {
            let c = weighted_dot(v, mass, q);
            v.iter_mut().zip(q).for_each(|(x, &qi)| *x -= c * qi);
        }
    }
}

pub fn lowest_eigenpairs<T: Real>(
    s: &CsrMatrix<T>,
    mass: &[T],
    k: usize,
    opts: &EigenOptions,
) -> Result<EigenPairs<T>> {
    let n = s.nrows();
    if mass.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mass.len() });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("requested {k} eigenpairs of a {n}x{n} pencil")));
    }
    let (sigma, factor) = factor_below_spectrum(s, mass, opts.shift_hint)?;
    let block = (k + 4).min(n);
    let max_dim = opts.max_dim.max(2 * block).min(n);
    let tol = T::lit(opts.residual_tol);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut s_basis: Vec<Vec<T>> = Vec::new();
    let mut current: Vec<Vec<T>> = (0..block)
        .map(|_| (0..n).map(|_| T::lit(rng.random::<f64>() - 0.5)).collect())
        .collect();
    let mut worst = T::max_value().unwrap_or(T::lit(f64::MAX));

    loop {
        // orthonormalize the new block against the basis and itself
        let mut added = Vec::new();
        for mut v in current.drain(..) {
            let before = weighted_dot(&v, mass, &v).sqrt();
            m_orthogonalize(&mut v, &basis, mass);
            let norm = weighted_dot(&v, mass, &v).sqrt();
            if norm <= before * T::lit(1e-10) || norm == T::zero() {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            s_basis.push(s.mul_vec(&v));
            basis.push(v.clone());
            added.push(v);
            if basis.len() == max_dim {
                break;
            }
        }

        let dim = basis.len();
        if dim >= k {
            let projected = DMatrix::from_fn(dim, dim, |i, j| {
                let a = crate::linalg::sparse::dot(&basis[i], &s_basis[j]);
                let b = crate::linalg::sparse::dot(&basis[j], &s_basis[i]);
                (a + b) * T::lit(0.5)
            });
            let eig = SymmetricEigen::new(projected);
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
            let mut values = Vec::with_capacity(k);
            let mut vectors = Vec::with_capacity(k);
            let mut residuals = Vec::with_capacity(k);
            for &c in order.iter().take(k) {
                let eta = eig.eigenvalues[c];
                let mut v = vec![T::zero(); n];
                let mut sv = vec![T::zero(); n];
                for j in 0..dim {
                    let y = eig.eigenvectors[(j, c)];
                    for i in 0..n {
                        v[i] += y * basis[j][i];
                        sv[i] += y * s_basis[j][i];
                    }
                }
                let mut r2 = T::zero();
                let mut v2 = T::zero();
                for i in 0..n {
                    let r = sv[i] - eta * mass[i] * v[i];
                    r2 += r * r;
                    v2 += v[i] * v[i];
                }
                residuals.push((r2 / v2).sqrt());
                values.push(eta);
                vectors.push(v);
            }
            worst = residuals.iter().fold(T::zero(), |a, &b| a.max(b));
            if worst <= tol || dim == n {
                return Ok(EigenPairs { values, vectors, residuals, shift: sigma });
            }
        }
        if added.is_empty() || basis.len() >= max_dim {
            return Err(Error::EigensolverStall(worst.to_f64_lossy()));
        }
        current = added
            .iter()
            .map(|v| {
                let mv: Vec<T> = v.iter().zip(mass).map(|(&x, &m)| x * m).collect();
                factor.solve(&mv)
            })
            .collect();
    }
}
