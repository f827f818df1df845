//! The drift Laplacian `ℒ = Δ − ½∇_{x^T}` and the stability operator
//! `L = ℒ + ½ + |A|²` as symmetric pencils over the weighted mass.
//!
//! `ℒf = −M0⁻¹ S_λ f`, which makes `ℒ` self-adjoint for `M0` by
//! construction. Eigenvalues follow the Rayleigh-quotient convention:
//! `η = φᵀSφ / φᵀMφ`, so `Lφ = −ηφ`.

use nalgebra::Vector3;
use serde_json::{json, Value};

use crate::dec::{exterior_derivatives, weighted_stiffness, WeightedStars};
use crate::error::{Error, Result};
use crate::geometry::GeometryCache;
use crate::linalg::eigen::{self, EigenOptions};
use crate::linalg::{CsrMatrix, EnvelopeLdlt};
use crate::mesh::TriMesh;
use crate::scalar::Real;

/// Eigenvalues at or above this count as non-negative in the index.
pub const INDEX_THRESHOLD: f64 = -1e-9;
/// Largest pencil whose inertia count is confirmed by the eigensolver.
pub const CROSS_CHECK_LIMIT: usize = 2000;

#[derive(Clone, Debug)]
pub struct DriftOperator<T> {
    pub stiffness: CsrMatrix<T>,
    pub m0: Vec<T>,
}

impl<T: Real> DriftOperator<T> {
    pub fn new(mesh: &TriMesh<T>, stars: &WeightedStars<T>) -> Self {
        let d0 = exterior_derivatives(mesh.topology()).d0;
        Self { stiffness: weighted_stiffness(stars, &d0), m0: stars.m0.clone() }
    }

    pub fn apply(&self, f: &[T]) -> Vec<T> {
        self.stiffness.mul_vec(f).into_iter().zip(&self.m0).map(|(s, &m)| -s / m).collect()
    }

    /// Componentwise `ℒ^E W = (ℒ W^a) ∂_a`.
    pub fn apply_field(&self, field: &[Vector3<T>]) -> Vec<Vector3<T>> {
        let mut out = vec![Vector3::zeros(); field.len()];
        for a in 0..3 {
            let comp: Vec<T> = field.iter().map(|w| w[a]).collect();
            for (o, v) in out.iter_mut().zip(self.apply(&comp)) {
                o[a] = v;
            }
        }
        out
    }
}

pub fn drift_apply<T: Real>(mesh: &TriMesh<T>, stars: &WeightedStars<T>, f: &[T]) -> Vec<T> {
    DriftOperator::new(mesh, stars).apply(f)
}

pub fn apply_le_to_field<T: Real>(mesh: &TriMesh<T>, stars: &WeightedStars<T>, field: &[Vector3<T>]) -> Vec<Vector3<T>> {
    DriftOperator::new(mesh, stars).apply_field(field)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Keep every vertex (closed meshes, or natural conditions).
    Natural,
    /// Eliminate boundary vertices.
    Dirichlet,
}

/// `Q(φ) = φᵀSφ` against the norm `φᵀMφ`, on the retained vertices.
#[derive(Clone, Debug)]
pub struct SymmetricPencil<T> {
    pub s: CsrMatrix<T>,
    pub m: Vec<T>,
    /// Original vertex of each retained row.
    pub dofs: Vec<usize>,
    pub n_vertices: usize,
    /// A value known to lie below the spectrum, if any.
    pub lower_bound: Option<f64>,
}

impl<T: Real> SymmetricPencil<T> {
    /// Pencil `(S_λ − M0·diag(potential), M0)`.
    pub fn with_potential(stiffness: &CsrMatrix<T>, m0: &[T], potential: &[T], boundary: Boundary, is_boundary: impl Fn(usize) -> bool) -> Self {
        let shift: Vec<T> = m0.iter().zip(potential).map(|(&m, &p)| -m * p).collect();
        let s = stiffness.add_diagonal(&shift);
        let n = m0.len();
        let dofs: Vec<usize> = match boundary {
            Boundary::Natural => (0..n).collect(),
            Boundary::Dirichlet => (0..n).filter(|&v| !is_boundary(v)).collect(),
        };
        let (s, m) = if dofs.len() == n {
            (s, m0.to_vec())
        } else {
            (s.principal_submatrix(&dofs), dofs.iter().map(|&v| m0[v]).collect())
        };
        let top = potential.iter().fold(T::zero(), |a, &b| a.max(b)).to_f64_lossy();
        Self { s, m, dofs, n_vertices: n, lower_bound: Some(-top - 1.0) }
    }

    pub fn dim(&self) -> usize {
        self.dofs.len()
    }

    pub fn quadratic_form(&self, phi: &[T]) -> T {
        crate::linalg::dot(phi, &self.s.mul_vec(phi))
    }

    pub fn rayleigh_quotient(&self, phi: &[T]) -> T {
        self.quadratic_form(phi) / crate::linalg::weighted_dot(phi, &self.m, phi)
    }

    /// The operator `−M⁻¹S`; for the stability pencil this is `L`.
    pub fn operator_apply(&self, phi: &[T]) -> Vec<T> {
        self.s.mul_vec(phi).into_iter().zip(&self.m).map(|(s, &m)| -s / m).collect()
    }

    /// Restrict a vertex function to the retained rows.
    pub fn restrict(&self, f: &[T]) -> Vec<T> {
        self.dofs.iter().map(|&v| f[v]).collect()
    }

    /// Extend by zero to all vertices.
    pub fn extend(&self, f: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_vertices];
        for (&v, &x) in self.dofs.iter().zip(f) {
            out[v] = x;
        }
        out
    }
}

/// Stability pencil with potential `|A|² + ½`.
pub fn build_l_pencil<T: Real>(
    mesh: &TriMesh<T>,
    stars: &WeightedStars<T>,
    cache: &GeometryCache<T>,
    boundary: Boundary,
) -> SymmetricPencil<T> {
    let potential: Vec<T> = cache.a2.iter().map(|&a| a + T::lit(0.5)).collect();
    let drift = DriftOperator::new(mesh, stars);
    let topo = mesh.topology();
    SymmetricPencil::with_potential(&drift.stiffness, &stars.m0, &potential, boundary, |v| topo.is_boundary_vertex(v))
}

/// Drift pencil `(S_λ, M0)` with no potential.
pub fn build_drift_pencil<T: Real>(mesh: &TriMesh<T>, stars: &WeightedStars<T>, boundary: Boundary) -> SymmetricPencil<T> {
    let drift = DriftOperator::new(mesh, stars);
    let topo = mesh.topology();
    let zero = vec![T::zero(); mesh.n_vertices()];
    SymmetricPencil::with_potential(&drift.stiffness, &stars.m0, &zero, boundary, |v| topo.is_boundary_vertex(v))
}

#[derive(Clone, Debug)]
pub struct SpectrumResult<T> {
    /// Ascending Rayleigh-quotient eigenvalues `η`.
    pub eigenvalues: Vec<T>,
    /// M-orthonormal, extended by zero to all vertices.
    pub eigenvectors: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    pub shift: T,
}

impl<T: Real> SpectrumResult<T> {
    pub const CONVENTION: &'static str = "rayleigh";

    pub fn to_json(&self) -> Value {
        let f = |v: &[T]| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<f64>>();
        json!({
            "convention": Self::CONVENTION,
            "eigenvalues": f(&self.eigenvalues),
            "residuals": f(&self.residuals),
        })
    }
}

pub fn lowest_eigenpairs<T: Real>(pencil: &SymmetricPencil<T>, k: usize, opts: &EigenOptions) -> Result<SpectrumResult<T>> {
    let n = pencil.dim();
    if k == 0 || k > (n / 10).max(1) {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={} for {n} unknowns", (n / 10).max(1))));
    }
    raw_eigenpairs(pencil, k, opts)
}

fn raw_eigenpairs<T: Real>(pencil: &SymmetricPencil<T>, k: usize, opts: &EigenOptions) -> Result<SpectrumResult<T>> {
    let mut opts = *opts;
    if opts.shift_hint.is_none() {
        opts.shift_hint = pencil.lower_bound;
    }
    let pairs = eigen::lowest_eigenpairs(&pencil.s, &pencil.m, k, &opts)?;
    Ok(SpectrumResult {
        eigenvalues: pairs.values,
        eigenvectors: pairs.vectors.iter().map(|v| pencil.extend(v)).collect(),
        residuals: pairs.residuals,
        shift: pairs.shift,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MorseIndex {
    /// Eigenvalues below `INDEX_THRESHOLD`, by inertia.
    pub index: usize,
    /// The same count from the eigensolver, for small pencils.
    pub eigen_count: Option<usize>,
}

impl MorseIndex {
    pub fn consistent(&self) -> bool {
        self.eigen_count.is_none_or(|c| c == self.index)
    }
}

/// Negative-eigenvalue count from the inertia of `S − τM`, `τ = INDEX_THRESHOLD`.
pub fn morse_index<T: Real>(pencil: &SymmetricPencil<T>, opts: &EigenOptions) -> Result<MorseIndex> {
    let tau = T::lit(INDEX_THRESHOLD);
    let shift: Vec<T> = pencil.m.iter().map(|&m| -tau * m).collect();
    let factor = EnvelopeLdlt::factor(&pencil.s.add_diagonal(&shift))?;
    let index = factor.inertia().0;
    let n = pencil.dim();
    let eigen_count = if n <= CROSS_CHECK_LIMIT {
        let k = (index + 2).min(n);
        let spec = raw_eigenpairs(pencil, k, opts)?;
        Some(spec.eigenvalues.iter().filter(|&&e| e < tau).count())
    } else {
        None
    };
    Ok(MorseIndex { index, eigen_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::mesh_stars;
    use crate::mesh::tests::tetrahedron;

    #[test]
    fn drift_kills_constants_and_is_self_adjoint() {
        let m = tetrahedron();
        let stars = mesh_stars(&m, &[1.0, 0.5, 0.7, 0.9]).unwrap();
        let d = DriftOperator::new(&m, &stars);
        assert!(d.apply(&[2.0; 4]).iter().all(|x| x.abs() < 1e-14));
        let f = [1.0, -2.0, 0.5, 3.0];
        let g = [0.3, 0.1, -1.0, 2.0];
        let lhs = crate::linalg::weighted_dot(&f, &d.m0, &d.apply(&g));
        let rhs = crate::linalg::weighted_dot(&g, &d.m0, &d.apply(&f));
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
