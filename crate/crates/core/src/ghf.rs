//! Gaussian harmonic one-forms: the weighted-energy minimizer in each
//! cohomology class.
//!
//! Writing `ω = ω0 + d0 f`, stationarity of `ωᵀ star1 ω` in `f` is
//! `S_λ f = -d0ᵀ star1 ω0`, i.e. `δ_λ ω = 0`. The system is singular only
//! along the constants, which conjugate gradient deflates.

use nalgebra::{DMatrix, Vector3};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dec::{
    covariant_gradient_field, exterior_derivatives, one_form_to_vertex_field_with, weighted_codifferential,
    weighted_stiffness, ExteriorDerivatives, WeightedStars,
};
use crate::error::{Error, Result};
use crate::geometry::GeometryCache;
use crate::homology::{periods, GeneratorSet};
use crate::linalg::{cg, weighted_dot, CgOptions, CsrMatrix};
use crate::mesh::TriMesh;
use crate::scalar::Real;

/// Relative size of `d1 ω` above which a form is rejected as not closed.
const CLOSED_TOL: f64 = 1e-10;

/// Reusable assembly for many classes on one mesh.
pub struct GhfSolver<'a, T> {
    pub stars: &'a WeightedStars<T>,
    pub d: ExteriorDerivatives,
    pub stiffness: CsrMatrix<T>,
    pub cg: CgOptions,
}

impl<'a, T: Real> GhfSolver<'a, T> {
    pub fn new(mesh: &TriMesh<T>, stars: &'a WeightedStars<T>) -> Self {
        let d = exterior_derivatives(mesh.topology());
        let stiffness = weighted_stiffness(stars, &d.d0);
        Self { stars, d, stiffness, cg: CgOptions::default() }
    }

    pub fn with_cg(mut self, cg: CgOptions) -> Self {
        self.cg = cg;
        self
    }

    /// `max |d1 ω| / max |ω|`.
    pub fn closedness(&self, omega: &[T]) -> T {
        let curl = self.d.d1.apply(omega);
        let top = curl.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
        let scale = omega.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
        if scale > T::zero() { top / scale } else { top }
    }

    /// The potential `f` (mean zero) with `ω0 + d0 f` co-closed.
    pub fn potential(&self, omega0: &[T]) -> Result<Vec<T>> {
        if omega0.len() != self.d.d0.nrows() {
            return Err(Error::DimensionMismatch { expected: self.d.d0.nrows(), got: omega0.len() });
        }
        let c = self.closedness(omega0);
        if c > T::lit(CLOSED_TOL) {
            return Err(Error::NotClosedForm(c.to_f64_lossy()));
        }
        let flux: Vec<T> = omega0.iter().zip(&self.stars.star1).map(|(&w, &s)| -w * s).collect();
        let rhs = self.d.d0.apply_transpose(&flux);
        Ok(cg::solve(&self.stiffness, &rhs, &self.cg)?.x)
    }

    pub fn minimize(&self, omega0: &[T]) -> Result<Vec<T>> {
        let f = self.potential(omega0)?;
        let df = self.d.d0.apply(&f);
        Ok(omega0.iter().zip(df).map(|(&a, b)| a + b).collect())
    }

    /// `‖δ_λ ω‖_{M0} / ‖ω‖_{star1}`.
    pub fn coclosedness(&self, omega: &[T]) -> T {
        let delta = weighted_codifferential(omega, self.stars, &self.d.d0);
        let num = weighted_dot(&delta, &self.stars.m0, &delta).sqrt();
        let den = self.stars.energy(omega).sqrt();
        if den > T::zero() { num / den } else { num }
    }
}

pub fn minimize_in_class<T: Real>(mesh: &TriMesh<T>, stars: &WeightedStars<T>, omega0: &[T]) -> Result<Vec<T>> {
    GhfSolver::new(mesh, stars).minimize(omega0)
}

/// How `∇ log λ²` is modelled in the pointwise co-closedness residual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightModel {
    /// `λ² = exp(-|x|²/4)`, so `∇ log λ² = -x^T / 2`.
    Gaussian,
    /// `λ ≡ 1`.
    Unit,
}

#[derive(Clone, Debug, Serialize)]
pub struct GhfDiagnostics {
    pub closedness_residual: f64,
    pub coclosedness_residual: f64,
    /// `‖tr ∇W + <∇ log λ², W>‖ / ‖W‖` in `L²(λ² dV)`; `None` without a cache.
    pub pointwise_el_residual: Option<f64>,
    pub energy: f64,
}

/// Pointwise divergence residual `tr ∇W − ½ <W, x^T>` per vertex.
pub fn pointwise_el<T: Real>(
    mesh: &TriMesh<T>,
    cache: &GeometryCache<T>,
    omega: &[T],
    model: WeightModel,
) -> Result<(Vec<Vector3<T>>, Vec<T>)> {
    let w = one_form_to_vertex_field_with(mesh, &cache.normals, omega);
    let grad = covariant_gradient_field(mesh, cache, &w)?;
    let half = T::lit(0.5);
    let r = (0..mesh.n_vertices())
        .map(|v| match model {
            WeightModel::Gaussian => grad[v].trace() - half * w[v].dot(&cache.x_t[v]),
            WeightModel::Unit => grad[v].trace(),
        })
        .collect();
    Ok((w, r))
}

/// Relative pointwise residual over trusted vertices, weighted by `M0`.
pub fn pointwise_el_norm<T: Real>(
    mesh: &TriMesh<T>,
    cache: &GeometryCache<T>,
    stars: &WeightedStars<T>,
    omega: &[T],
    model: WeightModel,
) -> Result<f64> {
    let (w, r) = pointwise_el(mesh, cache, omega, model)?;
    let (mut num, mut den) = (T::zero(), T::zero());
    for v in (0..mesh.n_vertices()).filter(|&v| cache.trusted[v]) {
        num += stars.m0[v] * r[v] * r[v];
        den += stars.m0[v] * w[v].norm_squared();
    }
    Ok(if den > T::zero() { (num / den).sqrt() } else { num.sqrt() }.to_f64_lossy())
}

pub fn ghf_diagnostics<T: Real>(
    mesh: &TriMesh<T>,
    cache: Option<&GeometryCache<T>>,
    stars: &WeightedStars<T>,
    omega: &[T],
    model: WeightModel,
) -> Result<GhfDiagnostics> {
    GhfSolver::new(mesh, stars).diagnostics(mesh, cache, omega, model)
}

impl<T: Real> GhfSolver<'_, T> {
    pub fn diagnostics(
        &self,
        mesh: &TriMesh<T>,
        cache: Option<&GeometryCache<T>>,
        omega: &[T],
        model: WeightModel,
    ) -> Result<GhfDiagnostics> {
        let pointwise = match cache {
            Some(c) => Some(pointwise_el_norm(mesh, c, self.stars, omega, model)?),
            None => None,
        };
        Ok(GhfDiagnostics {
            closedness_residual: self.closedness(omega).to_f64_lossy(),
            coclosedness_residual: self.coclosedness(omega).to_f64_lossy(),
            pointwise_el_residual: pointwise,
            energy: self.stars.energy(omega).to_f64_lossy(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct GhfBasis<T> {
    pub forms: Vec<Vec<T>>,
    pub energies: Vec<T>,
    pub diagnostics: Vec<GhfDiagnostics>,
    /// `⟨ω_i, ω_j⟩_{star1}`.
    pub gram: DMatrix<T>,
    /// Row `i`: periods of every form over cycle `i`.
    pub periods: DMatrix<T>,
}

impl<T: Real> GhfBasis<T> {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn gram_is_positive_definite(&self) -> bool {
        self.is_empty() || self.gram.clone().cholesky().is_some()
    }

    pub fn period_determinant(&self) -> T {
        if self.is_empty() { T::one() } else { self.periods.determinant() }
    }

    pub fn to_json(&self, mesh_hash: &str) -> Value {
        let rows = |m: &DMatrix<T>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_f64_lossy()).collect()).collect()
        };
        let forms: Vec<Value> = self
            .forms
            .iter()
            .zip(&self.diagnostics)
            .map(|(f, d)| {
                let values: Vec<f64> = f.iter().map(|v| v.to_f64_lossy()).collect();
                json!({ "values": values, "diagnostics": d })
            })
            .collect();
        json!({
            "mesh_hash": mesh_hash,
            "count": self.len(),
            "forms": forms,
            "gram": rows(&self.gram),
            "periods": rows(&self.periods),
        })
    }
}

/// One minimizer per generator class, with Gram and period matrices.
pub fn ghf_basis<T: Real>(
    mesh: &TriMesh<T>,
    stars: &WeightedStars<T>,
    gens: &GeneratorSet,
    cache: Option<&GeometryCache<T>>,
    model: WeightModel,
) -> Result<GhfBasis<T>> {
    let solver = GhfSolver::new(mesh, stars);
    let forms = (0..gens.len())
        .map(|i| solver.minimize(&gens.cocycle::<T>(i)))
        .collect::<Result<Vec<_>>>()?;
    let energies: Vec<T> = forms.iter().map(|f| stars.energy(f)).collect();
    let diagnostics = forms
        .iter()
        .map(|f| solver.diagnostics(mesh, cache, f, model))
        .collect::<Result<Vec<_>>>()?;
    let n = forms.len();
    let gram = DMatrix::from_fn(n, n, |i, j| weighted_dot(&forms[i], &stars.star1, &forms[j]));
    let mut period_matrix = DMatrix::zeros(gens.cycles.len(), n);
    for (j, f) in forms.iter().enumerate() {
        for (i, p) in periods(mesh.topology(), f, &gens.cycles)?.into_iter().enumerate() {
            period_matrix[(i, j)] = p;
        }
    }
    Ok(GhfBasis { forms, energies, diagnostics, gram, periods: period_matrix })
}
