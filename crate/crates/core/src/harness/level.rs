//! Everything the checks need at one resolution, and the identity
//! residuals computed from it. All norms are `L²(λ² dV)` over trusted
//! vertices, realized with the diagonal mass `M0`.

use nalgebra::{Matrix2, Vector3};

use crate::dec::{covariant_gradient_field, exterior_derivatives, mesh_stars, one_form_to_vertex_field_with, WeightedStars};
use crate::error::Result;
use crate::geometry::{curvature_data, shrinker_residual, trusted_max, GeometryCache};
use crate::ghf::{ghf_basis, GhfBasis, WeightModel};
use crate::homology::{tree_cotree_generators, GeneratorSet};
use crate::mesh::TriMesh;
use crate::operators::DriftOperator;

/// Values this small count as exact zeros when normalizing.
const ZERO_FLOOR: f64 = 1e-12;

pub struct Level {
    pub mesh: TriMesh<f64>,
    pub cache: GeometryCache<f64>,
    pub stars: WeightedStars<f64>,
    pub drift: DriftOperator<f64>,
    pub model: WeightModel,
    pub generators: Option<GeneratorSet>,
    pub basis: Option<GhfBasis<f64>>,
}

impl Level {
    pub fn new(mesh: TriMesh<f64>, intrinsic: bool) -> Result<Self> {
        let cache = curvature_data(&mesh)?;
        let (weight, model) = if intrinsic {
            (vec![1.0; mesh.n_vertices()], WeightModel::Unit)
        } else {
            (cache.weight.clone(), WeightModel::Gaussian)
        };
        let stars = mesh_stars(&mesh, &weight)?;
        let drift = DriftOperator::new(&mesh, &stars);
        let summary = mesh.summary();
        let (generators, basis) = if summary.boundary_loops == 0 && summary.components == 1 && summary.genus >= 1 {
            let gens = tree_cotree_generators(mesh.topology())?;
            let basis = ghf_basis(&mesh, &stars, &gens, Some(&cache), model)?;
            (Some(gens), Some(basis))
        } else {
            (None, None)
        };
        Ok(Self { mesh, cache, stars, drift, model, generators, basis })
    }

    pub fn genus(&self) -> i64 {
        self.mesh.summary().genus
    }

    pub fn is_closed(&self) -> bool {
        self.mesh.topology().is_closed()
    }

    fn trusted(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.mesh.n_vertices()).filter(|&v| self.cache.trusted[v])
    }

    /// `Σ M0 f²` over trusted vertices.
    fn sq_norm(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.trusted().map(|v| self.stars.m0[v] * f(v).powi(2)).sum()
    }

    /// `‖a‖ / ‖b‖`, or `‖a‖` alone when `b` vanishes.
    fn relative(&self, num: f64, den: f64) -> f64 {
        let (num, den) = (num.sqrt(), den.sqrt());
        if den > ZERO_FLOOR { num / den } else { num }
    }

    pub fn shrinker_gate(&self) -> f64 {
        trusted_max(&shrinker_residual(&self.cache), &self.cache.trusted).unwrap_or(0.0)
    }

    /// `sup max(κ₁², κ₂²)`.
    pub fn sup_kappa_sq(&self) -> f64 {
        let c = &self.cache;
        self.trusted().map(|v| c.kappa1[v].powi(2).max(c.kappa2[v].powi(2))).fold(0.0, f64::max)
    }

    /// `sup |κ₁² − κ₂²|`.
    pub fn delta(&self) -> f64 {
        let c = &self.cache;
        self.trusted().map(|v| (c.kappa1[v].powi(2) - c.kappa2[v].powi(2)).abs()).fold(0.0, f64::max)
    }

    pub fn inf_x_sq(&self) -> f64 {
        self.trusted().map(|v| self.mesh.position(v).norm_squared()).fold(f64::INFINITY, f64::min)
    }

    /// Dual field `W` and its covariant gradient for each basis form.
    fn ghf_fields(&self) -> Result<Vec<(Vec<Vector3<f64>>, Vec<Matrix2<f64>>)>> {
        let Some(basis) = &self.basis else { return Ok(Vec::new()) };
        basis
            .forms
            .iter()
            .map(|f| {
                let w = one_form_to_vertex_field_with(&self.mesh, &self.cache.normals, f);
                let g = covariant_gradient_field(&self.mesh, &self.cache, &w)?;
                Ok((w, g))
            })
            .collect()
    }

    fn shape_apply(&self, v: usize, w: &Vector3<f64>) -> Vector3<f64> {
        let s = self.cache.shape[v] * self.cache.to_frame(v, w);
        self.cache.from_frame(v, &s)
    }

    /// `∫λ²|∇W|²` against `∫λ²(|SW|² − ½|W|²)`; worst relative mismatch
    /// over the basis, with the two integrals of the worst form.
    pub fn integrated_bochner(&self) -> Result<Option<(f64, f64, f64)>> {
        let mut worst: Option<(f64, f64, f64)> = None;
        for (w, g) in self.ghf_fields()? {
            let (mut lhs, mut rhs) = (0.0, 0.0);
            for v in self.trusted() {
                let m = self.stars.m0[v];
                lhs += m * g[v].norm_squared();
                rhs += m * (self.shape_apply(v, &w[v]).norm_squared() - 0.5 * w[v].norm_squared());
            }
            let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(ZERO_FLOOR);
            if worst.is_none_or(|(r, _, _)| rel > r) {
                worst = Some((rel, lhs, rhs));
            }
        }
        Ok(worst)
    }

    /// `ℒ^E W = −2<∇ω, S> n + ½W − 2S²W` for each basis form.
    pub fn drift_of_dual_field(&self) -> Result<Option<f64>> {
        let mut worst: Option<f64> = None;
        for (w, g) in self.ghf_fields()? {
            let le = self.drift.apply_field(&w);
            let rhs: Vec<Vector3<f64>> = (0..w.len())
                .map(|v| {
                    let pair = g[v].component_mul(&self.cache.shape[v]).sum();
                    let s2w = self.shape_apply(v, &self.shape_apply(v, &w[v]));
                    self.cache.normals[v] * (-2.0 * pair) + w[v] * 0.5 - s2w * 2.0
                })
                .collect();
            let rel = self.relative(self.sq_norm(|v| (le[v] - rhs[v]).norm()), self.sq_norm(|v| rhs[v].norm()));
            worst = Some(worst.map_or(rel, |x: f64| x.max(rel)));
        }
        Ok(worst)
    }

    /// `<∇ω, ∇dx^a> = −n^a <∇ω, A>` for `ω = d(x₁² + x₁x₂ + x₂x₃)`.
    pub fn hessian_pairing(&self) -> Result<f64> {
        let g: Vec<f64> = self.mesh.positions().iter().map(|p| p.x * p.x + p.x * p.y + p.y * p.z).collect();
        let omega = exterior_derivatives(self.mesh.topology()).d0.apply(&g);
        let normals = &self.cache.normals;
        let w = one_form_to_vertex_field_with(&self.mesh, normals, &omega);
        let gw = covariant_gradient_field(&self.mesh, &self.cache, &w)?;
        let pair: Vec<f64> = (0..w.len()).map(|v| gw[v].component_mul(&self.cache.shape[v]).sum()).collect();
        let mut err = 0.0;
        for a in 0..3 {
            let grad_xa: Vec<Vector3<f64>> =
                normals.iter().map(|n| Vector3::ith(a, 1.0) - n * n[a]).collect();
            let ga = covariant_gradient_field(&self.mesh, &self.cache, &grad_xa)?;
            err += self.sq_norm(|v| gw[v].component_mul(&ga[v]).sum() + normals[v][a] * pair[v]);
        }
        // Cauchy-Schwarz bound on the right side; |∇ω| alone on flat pieces
        let bound = self.sq_norm(|v| gw[v].norm() * self.cache.a2[v].sqrt());
        let den = if bound.sqrt() > ZERO_FLOOR { bound } else { self.sq_norm(|v| gw[v].norm()) };
        Ok(self.relative(err, den))
    }

    /// `sup |ℒ|x|² − (4 − |x|²)| / (1 + |x|²)`, and the same with `L`.
    pub fn drift_of_radius(&self) -> (f64, f64) {
        let f: Vec<f64> = self.mesh.positions().iter().map(|p| p.norm_squared()).collect();
        let lf = self.drift.apply(&f);
        let (mut drift, mut stability) = (0.0f64, 0.0f64);
        for v in self.trusted() {
            let target = 4.0 - f[v];
            let with_potential = lf[v] + (0.5 + self.cache.a2[v]) * f[v];
            drift = drift.max((lf[v] - target).abs() / (1.0 + f[v]));
            stability = stability.max((with_potential - target).abs() / (1.0 + f[v]));
        }
        (drift, stability)
    }

    /// `Lu = ℒu + (½ + |A|²)u`.
    fn stability_apply(&self, u: &[f64]) -> Vec<f64> {
        self.drift.apply(u).into_iter().zip(u).zip(&self.cache.a2).map(|((l, &x), &a)| l + (0.5 + a) * x).collect()
    }

    /// Relative residuals of `LH = H` and of `L<v, n> = ½<v, n>` summed
    /// over the coordinate directions.
    pub fn stability_eigenfunctions(&self) -> (f64, f64) {
        let h = &self.cache.mean;
        let lh = self.stability_apply(h);
        let mean = self.relative(self.sq_norm(|v| lh[v] - h[v]), self.sq_norm(|v| h[v]));
        let (mut err, mut norm) = (0.0, 0.0);
        for a in 0..3 {
            let u: Vec<f64> = self.cache.normals.iter().map(|n| n[a]).collect();
            let lu = self.stability_apply(&u);
            err += self.sq_norm(|v| lu[v] - 0.5 * u[v]);
            norm += self.sq_norm(|v| u[v]);
        }
        (mean, self.relative(err, norm))
    }

    /// Worst pointwise co-closedness residual over the basis.
    pub fn pointwise_el(&self) -> Option<f64> {
        let b = self.basis.as_ref()?;
        b.diagnostics.iter().filter_map(|d| d.pointwise_el_residual).reduce(f64::max)
    }
}
