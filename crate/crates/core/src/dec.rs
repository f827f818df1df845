//! Weighted discrete exterior calculus on triangle meshes.
//!
//! Cochains are plain vectors: 0-cochains on vertices, 1-cochains on edges
//! oriented from the lower to the higher vertex index, 2-cochains on faces.
//! The Hodge stars carry the Gaussian weight, so the discrete Dirichlet
//! form `(d0 f)^T star1 (d0 g)` approximates `∫ λ² <∇f, ∇g> dV`.
//! Stars are built from edge lengths only; positions never enter.

use nalgebra::{DMatrix, Matrix2, Rotation3, Unit, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{k_ring, vertex_normals, GeometryCache};
use crate::linalg::{weighted_gram, CsrMatrix, Incidence};
use crate::mesh::{Topology, TriMesh};
use crate::scalar::Real;

pub type Cochain0<T> = Vec<T>;
pub type Cochain1<T> = Vec<T>;
pub type Cochain2<T> = Vec<T>;

/// Signed incidence matrices `d0: E×V` and `d1: F×E`.
#[derive(Clone, Debug)]
pub struct ExteriorDerivatives {
    pub d0: Incidence,
    pub d1: Incidence,
}

pub fn exterior_derivatives(topology: &Topology) -> ExteriorDerivatives {
    let d0_rows = topology.edges().iter().map(|&[i, j]| vec![(i, -1), (j, 1)]).collect();
    let d1_rows = (0..topology.n_faces())
        .map(|f| topology.face_edges(f).to_vec())
        .collect();
    ExteriorDerivatives {
        d0: Incidence::new(topology.n_edges(), topology.n_vertices(), d0_rows),
        d1: Incidence::new(topology.n_faces(), topology.n_edges(), d1_rows),
    }
}

/// Diagonal weighted Hodge stars.
#[derive(Clone, Debug)]
pub struct WeightedStars<T> {
    /// `λ²_i` times the barycentric dual area.
    pub m0: Vec<T>,
    /// Cotangent weight times the mean endpoint weight.
    pub star1: Vec<T>,
    /// Unweighted barycentric dual areas.
    pub dual_areas: Vec<T>,
    /// Unweighted `½(cot α + cot β)`.
    pub cotan: Vec<T>,
}

/// Triangle area from side lengths (Kahan's stable Heron formula).
fn heron<T: Real>(a: T, b: T, c: T) -> T {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    p.max(T::zero()).sqrt() * T::lit(0.25)
}

pub fn weighted_stars<T: Real>(topology: &Topology, lengths: &[T], weight: &[T]) -> Result<WeightedStars<T>> {
    if lengths.len() != topology.n_edges() {
        return Err(Error::DimensionMismatch { expected: topology.n_edges(), got: lengths.len() });
    }
    if weight.len() != topology.n_vertices() {
        return Err(Error::DimensionMismatch { expected: topology.n_vertices(), got: weight.len() });
    }
    if let Some(v) = weight.iter().position(|&w| !(w > T::zero())) {
        return Err(Error::NonPositiveWeight(v));
    }
    let mut dual_areas = vec![T::zero(); topology.n_vertices()];
    let mut cotan = vec![T::zero(); topology.n_edges()];
    let quarter = T::lit(0.25);
    for (f, face) in topology.faces().iter().enumerate() {
        let fe = topology.face_edges(f);
        // edge k is opposite corner (k + 2) % 3
        let l = [lengths[fe[0].0], lengths[fe[1].0], lengths[fe[2].0]];
        let area = heron(l[0], l[1], l[2]);
        if !(area > T::zero()) {
            return Err(Error::DegenerateFace(f));
        }
        for &v in face {
            dual_areas[v] += area / T::lit(3.0);
        }
        for k in 0..3 {
            let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
            // half the cotangent of the angle opposite side a
            cotan[fe[k].0] += (b * b + c * c - a * a) * quarter / area * T::lit(0.5);
        }
    }
    let m0 = dual_areas.iter().zip(weight).map(|(&a, &w)| a * w).collect();
    let star1 = topology
        .edges()
        .iter()
        .zip(&cotan)
        .map(|(&[i, j], &c)| c * (weight[i] + weight[j]) * T::lit(0.5))
        .collect();
    Ok(WeightedStars { m0, star1, dual_areas, cotan })
}

/// Stars of an embedded (or periodic) mesh for the given vertex weight.
pub fn mesh_stars<T: Real>(mesh: &TriMesh<T>, weight: &[T]) -> Result<WeightedStars<T>> {
    weighted_stars(mesh.topology(), &mesh.edge_lengths(), weight)
}

impl<T: Real> WeightedStars<T> {
    /// `Σ M0`, the discrete weighted area.
    pub fn total_mass(&self) -> T {
        self.m0.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// `ω^T star1 ω`.
    pub fn energy(&self, omega: &[T]) -> T {
        crate::linalg::weighted_dot(omega, &self.star1, omega)
    }
}

/// `δ_λ ω = -M0⁻¹ d0ᵀ star1 ω`.
pub fn weighted_codifferential<T: Real>(omega: &[T], stars: &WeightedStars<T>, d0: &Incidence) -> Vec<T> {
    let flux: Vec<T> = omega.iter().zip(&stars.star1).map(|(&w, &s)| w * s).collect();
    d0.apply_transpose(&flux)
        .into_iter()
        .zip(&stars.m0)
        .map(|(div, &m)| -div / m)
        .collect()
}

/// `S_λ = d0ᵀ star1 d0`.
pub fn weighted_stiffness<T: Real>(stars: &WeightedStars<T>, d0: &Incidence) -> CsrMatrix<T> {
    weighted_gram(d0, &stars.star1)
}

/// Face-constant Whitney vector of a 1-cochain, sampled at the barycentre.
pub fn whitney_face_vectors<T: Real>(mesh: &TriMesh<T>, omega: &[T]) -> Vec<Vector3<T>> {
    let topo = mesh.topology();
    (0..topo.n_faces())
        .map(|f| {
            let p = mesh.face_corners(f);
            let n2 = mesh.face_normal_scaled(f); // |n2| = 2A
            let area2 = n2.norm_squared();
            // ∇φ_k = n2 × (p_{k+2} − p_{k+1}) / |n2|²
            let grad: [Vector3<T>; 3] =
                std::array::from_fn(|k| n2.cross(&(p[(k + 2) % 3] - p[(k + 1) % 3])) / area2);
            let mut w = Vector3::zeros();
            for (k, &(e, sign)) in topo.face_edges(f).iter().enumerate() {
                // edge k runs from corner k to corner k+1
                let value = omega[e] * T::lit(sign as f64);
                w += (grad[(k + 1) % 3] - grad[k]) * value;
            }
            w / T::lit(3.0)
        })
        .collect()
}

/// Vertex vector field dual to a 1-cochain: Whitney vectors averaged over
/// incident faces by area, then projected onto the vertex tangent planes.
pub fn one_form_to_vertex_field<T: Real>(mesh: &TriMesh<T>, omega: &[T]) -> Vec<Vector3<T>> {
    one_form_to_vertex_field_with(mesh, &vertex_normals(mesh), omega)
}

pub fn one_form_to_vertex_field_with<T: Real>(
    mesh: &TriMesh<T>,
    normals: &[Vector3<T>],
    omega: &[T],
) -> Vec<Vector3<T>> {
    let faces = whitney_face_vectors(mesh, omega);
    let topo = mesh.topology();
    (0..topo.n_vertices())
        .map(|v| {
            let mut acc = Vector3::zeros();
            let mut total = T::zero();
            for &f in topo.vertex_faces(v) {
                let a = mesh.face_area(f);
                acc += faces[f] * a;
                total += a;
            }
            let w = acc / total;
            let n = normals[v];
            w - n * n.dot(&w)
        })
        .collect()
}

/// Rotation carrying unit vector `from` onto `to` about their common normal.
fn minimal_rotation<T: Real>(from: &Vector3<T>, to: &Vector3<T>) -> Rotation3<T> {
    let axis = from.cross(to);
    let s = axis.norm();
    let c = from.dot(to);
    if s <= T::lit(1e-14) {
        return Rotation3::identity();
    }
    Rotation3::from_axis_angle(&Unit::new_unchecked(axis / s), s.atan2(c))
}

/// Per-vertex covariant derivative `G[u][v] = <∇_{t_u} W, t_v>` in the
/// cache's tangent frame, from a least-squares fit of the transported
/// field over the 2-ring. Quadratic terms are fitted and discarded when
/// the ring is large enough, which keeps the estimate second order.
pub fn covariant_gradient_field<T: Real>(
    mesh: &TriMesh<T>,
    cache: &GeometryCache<T>,
    field: &[Vector3<T>],
) -> Result<Vec<Matrix2<T>>> {
    (0..mesh.n_vertices())
        .map(|v| covariant_gradient_at(mesh, cache, field, v))
        .collect()
}

fn covariant_gradient_at<T: Real>(
    mesh: &TriMesh<T>,
    cache: &GeometryCache<T>,
    field: &[Vector3<T>],
    v: usize,
) -> Result<Matrix2<T>> {
    let n = cache.normals[v];
    let [t1, t2] = cache.frames[v];
    let mut samples: Vec<(Vector2<T>, Vector2<T>)> = vec![(Vector2::zeros(), cache.to_frame(v, &field[v]))];
    for w in k_ring(mesh, v, 2) {
        let d = mesh.displacement(v, w);
        let r = minimal_rotation(&cache.normals[w], &n);
        let moved = r * field[w];
        samples.push((Vector2::new(d.dot(&t1), d.dot(&t2)), Vector2::new(moved.dot(&t1), moved.dot(&t2))));
    }
    let scale = samples.iter().map(|(p, _)| p.norm()).fold(T::zero(), |a, b| a + b)
        / T::from_count(samples.len() - 1).max(T::one());
    if !(scale > T::zero()) {
        return Err(Error::FrameDegenerate(v));
    }
    for quadratic in [true, false] {
        let cols = if quadratic { 6 } else { 3 };
        if samples.len() < cols + 2 {
            continue;
        }
        let mut a = DMatrix::zeros(samples.len(), cols);
        let mut b = DMatrix::zeros(samples.len(), 2);
        for (row, (p, val)) in samples.iter().enumerate() {
            let (x, y) = (p.x / scale, p.y / scale);
            a[(row, 0)] = T::one();
            a[(row, 1)] = x;
            a[(row, 2)] = y;
            if quadratic {
                a[(row, 3)] = x * x;
                a[(row, 4)] = x * y;
                a[(row, 5)] = y * y;
            }
            b[(row, 0)] = val.x;
            b[(row, 1)] = val.y;
        }
        let svd = a.svd(true, true);
        let sv = &svd.singular_values;
        let (hi, lo) = (sv.max(), sv.min());
        if !(lo > hi * T::lit(1e-9)) {
            continue;
        }
        let coef = svd.solve(&b, T::zero()).map_err(|_| Error::FrameDegenerate(v))?;
        // coef[(1 + u, c)] = ∂_u W^c · scale
        return Ok(Matrix2::new(coef[(1, 0)], coef[(1, 1)], coef[(2, 0)], coef[(2, 1)]) / scale);
    }
    Err(Error::FrameDegenerate(v))
}

/// `<∇ω, A> = Σ G_uv S_uv` per vertex.
pub fn pair_with_shape<T: Real>(grad: &[Matrix2<T>], cache: &GeometryCache<T>) -> Vec<T> {
    grad.iter().zip(&cache.shape).map(|(g, s)| g.component_mul(s).sum()).collect()
}
