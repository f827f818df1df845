//! Pointwise extrinsic geometry of a surface in 3-space.
//!
//! Principal curvatures come from a least-squares height-function jet
//! (degree 4 by default, quadric on request) over the 2-ring of each
//! vertex, with the normal re-tilted by the fitted gradient. Sign convention: the shape operator is
//! `S(X) = ∇_X n`, so a sphere of radius r with outward normal has
//! `κ = 1/r` and the mean curvature vector `-Δx` equals `H n`.

use nalgebra::{DMatrix, DVector, Matrix2, Vector3};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::scalar::Real;

/// Per-vertex geometric quantities.
#[derive(Clone, Debug)]
pub struct GeometryCache<T> {
    /// Gaussian weight `exp(-|x|^2 / 4)`.
    pub weight: Vec<T>,
    pub normals: Vec<Vector3<T>>,
    /// Orthonormal tangent frame; `(t1, t2, n)` is right-handed.
    pub frames: Vec<[Vector3<T>; 2]>,
    /// Shape operator in the tangent frame.
    pub shape: Vec<Matrix2<T>>,
    pub kappa1: Vec<T>,
    pub kappa2: Vec<T>,
    pub mean: Vec<T>,
    pub gauss: Vec<T>,
    pub a2: Vec<T>,
    pub x_t: Vec<Vector3<T>>,
    pub x_n: Vec<Vector3<T>>,
    /// False within a two-ring collar of the boundary.
    pub trusted: Vec<bool>,
}

pub fn gaussian_weight<T: Real>(mesh: &TriMesh<T>) -> Vec<T> {
    mesh.positions()
        .iter()
        .map(|p| (-p.norm_squared() * T::lit(0.25)).exp())
        .collect()
}

/// Unit normals from angle-weighted face normals, following face winding.
pub fn vertex_normals<T: Real>(mesh: &TriMesh<T>) -> Vec<Vector3<T>> {
    let mut acc = vec![Vector3::zeros(); mesh.n_vertices()];
    for (f, face) in mesh.faces().iter().enumerate() {
        let c = mesh.face_corners(f);
        let n = mesh.face_normal_scaled(f);
        let len = n.norm();
        if len == T::zero() {
            continue;
        }
        let n = n / len;
        for k in 0..3 {
            let a = c[(k + 1) % 3] - c[k];
            let b = c[(k + 2) % 3] - c[k];
            let angle = a.angle(&b);
            acc[face[k]] += n * angle;
        }
    }
    acc.into_iter().map(|n| n.normalize()).collect()
}

/// Orthonormal tangent basis for a unit normal, built by Gram-Schmidt
/// against the coordinate axis least aligned with it.
pub fn tangent_frame<T: Real>(n: &Vector3<T>) -> [Vector3<T>; 2] {
    let mut axis = 0;
    for k in 1..3 {
        if n[k].abs() < n[axis].abs() {
            axis = k;
        }
    }
    let mut e = Vector3::zeros();
    e[axis] = T::one();
    let t1 = (e - n * n.dot(&e)).normalize();
    let t2 = n.cross(&t1);
    [t1, t2]
}

/// One-ring vertices plus the far vertex across every edge opposite `v`.
pub fn ring_one_and_half<T: Real>(mesh: &TriMesh<T>, v: usize) -> Vec<usize> {
    let topo = mesh.topology();
    let mut out: Vec<usize> = topo.vertex_neighbors(v).to_vec();
    for &f in topo.vertex_faces(v) {
        let face = topo.faces()[f];
        for &(e, _) in topo.face_edges(f) {
            let [a, b] = topo.edges()[e];
            if a == v || b == v {
                continue;
            }
            for g in topo.edge_faces(e).into_iter().flatten() {
                if g == f {
                    continue;
                }
                for &w in &topo.faces()[g] {
                    if !face.contains(&w) && !out.contains(&w) && w != v {
                        out.push(w);
                    }
                }
            }
        }
    }
    out
}

/// Symmetric 2x2 eigenvalues, larger first.
pub fn sym2_eigenvalues<T: Real>(s: &Matrix2<T>) -> (T, T) {
    let half_tr = (s[(0, 0)] + s[(1, 1)]) * T::lit(0.5);
    let half_diff = (s[(0, 0)] - s[(1, 1)]) * T::lit(0.5);
    let r = (half_diff * half_diff + s[(0, 1)] * s[(0, 1)]).sqrt();
    (half_tr + r, half_tr - r)
}

struct JetFit<T> {
    normal: Vector3<T>,
    frame: [Vector3<T>; 2],
    shape: Matrix2<T>,
}

/// Local fitting parameters for [`curvature_data_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FitOptions {
    /// Total degree of the height-function polynomial (2 = quadric).
    pub degree: usize,
    pub neighborhood: Neighborhood,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighborhood {
    /// One-ring plus the far vertex across each opposite edge.
    OneAndHalfRing,
    Rings(usize),
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { degree: 4, neighborhood: Neighborhood::Rings(2) }
    }
}

/// Vertices within `rings` edge hops of `v`, excluding `v`, in BFS order.
pub fn k_ring<T: Real>(mesh: &TriMesh<T>, v: usize, rings: usize) -> Vec<usize> {
    let topo = mesh.topology();
    let mut out = Vec::new();
    let mut frontier = vec![v];
    let mut seen = std::collections::HashSet::from([v]);
    for _ in 0..rings {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in topo.vertex_neighbors(u) {
                if seen.insert(w) {
                    next.push(w);
                    out.push(w);
                }
            }
        }
        frontier = next;
    }
    out
}

fn neighborhood<T: Real>(mesh: &TriMesh<T>, v: usize, n: Neighborhood) -> Vec<usize> {
    match n {
        Neighborhood::OneAndHalfRing => ring_one_and_half(mesh, v),
        Neighborhood::Rings(k) => k_ring(mesh, v, k),
    }
}

/// Exponents `(i, j)` of the monomials `u^i w^j`, `1 <= i + j <= degree`,
/// linear terms first, then the quadratic ones.
fn monomials(degree: usize) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for total in 1..=degree as i32 {
        for j in 0..=total {
            out.push((total - j, j));
        }
    }
    out
}

fn fit_height<T: Real>(
    offsets: &[Vector3<T>],
    frame: &[Vector3<T>; 2],
    n: &Vector3<T>,
    scale: T,
    terms: &[(i32, i32)],
) -> Option<DVector<T>> {
    let rows = offsets.len();
    let local: Vec<(T, T)> =
        offsets.iter().map(|d| (d.dot(&frame[0]) / scale, d.dot(&frame[1]) / scale)).collect();
    let design = DMatrix::from_fn(rows, terms.len(), |i, k| {
        let (u, w) = local[i];
        u.powi(terms[k].0) * w.powi(terms[k].1)
    });
    let rhs = DVector::from_fn(rows, |i, _| offsets[i].dot(n) / scale);
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > smax * T::lit(1e-9)) {
        return None;
    }
    svd.solve(&rhs, T::zero()).ok()
}

fn fit_vertex<T: Real>(
    mesh: &TriMesh<T>,
    v: usize,
    ring: &[usize],
    normal: Vector3<T>,
    degree: usize,
) -> Result<JetFit<T>> {
    let offsets: Vec<Vector3<T>> = ring.iter().map(|&w| mesh.displacement(v, w)).collect();
    let scale = offsets.iter().map(|d| d.norm()).fold(T::zero(), |a, b| a + b)
        / T::from_count(ring.len().max(1));
    if !(scale > T::zero()) {
        return Err(Error::FrameDegenerate(v));
    }
    // drop the degree until the system is well posed
    let mut degree = degree;
    let terms = loop {
        let t = monomials(degree);
        if ring.len() >= t.len() + 1 && fit_height(&offsets, &tangent_frame(&normal), &normal, scale, &t).is_some() {
            break t;
        }
        if degree == 2 {
            return Err(Error::FrameDegenerate(v));
        }
        degree -= 1;
    };
    let mut n = normal;
    let mut frame = tangent_frame(&n);
    for _ in 0..3 {
        let c = fit_height(&offsets, &frame, &n, scale, &terms).ok_or(Error::FrameDegenerate(v))?;
        let tilt = frame[0] * c[0] + frame[1] * c[1];
        let new_n = (n - tilt).normalize();
        if !new_n.iter().all(|c| c.is_finite()) {
            return Err(Error::FrameDegenerate(v));
        }
        n = new_n;
        frame = tangent_frame(&n);
    }
    let c = fit_height(&offsets, &frame, &n, scale, &terms).ok_or(Error::FrameDegenerate(v))?;
    // height z = c20 u^2 + c11 u w + c02 w^2 + ...; the Hessian is the second fundamental form
    let two = T::lit(2.0);
    let inv = T::one() / scale;
    let hessian = Matrix2::new(two * c[2], c[3], c[3], two * c[4]);
    Ok(JetFit { normal: n, frame, shape: hessian * (-inv) })
}

/// Fits curvature at every vertex with the default [`FitOptions`] and fixes
/// the global normal orientation so that the area-weighted mean of
/// `<x, n>` is non-negative.
pub fn curvature_data<T: Real>(mesh: &TriMesh<T>) -> Result<GeometryCache<T>> {
    curvature_data_with(mesh, &FitOptions::default())
}

pub fn curvature_data_with<T: Real>(mesh: &TriMesh<T>, opts: &FitOptions) -> Result<GeometryCache<T>> {
    let nv = mesh.n_vertices();
    let seed_normals = vertex_normals(mesh);
    let mut normals = Vec::with_capacity(nv);
    let mut frames = Vec::with_capacity(nv);
    let mut shape = Vec::with_capacity(nv);
    for v in 0..nv {
        let ring = neighborhood(mesh, v, opts.neighborhood);
        let fit = fit_vertex(mesh, v, &ring, seed_normals[v], opts.degree)?;
        normals.push(fit.normal);
        frames.push(fit.frame);
        shape.push(fit.shape);
    }

    let areas = barycentric_areas(mesh);
    let orientation = (0..nv).fold(T::zero(), |acc, v| acc + areas[v] * mesh.position(v).dot(&normals[v]));
    let scale = mesh.bounding_box_diagonal();
    let total_area = areas.iter().fold(T::zero(), |a, &b| a + b);
    let cache = assemble(mesh, normals, frames, shape);
    if orientation < -(T::lit(1e-12) * scale * total_area) {
        return Ok(cache.flipped(mesh));
    }
    Ok(cache)
}

fn assemble<T: Real>(
    mesh: &TriMesh<T>,
    normals: Vec<Vector3<T>>,
    frames: Vec<[Vector3<T>; 2]>,
    shape: Vec<Matrix2<T>>,
) -> GeometryCache<T> {
    let nv = mesh.n_vertices();
    let collar = mesh.topology().boundary_collar(2);
    let mut cache = GeometryCache {
        weight: gaussian_weight(mesh),
        normals,
        frames,
        shape,
        kappa1: Vec::with_capacity(nv),
        kappa2: Vec::with_capacity(nv),
        mean: Vec::with_capacity(nv),
        gauss: Vec::with_capacity(nv),
        a2: Vec::with_capacity(nv),
        x_t: Vec::with_capacity(nv),
        x_n: Vec::with_capacity(nv),
        trusted: collar.iter().map(|&c| !c).collect(),
    };
    for v in 0..nv {
        let (k1, k2) = sym2_eigenvalues(&cache.shape[v]);
        cache.kappa1.push(k1);
        cache.kappa2.push(k2);
        cache.mean.push(k1 + k2);
        cache.gauss.push(k1 * k2);
        cache.a2.push(k1 * k1 + k2 * k2);
        let x = mesh.position(v);
        let n = cache.normals[v];
        let xn = n * x.dot(&n);
        cache.x_n.push(xn);
        cache.x_t.push(x - xn);
    }
    cache
}

impl<T: Real> GeometryCache<T> {
    /// Flips the normal orientation; curvature signs follow.
    pub fn flipped(&self, mesh: &TriMesh<T>) -> GeometryCache<T> {
        let normals: Vec<_> = self.normals.iter().map(|n| -n).collect();
        let frames: Vec<_> = self.frames.iter().map(|f| [f[1], f[0]]).collect();
        let shape: Vec<_> = self
            .shape
            .iter()
            .map(|s| -Matrix2::new(s[(1, 1)], s[(0, 1)], s[(1, 0)], s[(0, 0)]))
            .collect();
        let mut out = assemble(mesh, normals, frames, shape);
        out.trusted = self.trusted.clone();
        out
    }

    /// Expresses a tangent vector in the vertex frame.
    pub fn to_frame(&self, v: usize, w: &Vector3<T>) -> nalgebra::Vector2<T> {
        nalgebra::Vector2::new(w.dot(&self.frames[v][0]), w.dot(&self.frames[v][1]))
    }

    pub fn from_frame(&self, v: usize, c: &nalgebra::Vector2<T>) -> Vector3<T> {
        self.frames[v][0] * c[0] + self.frames[v][1] * c[1]
    }

    /// Per-vertex quantities as JSON arrays keyed by name.
    pub fn to_json(&self) -> Value {
        let scalars = |v: &[T]| Value::from(v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<_>>());
        let vectors = |v: &[Vector3<T>]| {
            Value::from(
                v.iter()
                    .map(|x| json!([x[0].to_f64_lossy(), x[1].to_f64_lossy(), x[2].to_f64_lossy()]))
                    .collect::<Vec<_>>(),
            )
        };
        let mut m = Map::new();
        m.insert("weight".into(), scalars(&self.weight));
        m.insert("kappa1".into(), scalars(&self.kappa1));
        m.insert("kappa2".into(), scalars(&self.kappa2));
        m.insert("mean_curvature".into(), scalars(&self.mean));
        m.insert("gauss_curvature".into(), scalars(&self.gauss));
        m.insert("a2".into(), scalars(&self.a2));
        m.insert("normal".into(), vectors(&self.normals));
        m.insert("x_tangent".into(), vectors(&self.x_t));
        m.insert("x_normal".into(), vectors(&self.x_n));
        m.insert("trusted".into(), Value::from(self.trusted.clone()));
        Value::Object(m)
    }
}

/// One third of the incident face areas at each vertex.
pub fn barycentric_areas<T: Real>(mesh: &TriMesh<T>) -> Vec<T> {
    let mut a = vec![T::zero(); mesh.n_vertices()];
    let third = T::one() / T::lit(3.0);
    for (f, face) in mesh.faces().iter().enumerate() {
        let area = mesh.face_area(f) * third;
        for &v in face {
            a[v] += area;
        }
    }
    a
}

/// Angle-defect Gauss curvature per unit barycentric area.
pub fn angle_defect_curvature<T: Real>(mesh: &TriMesh<T>) -> Vec<T> {
    let mut sum = vec![T::zero(); mesh.n_vertices()];
    for (f, face) in mesh.faces().iter().enumerate() {
        let c = mesh.face_corners(f);
        for k in 0..3 {
            sum[face[k]] += (c[(k + 1) % 3] - c[k]).angle(&(c[(k + 2) % 3] - c[k]));
        }
    }
    let areas = barycentric_areas(mesh);
    (0..mesh.n_vertices())
        .map(|v| {
            let full = if mesh.topology().is_boundary_vertex(v) { T::pi() } else { T::two_pi() };
            (full - sum[v]) / areas[v]
        })
        .collect()
}

/// Relative residual of `H n = x^N / 2` at each vertex:
/// `|H n - x^N/2| / max(|H|, |x^N|/2, 0.1)`. Values at untrusted vertices
/// are computed but should be excluded from statistics.
pub fn shrinker_residual<T: Real>(cache: &GeometryCache<T>) -> Vec<T> {
    let half = T::lit(0.5);
    (0..cache.mean.len())
        .map(|v| {
            let h = cache.normals[v] * cache.mean[v];
            let target = cache.x_n[v] * half;
            let denom = cache.mean[v].abs().max(target.norm()).max(T::lit(0.1));
            (h - target).norm() / denom
        })
        .collect()
}

/// Tangential and normal parts of the position vector.
pub fn position_split<T: Real>(cache: &GeometryCache<T>) -> (Vec<Vector3<T>>, Vec<Vector3<T>>) {
    (cache.x_t.clone(), cache.x_n.clone())
}

/// Maximum over trusted vertices; `None` when no vertex is trusted.
pub fn trusted_max<T: Real>(values: &[T], trusted: &[bool]) -> Option<T> {
    values
        .iter()
        .zip(trusted)
        .filter(|(_, &t)| t)
        .map(|(&v, _)| v)
        .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))
}

pub fn trusted_min<T: Real>(values: &[T], trusted: &[bool]) -> Option<T> {
    values
        .iter()
        .zip(trusted)
        .filter(|(_, &t)| t)
        .map(|(&v, _)| v)
        .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.min(v))))
}
