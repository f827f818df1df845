//! Oriented manifold triangle meshes.
//!
//! Connectivity lives in [`Topology`], which is independent of the scalar
//! type; [`TriMesh`] pairs it with vertex positions. Edges are stored as
//! `(i, j)` with `i < j`, and every 1-cochain sign refers to that direction.

mod io;
mod subdivide;

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use nalgebra::Vector3;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use io::{read_mesh, read_obj, read_off, write_obj, write_off, MeshFile};
pub use subdivide::subdivide_midpoint;

/// Counts and derived invariants of a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TopologySummary {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub chi: i64,
    pub genus: i64,
    pub boundary_loops: usize,
    pub components: usize,
}

/// Face/edge/vertex incidence with consistent face orientation.
#[derive(Clone, Debug)]
pub struct Topology {
    n_vertices: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_index: HashMap<(usize, usize), usize>,
    /// For face f, edge k joins `faces[f][k]` to `faces[f][(k + 1) % 3]`;
    /// the sign is +1 when that direction agrees with the stored edge.
    face_edges: Vec<[(usize, i8); 3]>,
    edge_faces: Vec<[Option<usize>; 2]>,
    vertex_faces: Vec<Vec<usize>>,
    vertex_neighbors: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    boundary_loops: usize,
    components: usize,
}

impl Topology {
    /// Builds connectivity, repairing face winding by breadth-first
    /// propagation across shared edges.
    pub fn new(n_vertices: usize, faces: &[[usize; 3]]) -> Result<Self> {
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                if v >= n_vertices {
                    return Err(Error::IndexOutOfRange { face: f, index: v, count: n_vertices });
                }
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(Error::DegenerateFace(f));
            }
        }

        // undirected edge -> incident faces
        let mut incident: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let list = incident.entry(key).or_default();
                if list.contains(&f) {
                    return Err(Error::DegenerateFace(f));
                }
                list.push(f);
                if list.len() > 2 {
                    return Err(Error::NonManifold(key.0, key.1));
                }
            }
        }

        let faces = orient_faces(faces, &incident)?;

        let mut keys: Vec<(usize, usize)> = incident.keys().copied().collect();
        keys.sort_unstable();
        let edges: Vec<[usize; 2]> = keys.iter().map(|&(a, b)| [a, b]).collect();
        let edge_index: HashMap<(usize, usize), usize> =
            keys.iter().enumerate().map(|(e, &k)| (k, e)).collect();

        let mut edge_faces = vec![[None, None]; edges.len()];
        let mut face_edges = Vec::with_capacity(faces.len());
        for (f, face) in faces.iter().enumerate() {
            let mut fe = [(0usize, 0i8); 3];
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                let e = edge_index[&(a.min(b), a.max(b))];
                let sign = if a < b { 1 } else { -1 };
                fe[k] = (e, sign);
                // slot 0 is the face traversing the edge forwards
                let slot = if sign > 0 { 0 } else { 1 };
                edge_faces[e][slot] = Some(f);
            }
            face_edges.push(fe);
        }

        let mut vertex_faces = vec![Vec::new(); n_vertices];
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                vertex_faces[v].push(f);
            }
        }
        let mut vertex_neighbors = vec![Vec::new(); n_vertices];
        for &[a, b] in &edges {
            vertex_neighbors[a].push(b);
            vertex_neighbors[b].push(a);
        }
        for nb in &mut vertex_neighbors {
            nb.sort_unstable();
        }

        let mut boundary_vertex = vec![false; n_vertices];
        let mut boundary_next: HashMap<usize, Vec<usize>> = HashMap::new();
        for (e, ef) in edge_faces.iter().enumerate() {
            let [a, b] = edges[e];
            match ef {
                [Some(_), None] => boundary_next.entry(a).or_default().push(b),
                [None, Some(_)] => boundary_next.entry(b).or_default().push(a),
                _ => continue,
            }
            boundary_vertex[a] = true;
            boundary_vertex[b] = true;
        }
        let boundary_loops = count_boundary_loops(&boundary_next);
        let components = count_components(n_vertices, &vertex_neighbors);

        Ok(Self {
            n_vertices,
            faces,
            edges,
            edge_index,
            face_edges,
            edge_faces,
            vertex_faces,
            vertex_neighbors,
            boundary_vertex,
            boundary_loops,
            components,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Index of the edge joining `a` and `b`, in either order.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn face_edges(&self, f: usize) -> &[(usize, i8); 3] {
        &self.face_edges[f]
    }

    /// `[forward face, backward face]` of an edge.
    pub fn edge_faces(&self, e: usize) -> [Option<usize>; 2] {
        self.edge_faces[e]
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn vertex_neighbors(&self, v: usize) -> &[usize] {
        &self.vertex_neighbors[v]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e].iter().any(Option::is_none)
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops == 0
    }

    /// Vertices within `rings` edge hops of the boundary (ring 0 is the boundary itself).
    pub fn boundary_collar(&self, rings: usize) -> Vec<bool> {
        let mut mark = self.boundary_vertex.clone();
        let mut frontier: Vec<usize> = (0..self.n_vertices).filter(|&v| mark[v]).collect();
        for _ in 0..rings {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in &self.vertex_neighbors[v] {
                    if !mark[w] {
                        mark[w] = true;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        mark
    }

    pub fn summary(&self) -> TopologySummary {
        let v = self.n_vertices as i64;
        let e = self.edges.len() as i64;
        let f = self.faces.len() as i64;
        let chi = v - e + f;
        let b = self.boundary_loops as i64;
        let c = self.components as i64;
        TopologySummary {
            vertices: self.n_vertices,
            edges: self.edges.len(),
            faces: self.faces.len(),
            chi,
            genus: (2 * c - b - chi) / 2,
            boundary_loops: self.boundary_loops,
            components: self.components,
        }
    }
}

fn orient_faces(faces: &[[usize; 3]], incident: &HashMap<(usize, usize), Vec<usize>>) -> Result<Vec<[usize; 3]>> {
    // +1 if the face walks a->b with a < b along this edge
    let direction = |face: &[usize; 3], key: (usize, usize)| -> i8 {
        for k in 0..3 {
            if face[k] == key.0 && face[(k + 1) % 3] == key.1 {
                return 1;
            }
        }
        -1
    };
    let mut flip: Vec<Option<bool>> = vec![None; faces.len()];
    let mut neighbors: Vec<Vec<((usize, usize), usize)>> = vec![Vec::new(); faces.len()];
    for (&key, list) in incident {
        if let [f, g] = list[..] {
            neighbors[f].push((key, g));
            neighbors[g].push((key, f));
        }
    }
    for nb in &mut neighbors {
        nb.sort_unstable();
    }
    for seed in 0..faces.len() {
        if flip[seed].is_some() {
            continue;
        }
        flip[seed] = Some(false);
        let mut queue = VecDeque::from([seed]);
        while let Some(f) = queue.pop_front() {
            let ff = flip[f].unwrap();
            for &(key, g) in &neighbors[f] {
                let df = direction(&faces[f], key) * if ff { -1 } else { 1 };
                let dg_raw = direction(&faces[g], key);
                // consistent neighbours traverse the shared edge in opposite directions
                let needed = dg_raw == df;
                match flip[g] {
                    None => {
                        flip[g] = Some(needed);
                        queue.push_back(g);
                    }
                    Some(x) if x != needed => return Err(Error::NonOrientable),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(faces
        .iter()
        .zip(flip)
        .map(|(f, fl)| if fl == Some(true) { [f[0], f[2], f[1]] } else { *f })
        .collect())
}

fn count_boundary_loops(next: &HashMap<usize, Vec<usize>>) -> usize {
    let mut remaining: HashMap<usize, Vec<usize>> = next.clone();
    let mut starts: Vec<usize> = remaining.keys().copied().collect();
    starts.sort_unstable();
    let mut loops = 0;
    for s in starts {
        while remaining.get(&s).is_some_and(|l| !l.is_empty()) {
            loops += 1;
            let mut v = s;
            loop {
                let Some(out) = remaining.get_mut(&v) else { break };
                let Some(w) = out.pop() else { break };
                v = w;
                if v == s {
                    break;
                }
            }
        }
    }
    loops
}

fn count_components(n: usize, adj: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Triangle mesh with positions in 3-space.
///
/// `periods` makes the mesh a quotient of space by an axis-aligned lattice:
/// a nonzero component `p` identifies coordinates modulo `p` along that axis,
/// and edge vectors use the minimal image. This is how flat tori are carried.
#[derive(Clone, Debug)]
pub struct TriMesh<T> {
    topology: Arc<Topology>,
    positions: Vec<Vector3<T>>,
    periods: Option<Vector3<T>>,
}

impl<T: Real> TriMesh<T> {
    /// Validates and builds a mesh, repairing orientation where possible.
    pub fn new(positions: Vec<Vector3<T>>, faces: &[[usize; 3]]) -> Result<Self> {
        Self::with_periods(positions, faces, None)
    }

    pub fn with_periods(positions: Vec<Vector3<T>>, faces: &[[usize; 3]], periods: Option<Vector3<T>>) -> Result<Self> {
        let topology = Arc::new(Topology::new(positions.len(), faces)?);
        let mesh = Self { topology, positions, periods };
        mesh.check_face_areas()?;
        Ok(mesh)
    }

    fn check_face_areas(&self) -> Result<()> {
        let diag = self.bounding_box_diagonal();
        let min_area = T::lit(1e-12) * diag * diag;
        for f in 0..self.topology.n_faces() {
            if !(self.face_area(f) > min_area) {
                return Err(Error::DegenerateFace(f));
            }
        }
        Ok(())
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn positions(&self) -> &[Vector3<T>] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Vector3<T> {
        self.positions[v]
    }

    pub fn periods(&self) -> Option<Vector3<T>> {
        self.periods
    }

    pub fn n_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        self.topology.faces()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        self.topology.edges()
    }

    /// Wraps a raw difference vector into the minimal periodic image.
    pub fn wrap(&self, mut d: Vector3<T>) -> Vector3<T> {
        if let Some(p) = self.periods {
            for k in 0..3 {
                if p[k] > T::zero() {
                    let shift = p[k] * (d[k] / p[k]).round();
                    d[k] -= shift;
                }
            }
        }
        d
    }

    /// Vector from vertex `a` to vertex `b`.
    pub fn displacement(&self, a: usize, b: usize) -> Vector3<T> {
        self.wrap(self.positions[b] - self.positions[a])
    }

    /// Corner positions of a face, unwrapped relative to its first vertex.
    pub fn face_corners(&self, f: usize) -> [Vector3<T>; 3] {
        let [a, b, c] = self.faces()[f];
        let p = self.positions[a];
        [p, p + self.displacement(a, b), p + self.displacement(a, c)]
    }

    /// Unnormalized normal (twice the area) following the face winding.
    pub fn face_normal_scaled(&self, f: usize) -> Vector3<T> {
        let [p, q, r] = self.face_corners(f);
        (q - p).cross(&(r - p))
    }

    pub fn face_area(&self, f: usize) -> T {
        self.face_normal_scaled(f).norm() * T::lit(0.5)
    }

    pub fn edge_lengths(&self) -> Vec<T> {
        self.edges().iter().map(|&[a, b]| self.displacement(a, b).norm()).collect()
    }

    pub fn bounding_box_diagonal(&self) -> T {
        if let Some(p) = self.periods {
            if p.iter().any(|&x| x > T::zero()) {
                return p.norm();
            }
        }
        let mut lo = Vector3::repeat(T::max_value().unwrap_or(T::lit(f64::MAX)));
        let mut hi = -lo;
        for p in &self.positions {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }

    pub fn summary(&self) -> TopologySummary {
        self.topology.summary()
    }

    /// SHA-256 over connectivity and positions (as `f64` bits), hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_vertices() as u64).to_le_bytes());
        for p in &self.positions {
            for k in 0..3 {
                h.update(p[k].to_f64_lossy().to_bits().to_le_bytes());
            }
        }
        for f in self.faces() {
            for &v in f {
                h.update((v as u64).to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Validates positions and faces into a [`TriMesh`].
pub fn build_mesh<T: Real>(positions: Vec<Vector3<T>>, faces: &[[usize; 3]]) -> Result<TriMesh<T>> {
    TriMesh::new(positions, faces)
}

pub fn topology_invariants<T: Real>(mesh: &TriMesh<T>) -> TopologySummary {
    mesh.summary()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn tetrahedron() -> TriMesh<f64> {
        let p = vec![
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ];
        TriMesh::new(p, &[[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]).unwrap()
    }

    fn grid_disk(n: usize) -> TriMesh<f64> {
        let mut p = Vec::new();
        for i in 0..=n {
            for j in 0..=n {
                p.push(Vector3::new(i as f64, j as f64, 0.0));
            }
        }
        let idx = |i: usize, j: usize| i * (n + 1) + j;
        let mut f = Vec::new();
        for i in 0..n {
            for j in 0..n {
                f.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                f.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        TriMesh::new(p, &f).unwrap()
    }

    pub(crate) fn grid_torus(m: usize, n: usize) -> TriMesh<f64> {
        let mut p = Vec::new();
        for i in 0..m {
            for j in 0..n {
                p.push(Vector3::new(i as f64 / m as f64, j as f64 / n as f64, 0.0));
            }
        }
        let idx = |i: usize, j: usize| (i % m) * n + (j % n);
        let mut f = Vec::new();
        for i in 0..m {
            for j in 0..n {
                f.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                f.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        TriMesh::with_periods(p, &f, Some(Vector3::new(1.0, 1.0, 0.0))).unwrap()
    }

    #[test]
    fn tetrahedron_is_a_sphere() {
        let t = tetrahedron();
        let s = t.summary();
        assert_eq!((s.vertices, s.edges, s.faces), (4, 6, 4));
        assert_eq!((s.chi, s.genus, s.boundary_loops), (2, 0, 0));
    }

    #[test]
    fn grid_torus_has_genus_one() {
        let s = grid_torus(16, 16).summary();
        assert_eq!((s.chi, s.genus, s.boundary_loops), (0, 1, 0));
    }

    #[test]
    fn disk_has_one_boundary_loop() {
        let s = grid_disk(4).summary();
        assert_eq!((s.chi, s.genus, s.boundary_loops), (1, 0, 1));
    }

    #[test]
    fn opposite_winding_is_repaired() {
        let p = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
        ];
        // both faces walk 1 -> 2
        let m = TriMesh::new(p, &[[0, 1, 2], [1, 2, 3]]).unwrap();
        let e = m.topology().edge_between(1, 2).unwrap();
        let [fwd, bwd] = m.topology().edge_faces(e);
        assert!(fwd.is_some() && bwd.is_some());
    }

    #[test]
    fn mobius_strip_is_non_orientable() {
        // 6-vertex triangulated Mobius band
        let n = 6;
        let mut p = Vec::new();
        for i in 0..n {
            let t = i as f64 / n as f64 * std::f64::consts::TAU;
            p.push(Vector3::new(t.cos(), t.sin(), -0.3));
            p.push(Vector3::new(t.cos() * 1.2, t.sin() * 1.2, 0.3));
        }
        let mut f = Vec::new();
        for i in 0..n {
            let (a, b) = (2 * i, 2 * i + 1);
            let (c, d) = if i + 1 < n { (2 * i + 2, 2 * i + 3) } else { (1, 0) };
            f.push([a, c, b]);
            f.push([b, c, d]);
        }
        assert_eq!(TriMesh::new(p, &f).unwrap_err(), Error::NonOrientable);
    }

    #[test]
    fn errors_on_bad_faces() {
        let t = tetrahedron();
        let p = t.positions().to_vec();
        assert_eq!(TriMesh::new(p.clone(), &[[0, 0, 1]]).unwrap_err(), Error::DegenerateFace(0));
        assert!(matches!(TriMesh::new(p.clone(), &[[0, 1, 7]]), Err(Error::IndexOutOfRange { .. })));
        let fan = [[0, 1, 2], [0, 1, 3], [1, 0, 2]];
        assert!(matches!(TriMesh::new(p.clone(), &fan[..2]), Ok(_)));
        let three = [[0, 1, 2], [1, 0, 3], [0, 1, 3]];
        assert!(matches!(TriMesh::new(p, &three), Err(Error::NonManifold(0, 1))));
        let flat = vec![Vector3::new(0.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0), Vector3::new(2.0, 0.0, 0.0)];
        assert_eq!(TriMesh::new(flat, &[[0, 1, 2]]).unwrap_err(), Error::DegenerateFace(0));
    }

    #[test]
    fn boundary_collar_grows_by_rings() {
        let m = grid_disk(8);
        let c0 = m.topology().boundary_collar(0).iter().filter(|&&b| b).count();
        let c1 = m.topology().boundary_collar(1).iter().filter(|&&b| b).count();
        assert_eq!(c0, 32);
        assert_eq!(c1, 32 + 24);
    }

    #[test]
    fn periodic_displacement_uses_minimal_image() {
        let t = grid_torus(4, 4);
        let d = t.displacement(0, 12); // (0,0) -> (0.75, 0)
        assert!((d.x + 0.25).abs() < 1e-15);
    }
}
