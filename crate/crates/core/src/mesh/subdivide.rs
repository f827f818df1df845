use nalgebra::Vector3;

use super::TriMesh;
use crate::error::Result;
use crate::scalar::Real;

/// 1-to-4 midpoint split. New vertices are appended after the old ones in
/// edge order and then passed through `projector` when one is supplied.
pub fn subdivide_midpoint<T: Real>(
    mesh: &TriMesh<T>,
    projector: Option<&dyn Fn(Vector3<T>) -> Vector3<T>>,
) -> Result<TriMesh<T>> {
    let nv = mesh.n_vertices();
    let topo = mesh.topology();
    let mut positions = mesh.positions().to_vec();
    let half = T::lit(0.5);
    for &[a, b] in topo.edges() {
        let mid = mesh.position(a) + mesh.displacement(a, b) * half;
        let mid = match mesh.periods() {
            Some(_) => {
                // keep periodic coordinates in the fundamental domain of `a`'s image
                mesh.position(a) + mesh.wrap(mid - mesh.position(a))
            }
            None => mid,
        };
        positions.push(match projector {
            Some(p) => p(mid),
            None => mid,
        });
    }
    let mid = |a: usize, b: usize| nv + topo.edge_between(a, b).expect("face edge");
    let mut faces = Vec::with_capacity(4 * topo.n_faces());
    for &[a, b, c] in topo.faces() {
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        faces.push([a, ab, ca]);
        faces.push([b, bc, ab]);
        faces.push([c, ca, bc]);
        faces.push([ab, bc, ca]);
    }
    TriMesh::with_periods(positions, &faces, mesh.periods())
}
