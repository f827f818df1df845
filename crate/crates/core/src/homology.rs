//! Integer cohomology generators by tree–cotree decomposition.
//!
//! A breadth-first spanning tree of the primal graph and a spanning tree of
//! the dual graph avoiding it leave exactly `2g` edges. Each leftover edge
//! gives a cocycle (one on that edge, zero on the tree and the other
//! leftovers, cotree values fixed by closedness) and a cycle (the edge
//! closed up through the primal tree). Cocycle `j` integrates to `δ_ij`
//! over cycle `i`, so the period matrix is the identity.

use std::collections::VecDeque;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mesh::Topology;
use crate::scalar::Real;

/// Closed vertex path; the last vertex connects back to the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLoop {
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub cocycles: Vec<Vec<i64>>,
    pub cycles: Vec<EdgeLoop>,
    /// The leftover edge behind each generator.
    pub edges: Vec<usize>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.cocycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cocycles.is_empty()
    }

    pub fn cocycle<T: Real>(&self, i: usize) -> Vec<T> {
        self.cocycles[i].iter().map(|&v| T::lit(v as f64)).collect()
    }

    /// Sparse edge/value lists plus cycle vertex lists.
    pub fn to_json(&self) -> Value {
        let cocycles: Vec<Value> = self
            .cocycles
            .iter()
            .map(|c| {
                let (edges, values): (Vec<usize>, Vec<i64>) =
                    c.iter().enumerate().filter(|(_, &v)| v != 0).map(|(e, &v)| (e, v)).unzip();
                json!({ "edges": edges, "values": values })
            })
            .collect();
        let cycles: Vec<&Vec<usize>> = self.cycles.iter().map(|c| &c.vertices).collect();
        json!({ "count": self.len(), "cocycles": cocycles, "cycles": cycles, "leftover_edges": self.edges })
    }
}

pub fn tree_cotree_generators(topology: &Topology) -> Result<GeneratorSet> {
    if !topology.is_closed() {
        return Err(Error::NotClosed);
    }
    let summary = topology.summary();
    if summary.components != 1 {
        return Err(Error::Disconnected(summary.components));
    }
    let (nv, ne, nf) = (topology.n_vertices(), topology.n_edges(), topology.n_faces());

    // primal tree
    let mut in_tree = vec![false; ne];
    let mut parent = vec![usize::MAX; nv];
    let mut depth = vec![0usize; nv];
    let mut seen = vec![false; nv];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &w in topology.vertex_neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                depth[w] = depth[u] + 1;
                in_tree[topology.edge_between(u, w).expect("neighbour edge")] = true;
                queue.push_back(w);
            }
        }
    }

    // dual cotree over edges not in the primal tree
    let mut in_cotree = vec![false; ne];
    let mut parent_edge = vec![usize::MAX; nf];
    let mut order = Vec::with_capacity(nf);
    let mut seen = vec![false; nf];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        order.push(f);
        for &(e, _) in topology.face_edges(f) {
            if in_tree[e] {
                continue;
            }
            let [a, b] = topology.edge_faces(e);
            let g = if a == Some(f) { b } else { a }.expect("closed mesh");
            if !seen[g] {
                seen[g] = true;
                parent_edge[g] = e;
                in_cotree[e] = true;
                queue.push_back(g);
            }
        }
    }

    let leftover: Vec<usize> = (0..ne).filter(|&e| !in_tree[e] && !in_cotree[e]).collect();
    debug_assert_eq!(leftover.len() as i64, 2 - summary.chi);

    let mut cocycles = Vec::with_capacity(leftover.len());
    let mut cycles = Vec::with_capacity(leftover.len());
    for &e in &leftover {
        let mut omega = vec![0i64; ne];
        omega[e] = 1;
        // leaves first: every other edge of the face is already known
        for &f in order.iter().rev() {
            let pe = parent_edge[f];
            if pe == usize::MAX {
                continue;
            }
            let mut sum = 0i64;
            let mut own = 0i64;
            for &(fe, sign) in topology.face_edges(f) {
                if fe == pe {
                    own = sign as i64;
                } else {
                    sum += sign as i64 * omega[fe];
                }
            }
            omega[pe] = -sum * own;
        }
        cocycles.push(omega);
        cycles.push(tree_loop(topology.edges()[e], &parent, &depth));
    }
    Ok(GeneratorSet { cocycles, cycles, edges: leftover })
}

/// Tree path from `b` to `a`; the closing step `a -> b` runs along the edge.
fn tree_loop([a, b]: [usize; 2], parent: &[usize], depth: &[usize]) -> EdgeLoop {
    let (mut x, mut y) = (b, a);
    let mut from_b = vec![x];
    let mut from_a = vec![y];
    while x != y {
        if depth[x] >= depth[y] {
            x = parent[x];
            from_b.push(x);
        } else {
            y = parent[y];
            from_a.push(y);
        }
    }
    from_a.pop();
    from_b.extend(from_a.into_iter().rev());
    EdgeLoop { vertices: from_b }
}

/// Signed sum of `omega` along each loop.
pub fn periods<T: Real>(topology: &Topology, omega: &[T], cycles: &[EdgeLoop]) -> Result<Vec<T>> {
    cycles.iter().map(|c| loop_integral(topology, omega, c)).collect()
}

fn loop_integral<T: Real>(topology: &Topology, omega: &[T], cycle: &EdgeLoop) -> Result<T> {
    let v = &cycle.vertices;
    let mut total = T::zero();
    for k in 0..v.len() {
        let (a, b) = (v[k], v[(k + 1) % v.len()]);
        let e = topology.edge_between(a, b).ok_or(Error::OpenLoop(k))?;
        total += if a < b { omega[e] } else { -omega[e] };
    }
    Ok(total)
}

/// Exact integer periods of integer cochains.
pub fn integer_periods(topology: &Topology, omega: &[i64], cycles: &[EdgeLoop]) -> Result<Vec<i64>> {
    cycles
        .iter()
        .map(|c| {
            let v = &c.vertices;
            (0..v.len()).try_fold(0i64, |acc, k| {
                let (a, b) = (v[k], v[(k + 1) % v.len()]);
                let e = topology.edge_between(a, b).ok_or(Error::OpenLoop(k))?;
                Ok(acc + if a < b { omega[e] } else { -omega[e] })
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::tests::{grid_torus, tetrahedron};

    #[test]
    fn sphere_has_no_generators() {
        let g = tree_cotree_generators(tetrahedron().topology()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn torus_period_matrix_is_identity() {
        let m = grid_torus(6, 5);
        let g = tree_cotree_generators(m.topology()).unwrap();
        assert_eq!(g.len(), 2);
        for (j, c) in g.cocycles.iter().enumerate() {
            let p = integer_periods(m.topology(), c, &g.cycles).unwrap();
            for (i, &v) in p.iter().enumerate() {
                assert_eq!(v, (i == j) as i64);
            }
        }
    }

    #[test]
    fn open_loop_is_rejected() {
        let m = grid_torus(6, 5);
        let open = EdgeLoop { vertices: vec![0, 1, 2] };
        assert!(matches!(periods(m.topology(), &vec![0.0; m.edges().len()], &[open]), Err(Error::OpenLoop(_))));
    }
}
