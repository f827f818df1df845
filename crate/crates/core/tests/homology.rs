use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shrinker_ghf::dec::exterior_derivatives;
use shrinker_ghf::error::Error;
use shrinker_ghf::homology::*;
use shrinker_ghf::mesh::TriMesh;
use shrinker_ghf::shrinkers::*;

/// Torus of revolution about the x3 axis centred at `centre`.
fn torus_points(centre: Vector3<f64>, m: usize, n: usize) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let mut p = Vec::new();
    for i in 0..m {
        let u = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
        for j in 0..n {
            let v = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let rho = 2.0 + 0.7 * v.cos();
            p.push(centre + Vector3::new(rho * u.cos(), rho * u.sin(), 0.7 * v.sin()));
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
    (p, f)
}

/// Two tori, each with one outer face removed, joined by a triangular tube.
fn genus_two() -> TriMesh<f64> {
    let (m, n) = (10, 6);
    let (mut p, mut f) = torus_points(Vector3::zeros(), m, n);
    let (q, g) = torus_points(Vector3::new(7.0, 0.0, 0.0), m, n);
    let off = p.len();
    // face 0 of A sits at u = 0 (facing +x); for B take the face at u = pi
    let a = f.remove(0);
    let b_index = 2 * (m / 2) * n;
    let b: Vec<usize> = g[b_index].iter().map(|&v| v + off).collect();
    p.extend(q);
    f.extend(g.iter().enumerate().filter(|(k, _)| *k != b_index).map(|(_, t)| [t[0] + off, t[1] + off, t[2] + off]));
    for k in 0..3 {
        let k1 = (k + 1) % 3;
        f.push([a[k], a[k1], b[(3 - k1) % 3]]);
        f.push([a[k], b[(3 - k1) % 3], b[(3 - k) % 3]]);
    }
    TriMesh::new(p, &f).unwrap()
}

fn winding(mesh: &TriMesh<f64>, cycle: &EdgeLoop) -> [i64; 2] {
    let v = &cycle.vertices;
    let mut total = Vector3::zeros();
    for k in 0..v.len() {
        total += mesh.displacement(v[k], v[(k + 1) % v.len()]);
    }
    [total.x.round() as i64, total.y.round() as i64]
}

#[test]
fn icosphere_has_no_generators() {
    let g = tree_cotree_generators(sphere_mesh::<f64>(2).topology()).unwrap();
    assert_eq!(g.len(), 0);
}

#[test]
fn genus_two_surface_has_four_generators() {
    let m = genus_two();
    let s = m.summary();
    assert_eq!((s.genus, s.boundary_loops, s.components), (2, 0, 1));
    let g = tree_cotree_generators(m.topology()).unwrap();
    assert_eq!(g.len(), 4);
    let d1 = exterior_derivatives(m.topology()).d1;
    for c in &g.cocycles {
        assert!(d1.apply_int(c).iter().all(|&x| x == 0));
    }
}

#[test]
fn grid_torus_cycles_wrap_both_handles() {
    let t = flat_torus::<f64>(9, 7).unwrap();
    let g = tree_cotree_generators(t.topology()).unwrap();
    assert_eq!(g.len(), 2);
    let w: Vec<[i64; 2]> = g.cycles.iter().map(|c| winding(&t, c)).collect();
    assert_eq!((w[0][0] * w[1][1] - w[0][1] * w[1][0]).abs(), 1);

    // independent loops: one row and one column of the grid
    let (m, n) = (9, 7);
    let row = EdgeLoop { vertices: (0..m).map(|i| i * n).collect() };
    let col = EdgeLoop { vertices: (0..n).collect() };
    assert_eq!(winding(&t, &row), [1, 0]);
    assert_eq!(winding(&t, &col), [0, 1]);
    let p: Vec<Vec<i64>> =
        g.cocycles.iter().map(|c| integer_periods(t.topology(), c, &[row.clone(), col.clone()]).unwrap()).collect();
    assert_eq!((p[0][0] * p[1][1] - p[0][1] * p[1][0]).abs(), 1);

    // own cycles give the identity
    for (j, c) in g.cocycles.iter().enumerate() {
        let own = integer_periods(t.topology(), c, &g.cycles).unwrap();
        assert_eq!(own[j], 1);
    }
}

#[test]
fn boundary_and_disconnected_meshes_are_rejected() {
    let disk = disk_mesh(1.0f64, 3).unwrap();
    assert!(matches!(tree_cotree_generators(disk.topology()), Err(Error::NotClosed)));
    let a = icosahedron(1.0f64);
    let mut p = a.positions().to_vec();
    let mut f = a.faces().to_vec();
    p.extend(a.positions().iter().map(|x| x + Vector3::new(5.0, 0.0, 0.0)));
    f.extend(a.faces().iter().map(|t| [t[0] + 12, t[1] + 12, t[2] + 12]));
    let two = TriMesh::new(p, &f).unwrap();
    assert!(matches!(tree_cotree_generators(two.topology()), Err(Error::Disconnected(2))));
}

#[test]
fn generators_are_deterministic_and_exportable() {
    let t = flat_torus::<f64>(5, 5).unwrap();
    let a = tree_cotree_generators(t.topology()).unwrap().to_json();
    let b = tree_cotree_generators(t.topology()).unwrap().to_json();
    assert_eq!(a, b);
    assert_eq!(a["count"], 2);
    assert_eq!(a["cocycles"][0]["edges"].as_array().unwrap().len(), a["cocycles"][0]["values"].as_array().unwrap().len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn periods_ignore_exact_forms(seed in 0u64..u64::MAX) {
        let t = flat_torus::<f64>(6, 5).unwrap();
        let g = tree_cotree_generators(t.topology()).unwrap();
        let d0 = exterior_derivatives(t.topology()).d0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..t.n_vertices()).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
        let df = d0.apply(&f);
        let exact = periods(t.topology(), &df, &g.cycles).unwrap();
        prop_assert!(exact.iter().all(|p| p.abs() < 1e-12));
        for j in 0..g.len() {
            let w: Vec<f64> = g.cocycle::<f64>(j).iter().zip(&df).map(|(a, b)| a + b).collect();
            let p = periods(t.topology(), &w, &g.cycles).unwrap();
            for (i, v) in p.iter().enumerate() {
                prop_assert!((v - (i == j) as i64 as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generator_count_is_two_minus_chi(m in 3usize..9, n in 3usize..9) {
        let t = flat_torus::<f64>(m, n).unwrap();
        let g = tree_cotree_generators(t.topology()).unwrap();
        prop_assert_eq!(g.len() as i64, 2 - t.summary().chi);
    }
}
