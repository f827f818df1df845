use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shrinker_ghf::dec::{exterior_derivatives, mesh_stars};
use shrinker_ghf::error::Error;
use shrinker_ghf::geometry::{curvature_data, gaussian_weight};
use shrinker_ghf::ghf::*;
use shrinker_ghf::homology::{tree_cotree_generators, EdgeLoop, periods};
use shrinker_ghf::linalg::weighted_dot;
use shrinker_ghf::mesh::TriMesh;
use shrinker_ghf::shrinkers::*;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn random_vertex(mesh: &TriMesh<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..mesh.n_vertices()).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// Class minimizer by dense least squares on `star1^{1/2} (ω0 + d0 f)`,
/// solved with an SVD rather than the normal equations.
fn dense_oracle(mesh: &TriMesh<f64>, star1: &[f64], omega0: &[f64]) -> Vec<f64> {
    let d0 = exterior_derivatives(mesh.topology()).d0.to_csr::<f64>().to_dense();
    let sqrt_w: Vec<f64> = star1.iter().map(|w| w.max(0.0).sqrt()).collect();
    let a = DMatrix::from_fn(d0.nrows(), d0.ncols(), |e, v| sqrt_w[e] * d0[(e, v)]);
    let b = DVector::from_fn(omega0.len(), |e, _| -sqrt_w[e] * omega0[e]);
    let f = a.svd(true, true).solve(&b, 1e-12).unwrap();
    let df = &d0 * f;
    omega0.iter().zip(df.iter()).map(|(a, b)| a + b).collect()
}

#[test]
fn exact_class_minimizer_is_zero() {
    let t = flat_torus::<f64>(10, 10).unwrap();
    let stars = mesh_stars(&t, &sinusoidal_weight(&t, 0.5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = random_vertex(&t, &mut rng);
    let omega0 = exterior_derivatives(t.topology()).d0.apply(&g);
    let omega = minimize_in_class(&t, &stars, &omega0).unwrap();
    assert!(max_abs(&omega) < 1e-9 * max_abs(&omega0));
    assert!(stars.energy(&omega) < 1e-18);
}

#[test]
fn unit_weight_gives_constant_harmonic_forms() {
    let n = 20;
    let t = flat_torus::<f64>(n, n).unwrap();
    let stars = mesh_stars(&t, &vec![1.0; t.n_vertices()]).unwrap();
    let gens = tree_cotree_generators(t.topology()).unwrap();
    let row = EdgeLoop { vertices: (0..n).map(|i| i * n).collect() };
    let col = EdgeLoop { vertices: (0..n).collect() };
    for j in 0..gens.len() {
        let omega = minimize_in_class(&t, &stars, &gens.cocycle(j)).unwrap();
        let p = periods(t.topology(), &omega, &[row.clone(), col.clone()]).unwrap();
        // the harmonic representative is p0 dx + p1 dy
        let exact: Vec<f64> = t
            .edges()
            .iter()
            .map(|&[a, b]| {
                let d = t.displacement(a, b);
                p[0] * d.x + p[1] * d.y
            })
            .collect();
        let err: Vec<f64> = omega.iter().zip(&exact).map(|(a, b)| a - b).collect();
        assert!(max_abs(&err) < 1e-8 * max_abs(&exact), "{}", max_abs(&err));

        let cache = curvature_data(&t).unwrap();
        let d = ghf_diagnostics(&t, Some(&cache), &stars, &omega, WeightModel::Unit).unwrap();
        assert!(d.pointwise_el_residual.unwrap() < 1e-8);
        assert!(d.coclosedness_residual < 1e-8);
    }
}

#[test]
fn weighted_flat_torus_matches_dense_oracle() {
    let t = flat_torus::<f64>(20, 20).unwrap();
    let stars = mesh_stars(&t, &sinusoidal_weight(&t, 0.5)).unwrap();
    let gens = tree_cotree_generators(t.topology()).unwrap();
    for j in 0..gens.len() {
        let omega0 = gens.cocycle::<f64>(j);
        let omega = minimize_in_class(&t, &stars, &omega0).unwrap();
        let oracle = dense_oracle(&t, &stars.star1, &omega0);
        let err: Vec<f64> = omega.iter().zip(&oracle).map(|(a, b)| a - b).collect();
        assert!(max_abs(&err) < 1e-8 * max_abs(&oracle), "{}", max_abs(&err) / max_abs(&oracle));
    }
}

#[test]
fn minimizer_orthogonality_and_linearity() {
    let t = flat_torus::<f64>(12, 10).unwrap();
    let stars = mesh_stars(&t, &sinusoidal_weight(&t, 0.5)).unwrap();
    let gens = tree_cotree_generators(t.topology()).unwrap();
    let d0 = exterior_derivatives(t.topology()).d0;
    let solver = GhfSolver::new(&t, &stars);
    let forms: Vec<Vec<f64>> = (0..2).map(|j| solver.minimize(&gens.cocycle(j)).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for omega in &forms {
        let e = stars.energy(omega);
        for _ in 0..100 {
            let df = d0.apply(&random_vertex(&t, &mut rng));
            let shifted: Vec<f64> = omega.iter().zip(&df).map(|(a, b)| a + b).collect();
            assert!(stars.energy(&shifted) >= e - 1e-12);
            let inner = weighted_dot(omega, &stars.star1, &df);
            let scale = stars.energy(omega).sqrt() * stars.energy(&df).sqrt();
            assert!(inner.abs() < 1e-10 * scale);
        }
    }
    let (a, b) = (2.5, -0.75);
    let combo: Vec<f64> = gens.cocycle::<f64>(0).iter().zip(gens.cocycle::<f64>(1)).map(|(x, y)| a * x + b * y).collect();
    let direct = solver.minimize(&combo).unwrap();
    for e in 0..direct.len() {
        assert!((direct[e] - (a * forms[0][e] + b * forms[1][e])).abs() < 1e-10);
    }
}

#[test]
fn open_forms_are_rejected() {
    let t = flat_torus::<f64>(5, 5).unwrap();
    let stars = mesh_stars(&t, &vec![1.0; t.n_vertices()]).unwrap();
    let mut w = vec![0.0; t.edges().len()];
    w[0] = 1.0;
    assert!(matches!(minimize_in_class(&t, &stars, &w), Err(Error::NotClosedForm(_))));
}

#[test]
fn exact_forms_are_flagged_by_diagnostics() {
    let s = sphere_mesh::<f64>(2);
    let stars = mesh_stars(&s, &gaussian_weight(&s)).unwrap();
    let x: Vec<f64> = s.positions().iter().map(|p| p.x).collect();
    let df = exterior_derivatives(s.topology()).d0.apply(&x);
    let d = ghf_diagnostics(&s, None, &stars, &df, WeightModel::Gaussian).unwrap();
    assert!(d.closedness_residual < 1e-15);
    assert!(d.coclosedness_residual > 0.1);
    assert!(d.pointwise_el_residual.is_none());
}

#[test]
fn sphere_basis_is_empty() {
    let s = sphere_mesh::<f64>(2);
    let stars = mesh_stars(&s, &gaussian_weight(&s)).unwrap();
    let gens = tree_cotree_generators(s.topology()).unwrap();
    let basis = ghf_basis(&s, &stars, &gens, None, WeightModel::Gaussian).unwrap();
    assert!(basis.is_empty());
    assert!(basis.gram_is_positive_definite());
}

#[test]
fn grid_torus_basis_is_independent() {
    let t = flat_torus::<f64>(16, 16).unwrap();
    let stars = mesh_stars(&t, &gaussian_weight(&t)).unwrap();
    let gens = tree_cotree_generators(t.topology()).unwrap();
    let basis = ghf_basis(&t, &stars, &gens, None, WeightModel::Gaussian).unwrap();
    assert_eq!(basis.len(), 2);
    assert!(basis.gram_is_positive_definite());
    assert!((basis.period_determinant() - 1.0).abs() < 1e-10);
    let j = basis.to_json(&t.content_hash());
    assert_eq!(j["mesh_hash"], t.content_hash());
    assert_eq!(j["forms"].as_array().unwrap().len(), 2);
}

#[test]
fn angenent_basis_and_pointwise_refinement() {
    let mut pointwise = Vec::new();
    for n in [48, 96] {
        let (_, mesh) = angenent_torus::<f64>(n).unwrap();
        let cache = curvature_data(&mesh).unwrap();
        let stars = mesh_stars(&mesh, &cache.weight).unwrap();
        let gens = tree_cotree_generators(mesh.topology()).unwrap();
        let basis = ghf_basis(&mesh, &stars, &gens, Some(&cache), WeightModel::Gaussian).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(basis.period_determinant().abs() > 1e-6);
        assert!(basis.gram_is_positive_definite());
        for d in &basis.diagnostics {
            assert!(d.coclosedness_residual < 1e-8, "{}", d.coclosedness_residual);
            assert!(d.closedness_residual < 1e-12);
        }
        pointwise.push(basis.diagnostics.iter().map(|d| d.pointwise_el_residual.unwrap()).fold(0.0, f64::max));
    }
    assert!(pointwise[1] < pointwise[0], "{pointwise:?}");
}
