//! Generators for the canonical self-shrinkers and for oracle meshes.
//!
//! With the normalisation `H = x^N / 2` the sphere has radius 2, the
//! cylinder radius √2, and planes pass through the origin. The shrinking
//! doughnut is found by shooting in [`angenent`].

pub mod angenent;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::{subdivide_midpoint, TriMesh};
use crate::scalar::Real;

pub use angenent::{angenent_profile, angenent_torus, revolve_profile, ANGENENT_BRACKET, ProfileCurve, Sampling, ShootingOptions};

pub const SPHERE_RADIUS: f64 = 2.0;

pub fn cylinder_radius<T: Real>() -> T {
    T::lit(2.0).sqrt()
}

/// Regular icosahedron with vertices on the sphere of the given radius.
pub fn icosahedron<T: Real>(radius: T) -> TriMesh<T> {
    let phi = (T::one() + T::lit(5.0).sqrt()) * T::lit(0.5);
    let (o, z) = (T::one(), T::zero());
    let raw = [
        (-o, phi, z),
        (o, phi, z),
        (-o, -phi, z),
        (o, -phi, z),
        (z, -o, phi),
        (z, o, phi),
        (z, -o, -phi),
        (z, o, -phi),
        (phi, z, -o),
        (phi, z, o),
        (-phi, z, -o),
        (-phi, z, o),
    ];
    let positions = raw.iter().map(|&(a, b, c)| Vector3::new(a, b, c).normalize() * radius).collect();
    let faces = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    TriMesh::new(positions, &faces).expect("icosahedron is valid")
}

/// Icosphere of radius `radius` after `level` projected midpoint subdivisions.
pub fn icosphere<T: Real>(radius: T, level: usize) -> TriMesh<T> {
    let project = move |p: Vector3<T>| p.normalize() * radius;
    let mut mesh = icosahedron(radius);
    for _ in 0..level {
        mesh = subdivide_midpoint(&mesh, Some(&project)).expect("subdivision of a valid mesh");
    }
    mesh
}

/// The shrinking sphere, radius 2.
pub fn sphere_mesh<T: Real>(level: usize) -> TriMesh<T> {
    icosphere(T::lit(SPHERE_RADIUS), level)
}

/// Disk of radius `radius` in the plane `x3 = 0`, `rings` concentric rings
/// with `6k` vertices on ring `k`.
pub fn disk_mesh<T: Real>(radius: T, rings: usize) -> Result<TriMesh<T>> {
    if !(radius > T::zero()) || rings == 0 {
        return Err(Error::InvalidArgument("disk needs radius > 0 and at least one ring".into()));
    }
    let mut positions = vec![Vector3::zeros()];
    let mut ring_start = vec![0usize];
    for k in 1..=rings {
        ring_start.push(positions.len());
        let r = radius * T::from_count(k) / T::from_count(rings);
        let count = 6 * k;
        for j in 0..count {
            let a = T::two_pi() * T::from_count(j) / T::from_count(count);
            positions.push(Vector3::new(r * a.cos(), r * a.sin(), T::zero()));
        }
    }
    let mut faces = Vec::new();
    for k in 1..=rings {
        let (inner_n, outer_n) = (if k == 1 { 1 } else { 6 * (k - 1) }, 6 * k);
        let inner = |i: usize| if k == 1 { 0 } else { ring_start[k - 1] + i % inner_n };
        let outer = |j: usize| ring_start[k] + j % outer_n;
        if k == 1 {
            for j in 0..outer_n {
                faces.push([0, outer(j), outer(j + 1)]);
            }
            continue;
        }
        // zip the two rings by fractional angle
        let (mut i, mut j) = (0usize, 0usize);
        while i < inner_n || j < outer_n {
            let ai = (i as f64 + 1.0) / inner_n as f64;
            let aj = (j as f64 + 1.0) / outer_n as f64;
            if j < outer_n && (i >= inner_n || aj <= ai) {
                faces.push([inner(i), outer(j), outer(j + 1)]);
                j += 1;
            } else {
                faces.push([inner(i), outer(j), inner(i + 1)]);
                i += 1;
            }
        }
    }
    TriMesh::new(positions, &faces)
}

/// Cylinder of radius √2 about the x1-axis over `[-half_length, half_length]`,
/// `n` vertices per ring, rings staggered for near-equilateral triangles.
pub fn cylinder_mesh<T: Real>(half_length: T, n: usize) -> Result<TriMesh<T>> {
    if !(half_length > T::zero()) || n < 3 {
        return Err(Error::InvalidArgument("cylinder needs half_length > 0 and n >= 3".into()));
    }
    let r = cylinder_radius::<T>();
    let spacing = T::two_pi() * r / T::from_count(n) * T::lit(3.0).sqrt() * T::lit(0.5);
    let rings = ((half_length * T::lit(2.0) / spacing).round().to_f64_lossy() as usize).max(1) + 1;
    let dx = half_length * T::lit(2.0) / T::from_count(rings - 1);
    let mut positions = Vec::with_capacity(rings * n);
    for i in 0..rings {
        let x = -half_length + dx * T::from_count(i);
        let stagger = if i % 2 == 1 { T::lit(0.5) } else { T::zero() };
        for j in 0..n {
            let a = T::two_pi() * (T::from_count(j) + stagger) / T::from_count(n);
            positions.push(Vector3::new(x, r * a.cos(), r * a.sin()));
        }
    }
    let idx = |i: usize, j: usize| i * n + j % n;
    let mut faces = Vec::with_capacity(2 * (rings - 1) * n);
    for i in 0..rings - 1 {
        for j in 0..n {
            if i % 2 == 0 {
                faces.push([idx(i, j), idx(i, j + 1), idx(i + 1, j)]);
                faces.push([idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)]);
            } else {
                faces.push([idx(i, j), idx(i + 1, j + 1), idx(i + 1, j)]);
                faces.push([idx(i, j), idx(i, j + 1), idx(i + 1, j + 1)]);
            }
        }
    }
    TriMesh::new(positions, &faces)
}

/// Regular `m x n` triangulation of the unit square torus, carried as a
/// periodic mesh in the plane `x3 = 0`.
pub fn flat_torus<T: Real>(m: usize, n: usize) -> Result<TriMesh<T>> {
    if m < 3 || n < 3 {
        return Err(Error::InvalidArgument("flat torus needs m, n >= 3".into()));
    }
    let mut positions = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            positions.push(Vector3::new(T::from_count(i) / T::from_count(m), T::from_count(j) / T::from_count(n), T::zero()));
        }
    }
    let idx = |i: usize, j: usize| (i % m) * n + (j % n);
    let mut faces = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriMesh::with_periods(positions, &faces, Some(Vector3::new(T::one(), T::one(), T::zero())))
}

/// Weight `1 + amplitude * sin(2 pi u)` in the first flat-torus coordinate.
pub fn sinusoidal_weight<T: Real>(mesh: &TriMesh<T>, amplitude: T) -> Vec<T> {
    mesh.positions().iter().map(|p| T::one() + amplitude * (T::two_pi() * p[0]).sin()).collect()
}
