//! Mesh provenance: which generator produced a mesh, and how to refine it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mesh::MeshFile;
use crate::mesh::{subdivide_midpoint, TriMesh};
use crate::shrinkers::{angenent_torus, cylinder_mesh, disk_mesh, flat_torus, sphere_mesh};

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Sphere { level: usize },
    Disk { radius: f64, rings: usize },
    Cylinder { half_length: f64, n: usize },
    Angenent { n_angular: usize },
    FlatTorus { m: usize, n: usize },
}

impl MeshSource {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Sphere { .. } => "sphere",
            Self::Disk { .. } => "disk",
            Self::Cylinder { .. } => "cylinder",
            Self::Angenent { .. } => "angenent",
            Self::FlatTorus { .. } => "flat-torus",
        }
    }

    pub fn parameters(&self) -> BTreeMap<String, String> {
        let pairs: Vec<(&str, String)> = match *self {
            Self::Sphere { level } => vec![("level", level.to_string())],
            Self::Disk { radius, rings } => vec![("radius", radius.to_string()), ("rings", rings.to_string())],
            Self::Cylinder { half_length, n } => vec![("half_length", half_length.to_string()), ("n", n.to_string())],
            Self::Angenent { n_angular } => vec![("n_angular", n_angular.to_string())],
            Self::FlatTorus { m, n } => vec![("m", m.to_string()), ("n", n.to_string())],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// The `generator ...` comment line (without the leading `#`).
    pub fn comment(&self) -> String {
        let mut s = format!("generator kind={}", self.kind());
        for (k, v) in self.parameters() {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let map: BTreeMap<&str, &str> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let get = |k: &str| map.get(k).copied().ok_or_else(|| Error::InvalidArgument(format!("generator comment lacks `{k}`")));
        let count = |k: &str| -> Result<usize> {
            get(k)?.parse().map_err(|_| Error::InvalidArgument(format!("bad `{k}` in generator comment")))
        };
        let real = |k: &str| -> Result<f64> {
            get(k)?.parse().map_err(|_| Error::InvalidArgument(format!("bad `{k}` in generator comment")))
        };
        Ok(match get("kind")? {
            "sphere" => Self::Sphere { level: count("level")? },
            "disk" => Self::Disk { radius: real("radius")?, rings: count("rings")? },
            "cylinder" => Self::Cylinder { half_length: real("half_length")?, n: count("n")? },
            "angenent" => Self::Angenent { n_angular: count("n_angular")? },
            "flat-torus" => Self::FlatTorus { m: count("m")?, n: count("n")? },
            other => return Err(Error::InvalidArgument(format!("unknown generator `{other}`"))),
        })
    }

    pub fn generate(&self) -> Result<TriMesh<f64>> {
        match *self {
            Self::Sphere { level } => Ok(sphere_mesh(level)),
            Self::Disk { radius, rings } => disk_mesh(radius, rings),
            Self::Cylinder { half_length, n } => cylinder_mesh(half_length, n),
            Self::Angenent { n_angular } => Ok(angenent_torus(n_angular)?.1),
            Self::FlatTorus { m, n } => flat_torus(m, n),
        }
    }

    /// The same surface at twice the linear resolution.
    pub fn refined(&self) -> Self {
        match *self {
            Self::Sphere { level } => Self::Sphere { level: level + 1 },
            Self::Disk { radius, rings } => Self::Disk { radius, rings: 2 * rings },
            Self::Cylinder { half_length, n } => Self::Cylinder { half_length, n: 2 * n },
            Self::Angenent { n_angular } => Self::Angenent { n_angular: 2 * n_angular },
            Self::FlatTorus { m, n } => Self::FlatTorus { m: 2 * m, n: 2 * n },
        }
    }

    /// Flat oracle meshes carry unit weight and are not shrinkers.
    pub fn is_intrinsic(&self) -> bool {
        matches!(self, Self::FlatTorus { .. })
    }

    pub fn to_file(&self, mesh: &TriMesh<f64>) -> MeshFile {
        MeshFile::from_mesh(mesh, &[self.comment()])
    }
}

/// A mesh together with what is known about where it came from.
#[derive(Clone, Debug)]
pub struct SourcedMesh {
    pub mesh: TriMesh<f64>,
    pub source: Option<MeshSource>,
}

impl SourcedMesh {
    pub fn from_file(file: &MeshFile) -> Result<Self> {
        let mesh = file.into_mesh()?;
        let source = match file.generator() {
            Some(pairs) => Some(MeshSource::from_pairs(&pairs)?),
            None => None,
        };
        Ok(Self { mesh, source })
    }

    pub fn is_intrinsic(&self) -> bool {
        match &self.source {
            Some(s) => s.is_intrinsic(),
            None => self.mesh.periods().is_some(),
        }
    }

    /// Regenerates from provenance, or falls back to midpoint subdivision.
    pub fn refine(&self) -> Result<Self> {
        match &self.source {
            Some(s) => {
                let next = s.refined();
                Ok(Self { mesh: next.generate()?, source: Some(next) })
            }
            None => Ok(Self { mesh: subdivide_midpoint(&self.mesh, None)?, source: None }),
        }
    }
}
