//! OFF and OBJ reading and writing (vertex and face records only).
//!
//! Comment lines are preserved so generators can record provenance. A
//! comment of the form `# periods px py pz` marks a periodic (flat) mesh.

use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::Vector3;

use super::TriMesh;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Raw contents of a mesh file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeshFile {
    pub positions: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Comment text with the leading `#` and whitespace removed.
    pub comments: Vec<String>,
}

impl MeshFile {
    pub fn periods(&self) -> Option<[f64; 3]> {
        self.comments.iter().find_map(|c| {
            let rest = c.strip_prefix("periods")?;
            let v: Vec<f64> = rest.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            (v.len() == 3).then(|| [v[0], v[1], v[2]])
        })
    }

    /// `key=value` pairs from a comment starting with `generator`.
    pub fn generator(&self) -> Option<Vec<(String, String)>> {
        let line = self.comments.iter().find(|c| c.starts_with("generator"))?;
        Some(
            line.split_whitespace()
                .skip(1)
                .filter_map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
                .collect(),
        )
    }

    pub fn into_mesh<T: Real>(&self) -> Result<TriMesh<T>> {
        let positions = self
            .positions
            .iter()
            .map(|p| Vector3::new(T::lit(p[0]), T::lit(p[1]), T::lit(p[2])))
            .collect();
        let periods = self.periods().map(|p| Vector3::new(T::lit(p[0]), T::lit(p[1]), T::lit(p[2])));
        TriMesh::with_periods(positions, &self.faces, periods)
    }

    pub fn from_mesh<T: Real>(mesh: &TriMesh<T>, comments: &[String]) -> Self {
        let mut comments = comments.to_vec();
        if let Some(p) = mesh.periods() {
            comments.push(format!(
                "periods {} {} {}",
                p[0].to_f64_lossy(),
                p[1].to_f64_lossy(),
                p[2].to_f64_lossy()
            ));
        }
        Self {
            positions: mesh
                .positions()
                .iter()
                .map(|p| [p[0].to_f64_lossy(), p[1].to_f64_lossy(), p[2].to_f64_lossy()])
                .collect(),
            faces: mesh.faces().to_vec(),
            comments,
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn read_off<R: BufRead>(reader: R) -> Result<MeshFile> {
    let mut out = MeshFile::default();
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if let Some(c) = trimmed.strip_prefix('#') {
            out.comments.push(c.trim().to_string());
            continue;
        }
        let body = trimmed.split('#').next().unwrap_or("");
        tokens.extend(body.split_whitespace().map(|t| (i + 1, t.to_string())));
    }
    let mut it = tokens.into_iter();
    match it.next() {
        Some((_, h)) if h == "OFF" => {}
        Some((l, h)) => return Err(parse_err(l, format!("expected OFF header, found {h}"))),
        None => return Err(parse_err(0, "empty file")),
    }
    let mut next_num = |what: &str| -> Result<(usize, String)> {
        it.next().ok_or_else(|| parse_err(0, format!("unexpected end of file reading {what}")))
    };
    let count = |(l, t): (usize, String)| -> Result<usize> {
        t.parse().map_err(|_| parse_err(l, format!("bad count {t}")))
    };
    let nv = count(next_num("vertex count")?)?;
    let nf = count(next_num("face count")?)?;
    let _ne = count(next_num("edge count")?)?;
    for _ in 0..nv {
        let mut p = [0.0; 3];
        for c in &mut p {
            let (l, t) = next_num("vertex")?;
            *c = t.parse().map_err(|_| parse_err(l, format!("bad coordinate {t}")))?;
        }
        out.positions.push(p);
    }
    for _ in 0..nf {
        let (l, t) = next_num("face")?;
        if t != "3" {
            return Err(parse_err(l, format!("only triangles are supported, found {t}-gon")));
        }
        let mut f = [0usize; 3];
        for v in &mut f {
            *v = count(next_num("face index")?)?;
        }
        out.faces.push(f);
    }
    Ok(out)
}

pub fn read_obj<R: BufRead>(reader: R) -> Result<MeshFile> {
    let mut out = MeshFile::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if let Some(c) = trimmed.strip_prefix('#') {
            out.comments.push(c.trim().to_string());
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        match parts.next() {
            Some("v") => {
                let v: Vec<f64> = parts
                    .take(3)
                    .map(|t| t.parse().map_err(|_| parse_err(i + 1, format!("bad coordinate {t}"))))
                    .collect::<Result<_>>()?;
                if v.len() != 3 {
                    return Err(parse_err(i + 1, "vertex needs three coordinates"));
                }
                out.positions.push([v[0], v[1], v[2]]);
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        head.parse::<usize>()
                            .ok()
                            .filter(|&k| k > 0)
                            .map(|k| k - 1)
                            .ok_or_else(|| parse_err(i + 1, format!("bad face index {t}")))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(parse_err(i + 1, "only triangles are supported"));
                }
                out.faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Reads `.off` or `.obj` by extension.
pub fn read_mesh(path: &Path) -> Result<MeshFile> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("obj") => read_obj(file),
        _ => read_off(file),
    }
}

fn write_comments<W: Write>(w: &mut W, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    Ok(())
}

/// Positions are written with 17 significant digits.
pub fn write_off<W: Write>(w: &mut W, file: &MeshFile) -> Result<()> {
    writeln!(w, "OFF")?;
    write_comments(w, &file.comments)?;
    writeln!(w, "{} {} 0", file.positions.len(), file.faces.len())?;
    for p in &file.positions {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    for f in &file.faces {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

pub fn write_obj<W: Write>(w: &mut W, file: &MeshFile) -> Result<()> {
    write_comments(w, &file.comments)?;
    for p in &file.positions {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    for f in &file.faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}
