//! `ghf`: generate shrinker meshes, compute geometry, harmonic forms and
//! spectra, and run the verification suite.
//!
//! Exit codes: 0 success, 1 runtime error or failed verification, 2 usage.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use shrinker_ghf::error::{Error, Result};
use shrinker_ghf::geometry::{curvature_data, shrinker_residual, trusted_max};
use shrinker_ghf::harness::level::Level;
use shrinker_ghf::harness::source::{MeshSource, SourcedMesh};
use shrinker_ghf::harness::{report_emit, run_checks, Config, Format};
use shrinker_ghf::homology::tree_cotree_generators;
use shrinker_ghf::mesh::{read_mesh, write_off};
use shrinker_ghf::operators::{build_drift_pencil, build_l_pencil, lowest_eigenpairs, morse_index, Boundary};

#[derive(Parser)]
#[command(name = "ghf", version, about = "Gaussian harmonic forms and stability spectra on self-shrinker meshes")]
struct Cli {
    /// Seed for the eigensolver start block and random test vectors.
    #[arg(long, global = true, default_value_t = Config::default().seed)]
    seed: u64,
    /// Multiplies every tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Record wall-clock times in reports (breaks byte reproducibility).
    #[arg(long, global = true)]
    timings: bool,
    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated mesh as OFF, with its provenance in a comment.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Per-vertex geometry (curvatures, normals, weight, x^T / x^N split).
    Geom {
        mesh: PathBuf,
    },
    /// Gaussian harmonic basis with diagnostics, Gram and period matrices.
    Ghf {
        mesh: PathBuf,
    },
    /// Lowest eigenvalues of the stability pencil (Laplace pencil on flat meshes).
    Spectrum {
        mesh: PathBuf,
        #[arg(short, default_value_t = 1)]
        k: usize,
    },
    /// Run every check and write the verification report.
    Verify {
        mesh: PathBuf,
        /// Refinement doublings for the trend checks.
        #[arg(long, default_value_t = 1)]
        refine: usize,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Sphere {
        #[arg(long, default_value_t = 4)]
        level: usize,
    },
    Disk {
        #[arg(long, default_value_t = 6.0)]
        radius: f64,
        #[arg(long, default_value_t = 30)]
        rings: usize,
    },
    Cylinder {
        #[arg(long, default_value_t = 3.0)]
        half_length: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
    Angenent {
        #[arg(long, default_value_t = 96)]
        n_angular: usize,
    },
    FlatTorus {
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
}

impl GenKind {
    fn source(&self) -> MeshSource {
        match *self {
            Self::Sphere { level } => MeshSource::Sphere { level },
            Self::Disk { radius, rings } => MeshSource::Disk { radius, rings },
            Self::Cylinder { half_length, n } => MeshSource::Cylinder { half_length, n },
            Self::Angenent { n_angular } => MeshSource::Angenent { n_angular },
            Self::FlatTorus { m, n } => MeshSource::FlatTorus { m, n },
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let mut out = sink(path)?;
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn load(path: &Path) -> Result<SourcedMesh> {
    SourcedMesh::from_file(&read_mesh(path)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = Config { refine: 1, seed: cli.seed, tol_scale: cli.tol_scale, timings: cli.timings };
    if !(cli.tol_scale > 0.0) {
        return Err(Error::InvalidArgument("--tol-scale must be positive".into()));
    }
    let output = cli.output;
    match cli.command {
        Command::Gen { kind } => {
            let source = kind.source();
            let mesh = source.generate()?;
            let mut out = sink(output.as_deref())?;
            write_off(&mut out, &source.to_file(&mesh))?;
            out.flush()?;
        }
        Command::Geom { mesh } => {
            let m = load(&mesh)?;
            let cache = curvature_data(&m.mesh)?;
            let residual = trusted_max(&shrinker_residual(&cache), &cache.trusted);
            let value = json!({
                "mesh_hash": m.mesh.content_hash(),
                "topology": m.mesh.summary(),
                "shrinker_residual_sup": residual,
                "vertices": cache.to_json(),
            });
            write_json(output.as_deref(), &value)?;
        }
        Command::Ghf { mesh } => {
            let m = load(&mesh)?;
            let gens = tree_cotree_generators(m.mesh.topology())?;
            let level = Level::new(m.mesh.clone(), m.is_intrinsic())?;
            let hash = m.mesh.content_hash();
            let basis = match &level.basis {
                Some(b) => b.to_json(&hash),
                None => json!({ "mesh_hash": hash, "count": 0 }),
            };
            let value = json!({
                "generators": gens.to_json(),
                "basis": basis,
                "weight_model": level.model,
            });
            write_json(output.as_deref(), &value)?;
        }
        Command::Spectrum { mesh, k } => {
            let m = load(&mesh)?;
            let intrinsic = m.is_intrinsic();
            let level = Level::new(m.mesh.clone(), intrinsic)?;
            let dirichlet = !level.is_closed();
            let boundary = if dirichlet { Boundary::Dirichlet } else { Boundary::Natural };
            let pencil = if intrinsic {
                build_drift_pencil(&level.mesh, &level.stars, boundary)
            } else {
                build_l_pencil(&level.mesh, &level.stars, &level.cache, boundary)
            };
            let opts = config.eigen_options();
            let spec = lowest_eigenpairs(&pencil, k, &opts)?;
            let index = morse_index(&pencil, &opts)?;
            let mut value = spec.to_json();
            value["mesh_hash"] = json!(m.mesh.content_hash());
            value["operator"] = json!(if intrinsic { "laplace" } else { "stability" });
            value["boundary"] = json!(if dirichlet { "dirichlet" } else { "none" });
            value["morse_index"] = json!(index.index);
            value["morse_index_eigensolver"] = json!(index.eigen_count);
            write_json(output.as_deref(), &value)?;
        }
        Command::Verify { mesh, refine } => {
            let m = load(&mesh)?;
            let config = Config { refine, ..config };
            let report = run_checks(&m, &config)?;
            match output.as_deref() {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(path)?);
                    report_emit(&report, Format::Json, &mut file)?;
                    file.flush()?;
                    report_emit(&report, Format::Table, &mut io::stdout().lock())?;
                }
                None => report_emit(&report, Format::Json, &mut io::stdout().lock())?,
            }
            return Ok(ExitCode::from(report.exit_code() as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

