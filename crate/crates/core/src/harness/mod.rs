//! Verification harness: builds the production level and its refinements,
//! runs every check in a fixed order, and assembles the report.
//!
//! Checks whose hypotheses fail, or which make no sense on the mesh at hand,
//! still appear in the report as `report-only` with a note, so every report
//! lists the same names.

pub mod checks;
pub mod level;
pub mod report;
pub mod source;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::linalg::EigenOptions;
use crate::operators::{build_drift_pencil, build_l_pencil, lowest_eigenpairs, morse_index, Boundary};
use checks::{Context, Spectrum};
use level::Level;
pub use report::{report_emit, CheckResult, Format, Provenance, Status, VerificationReport};
use source::SourcedMesh;

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    /// Number of refinement doublings used for trend checks.
    pub refine: usize,
    /// Seeds the eigensolver start block and the random test vectors.
    pub seed: u64,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    /// Record wall-clock times (makes reports non-reproducible).
    #[serde(skip)]
    pub timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self { refine: 1, seed: EigenOptions::default().seed, tol_scale: 1.0, timings: false }
    }
}

impl Config {
    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions { seed: self.seed, ..EigenOptions::default() }
    }
}

/// Every check, in report order.
pub const CHECK_NAMES: [&str; 16] = [
    "exactness",
    "ghf_oracle",
    "spectral_oracle",
    "shrinker_gate",
    "ghf_conditions",
    "bochner_integral",
    "dual_field_drift",
    "hessian_pairing",
    "curvature_lower_bound",
    "eta_curvature_bound",
    "eta_anisotropy_bound",
    "radius_bound",
    "index_lower_bound",
    "drift_of_radius",
    "stability_eigenfunctions",
    "eta_upper_bound",
];

/// Lowest eigenvalues and Morse index of the production level. Intrinsic
/// meshes get the plain Laplace pencil and nine eigenvalues, shrinkers the
/// stability pencil; meshes with boundary are Dirichlet-truncated.
pub fn production_spectrum(level: &Level, intrinsic: bool, config: &Config) -> Result<Spectrum> {
    let dirichlet = !level.is_closed();
    let boundary = if dirichlet { Boundary::Dirichlet } else { Boundary::Natural };
    let pencil = if intrinsic {
        build_drift_pencil(&level.mesh, &level.stars, boundary)
    } else {
        build_l_pencil(&level.mesh, &level.stars, &level.cache, boundary)
    };
    let k = if intrinsic { 9.min((pencil.dim() / 10).max(1)) } else { 1 };
    let opts = config.eigen_options();
    let spec = lowest_eigenpairs(&pencil, k, &opts)?;
    let index = morse_index(&pencil, &opts)?;
    Ok(Spectrum { eta: spec.eigenvalues, index, dirichlet })
}

pub fn run_checks(mesh: &SourcedMesh, config: &Config) -> Result<VerificationReport> {
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |label: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(label.to_string(), clock.elapsed().as_secs_f64() * 1e3);
        clock = Instant::now();
    };

    let intrinsic = mesh.is_intrinsic();
    let mut levels = vec![Level::new(mesh.mesh.clone(), intrinsic)?];
    lap("level_0", &mut timings);
    // the flat oracle checks need no refinement
    if !intrinsic {
        let mut current = mesh.clone();
        for k in 1..=config.refine {
            current = current.refine()?;
            levels.push(Level::new(current.mesh.clone(), intrinsic)?);
            lap(&format!("level_{k}"), &mut timings);
        }
    }
    let spectrum = production_spectrum(&levels[0], intrinsic, config);
    lap("spectrum", &mut timings);

    let ctx = Context {
        config,
        source: mesh.source.as_ref(),
        intrinsic,
        levels: &levels,
        regenerated: mesh.source.is_some(),
        spectrum: &spectrum,
    };
    let runners: [fn(&Context) -> CheckResult; 16] = [
        checks::exactness,
        checks::ghf_oracle,
        checks::spectral_oracle,
        checks::shrinker_gate,
        checks::ghf_conditions,
        checks::bochner_integral,
        checks::dual_field_drift,
        checks::hessian_pairing,
        checks::curvature_lower_bound,
        checks::eta_curvature_bound,
        checks::eta_anisotropy_bound,
        checks::radius_bound,
        checks::index_lower_bound,
        checks::drift_of_radius,
        checks::stability_eigenfunctions,
        checks::eta_upper_bound,
    ];
    let results = runners
        .iter()
        .map(|run| {
            let t = Instant::now();
            let mut c = run(&ctx);
            if config.timings {
                c.runtime_ms = Some(t.elapsed().as_secs_f64() * 1e3);
            }
            c
        })
        .collect();

    let refinement = match (&mesh.source, levels.len()) {
        (_, 1) => "none",
        (Some(_), _) => "regenerated",
        (None, _) => "midpoint",
    };
    let provenance = Provenance {
        generator: mesh.source.as_ref().map(|s| s.kind().to_string()),
        parameters: mesh.source.as_ref().map(|s| s.parameters()).unwrap_or_default(),
        mesh_hash: mesh.mesh.content_hash(),
        refinement: refinement.to_string(),
    };
    Ok(VerificationReport {
        provenance,
        config: config.clone(),
        topology: mesh.mesh.summary(),
        checks: results,
        timings: config.timings.then_some(timings),
    })
}
