//! The individual checks. Each returns a finished [`CheckResult`]; none of
//! them panics or propagates, so one broken stage cannot hide the others.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2, SVD};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::level::Level;
use super::report::{CheckResult, Status};
use super::source::MeshSource;
use super::Config;
use crate::dec::{exterior_derivatives, mesh_stars};
use crate::error::{Error, Result};
use crate::ghf::GhfSolver;
use crate::homology::periods;
use crate::linalg::weighted_dot;
use crate::operators::MorseIndex;
use crate::shrinkers::sinusoidal_weight;

/// Consecutive residuals must shrink by at least this factor per doubling.
pub const TREND_RATIO: f64 = 0.8;
/// Pairs of residuals both below this count as converged.
pub const TREND_FLOOR: f64 = 1e-8;
/// One-sided slack on theorem inequalities, relative to the dominant scale.
pub const SLACK: f64 = 0.02;
/// Largest mesh handed to the dense least-squares oracle.
pub const DENSE_ORACLE_LIMIT: usize = 1000;

/// Production-level spectrum shared by the spectral and theorem checks.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending Rayleigh quotients.
    pub eta: Vec<f64>,
    pub index: MorseIndex,
    pub dirichlet: bool,
}

pub struct Context<'a> {
    pub config: &'a Config,
    pub source: Option<&'a MeshSource>,
    pub intrinsic: bool,
    /// Production level first, then each refinement.
    pub levels: &'a [Level],
    /// Refined levels were regenerated from provenance, so trends are meaningful.
    pub regenerated: bool,
    pub spectrum: &'a std::result::Result<Spectrum, Error>,
}

impl Context<'_> {
    fn base(&self) -> &Level {
        &self.levels[0]
    }

    fn tol(&self, t: f64) -> f64 {
        t * self.config.tol_scale
    }

    fn compact_with_genus(&self) -> bool {
        self.base().is_closed() && self.base().genus() >= 1
    }

    fn kind(&self) -> Option<&'static str> {
        self.source.map(MeshSource::kind)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Ratios of consecutive values and whether each step passes the trend rule.
pub fn trend(seq: &[f64], floor: f64) -> (Vec<f64>, bool) {
    let mut ok = true;
    let ratios = seq
        .windows(2)
        .map(|w| {
            let converged = w[0] <= floor && w[1] <= floor;
            ok &= converged || w[1] < TREND_RATIO * w[0];
            if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }
        })
        .collect();
    (ratios, ok)
}

/// `production ≤ tol` plus the refinement trend when it can be evaluated.
fn identity(
    ctx: &Context,
    name: &str,
    anchor: &str,
    tol: f64,
    eval: impl Fn(&Level) -> Result<Option<f64>>,
) -> CheckResult {
    let mut seq = Vec::with_capacity(ctx.levels.len());
    for level in ctx.levels {
        match eval(level) {
            Ok(Some(v)) => seq.push(v),
            Ok(None) => return CheckResult::new(name, anchor).note("not defined on this mesh"),
            Err(e) => return CheckResult::errored(name, anchor, &e),
        }
    }
    let tol = ctx.tol(tol);
    let production = seq[0];
    let margin = tol - production;
    let (ratios, decreasing) = trend(&seq, ctx.tol(TREND_FLOOR));
    let trend_state = if seq.len() < 2 {
        "not evaluated"
    } else if !ctx.regenerated {
        "reported only"
    } else if decreasing {
        "decreasing"
    } else {
        "not decreasing"
    };
    let trend_holds = seq.len() < 2 || !ctx.regenerated || decreasing;
    let mut note = match trend_state {
        "not evaluated" => "no refinement requested; trend not evaluated".to_string(),
        "reported only" => "refined without provenance (midpoint split); trend reported only".to_string(),
        "not decreasing" => format!("residual does not shrink by {TREND_RATIO} per doubling"),
        _ => String::new(),
    };
    if margin < 0.0 {
        note = if note.is_empty() { "residual above tolerance".into() } else { format!("residual above tolerance; {note}") };
    }
    CheckResult::new(name, anchor)
        .values(production, 0.0, tol, margin)
        .details(json!({
            "sequence": seq,
            "ratios": ratios,
            "trend": trend_state,
            "trend_ratio_limit": TREND_RATIO,
            "trend_floor": ctx.tol(TREND_FLOOR),
        }))
        .asserted(margin >= 0.0 && trend_holds)
        .note(note)
}

fn not_applicable(name: &str, anchor: &str, why: &str) -> CheckResult {
    CheckResult::new(name, anchor).note(why)
}

const INTRINSIC: &str = "intrinsic oracle mesh, not a shrinker";

pub fn exactness(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("exactness", "d1 d0 = 0, weighted adjointness, period invariance, S 1 = 0");
    let l = ctx.base();
    let topo = l.mesh.topology();
    let d = exterior_derivatives(topo);
    let dd = d.d1.compose(&d.d0).iter().flatten().map(|&(_, v)| v.abs()).max().unwrap_or(0) as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
    let mut random = || -> Vec<f64> { (0..l.mesh.n_vertices()).map(|_| rng.random::<f64>() - 0.5).collect() };
    let (f, g) = (random(), random());
    let (df, dg) = (d.d0.apply(&f), d.d0.apply(&g));
    let lhs = weighted_dot(&f, &l.drift.m0, &l.drift.apply(&g));
    let rhs = -weighted_dot(&df, &l.stars.star1, &dg);
    let scale: f64 = df.iter().zip(&dg).zip(&l.stars.star1).map(|((a, b), w)| (a * b * w).abs()).sum();
    let adjoint = (lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE);

    let ones = vec![1.0; l.mesh.n_vertices()];
    let kernel = max_abs(&l.drift.stiffness.mul_vec(&ones)) / l.drift.stiffness.max_abs().max(f64::MIN_POSITIVE);

    let period = match &l.generators {
        Some(gens) if !gens.is_empty() => match periods(topo, &df, &gens.cycles) {
            Ok(p) => Some(max_abs(&p) / max_abs(&f)),
            Err(e) => return CheckResult::errored(name, anchor, &e),
        },
        _ => None,
    };
    let worst = [dd, adjoint, kernel, period.unwrap_or(0.0)].into_iter().fold(0.0, f64::max);
    let tol = ctx.tol(1e-12);
    CheckResult::new(name, anchor)
        .values(worst, 0.0, tol, tol - worst)
        .details(json!({
            "d1_d0_max_entry": dd,
            "adjointness_relative": adjoint,
            "stiffness_times_one_relative": kernel,
            "exact_form_period_relative": period,
        }))
        .asserted(worst <= tol)
        .note(if period.is_none() { "no homology cycles; period part skipped" } else { "" })
}

/// Least-squares `a dx + b dy` fit to a one-form on a flat mesh.
fn constant_form_error(l: &Level, omega: &[f64]) -> f64 {
    let disp: Vec<Vector2<f64>> = l
        .mesh
        .edges()
        .iter()
        .map(|&[a, b]| {
            let d = l.mesh.displacement(a, b);
            Vector2::new(d.x, d.y)
        })
        .collect();
    let mut normal = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for (d, &w) in disp.iter().zip(omega) {
        normal += d * d.transpose();
        rhs += d * w;
    }
    let Some(coef) = normal.try_inverse().map(|m| m * rhs) else { return f64::INFINITY };
    let fit: Vec<f64> = disp.iter().map(|d| d.dot(&coef)).collect();
    let err: Vec<f64> = omega.iter().zip(&fit).map(|(a, b)| a - b).collect();
    max_abs(&err) / max_abs(&fit).max(f64::MIN_POSITIVE)
}

/// Class minimizer by dense SVD least squares on `star1^{1/2} (ω0 + d0 f)`,
/// with `f_0 = 0` pinned so the system has full column rank.
fn dense_minimizer(l: &Level, star1: &[f64], omega0: &[f64]) -> Result<Vec<f64>> {
    let d0 = exterior_derivatives(l.mesh.topology()).d0.to_csr::<f64>().to_dense();
    let d0 = d0.columns(1, d0.ncols() - 1).into_owned();
    let sqrt_w: Vec<f64> = star1.iter().map(|w| w.max(0.0).sqrt()).collect();
    let a = DMatrix::from_fn(d0.nrows(), d0.ncols(), |e, v| sqrt_w[e] * d0[(e, v)]);
    let b = DVector::from_fn(omega0.len(), |e, _| -sqrt_w[e] * omega0[e]);
    let svd = SVD::try_new(a, true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidArgument("dense SVD oracle did not converge".into()))?;
    let f = svd.solve(&b, 1e-12).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let df = &d0 * f;
    Ok(omega0.iter().zip(df.iter()).map(|(a, b)| a + b).collect())
}

pub fn ghf_oracle(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("ghf_oracle", "harmonic forms on the flat torus; dense minimization over the class");
    let l = ctx.base();
    if !(ctx.intrinsic && l.is_closed() && l.genus() == 1) {
        return not_applicable(name, anchor, "needs the intrinsic flat torus");
    }
    let (Some(gens), Some(basis)) = (&l.generators, &l.basis) else {
        return not_applicable(name, anchor, "no cohomology basis");
    };
    let unit = basis.forms.iter().map(|f| constant_form_error(l, f)).fold(0.0, f64::max);

    let dense = if l.mesh.n_vertices() <= DENSE_ORACLE_LIMIT {
        let run = || -> Result<f64> {
            let stars = mesh_stars(&l.mesh, &sinusoidal_weight(&l.mesh, 0.5))?;
            let solver = GhfSolver::new(&l.mesh, &stars);
            let mut worst = 0.0f64;
            for j in 0..gens.len() {
                let omega0 = gens.cocycle::<f64>(j);
                let omega = solver.minimize(&omega0)?;
                let oracle = dense_minimizer(l, &stars.star1, &omega0)?;
                let err: Vec<f64> = omega.iter().zip(&oracle).map(|(a, b)| a - b).collect();
                worst = worst.max(max_abs(&err) / max_abs(&oracle));
            }
            Ok(worst)
        };
        match run() {
            Ok(v) => Some(v),
            Err(e) => return CheckResult::errored(name, anchor, &e),
        }
    } else {
        None
    };
    let worst = unit.max(dense.unwrap_or(0.0));
    let tol = ctx.tol(1e-8);
    CheckResult::new(name, anchor)
        .values(worst, 0.0, tol, tol - worst)
        .details(json!({
            "unit_weight_constant_form_error": unit,
            "weighted_dense_oracle_error": dense,
            "synthetic_weight": "1 + 0.5 sin(2 pi u)",
        }))
        .asserted(worst <= tol)
        .note(if dense.is_none() { format!("dense oracle skipped above {DENSE_ORACLE_LIMIT} vertices") } else { String::new() })
}

pub fn spectral_oracle(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("spectral_oracle", "closed-form spectra: sphere, Gaussian plane, flat torus");
    let spec = match ctx.spectrum {
        Ok(s) => s,
        Err(e) => return CheckResult::errored(name, anchor, e),
    };
    let eta0 = spec.eta[0];
    let details = json!({ "eigenvalues": spec.eta, "morse_index": spec.index.index, "dirichlet": spec.dirichlet });
    match ctx.kind() {
        Some("sphere") => {
            let (err, tol) = ((eta0 + 1.0).abs(), ctx.tol(0.05));
            let index_ok = spec.index.index == 4 && spec.index.consistent();
            CheckResult::new(name, anchor)
                .values(eta0, -1.0, tol, tol - err)
                .details(details)
                .asserted(err <= tol && index_ok)
                .note(format!("eta0 = -1 within 5%, index {} (expected 4)", spec.index.index))
        }
        Some("disk") => {
            let (err, tol) = ((eta0 + 0.5).abs() / 0.5, ctx.tol(0.1));
            let index_ok = spec.index.index == 1 && spec.index.consistent();
            CheckResult::new(name, anchor)
                .values(eta0, -0.5, tol, tol - err)
                .details(details)
                .asserted(err <= tol && index_ok)
                .note(format!("Dirichlet eta0 = -1/2 within 10%, index {} (expected 1)", spec.index.index))
        }
        Some("flat-torus") if spec.eta.len() >= 9 => {
            let base = 4.0 * PI * PI;
            let oracle = [0.0, base, base, base, base, 2.0 * base, 2.0 * base, 2.0 * base, 2.0 * base];
            let err = spec.eta.iter().zip(&oracle).map(|(e, o)| (e - o).abs() / o.max(base)).fold(0.0, f64::max);
            let tol = ctx.tol(0.01);
            CheckResult::new(name, anchor)
                .values(err, 0.0, tol, tol - err)
                .details(json!({ "eigenvalues": spec.eta, "oracle": oracle }))
                .asserted(err <= tol)
                .note("first nine Laplace eigenvalues against 4 pi^2 (p^2 + q^2)")
        }
        _ => CheckResult::new(name, anchor)
            .details(details)
            .note("no closed-form spectrum for this surface; values reported"),
    }
}

pub fn shrinker_gate(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("shrinker_gate", "shrinker equation H = x^N / 2");
    if ctx.intrinsic {
        return not_applicable(name, anchor, INTRINSIC);
    }
    identity(ctx, name, anchor, 1e-2, |l| Ok(Some(l.shrinker_gate())))
}

pub fn ghf_conditions(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("ghf_conditions", "Gaussian harmonic forms: closed and Gaussian co-closed");
    let l = ctx.base();
    let Some(basis) = &l.basis else {
        return not_applicable(name, anchor, "no harmonic forms: genus 0 or boundary");
    };
    let closed = basis.diagnostics.iter().map(|d| d.closedness_residual).fold(0.0, f64::max);
    let coclosed = basis.diagnostics.iter().map(|d| d.coclosedness_residual).fold(0.0, f64::max);
    let n = basis.len();
    let period_err = (basis.periods.clone() - DMatrix::identity(n, n)).amax();
    let gram_pd = basis.gram_is_positive_definite();
    let pointwise: Vec<Option<f64>> = ctx.levels.iter().map(Level::pointwise_el).collect();
    let tol = ctx.tol(1e-8);
    let ok = closed <= ctx.tol(1e-10) && coclosed <= tol && period_err <= tol && gram_pd && n as i64 == 2 * l.genus();
    CheckResult::new(name, anchor)
        .values(coclosed, 0.0, tol, tol - coclosed)
        .details(json!({
            "forms": n,
            "closedness_residual": closed,
            "coclosedness_residual": coclosed,
            "period_matrix_identity_error": period_err,
            "gram_positive_definite": gram_pd,
            "pointwise_divergence_residual_by_level": pointwise,
        }))
        .asserted(ok)
}

/// Shared gate for the integral identities that need harmonic forms.
fn needs_forms(ctx: &Context) -> Option<&'static str> {
    if ctx.intrinsic {
        Some(INTRINSIC)
    } else if !ctx.compact_with_genus() {
        Some("needs a closed mesh of genus >= 1")
    } else {
        None
    }
}

pub fn bochner_integral(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("bochner_integral", "integrated Bochner identity for the dual field of a harmonic form");
    if let Some(why) = needs_forms(ctx) {
        return not_applicable(name, anchor, why);
    }
    let mut c = identity(ctx, name, anchor, 0.1, |l| Ok(l.integrated_bochner()?.map(|b| b.0)));
    if let Ok(Some((_, lhs, rhs))) = ctx.base().integrated_bochner() {
        c.details["gradient_energy"] = json!(lhs);
        c.details["curvature_side"] = json!(rhs);
    }
    c
}

pub fn dual_field_drift(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("dual_field_drift", "drift Laplacian of the dual field of a harmonic form");
    if let Some(why) = needs_forms(ctx) {
        return not_applicable(name, anchor, why);
    }
    identity(ctx, name, anchor, 0.1, Level::drift_of_dual_field)
}

pub fn hessian_pairing(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("hessian_pairing", "Hessian of the coordinate functions paired with a gradient form");
    if ctx.intrinsic {
        return not_applicable(name, anchor, INTRINSIC);
    }
    identity(ctx, name, anchor, 0.1, |l| l.hessian_pairing().map(Some))
}

pub fn curvature_lower_bound(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("curvature_lower_bound", "genus >= 1 forces sup max(k1^2, k2^2) >= 1/2");
    if ctx.intrinsic {
        return not_applicable(name, anchor, INTRINSIC);
    }
    let sup = ctx.base().sup_kappa_sq();
    let slack = ctx.tol(SLACK) * 0.5;
    let c = CheckResult::new(name, anchor).values(sup, 0.5, slack, sup - 0.5 + slack);
    if ctx.compact_with_genus() {
        c.asserted(sup >= 0.5 - slack)
    } else {
        c.note("hypothesis genus >= 1 fails; vacuous")
    }
}

/// `lhs ≤ rhs` within the relative slack.
fn upper_bound(ctx: &Context, name: &str, anchor: &str, lhs: f64, rhs: f64, asserted: bool, why: &str) -> CheckResult {
    let slack = ctx.tol(SLACK) * lhs.abs().max(rhs.abs());
    let c = CheckResult::new(name, anchor).values(lhs, rhs, slack, rhs + slack - lhs);
    if asserted {
        c.asserted(lhs <= rhs + slack)
    } else {
        c.note(why)
    }
}

fn eta0<'a>(ctx: &Context<'a>) -> std::result::Result<f64, &'a Error> {
    ctx.spectrum.as_ref().map(|s| s.eta[0])
}

pub fn eta_curvature_bound(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("eta_curvature_bound", "eta0 <= -1 + sup max(k1^2, k2^2) for genus >= 1");
    if ctx.intrinsic {
        return not_applicable(name, anchor, INTRINSIC);
    }
    let eta = match eta0(ctx) {
        Ok(e) => e,
        Err(e) => return CheckResult::errored(name, anchor, e),
    };
    let rhs = -1.0 + ctx.base().sup_kappa_sq();
    upper_bound(ctx, name, anchor, eta, rhs, ctx.compact_with_genus(), "hypothesis genus >= 1 fails; vacuous")
}

pub fn eta_anisotropy_bound(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("eta_anisotropy_bound", "eta0 <= -3/2 + sup |k1^2 - k2^2| for compact genus >= 1");
    if ctx.intrinsic {
        return not_applicable(name, anchor, INTRINSIC);
    }
    let eta = match eta0(ctx) {
        Ok(e) => e,
        Err(e) => return CheckResult::errored(name, anchor, e),
    };
    let rhs = -1.5 + ctx.base().delta();
    upper_bound(ctx, name, anchor, eta, rhs, ctx.compact_with_genus(), "hypothesis compact genus >= 1 fails; vacuous")
}

/// `inf |x|² ≤ 4 / (5/2 − δ)`, asserted only when `δ < 5/2` and the
/// topology hypothesis holds.
pub fn radius_bound_check(delta: f64, inf_x_sq: f64, topology_ok: bool, tol_scale: f64) -> CheckResult {
    let (name, anchor) = ("radius_bound", "delta < 5/2 implies inf |x|^2 <= 4 / (5/2 - delta)");
    let details = json!({ "delta": delta, "hypothesis_delta_below": 2.5, "topology_hypothesis": topology_ok });
    if !topology_ok {
        return CheckResult::new(name, anchor).details(details).note("hypothesis compact genus >= 1 fails; vacuous");
    }
    if delta >= 2.5 {
        return CheckResult::new(name, anchor)
            .details(details)
            .note(format!("hypothesis fails: delta = {delta:.4} >= 5/2"));
    }
    let rhs = 4.0 / (2.5 - delta);
    let slack = SLACK * tol_scale * inf_x_sq.abs().max(rhs.abs());
    CheckResult::new(name, anchor)
        .values(inf_x_sq, rhs, slack, rhs + slack - inf_x_sq)
        .details(details)
        .asserted(inf_x_sq <= rhs + slack)
}

/// `index ≥ g/3`, asserted only when `δ < 1` and the topology hypothesis holds.
pub fn index_bound_check(delta: f64, index: &MorseIndex, genus: i64, topology_ok: bool) -> CheckResult {
    let (name, anchor) = ("index_lower_bound", "|k1^2 - k2^2| <= delta < 1 implies Morse index >= g/3");
    let rhs = genus as f64 / 3.0;
    let lhs = index.index as f64;
    let details = json!({
        "delta": delta,
        "hypothesis_delta_below": 1.0,
        "genus": genus,
        "morse_index": index.index,
        "eigensolver_count": index.eigen_count,
        "topology_hypothesis": topology_ok,
    });
    let c = CheckResult::new(name, anchor).values(lhs, rhs, 0.0, lhs - rhs).details(details);
    if !topology_ok {
        c.note("hypothesis compact genus >= 1 fails; vacuous")
    } else if delta >= 1.0 {
        c.note(format!("hypothesis fails: delta = {delta:.4} >= 1"))
    } else {
        c.asserted(lhs >= rhs && index.consistent())
    }
}

pub fn radius_bound(ctx: &Context) -> CheckResult {
    if ctx.intrinsic {
        return not_applicable("radius_bound", "delta < 5/2 implies inf |x|^2 <= 4 / (5/2 - delta)", INTRINSIC);
    }
    let l = ctx.base();
    radius_bound_check(l.delta(), l.inf_x_sq(), ctx.compact_with_genus(), ctx.config.tol_scale)
}

pub fn index_lower_bound(ctx: &Context) -> CheckResult {
    let anchor = "|k1^2 - k2^2| <= delta < 1 implies Morse index >= g/3";
    if ctx.intrinsic {
        return not_applicable("index_lower_bound", anchor, INTRINSIC);
    }
    let spec = match ctx.spectrum {
        Ok(s) => s,
        Err(e) => return CheckResult::errored("index_lower_bound", anchor, e),
    };
    let l = ctx.base();
    index_bound_check(l.delta(), &spec.index, l.genus(), ctx.compact_with_genus())
}

pub fn drift_of_radius(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("drift_of_radius", "drift Laplacian of |x|^2 equals 4 - |x|^2");
    if ctx.intrinsic {
        return not_applicable(name, anchor, INTRINSIC);
    }
    let mut c = identity(ctx, name, anchor, 0.1, |l| Ok(Some(l.drift_of_radius().0)));
    let with_l: Vec<f64> = ctx.levels.iter().map(|l| l.drift_of_radius().1).collect();
    c.details["stability_operator_version"] = json!(with_l);
    if ctx.kind() == Some("disk") && c.status != Status::Error {
        c.status = Status::ReportOnly;
        c.note = "concentric-ring disk: pointwise cotan Laplacian is not consistent at the ring seams".into();
    }
    c
}

pub fn stability_eigenfunctions(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("stability_eigenfunctions", "LH = H and L<v, n> = <v, n>/2");
    if ctx.intrinsic {
        return not_applicable(name, anchor, INTRINSIC);
    }
    let mut c = identity(ctx, name, anchor, 0.1, |l| {
        let (h, t) = l.stability_eigenfunctions();
        Ok(Some(h.max(t)))
    });
    let parts: Vec<Value> = ctx
        .levels
        .iter()
        .map(|l| {
            let (h, t) = l.stability_eigenfunctions();
            json!({ "mean_curvature": h, "translations": t })
        })
        .collect();
    c.details["parts"] = json!(parts);
    c
}

pub fn eta_upper_bound(ctx: &Context) -> CheckResult {
    let (name, anchor) = ("eta_upper_bound", "eta0 <= -1 on compact codimension-one shrinkers");
    if ctx.intrinsic {
        return not_applicable(name, anchor, INTRINSIC);
    }
    let eta = match eta0(ctx) {
        Ok(e) => e,
        Err(e) => return CheckResult::errored(name, anchor, e),
    };
    let compact = ctx.base().is_closed();
    upper_bound(ctx, name, anchor, eta, -1.0, compact, "non-compact: Dirichlet-truncated eta0 reported")
}
