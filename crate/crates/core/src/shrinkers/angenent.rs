//! Shooting for the rotationally symmetric shrinking torus.
//!
//! The meridian curve `(x, r)` of a surface of revolution about the
//! x1-axis, parametrised by arclength with tangent angle `θ`, satisfies
//! `H = x^N / 2` exactly when
//!
//! ```text
//! x' = cos θ,   r' = sin θ,   θ' = cos θ / r - (r cos θ - x sin θ) / 2.
//! ```
//!
//! Starting on the mirror plane `x = 0` at radius `r0` with `θ = 0`, the
//! curve is followed to its next crossing of `x = 0`. It closes up after
//! reflection exactly when it crosses perpendicularly, i.e. `θ = π` there.
//! `r0` is found by bisection on `θ_cross - π`.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
struct State {
    x: f64,
    r: f64,
    theta: f64,
}

fn rhs(s: &State) -> State {
    let (sin, cos) = s.theta.sin_cos();
    State { x: cos, r: sin, theta: cos / s.r - (s.r * cos - s.x * sin) * 0.5 }
}

/// Same curve in the parameter `τ = ∫ ds / r`, in which a revolved grid with
/// equal steps has square cells.
fn rhs_conformal(s: &State) -> State {
    let a = rhs(s);
    State { x: s.r * a.x, r: s.r * a.r, theta: s.r * a.theta }
}

fn rk4(s: &State, h: f64) -> State {
    rk4_with(rhs, s, h)
}

fn rk4_with(f: fn(&State) -> State, s: &State, h: f64) -> State {
    let rhs = f;
    let add = |a: &State, k: &State, c: f64| State { x: a.x + c * k.x, r: a.r + c * k.r, theta: a.theta + c * k.theta };
    let k1 = rhs(s);
    let k2 = rhs(&add(s, &k1, h * 0.5));
    let k3 = rhs(&add(s, &k2, h * 0.5));
    let k4 = rhs(&add(s, &k3, h));
    State {
        x: s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        r: s.r + h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
        theta: s.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ShootingOptions {
    /// RK4 arclength step.
    pub step: f64,
    /// Bisection stops when the bracket on `r0` is narrower than this.
    pub r0_tol: f64,
    /// Number of sub-intervals scanned for a sign change.
    pub scan: usize,
    /// Give up on a shot after this much arclength.
    pub max_length: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { step: 1e-3, r0_tol: 1e-12, scan: 64, max_length: 40.0 }
    }
}

/// Result of one shot: state and arclength at the first return to `x = 0`.
fn shoot(r0: f64, opts: &ShootingOptions) -> Result<(State, f64)> {
    let mut s = State { x: 0.0, r: r0, theta: 0.0 };
    let mut len = 0.0;
    let h = opts.step;
    while len < opts.max_length {
        let next = rk4(&s, h);
        if !(next.r > 1e-6) || !next.x.is_finite() || !next.theta.is_finite() {
            return Err(Error::StepFailure(next.r));
        }
        if len > 0.0 && next.x < 0.0 && s.x >= 0.0 {
            // Newton on the partial step length, dx/ds = cos θ
            let mut tau = h * s.x / (s.x - next.x);
            for _ in 0..20 {
                let p = rk4(&s, tau);
                let dx = p.theta.cos();
                if dx.abs() < 1e-12 {
                    break;
                }
                let delta = p.x / dx;
                tau = (tau - delta).clamp(0.0, h);
                if delta.abs() < 1e-15 {
                    break;
                }
            }
            return Ok((rk4(&s, tau), len + tau));
        }
        s = next;
        len += h;
    }
    Err(Error::StepFailure(s.r))
}

fn closure(r0: f64, opts: &ShootingOptions) -> Option<f64> {
    shoot(r0, opts).ok().map(|(s, _)| s.theta - std::f64::consts::PI)
}

/// Closed meridian curve of the shrinking torus, sampled uniformly in
/// arclength, mirror-symmetric about `x = 0`. Not repeated at the end.
#[derive(Clone, Debug)]
pub struct ProfileCurve<T> {
    pub points: Vec<(T, T)>,
    /// `|θ_cross - π|` at the converged radius.
    pub closure_error: f64,
    pub shooting_parameter: f64,
    /// Arclength of the half curve from `(0, r0)` to the far crossing.
    pub half_length: f64,
    /// `∫ ds / r` over the same half curve.
    pub conformal_half_length: f64,
}

/// How the converged half curve is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// This many equal arclength steps.
    Arclength(usize),
    /// Equal steps in `∫ ds / r`, sized so that revolving with `n_angular`
    /// segments gives square cells.
    Conformal { n_angular: usize },
}

/// Scans `bracket` for a sign change of the closure functional, bisects on
/// the first one, then samples the closed curve symmetrically about `x = 0`.
pub fn angenent_profile<T: Real>(
    bracket: (f64, f64),
    sampling: Sampling,
    opts: &ShootingOptions,
) -> Result<ProfileCurve<T>> {
    let (lo, hi) = bracket;
    let enough = match sampling {
        Sampling::Arclength(k) => k >= 2,
        Sampling::Conformal { n_angular } => n_angular >= 3,
    };
    if !(lo > 0.0 && hi > lo) || !enough {
        return Err(Error::InvalidArgument("need 0 < lo < hi and at least two samples".into()));
    }
    let mut prev: Option<(f64, f64)> = None;
    let mut found = None;
    for i in 0..=opts.scan {
        let r0 = lo + (hi - lo) * i as f64 / opts.scan as f64;
        let Some(c) = closure(r0, opts) else {
            prev = None;
            continue;
        };
        if let Some((pr, pc)) = prev {
            if pc.signum() != c.signum() && (pc - c).abs() < 1.0 {
                found = Some((pr, r0, pc));
                break;
            }
        }
        prev = Some((r0, c));
    }
    let (mut a, mut b, mut fa) = found.ok_or(Error::NoSignChange)?;
    while b - a > opts.r0_tol {
        let m = 0.5 * (a + b);
        let fm = closure(m, opts).ok_or(Error::StepFailure(m))?;
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let r0 = 0.5 * (a + b);
    let (end, half_length) = shoot(r0, opts)?;
    let closure_error = (end.theta - std::f64::consts::PI).abs();

    // conformal length of the half curve
    let mut s = State { x: 0.0, r: r0, theta: 0.0 };
    let mut conformal_half = 0.0;
    let fine = (half_length / opts.step).ceil() as usize;
    let h = half_length / fine as f64;
    for _ in 0..fine {
        let next = rk4(&s, h);
        // Simpson on 1/r over the step
        let mid = rk4(&s, 0.5 * h);
        conformal_half += h / 6.0 * (1.0 / s.r + 4.0 / mid.r + 1.0 / next.r);
        s = next;
    }

    let (samples, substeps) = match sampling {
        Sampling::Arclength(k) => (k, ((half_length / k as f64) / opts.step).ceil().max(1.0) as usize),
        Sampling::Conformal { n_angular } => {
            // ring spacing √3/2 of the angular step: near-equilateral once staggered
            let rings = conformal_half * n_angular as f64 / std::f64::consts::TAU * 2.0 / 3f64.sqrt();
            let k = (rings.round() as usize).max(2);
            (k, ((half_length / k as f64) / opts.step).ceil().max(1.0) as usize)
        }
    };
    let (f, total): (fn(&State) -> State, f64) = match sampling {
        Sampling::Arclength(_) => (rhs, half_length),
        Sampling::Conformal { .. } => (rhs_conformal, conformal_half),
    };
    let h = total / (samples * substeps) as f64;
    let mut s = State { x: 0.0, r: r0, theta: 0.0 };
    let mut half = vec![(s.x, s.r)];
    for _ in 0..samples {
        for _ in 0..substeps {
            s = rk4_with(f, &s, h);
        }
        half.push((s.x, s.r));
    }
    let half_samples = samples;
    // pin the far end onto the mirror plane
    half[half_samples].0 = 0.0;
    let mut points: Vec<(T, T)> = half.iter().map(|&(x, r)| (T::lit(x), T::lit(r))).collect();
    for &(x, r) in half[1..half_samples].iter().rev() {
        points.push((T::lit(-x), T::lit(r)));
    }
    Ok(ProfileCurve { points, closure_error, shooting_parameter: r0, half_length, conformal_half_length: conformal_half })
}

impl<T: Real> ProfileCurve<T> {
    /// Two-column `x r` text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (x, r) in &self.points {
            s.push_str(&format!("{:.16e} {:.16e}\n", x.to_f64_lossy(), r.to_f64_lossy()));
        }
        s
    }
}

/// Default shooting bracket for `r0`.
pub const ANGENENT_BRACKET: (f64, f64) = (0.1, 2.0);

/// Conformally sampled shrinking torus with `n_angular` segments around
/// the axis, together with its profile.
pub fn angenent_torus<T: Real>(n_angular: usize) -> Result<(ProfileCurve<T>, TriMesh<T>)> {
    let profile = angenent_profile(ANGENENT_BRACKET, Sampling::Conformal { n_angular }, &ShootingOptions::default())?;
    let mesh = revolve_profile(&profile, n_angular)?;
    Ok((profile, mesh))
}

/// Torus of revolution of a closed profile about the x1-axis.
pub fn revolve_profile<T: Real>(profile: &ProfileCurve<T>, n_angular: usize) -> Result<TriMesh<T>> {
    if n_angular < 3 {
        return Err(Error::InvalidArgument("need at least 3 angular samples".into()));
    }
    let np = profile.points.len();
    if np < 4 || np % 2 == 1 {
        return Err(Error::InvalidArgument("profile needs an even number (at least 4) of points".into()));
    }
    if let Some(i) = profile.points.iter().position(|&(_, r)| !(r > T::zero())) {
        return Err(Error::SelfIntersection(i));
    }
    // odd rings are rotated half a step; the profile has an even point count
    let mut positions = Vec::with_capacity(np * n_angular);
    for (i, &(x, r)) in profile.points.iter().enumerate() {
        let stagger = if i % 2 == 1 { T::lit(0.5) } else { T::zero() };
        for j in 0..n_angular {
            let a = T::two_pi() * (T::from_count(j) + stagger) / T::from_count(n_angular);
            positions.push(Vector3::new(x, r * a.cos(), r * a.sin()));
        }
    }
    let idx = |i: usize, j: usize| (i % np) * n_angular + j % n_angular;
    let mut faces = Vec::with_capacity(2 * np * n_angular);
    for i in 0..np {
        for j in 0..n_angular {
            if i % 2 == 0 {
                faces.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
                faces.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            } else {
                faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            }
        }
    }
    TriMesh::new(positions, &faces)
}
