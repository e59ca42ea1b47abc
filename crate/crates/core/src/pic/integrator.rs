use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::spline::{FieldSolution, SplinePoissonSolver};
use crate::error::{Error, Result};
use crate::model::ParticleEnsemble;
use crate::par;

/// Tolerance on the max-norm position increment of the implicit kinds.
pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorKind {
    /// Explicit Euler; only `g_like` is rescaled by the flow determinant.
    ExplicitEuler,
    /// Explicit Euler; `f_like` and `g_like` are both rescaled.
    ExplicitEuler2,
    SymplecticEuler,
    ImplicitMidpoint,
    CrankNicolson,
    Ruth3,
}

impl IntegratorKind {
    pub const ALL: [IntegratorKind; 6] = [
        IntegratorKind::ExplicitEuler,
        IntegratorKind::ExplicitEuler2,
        IntegratorKind::SymplecticEuler,
        IntegratorKind::ImplicitMidpoint,
        IntegratorKind::CrankNicolson,
        IntegratorKind::Ruth3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IntegratorKind::ExplicitEuler => "explicit_euler",
            IntegratorKind::ExplicitEuler2 => "explicit_euler2",
            IntegratorKind::SymplecticEuler => "symplectic_euler",
            IntegratorKind::ImplicitMidpoint => "implicit_midpoint",
            IntegratorKind::CrankNicolson => "crank_nicolson",
            IntegratorKind::Ruth3 => "ruth3",
        }
    }

    /// Whether the likelihoods are left untouched by a step.
    pub fn preserves_likelihoods(&self) -> bool {
        !matches!(self, IntegratorKind::ExplicitEuler | IntegratorKind::ExplicitEuler2)
    }
}

impl fmt::Display for IntegratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IntegratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let kind = match norm.as_str() {
            "explicit_euler" | "euler" => IntegratorKind::ExplicitEuler,
            "explicit_euler2" | "euler2" => IntegratorKind::ExplicitEuler2,
            "symplectic_euler" | "seuler" => IntegratorKind::SymplecticEuler,
            "implicit_midpoint" | "midpoint" => IntegratorKind::ImplicitMidpoint,
            "crank_nicolson" | "cn" => IntegratorKind::CrankNicolson,
            "ruth3" => IntegratorKind::Ruth3,
            _ => return Err(Error::InvalidInput(format!("unknown integrator '{s}'"))),
        };
        Ok(kind)
    }
}

/// Electric field and its x-derivative.
pub trait ForceField: Sync {
    fn e(&self, x: f64) -> f64;
    fn de_dx(&self, x: f64) -> f64;
}

impl ForceField for FieldSolution {
    fn e(&self, x: f64) -> f64 {
        self.eval_e(x)
    }

    fn de_dx(&self, x: f64) -> f64 {
        self.eval_de_dx(x)
    }
}

impl<T: ForceField + ?Sized> ForceField for &T {
    fn e(&self, x: f64) -> f64 {
        (**self).e(x)
    }

    fn de_dx(&self, x: f64) -> f64 {
        (**self).de_dx(x)
    }
}

/// A prescribed field given by closures for `E` and `dE/dx`.
pub struct FnField<E, D> {
    pub e: E,
    pub de_dx: D,
}

impl<E, D> ForceField for FnField<E, D>
where
    E: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    fn e(&self, x: f64) -> f64 {
        (self.e)(x)
    }

    fn de_dx(&self, x: f64) -> f64 {
        (self.de_dx)(x)
    }
}

/// Fixed-point statistics of one step (zero iterations for explicit kinds).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PushReport {
    pub iterations: usize,
    pub residual: f64,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    par::max_range(a.len(), |k| (a[k] - b[k]).abs()).max(0.0)
}

/// Advances the ensemble by one step, obtaining the field for any set of
/// positions from `field_at`. Positions are wrapped into the domain by the
/// caller.
fn advance<F, P>(kind: IntegratorKind, e: &mut ParticleEnsemble, dt: f64, qm: f64, field_at: P) -> Result<PushReport>
where
    F: ForceField,
    P: Fn(&[f64]) -> F,
{
    let n = e.len();
    let mut report = PushReport::default();
    match kind {
        IntegratorKind::ExplicitEuler | IntegratorKind::ExplicitEuler2 => {
            let field = field_at(&e.x);
            let dets = par::map_range(n, |k| 1.0 - dt * dt * qm * field.de_dx(e.x[k]));
            if let Some(&d) = dets.iter().find(|d| !(**d > 0.0)) {
                return Err(Error::NonPositiveLikelihood { value: d });
            }
            let accel = par::map_range(n, |k| qm * field.e(e.x[k]));
            for k in 0..n {
                e.x[k] += dt * e.v[k];
                e.v[k] += dt * accel[k];
                e.g_like[k] /= dets[k];
            }
            if kind == IntegratorKind::ExplicitEuler2 {
                for k in 0..n {
                    e.f_like[k] /= dets[k];
                }
            } else {
                e.refresh_weights();
            }
        }
        IntegratorKind::SymplecticEuler => {
            for k in 0..n {
                e.x[k] += dt * e.v[k];
            }
            let field = field_at(&e.x);
            let x = &e.x;
            par::for_each_mut(&mut e.v, |k, v| *v += dt * qm * field.e(x[k]));
        }
        IntegratorKind::Ruth3 => {
            let c = crate::spectral::SplitCoefficients::ruth3();
            for (&kick, &drift) in c.kick.iter().zip(&c.drift) {
                let field = field_at(&e.x);
                let x = &e.x;
                par::for_each_mut(&mut e.v, |k, v| *v += kick * dt * qm * field.e(x[k]));
                for k in 0..n {
                    e.x[k] += drift * dt * e.v[k];
                }
            }
        }
        IntegratorKind::ImplicitMidpoint => {
            let base: Vec<f64> = (0..n).map(|k| e.x[k] + 0.5 * dt * e.v[k]).collect();
            let mut y = base.clone();
            let mut converged = false;
            while report.iterations < FIXED_POINT_MAX_ITER {
                let field = field_at(&y);
                let next = par::map_range(n, |k| base[k] + 0.25 * dt * dt * qm * field.e(y[k]));
                report.iterations += 1;
                report.residual = max_abs_diff(&next, &y);
                y = next;
                if report.residual <= FIXED_POINT_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::FixedPointDiverged {
                    iterations: report.iterations,
                    residual: report.residual,
                });
            }
            let field = field_at(&y);
            for k in 0..n {
                let a = qm * field.e(y[k]);
                let v_half = e.v[k] + 0.5 * dt * a;
                e.x[k] += dt * v_half;
                e.v[k] += dt * a;
            }
        }
        IntegratorKind::CrankNicolson => {
            let field0 = field_at(&e.x);
            let a0 = par::map_range(n, |k| qm * field0.e(e.x[k]));
            let base: Vec<f64> = (0..n).map(|k| e.x[k] + dt * e.v[k] + 0.25 * dt * dt * a0[k]).collect();
            let mut z: Vec<f64> = (0..n).map(|k| base[k] + 0.25 * dt * dt * a0[k]).collect();
            let mut converged = false;
            while report.iterations < FIXED_POINT_MAX_ITER {
                let field = field_at(&z);
                let next = par::map_range(n, |k| base[k] + 0.25 * dt * dt * qm * field.e(z[k]));
                report.iterations += 1;
                report.residual = max_abs_diff(&next, &z);
                z = next;
                if report.residual <= FIXED_POINT_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::FixedPointDiverged {
                    iterations: report.iterations,
                    residual: report.residual,
                });
            }
            let field = field_at(&z);
            for k in 0..n {
                e.v[k] += 0.5 * dt * (a0[k] + qm * field.e(z[k]));
                e.x[k] = z[k];
            }
        }
    }
    Ok(report)
}

/// One self-consistent step: the field is re-deposited from the markers
/// whenever the scheme needs it. Positions are wrapped afterwards.
pub fn push(
    kind: IntegratorKind,
    e: &mut ParticleEnsemble,
    solver: &SplinePoissonSolver,
    dt: f64,
) -> Result<PushReport> {
    let qm = solver.species.q_over_m();
    let w = e.w.clone();
    let n = e.len();
    let report = advance(kind, e, dt, qm, |x: &[f64]| solver.solve(&solver.deposit_at(x, &w, n), 0.0))?;
    e.wrap_positions(&solver.domain);
    Ok(report)
}

/// One step in a prescribed field. Positions are not wrapped.
pub fn push_frozen(
    kind: IntegratorKind,
    e: &mut ParticleEnsemble,
    field: &dyn ForceField,
    qm: f64,
    dt: f64,
) -> Result<PushReport> {
    advance(kind, e, dt, qm, |_: &[f64]| field)
}

/// One-step map of a single particle in a prescribed field.
pub fn step_particle(
    kind: IntegratorKind,
    x: f64,
    v: f64,
    dt: f64,
    field: &dyn ForceField,
    qm: f64,
) -> Result<(f64, f64)> {
    let mut e = ParticleEnsemble {
        x: vec![x],
        v: vec![v],
        f_like: vec![1.0],
        g_like: vec![1.0],
        w: vec![1.0],
    };
    advance(kind, &mut e, dt, qm, |_: &[f64]| field)?;
    Ok((e.x[0], e.v[0]))
}

/// Explicit Euler map `(x + t v, v + t a(x))`.
pub fn explicit_euler_map(x: f64, v: f64, t: f64, field: &dyn ForceField, qm: f64) -> (f64, f64) {
    (x + t * v, v + t * qm * field.e(x))
}

/// Its adjoint, the implicit Euler map `y = x + t v', v' = v + t a(y)`,
/// solved by fixed-point iteration.
pub fn implicit_euler_map(x: f64, v: f64, t: f64, field: &dyn ForceField, qm: f64) -> Result<(f64, f64)> {
    let mut y = x + t * v;
    let mut residual = f64::INFINITY;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let next = x + t * v + t * t * qm * field.e(y);
        residual = (next - y).abs();
        y = next;
        if residual <= FIXED_POINT_TOL {
            return Ok((y, v + t * qm * field.e(y)));
        }
    }
    Err(Error::FixedPointDiverged {
        iterations: FIXED_POINT_MAX_ITER,
        residual,
    })
}

/// Determinant of the central finite-difference Jacobian of `map` at `(x, v)`.
pub fn map_jacobian_det(map: impl Fn(f64, f64) -> Result<(f64, f64)>, x: f64, v: f64) -> Result<f64> {
    let hx = 1e-5 * x.abs().max(1.0);
    let hv = 1e-5 * v.abs().max(1.0);
    let (xp, vp) = map(x + hx, v)?;
    let (xm, vm) = map(x - hx, v)?;
    let (xq, vq) = map(x, v + hv)?;
    let (xr, vr) = map(x, v - hv)?;
    let dxx = (xp - xm) / (2.0 * hx);
    let dvx = (vp - vm) / (2.0 * hx);
    let dxv = (xq - xr) / (2.0 * hv);
    let dvv = (vq - vr) / (2.0 * hv);
    Ok(dxx * dvv - dxv * dvx)
}

/// Jacobian determinant of one step of `kind` in a frozen field.
pub fn flow_jacobian_det(
    kind: IntegratorKind,
    x: f64,
    v: f64,
    dt: f64,
    field: &dyn ForceField,
    qm: f64,
) -> Result<f64> {
    map_jacobian_det(|a, b| step_particle(kind, a, b, dt, field, qm), x, v)
}
