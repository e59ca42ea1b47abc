use std::f64::consts::SQRT_2;

use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::lowdisc::PointSet2D;
use crate::model::{InitialCondition, ParticleEnsemble, PhaseSpaceDomain};
use crate::par;

const MAX_NEWTON: usize = 50;
const MAX_BISECT: usize = 200;
const TOL: f64 = 1e-13;

/// Standard normal upper tail `P(Z > z)`.
#[inline]
fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Standard normal lower tail `P(Z < z)`.
#[inline]
fn lower_tail(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Safeguarded Newton iteration for a nondecreasing `residual` on
/// `[lo, hi]`. Falls back to bisection if Newton stalls.
fn solve_monotone(
    residual: impl Fn(f64) -> f64,
    slope: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    guess: f64,
    tol: f64,
    u: f64,
) -> Result<f64> {
    let mut x = guess.clamp(lo, hi);
    for _ in 0..MAX_NEWTON {
        let r = residual(x);
        if r.abs() <= tol {
            return Ok(x);
        }
        if r > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        let d = slope(x);
        let next = x - r / d;
        x = if d > 0.0 && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    // bisection on the remaining bracket
    let mut r = residual(x);
    for _ in 0..MAX_BISECT {
        if r.abs() <= tol {
            return Ok(x);
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        x = 0.5 * (lo + hi);
        r = residual(x);
        if hi - lo <= f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    if r.abs() <= tol {
        Ok(x)
    } else {
        Err(Error::NewtonNoConvergence { u, residual: r })
    }
}

/// CDF of the spatial factor `1 - eps cos(k x)` on the domain period.
#[derive(Clone, Copy, Debug)]
pub struct SpatialCdf {
    ic: InitialCondition,
    x_min: f64,
    x_max: f64,
    total: f64,
}

impl SpatialCdf {
    pub fn new(ic: &InitialCondition, domain: &PhaseSpaceDomain) -> Result<Self> {
        let mut s = SpatialCdf {
            ic: *ic,
            x_min: domain.x_min,
            x_max: domain.x_max,
            total: 1.0,
        };
        s.total = s.unnormalized(domain.x_max);
        if !(s.total > 0.0) {
            return Err(Error::AllZeroDensity);
        }
        Ok(s)
    }

    fn unnormalized(&self, x: f64) -> f64 {
        let (e, k) = (self.ic.epsilon, self.ic.k);
        (x - self.x_min) - e / k * ((k * x).sin() - (k * self.x_min).sin())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.unnormalized(x) / self.total
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ic.spatial(x) / self.total
    }

    pub fn invert(&self, u: f64) -> Result<f64> {
        let guess = self.x_min + u * (self.x_max - self.x_min);
        solve_monotone(
            |x| self.cdf(x) - u,
            |x| self.pdf(x),
            self.x_min,
            self.x_max,
            guess,
            TOL,
            u,
        )
    }
}

/// CDF of the two-Gaussian velocity mixture truncated to `[v_min, v_max]`.
#[derive(Clone, Copy, Debug)]
pub struct MixtureVelocityCdf {
    ic: InitialCondition,
    v_min: f64,
    v_max: f64,
    lower_at_min: f64,
    upper_at_max: f64,
    mass: f64,
}

impl MixtureVelocityCdf {
    pub fn new(ic: &InitialCondition, domain: &PhaseSpaceDomain) -> Result<Self> {
        let mut s = MixtureVelocityCdf {
            ic: *ic,
            v_min: domain.v_min,
            v_max: domain.v_max,
            lower_at_min: 0.0,
            upper_at_max: 0.0,
            mass: 1.0,
        };
        s.lower_at_min = s.lower(domain.v_min);
        s.upper_at_max = s.upper(domain.v_max);
        s.mass = 1.0 - s.lower_at_min - s.upper_at_max;
        if !(s.mass > 0.0) {
            return Err(Error::AllZeroDensity);
        }
        Ok(s)
    }

    /// Untruncated mixture mass below `v`.
    fn lower(&self, v: f64) -> f64 {
        let nb = self.ic.n_b;
        let mut p = (1.0 - nb) * lower_tail(v);
        if nb > 0.0 {
            p += nb * lower_tail((v - self.ic.v_b) / self.ic.sigma_b);
        }
        p
    }

    /// Untruncated mixture mass above `v`.
    fn upper(&self, v: f64) -> f64 {
        let nb = self.ic.n_b;
        let mut p = (1.0 - nb) * upper_tail(v);
        if nb > 0.0 {
            p += nb * upper_tail((v - self.ic.v_b) / self.ic.sigma_b);
        }
        p
    }

    pub fn cdf(&self, v: f64) -> f64 {
        ((self.lower(v) - self.lower_at_min) / self.mass).clamp(0.0, 1.0)
    }

    pub fn pdf(&self, v: f64) -> f64 {
        self.ic.velocity(v) / self.mass
    }

    /// Inverts the truncated CDF. The residual is evaluated through the
    /// lower tail below the median and the upper tail above it, so both
    /// tails keep full relative accuracy.
    pub fn invert(&self, u: f64) -> Result<f64> {
        let u = u.clamp(0.0, 1.0);
        let p = self.lower_at_min + u * self.mass;
        let q = self.upper_at_max + (1.0 - u) * self.mass;
        let guess = if self.ic.n_b == 0.0 {
            if p <= 0.5 {
                -SQRT_2 * erfc_inv(2.0 * p)
            } else {
                SQRT_2 * erfc_inv(2.0 * q)
            }
        } else {
            0.5 * (self.v_min + self.v_max)
        };
        let guess = if guess.is_finite() { guess } else { 0.0 };
        let tol = TOL * self.mass;
        if p <= 0.5 {
            solve_monotone(
                |v| self.lower(v) - p,
                |v| self.ic.velocity(v),
                self.v_min,
                self.v_max,
                guess,
                tol,
                u,
            )
        } else {
            solve_monotone(
                |v| q - self.upper(v),
                |v| self.ic.velocity(v),
                self.v_min,
                self.v_max,
                guess,
                tol,
                u,
            )
        }
    }
}

/// Samples the analytic initial condition dimension by dimension: x from
/// `1 - eps cos(kx)`, v from the truncated velocity mixture. `g_like` is
/// the product of the two normalized 1-D densities, `f_like` the initial
/// condition itself.
pub fn its_tensor_product(
    ic: &InitialCondition,
    pairs: &PointSet2D,
    domain: &PhaseSpaceDomain,
) -> Result<ParticleEnsemble> {
    let xs = SpatialCdf::new(ic, domain)?;
    let vs = MixtureVelocityCdf::new(ic, domain)?;
    let out: Vec<Result<(f64, f64, f64, f64)>> = par::map_range(pairs.len(), |k| {
        let (u, w) = pairs.points[k];
        let x = domain.wrap_x(xs.invert(u)?);
        let v = vs.invert(w)?;
        Ok((x, v, ic.eval(x, v), xs.pdf(x) * vs.pdf(v)))
    });
    collect(out)
}

/// Markers uniform on `region`, `g_like = 1 / area`.
pub fn uniform_sample(
    ic: &InitialCondition,
    pairs: &PointSet2D,
    region: &PhaseSpaceDomain,
) -> Result<ParticleEnsemble> {
    let g = 1.0 / region.area();
    let out: Vec<Result<(f64, f64, f64, f64)>> = par::map_range(pairs.len(), |k| {
        let (u, w) = pairs.points[k];
        let x = region.x_min + u * region.length();
        let v = region.v_min + w * region.v_width();
        Ok((x, v, ic.eval(x, v), g))
    });
    collect(out)
}

fn collect(out: Vec<Result<(f64, f64, f64, f64)>>) -> Result<ParticleEnsemble> {
    let n = out.len();
    let mut cols = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for r in out {
        let (x, v, f, g) = r?;
        cols.0.push(x);
        cols.1.push(v);
        cols.2.push(f);
        cols.3.push(g);
    }
    ParticleEnsemble::new(cols.0, cols.1, cols.2, cols.3)
}
