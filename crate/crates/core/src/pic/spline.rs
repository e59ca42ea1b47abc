use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::{ParticleEnsemble, PhaseSpaceDomain, Species};
use crate::par;

/// Stiffness entries `int N_i' N_{i+d}' dx * dx` for `d = 0..=3`.
pub const STIFFNESS_STENCIL: [f64; 4] = [2.0 / 3.0, -1.0 / 8.0, -1.0 / 5.0, -1.0 / 120.0];

/// Cubic B-spline values of the four basis functions touching a point at
/// local offset `t` in a cell: `N_{j-1}, N_j, N_{j+1}, N_{j+2}`.
#[inline]
pub fn cubic_weights(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    let t2 = t * t;
    let t3 = t2 * t;
    [
        s * s * s / 6.0,
        (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
        (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
        t3 / 6.0,
    ]
}

/// Derivatives of [`cubic_weights`] with respect to `t`.
#[inline]
pub fn cubic_weights_d1(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    [
        -0.5 * s * s,
        1.5 * t * t - 2.0 * t,
        -1.5 * t * t + t + 0.5,
        0.5 * t * t,
    ]
}

/// Second derivatives of [`cubic_weights`] with respect to `t`.
#[inline]
pub fn cubic_weights_d2(t: f64) -> [f64; 4] {
    [1.0 - t, 3.0 * t - 2.0, 1.0 - 3.0 * t, t]
}

/// Periodic cubic B-spline Galerkin solver for `-phi'' = q (rho - 1)`.
/// Basis function `N_i` is centred on knot `x_min + i dx`.
#[derive(Clone, Debug)]
pub struct SplinePoissonSolver {
    pub domain: PhaseSpaceDomain,
    pub species: Species,
    pub n_f: usize,
    pub dx: f64,
    /// Eigenvalues of the circulant stiffness matrix (index 0 is the null mode).
    eigen: Vec<f64>,
}

/// Spline coefficients of the potential.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSolution {
    pub x_min: f64,
    pub dx: f64,
    pub coeffs: Vec<f64>,
    pub t: f64,
}

impl SplinePoissonSolver {
    pub fn new(domain: PhaseSpaceDomain, n_f: usize, species: Species) -> Result<Self> {
        domain.validate()?;
        if n_f < 4 {
            return Err(Error::InvalidInput(format!("need at least 4 cells, got {n_f}")));
        }
        let dx = domain.length() / n_f as f64;
        let eigen = (0..n_f)
            .map(|m| {
                let theta = 2.0 * std::f64::consts::PI * m as f64 / n_f as f64;
                (STIFFNESS_STENCIL[0]
                    + 2.0 * (1..4).map(|d| STIFFNESS_STENCIL[d] * (d as f64 * theta).cos()).sum::<f64>())
                    / dx
            })
            .collect();
        Ok(SplinePoissonSolver {
            domain,
            species,
            n_f,
            dx,
            eigen,
        })
    }

    /// Stiffness entry `K_ij` (circulant).
    pub fn stiffness(&self, i: usize, j: usize) -> f64 {
        let n = self.n_f;
        let d = (i + n - j % n) % n;
        let d = d.min(n - d);
        if d < 4 {
            STIFFNESS_STENCIL[d] / self.dx
        } else {
            0.0
        }
    }

    /// Cell index and local offset of a (possibly unwrapped) position.
    #[inline]
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x - self.domain.x_min) / self.dx;
        let c = s.floor();
        let t = s - c;
        let n = self.n_f as i64;
        let j = (c as i64).rem_euclid(n) as usize;
        if t >= 1.0 {
            ((j + 1) % self.n_f, 0.0)
        } else {
            (j, t)
        }
    }

    /// Load vector `b_i = q [ (1/n) sum_k w_k N_i(x_k) - int N_i dx ]`.
    pub fn deposit_rhs(&self, e: &ParticleEnsemble) -> Vec<f64> {
        self.deposit_at(&e.x, &e.w, e.len())
    }

    /// Load vector for positions `x` carrying weights `w`, normalized by `n`.
    pub fn deposit_at(&self, x: &[f64], w: &[f64], n: usize) -> Vec<f64> {
        let nf = self.n_f;
        let charge = par::accumulate(x.len(), nf, |range, buf| {
            for k in range {
                let (j, t) = self.locate(x[k]);
                let wt = cubic_weights(t);
                for (s, &b) in wt.iter().enumerate() {
                    buf[(j + nf + s - 1) % nf] += w[k] * b;
                }
            }
        });
        let scale = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        let q = self.species.q;
        charge.into_iter().map(|c| q * (c * scale - self.dx)).collect()
    }

    /// Solves `K c = b` after projecting out the mean of `b`; the result
    /// has zero mean.
    pub fn solve(&self, b: &[f64], t: f64) -> FieldSolution {
        assert_eq!(b.len(), self.n_f);
        let n = self.n_f;
        let mut planner = FftPlanner::new();
        let mut buf: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        planner.plan_fft_forward(n).process(&mut buf);
        buf[0] = Complex64::new(0.0, 0.0);
        for (c, &lam) in buf.iter_mut().zip(&self.eigen).skip(1) {
            *c /= lam;
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        let coeffs = buf.iter().map(|c| c.re / n as f64).collect();
        FieldSolution {
            x_min: self.domain.x_min,
            dx: self.dx,
            coeffs,
            t,
        }
    }

    /// Field of the ensemble's current positions.
    pub fn field(&self, e: &ParticleEnsemble, t: f64) -> FieldSolution {
        self.solve(&self.deposit_rhs(e), t)
    }

    /// Residual `max |K c - b_projected|`.
    pub fn residual(&self, field: &FieldSolution, b: &[f64]) -> f64 {
        let n = self.n_f;
        let mean = b.iter().sum::<f64>() / n as f64;
        (0..n)
            .map(|i| {
                let kc: f64 = (0..n).map(|j| self.stiffness(i, j) * field.coeffs[j]).sum();
                (kc - (b[i] - mean)).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl FieldSolution {
    fn n(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x - self.x_min) / self.dx;
        let c = s.floor();
        let t = s - c;
        let n = self.n() as i64;
        let j = (c as i64).rem_euclid(n) as usize;
        if t >= 1.0 {
            ((j + 1) % self.n(), 0.0)
        } else {
            (j, t)
        }
    }

    #[inline]
    fn combine(&self, j: usize, w: [f64; 4]) -> f64 {
        let n = self.n();
        (0..4).map(|s| self.coeffs[(j + n + s - 1) % n] * w[s]).sum()
    }

    pub fn potential(&self, x: f64) -> f64 {
        let (j, t) = self.locate(x);
        self.combine(j, cubic_weights(t))
    }

    /// `E = -phi'`.
    pub fn eval_e(&self, x: f64) -> f64 {
        let (j, t) = self.locate(x);
        -self.combine(j, cubic_weights_d1(t)) / self.dx
    }

    /// `dE/dx = -phi''`.
    pub fn eval_de_dx(&self, x: f64) -> f64 {
        let (j, t) = self.locate(x);
        -self.combine(j, cubic_weights_d2(t)) / (self.dx * self.dx)
    }

    /// `1/2 int E^2 dx = 1/2 c^T K c`, exact for the spline.
    pub fn field_energy(&self) -> f64 {
        let n = self.n();
        let c = &self.coeffs;
        let quad: f64 = (0..n)
            .map(|i| {
                c[i] * (STIFFNESS_STENCIL[0] * c[i]
                    + (1..4)
                        .map(|d| STIFFNESS_STENCIL[d] * (c[(i + d) % n] + c[(i + n - d) % n]))
                        .sum::<f64>())
            })
            .sum();
        0.5 * quad / self.dx
    }

    pub fn mean_potential(&self) -> f64 {
        self.coeffs.iter().sum::<f64>() / self.n() as f64
    }
}
