use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::{GriddedDensity, ParticleEnsemble, PhaseSpaceDomain};
use crate::par;

/// Tensor-product hat functions on `nx` periodic x nodes and `nv` v nodes
/// including both endpoints (the [`GriddedDensity`] layout).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSplineBasis2D {
    pub domain: PhaseSpaceDomain,
    pub nx: usize,
    pub nv: usize,
}

impl LinearSplineBasis2D {
    pub fn new(domain: PhaseSpaceDomain, nx: usize, nv: usize) -> Result<Self> {
        domain.validate()?;
        if nx < 2 || nv < 2 {
            return Err(Error::InvalidInput(format!("basis needs nx >= 2 and nv >= 2, got {nx}x{nv}")));
        }
        Ok(LinearSplineBasis2D { domain, nx, nv })
    }

    pub fn for_grid(g: &GriddedDensity) -> Result<Self> {
        Self::new(g.domain, g.nx, g.nv)
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.domain.length() / self.nx as f64
    }

    #[inline]
    pub fn dv(&self) -> f64 {
        self.domain.v_width() / (self.nv - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sub-, main and super-diagonal of the periodic x mass matrix.
    pub fn mass_x_stencil(&self) -> [f64; 3] {
        let h = self.dx();
        [h / 6.0, 2.0 * h / 3.0, h / 6.0]
    }

    /// Diagonal and off-diagonal entries of the v mass matrix at node `j`.
    fn mass_v_row(&self, j: usize) -> (f64, f64) {
        let h = self.dv();
        let diag = if j == 0 || j == self.nv - 1 { h / 3.0 } else { 2.0 * h / 3.0 };
        (diag, h / 6.0)
    }

    /// Four `(flat index, value)` pairs of the basis functions that are
    /// nonzero at `(x, v)`; `None` outside the v range.
    #[inline]
    pub fn support(&self, x: f64, v: f64) -> Option<[(usize, f64); 4]> {
        let d = &self.domain;
        if !(v >= d.v_min && v <= d.v_max) {
            return None;
        }
        let sx = (x - d.x_min) / self.dx();
        let cx = sx.floor();
        let tx = sx - cx;
        let i0 = (cx as i64).rem_euclid(self.nx as i64) as usize;
        let i1 = (i0 + 1) % self.nx;
        let sv = (v - d.v_min) / self.dv();
        let j0 = (sv.floor() as usize).min(self.nv - 2);
        let tv = sv - j0 as f64;
        Some([
            (i0 * self.nv + j0, (1.0 - tx) * (1.0 - tv)),
            (i0 * self.nv + j0 + 1, (1.0 - tx) * tv),
            (i1 * self.nv + j0, tx * (1.0 - tv)),
            (i1 * self.nv + j0 + 1, tx * tv),
        ])
    }

    /// `(M_x (x) M_v) c`.
    pub fn apply_mass(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.len());
        let (nx, nv) = (self.nx, self.nv);
        let mx = self.mass_x_stencil();
        let mut tmp = vec![0.0; c.len()];
        for i in 0..nx {
            for j in 0..nv {
                let (diag, off) = self.mass_v_row(j);
                let mut s = diag * c[i * nv + j];
                if j > 0 {
                    s += off * c[i * nv + j - 1];
                }
                if j + 1 < nv {
                    s += off * c[i * nv + j + 1];
                }
                tmp[i * nv + j] = s;
            }
        }
        let mut out = vec![0.0; c.len()];
        for i in 0..nx {
            let l = (i + nx - 1) % nx;
            let r = (i + 1) % nx;
            for j in 0..nv {
                out[i * nv + j] = if nx == 2 {
                    mx[1] * tmp[i * nv + j] + (mx[0] + mx[2]) * tmp[l * nv + j]
                } else {
                    mx[0] * tmp[l * nv + j] + mx[1] * tmp[i * nv + j] + mx[2] * tmp[r * nv + j]
                };
            }
        }
        out
    }

    /// `(M_x (x) M_v)^{-1} m`: circulant solve in x by FFT, tridiagonal in v.
    pub fn solve_mass(&self, m: &[f64]) -> Vec<f64> {
        assert_eq!(m.len(), self.len());
        let (nx, nv) = (self.nx, self.nv);
        let mut rows = m.to_vec();
        par::for_each_chunk_mut(&mut rows, nv, |_, row| self.solve_v(row));
        let mx = self.mass_x_stencil();
        let eig: Vec<f64> = (0..nx)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / nx as f64;
                mx[1] + (mx[0] + mx[2]) * th.cos()
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(nx);
        let inv = planner.plan_fft_inverse(nx);
        let cols = par::map_range(nv, |j| {
            let mut buf: Vec<Complex64> = (0..nx).map(|i| Complex64::new(rows[i * nv + j], 0.0)).collect();
            fwd.process(&mut buf);
            for (c, &e) in buf.iter_mut().zip(&eig) {
                *c /= e * nx as f64;
            }
            inv.process(&mut buf);
            buf.into_iter().map(|c| c.re).collect::<Vec<f64>>()
        });
        let mut out = vec![0.0; m.len()];
        for (j, col) in cols.iter().enumerate() {
            for (i, &c) in col.iter().enumerate() {
                out[i * nv + j] = c;
            }
        }
        out
    }

    /// Thomas algorithm for the v mass matrix, in place.
    fn solve_v(&self, row: &mut [f64]) {
        let n = self.nv;
        let mut c_prime = vec![0.0; n];
        let (d0, off) = self.mass_v_row(0);
        c_prime[0] = off / d0;
        row[0] /= d0;
        for j in 1..n {
            let (dj, _) = self.mass_v_row(j);
            let denom = dj - off * c_prime[j - 1];
            if j + 1 < n {
                c_prime[j] = off / denom;
            }
            row[j] = (row[j] - off * row[j - 1]) / denom;
        }
        for j in (0..n - 1).rev() {
            row[j] -= c_prime[j] * row[j + 1];
        }
    }

    /// Moment vector `(1/n) sum_k omega_k N_ij(x_k, v_k)` over `n` markers.
    pub fn moments(&self, x: &[f64], v: &[f64], omega: Option<&[f64]>, n: usize) -> Vec<f64> {
        let m = par::accumulate(x.len(), self.len(), |range, buf| {
            for k in range {
                if let Some(sup) = self.support(x[k], v[k]) {
                    let w = omega.map_or(1.0, |o| o[k]);
                    for (idx, b) in sup {
                        buf[idx] += w * b;
                    }
                }
            }
        });
        let scale = 1.0 / n as f64;
        m.into_iter().map(|s| s * scale).collect()
    }

    pub fn to_gridded(&self, coeffs: Vec<f64>) -> Result<GriddedDensity> {
        GriddedDensity::new(self.domain, self.nx, self.nv, coeffs)
    }
}

/// Orthogonal series density estimate on the bilinear basis. With
/// `use_weights` the markers carry `w_k` (estimating `f`), otherwise unit
/// weights (estimating the sampling density `g`).
pub fn osde_linear(e: &ParticleEnsemble, basis: &LinearSplineBasis2D, use_weights: bool) -> Result<GriddedDensity> {
    if e.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let omega = use_weights.then_some(e.w.as_slice());
    let m = basis.moments(&e.x, &e.v, omega, e.len());
    basis.to_gridded(basis.solve_mass(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(nx: usize, nv: usize) -> LinearSplineBasis2D {
        LinearSplineBasis2D::new(PhaseSpaceDomain::new(0.0, 2.0, -1.0, 1.0).unwrap(), nx, nv).unwrap()
    }

    #[test]
    fn mass_rows_integrate_basis() {
        // Row sums of M equal int N_ij = dx * dv (interior) or half of it at v edges.
        let b = basis(6, 5);
        let ones = vec![1.0; b.len()];
        let m = b.apply_mass(&ones);
        for i in 0..6 {
            for j in 0..5 {
                let edge = if j == 0 || j == 4 { 0.5 } else { 1.0 };
                assert!((m[i * 5 + j] - edge * b.dx() * b.dv()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn solve_inverts_apply() {
        for (nx, nv) in [(2, 2), (3, 4), (8, 9)] {
            let b = basis(nx, nv);
            let c: Vec<f64> = (0..b.len()).map(|k| ((k * 37 % 11) as f64 - 5.0) / 3.0).collect();
            let back = b.solve_mass(&b.apply_mass(&c));
            for (a, z) in c.iter().zip(&back) {
                assert!((a - z).abs() < 1e-12, "{nx}x{nv}");
            }
        }
    }

    #[test]
    fn support_is_partition_of_unity() {
        let b = basis(8, 9);
        for &(x, v) in &[(0.0, -1.0), (1.99, 1.0), (0.37, 0.21), (-0.1, 0.0)] {
            let s = b.support(x, v).unwrap();
            assert!((s.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-15);
        }
        assert!(b.support(0.5, 1.5).is_none());
    }
}
