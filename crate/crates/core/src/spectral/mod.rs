//! Pseudo-spectral Vlasov-Poisson solver.
//!
//! The phase-space density is held as real collocation values on a grid
//! that is periodic in x (period `L`) and, for the transforms, periodic in v
//! on `[v_min, v_max)`. Each split sub-step is an exact shear: the x-drift
//! multiplies the x-spectrum of every velocity column by `exp(-i kx v dt)`,
//! the kick multiplies the v-spectrum of every spatial row by
//! `exp(-i kv a(x) dt)` with `a = (q/m) E`.

mod hk;
mod pad;
mod run;
mod solver;

pub use hk::{hk_variation_grid, hk_variation_gridded};
pub use pad::zero_pad;
pub use run::{run_spectral, run_spectral_with, SpectralRun, SpectralRunConfig};
pub use solver::{FieldOnGrid, SpectralSolver, SplitCoefficients};

use crate::error::{Error, Result};
use crate::model::{GriddedDensity, InitialCondition, PhaseSpaceDomain};

/// Collocation values `f(x_i, v_j)`, x-major, with
/// `x_i = x_min + i L/nx` and `v_j = v_min + j (v_max - v_min)/nv`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState {
    pub domain: PhaseSpaceDomain,
    pub nx: usize,
    pub nv: usize,
    pub values: Vec<f64>,
    pub t: f64,
}

impl SpectralState {
    pub fn new(domain: PhaseSpaceDomain, nx: usize, nv: usize, values: Vec<f64>, t: f64) -> Result<Self> {
        domain.validate()?;
        if nx < 2 || nv < 4 {
            return Err(Error::InvalidInput(format!("spectral grid {nx}x{nv} too small")));
        }
        if values.len() != nx * nv {
            return Err(Error::InvalidInput("value count does not match grid".into()));
        }
        Ok(SpectralState {
            domain,
            nx,
            nv,
            values,
            t,
        })
    }

    pub fn from_fn(
        domain: PhaseSpaceDomain,
        nx: usize,
        nv: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let dx = domain.length() / nx as f64;
        let dv = domain.v_width() / nv as f64;
        let mut values = Vec::with_capacity(nx * nv);
        for i in 0..nx {
            for j in 0..nv {
                values.push(f(domain.x_min + i as f64 * dx, domain.v_min + j as f64 * dv));
            }
        }
        Self::new(domain, nx, nv, values, 0.0)
    }

    pub fn from_initial(ic: &InitialCondition, domain: PhaseSpaceDomain, nx: usize, nv: usize) -> Result<Self> {
        Self::from_fn(domain, nx, nv, |x, v| ic.eval(x, v))
    }

    /// Builds a state from a gridded density whose last v node duplicates
    /// the first (the layout produced by [`SpectralState::to_gridded`]).
    pub fn from_gridded(g: &GriddedDensity, t: f64) -> Result<Self> {
        let nv = g.nv - 1;
        let mut values = Vec::with_capacity(g.nx * nv);
        for i in 0..g.nx {
            values.extend_from_slice(&g.row(i)[..nv]);
        }
        Self::new(g.domain, g.nx, nv, values, t)
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.domain.length() / self.nx as f64
    }

    #[inline]
    pub fn dv(&self) -> f64 {
        self.domain.v_width() / self.nv as f64
    }

    #[inline]
    pub fn x_node(&self, i: usize) -> f64 {
        self.domain.x_min + i as f64 * self.dx()
    }

    #[inline]
    pub fn v_node(&self, j: usize) -> f64 {
        self.domain.v_min + j as f64 * self.dv()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nv + j]
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx() * self.dv()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.dx() * self.dv()).sqrt()
    }

    /// Charge density `rho(x_i) = sum_j f_ij dv`.
    pub fn density(&self) -> Vec<f64> {
        let dv = self.dv();
        self.values
            .chunks(self.nv)
            .map(|row| row.iter().sum::<f64>() * dv)
            .collect()
    }

    /// Same values on the endpoint-inclusive gridded layout (`nv + 1` v nodes).
    pub fn to_gridded(&self) -> GriddedDensity {
        let mut values = Vec::with_capacity(self.nx * (self.nv + 1));
        for row in self.values.chunks(self.nv) {
            values.extend_from_slice(row);
            values.push(row[0]);
        }
        GriddedDensity {
            domain: self.domain,
            nx: self.nx,
            nv: self.nv + 1,
            values,
        }
    }
}
