//! Shared domain types: phase-space geometry, species, initial conditions,
//! gridded densities and particle ensembles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Rectangle `[x_min, x_max) x [v_min, v_max]`, periodic in x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceDomain {
    pub x_min: f64,
    pub x_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl PhaseSpaceDomain {
    pub fn new(x_min: f64, x_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        let d = PhaseSpaceDomain {
            x_min,
            x_max,
            v_min,
            v_max,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.v_min, self.v_max]
            .iter()
            .all(|a| a.is_finite());
        if !finite || self.x_max <= self.x_min || self.v_max <= self.v_min {
            return Err(Error::InvalidInput(format!("degenerate phase-space domain {self:?}")));
        }
        Ok(())
    }

    /// Spatial period `L`.
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn v_width(&self) -> f64 {
        self.v_max - self.v_min
    }

    pub fn area(&self) -> f64 {
        self.length() * self.v_width()
    }

    /// Maps `x` into `[x_min, x_max)`.
    #[inline]
    pub fn wrap_x(&self, x: f64) -> f64 {
        let l = self.length();
        let mut y = (x - self.x_min).rem_euclid(l);
        // rem_euclid can round up to exactly l
        if y >= l {
            y = 0.0;
        }
        self.x_min + y
    }

    pub fn contains(&self, x: f64, v: f64) -> bool {
        x >= self.x_min && x <= self.x_max && v >= self.v_min && v <= self.v_max
    }
}

/// Charge and mass of the simulated species.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub q: f64,
    pub m: f64,
}

impl Species {
    /// Normalized electrons, `q = -1`, `m = 1`.
    pub const ELECTRON: Species = Species { q: -1.0, m: 1.0 };

    pub fn new(q: f64, m: f64) -> Result<Self> {
        if !(m > 0.0) || !q.is_finite() {
            return Err(Error::InvalidInput(format!("invalid species q={q}, m={m}")));
        }
        Ok(Species { q, m })
    }

    #[inline]
    pub fn q_over_m(&self) -> f64 {
        self.q / self.m
    }
}

impl Default for Species {
    fn default() -> Self {
        Species::ELECTRON
    }
}

/// Perturbed Maxwellian with an optional drifting beam:
///
/// `f(x, v) = (1 - eps cos(k x)) / sqrt(2 pi) * [(1 - n_b) exp(-v^2/2) + n_b/sigma_b exp(-(v - v_b)^2 / (2 sigma_b^2))]`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub epsilon: f64,
    pub k: f64,
    pub n_b: f64,
    pub sigma_b: f64,
    pub v_b: f64,
}

impl InitialCondition {
    /// Strong (nonlinear) Landau damping.
    pub fn landau() -> Self {
        InitialCondition {
            epsilon: 0.5,
            k: 0.5,
            n_b: 0.0,
            sigma_b: 1.0,
            v_b: 0.0,
        }
    }

    /// Weak Landau damping used to check the linear damping rate.
    pub fn linear_landau() -> Self {
        InitialCondition {
            epsilon: 0.01,
            ..Self::landau()
        }
    }

    /// Bump-on-tail instability. The beam drift is not part of the
    /// published table; 4.5 is the customary value for this beam width.
    pub fn bump_on_tail() -> Self {
        InitialCondition {
            epsilon: 1e-3,
            k: 0.3,
            n_b: 0.1,
            sigma_b: 0.3,
            v_b: 4.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.k > 0.0) {
            bad.push("k must be positive".to_string());
        }
        if !(self.sigma_b > 0.0) {
            bad.push("sigma_b must be positive".to_string());
        }
        if !(0.0..1.0).contains(&self.n_b) {
            bad.push("n_b must lie in [0, 1)".to_string());
        }
        if !self.epsilon.is_finite() || !self.v_b.is_finite() {
            bad.push("epsilon and v_b must be finite".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Spatial period `2 pi / k`.
    pub fn length(&self) -> f64 {
        2.0 * PI / self.k
    }

    /// `[0, L) x [-v_max, v_max]`.
    pub fn domain(&self, v_max: f64) -> PhaseSpaceDomain {
        PhaseSpaceDomain {
            x_min: 0.0,
            x_max: self.length(),
            v_min: -v_max,
            v_max,
        }
    }

    /// Spatial factor `1 - eps cos(k x)`.
    #[inline]
    pub fn spatial(&self, x: f64) -> f64 {
        1.0 - self.epsilon * (self.k * x).cos()
    }

    /// Velocity factor, a unit-mass two-Gaussian mixture.
    #[inline]
    pub fn velocity(&self, v: f64) -> f64 {
        let core = (1.0 - self.n_b) * (-0.5 * v * v).exp();
        let beam = if self.n_b > 0.0 {
            let z = (v - self.v_b) / self.sigma_b;
            self.n_b / self.sigma_b * (-0.5 * z * z).exp()
        } else {
            0.0
        };
        INV_SQRT_2PI * (core + beam)
    }

    #[inline]
    pub fn eval(&self, x: f64, v: f64) -> f64 {
        self.spatial(x) * self.velocity(v)
    }
}

/// Free-function form of [`InitialCondition::eval`].
pub fn eval_initial_f(ic: &InitialCondition, x: f64, v: f64) -> f64 {
    ic.eval(x, v)
}

/// Node values on a uniform `nx x nv` grid.
///
/// x nodes are periodic, `x_i = x_min + i L / nx`; v nodes include both
/// endpoints, `v_j = v_min + j (v_max - v_min) / (nv - 1)`. Values are
/// stored row-major with x as the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct GriddedDensity {
    pub domain: PhaseSpaceDomain,
    pub nx: usize,
    pub nv: usize,
    pub values: Vec<f64>,
}

impl GriddedDensity {
    pub fn new(domain: PhaseSpaceDomain, nx: usize, nv: usize, values: Vec<f64>) -> Result<Self> {
        domain.validate()?;
        if nx < 2 || nv < 2 {
            return Err(Error::InvalidInput(format!("grid must be at least 2x2, got {nx}x{nv}")));
        }
        if values.len() != nx * nv {
            return Err(Error::InvalidInput(format!(
                "expected {} node values, got {}",
                nx * nv,
                values.len()
            )));
        }
        Ok(GriddedDensity {
            domain,
            nx,
            nv,
            values,
        })
    }

    pub fn from_fn(
        domain: PhaseSpaceDomain,
        nx: usize,
        nv: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * nv);
        let dx = domain.length() / nx as f64;
        let dv = domain.v_width() / (nv.max(2) - 1) as f64;
        for i in 0..nx {
            for j in 0..nv {
                values.push(f(domain.x_min + i as f64 * dx, domain.v_min + j as f64 * dv));
            }
        }
        Self::new(domain, nx, nv, values)
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.domain.length() / self.nx as f64
    }

    #[inline]
    pub fn dv(&self) -> f64 {
        self.domain.v_width() / (self.nv - 1) as f64
    }

    #[inline]
    pub fn x_node(&self, i: usize) -> f64 {
        self.domain.x_min + i as f64 * self.dx()
    }

    #[inline]
    pub fn v_node(&self, j: usize) -> f64 {
        self.domain.v_min + j as f64 * self.dv()
    }

    /// Node value; `i` is taken modulo `nx`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[(i % self.nx) * self.nv + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let i = i % self.nx;
        &self.values[i * self.nv..(i + 1) * self.nv]
    }

    /// Trapezoid integral over v of row `i`.
    pub fn row_mass(&self, i: usize) -> f64 {
        trapezoid(self.row(i), self.dv())
    }

    /// Trapezoid integral over the whole domain (periodic in x).
    pub fn trapezoid_mass(&self) -> f64 {
        (0..self.nx).map(|i| self.row_mass(i)).sum::<f64>() * self.dx()
    }

    /// Bilinear interpolant; x is wrapped, v is clamped to the domain.
    pub fn interpolate(&self, x: f64, v: f64) -> f64 {
        let (i, a) = self.locate_x(x);
        let (j, b) = self.locate_v(v);
        let g00 = self.at(i, j);
        let g01 = self.at(i, j + 1);
        let g10 = self.at(i + 1, j);
        let g11 = self.at(i + 1, j + 1);
        (1.0 - a) * ((1.0 - b) * g00 + b * g01) + a * ((1.0 - b) * g10 + b * g11)
    }

    /// Cell index and fractional offset of `x` (wrapped into the period).
    #[inline]
    pub fn locate_x(&self, x: f64) -> (usize, f64) {
        let s = (self.domain.wrap_x(x) - self.domain.x_min) / self.dx();
        let i = (s.floor() as usize).min(self.nx - 1);
        (i, (s - i as f64).clamp(0.0, 1.0))
    }

    /// Cell index and fractional offset of `v` (clamped to the domain).
    #[inline]
    pub fn locate_v(&self, v: f64) -> (usize, f64) {
        let s = ((v - self.domain.v_min) / self.dv()).clamp(0.0, (self.nv - 1) as f64);
        let j = (s.floor() as usize).min(self.nv - 2);
        (j, (s - j as f64).clamp(0.0, 1.0))
    }
}

/// Trapezoid rule for uniformly spaced samples including both endpoints.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, .., last] => (values.iter().sum::<f64>() - 0.5 * (first + last)) * h,
    }
}

/// `|f| / M` with `M` the trapezoid mass of `|f|`.
pub fn normalize_to_sampling_density(f: &GriddedDensity) -> Result<GriddedDensity> {
    let abs: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
    let mut g = GriddedDensity {
        values: abs,
        ..f.clone()
    };
    let mass = g.trapezoid_mass();
    if !(mass > 0.0) {
        return Err(Error::AllZeroDensity);
    }
    g.values.iter_mut().for_each(|v| *v /= mass);
    Ok(g)
}

/// Markers with their plasma (`f_like`) and sampling (`g_like`) likelihoods.
///
/// `w` caches the weights `f_like / g_like`. Pushers that rescale both
/// likelihoods by the same factor leave it untouched; anything else that
/// edits the likelihoods must call [`ParticleEnsemble::refresh_weights`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParticleEnsemble {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub f_like: Vec<f64>,
    pub g_like: Vec<f64>,
    pub w: Vec<f64>,
}

impl ParticleEnsemble {
    pub fn new(x: Vec<f64>, v: Vec<f64>, f_like: Vec<f64>, g_like: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if v.len() != n || f_like.len() != n || g_like.len() != n {
            return Err(Error::InvalidInput("ensemble columns differ in length".into()));
        }
        if let Some(&g) = g_like.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::NonPositiveLikelihood { value: g });
        }
        if f_like.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidInput("non-finite plasma likelihood".into()));
        }
        let w = f_like.iter().zip(&g_like).map(|(f, g)| f / g).collect();
        Ok(ParticleEnsemble {
            x,
            v,
            f_like,
            g_like,
            w,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `w_k = f_k / g_k`.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        self.w[k]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }

    pub fn refresh_weights(&mut self) {
        self.w = self.f_like.iter().zip(&self.g_like).map(|(f, g)| f / g).collect();
    }

    pub fn wrap_positions(&mut self, domain: &PhaseSpaceDomain) {
        self.x.iter_mut().for_each(|x| *x = domain.wrap_x(*x));
    }
}

/// Which solver produced a diagnostics sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Spectral,
    Pic,
}

impl Segment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Segment::Spectral => "spectral",
            Segment::Pic => "pic",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub segment: Segment,
    pub field_energy: f64,
    pub kinetic_energy: f64,
    pub total_energy: f64,
    pub total_mass: f64,
    pub entropy: f64,
    pub star_disc: Option<f64>,
    pub hk_variation: Option<f64>,
}

impl DiagnosticsRecord {
    pub fn new(
        t: f64,
        segment: Segment,
        field_energy: f64,
        kinetic_energy: f64,
        total_mass: f64,
        entropy: f64,
    ) -> Self {
        DiagnosticsRecord {
            t,
            segment,
            field_energy,
            kinetic_energy,
            total_energy: field_energy + kinetic_energy,
            total_mass,
            entropy,
            star_disc: None,
            hk_variation: None,
        }
    }
}
