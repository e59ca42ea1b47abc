use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SpectralState;
use crate::error::{Error, Result};
use crate::model::{DiagnosticsRecord, PhaseSpaceDomain, Segment, Species};
use crate::par;

/// Fractional step sizes of a kick-first split composition.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitCoefficients {
    pub drift: Vec<f64>,
    pub kick: Vec<f64>,
}

impl SplitCoefficients {
    /// Ruth's third-order symplectic scheme.
    pub fn ruth3() -> Self {
        SplitCoefficients {
            drift: vec![2.0 / 3.0, -2.0 / 3.0, 1.0],
            kick: vec![7.0 / 24.0, 3.0 / 4.0, -1.0 / 24.0],
        }
    }

    /// First-order Lie splitting, kick then drift.
    pub fn lie() -> Self {
        SplitCoefficients {
            drift: vec![1.0],
            kick: vec![1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.drift.len() != self.kick.len() || self.drift.is_empty() {
            return Err(Error::InvalidInput("drift and kick lists must have equal nonzero length".into()));
        }
        for (name, c) in [("drift", &self.drift), ("kick", &self.kick)] {
            let s: f64 = c.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!("{name} fractions sum to {s}, expected 1")));
            }
        }
        Ok(())
    }
}

/// Electric field at the x collocation nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldOnGrid {
    pub e: Vec<f64>,
    /// Spatial mean of the charge density; 1 for a neutral plasma.
    pub mean_density: f64,
}

impl FieldOnGrid {
    pub fn is_neutral(&self) -> bool {
        (self.mean_density - 1.0).abs() <= 1e-6
    }

    /// `1/2 int E^2 dx` by the rectangle rule (exact for resolved modes).
    pub fn energy(&self, dx: f64) -> f64 {
        0.5 * dx * self.e.iter().map(|e| e * e).sum::<f64>()
    }
}

struct Axis {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Signed wavenumbers with the Nyquist mode zeroed (for shifts and derivatives).
    k: Vec<f64>,
    filter: Vec<f64>,
}

impl Axis {
    fn new(planner: &mut FftPlanner<f64>, n: usize, period: f64) -> Self {
        let (k, filter) = wavenumbers(n, period);
        Axis {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            k,
            filter,
        }
    }

    /// Transforms each contiguous line of `data`, lets `op(line_index, spectrum)`
    /// modify the spectrum and writes the real part of the inverse back.
    fn map_lines(&self, data: &mut [f64], op: impl Fn(usize, &mut [Complex64]) + Sync + Send) {
        let n = self.n;
        let scale = 1.0 / n as f64;
        par::for_each_chunk_mut(data, n, |line, values| {
            let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            self.fwd.process(&mut buf);
            op(line, &mut buf);
            self.inv.process(&mut buf);
            for (v, c) in values.iter_mut().zip(&buf) {
                *v = c.re * scale;
            }
        });
    }
}

/// Signed wavenumbers `2 pi m / period` (Nyquist set to zero) and the
/// exponential filter `exp(-36 (|k|/k_max)^36)` per FFT index.
fn wavenumbers(n: usize, period: f64) -> (Vec<f64>, Vec<f64>) {
    let base = 2.0 * PI / period;
    let half = n / 2;
    let mut k = Vec::with_capacity(n);
    let mut filter = Vec::with_capacity(n);
    for m in 0..n {
        let signed = if m < n.div_ceil(2) { m as i64 } else { m as i64 - n as i64 };
        let nyquist = n % 2 == 0 && m == half;
        k.push(if nyquist { 0.0 } else { base * signed as f64 });
        let ratio = signed.unsigned_abs() as f64 / half.max(1) as f64;
        filter.push((-36.0 * ratio.powi(36)).exp());
    }
    (k, filter)
}

fn transpose(src: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = src[r * cols + c];
        }
    }
    out
}

/// Split-step solver for a fixed grid and species.
pub struct SpectralSolver {
    pub domain: PhaseSpaceDomain,
    pub nx: usize,
    pub nv: usize,
    pub species: Species,
    pub coefficients: SplitCoefficients,
    /// Apply the anti-alias filter after every full step.
    pub filter: bool,
    x_axis: Axis,
    v_axis: Axis,
}

impl SpectralSolver {
    pub fn new(domain: PhaseSpaceDomain, nx: usize, nv: usize, species: Species) -> Result<Self> {
        domain.validate()?;
        if nx < 2 || nv < 4 {
            return Err(Error::InvalidInput(format!("spectral grid {nx}x{nv} too small")));
        }
        let mut planner = FftPlanner::new();
        Ok(SpectralSolver {
            domain,
            nx,
            nv,
            species,
            coefficients: SplitCoefficients::ruth3(),
            filter: true,
            x_axis: Axis::new(&mut planner, nx, domain.length()),
            v_axis: Axis::new(&mut planner, nv, domain.v_width()),
        })
    }

    pub fn for_state(s: &SpectralState, species: Species) -> Result<Self> {
        Self::new(s.domain, s.nx, s.nv, species)
    }

    pub fn with_coefficients(mut self, c: SplitCoefficients) -> Result<Self> {
        c.validate()?;
        self.coefficients = c;
        Ok(self)
    }

    pub fn with_filter(mut self, on: bool) -> Self {
        self.filter = on;
        self
    }

    fn check(&self, s: &SpectralState) {
        assert!(
            s.nx == self.nx && s.nv == self.nv,
            "state grid {}x{} does not match solver grid {}x{}",
            s.nx,
            s.nv,
            self.nx,
            self.nv
        );
    }

    /// `f(x, v) <- f(x - v dt, v)`.
    pub fn advect_x(&self, s: &mut SpectralState, dt: f64) {
        self.check(s);
        if dt == 0.0 {
            return;
        }
        let mut cols = transpose(&s.values, self.nx, self.nv);
        let dv = s.dv();
        let v_min = s.domain.v_min;
        let k = &self.x_axis.k;
        self.x_axis.map_lines(&mut cols, |j, spec| {
            let v = v_min + j as f64 * dv;
            for (c, &kx) in spec.iter_mut().zip(k) {
                *c *= Complex64::from_polar(1.0, -kx * v * dt);
            }
        });
        s.values = transpose(&cols, self.nv, self.nx);
    }

    /// Fourier coefficients of `E` from the charge density of `s`
    /// (unnormalized forward-FFT convention).
    pub fn poisson_fourier(&self, s: &SpectralState) -> Vec<Complex64> {
        self.check(s);
        self.poisson_from_density(&s.density())
    }

    /// Solves `-phi'' = q (rho - 1)`, `E = -phi'` in Fourier space.
    pub fn poisson_from_density(&self, rho: &[f64]) -> Vec<Complex64> {
        assert_eq!(rho.len(), self.nx);
        let mut spec: Vec<Complex64> = rho.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.x_axis.fwd.process(&mut spec);
        let q = self.species.q;
        for (c, &k) in spec.iter_mut().zip(&self.x_axis.k) {
            if k == 0.0 {
                *c = Complex64::new(0.0, 0.0);
            } else {
                let phi = *c * (q / (k * k));
                *c = Complex64::new(0.0, -k) * phi;
            }
        }
        spec
    }

    /// Electric field at the x nodes.
    pub fn electric_field(&self, s: &SpectralState) -> FieldOnGrid {
        self.check(s);
        let rho = s.density();
        self.field_from_density(&rho)
    }

    pub fn field_from_density(&self, rho: &[f64]) -> FieldOnGrid {
        let mean_density = rho.iter().sum::<f64>() / rho.len() as f64;
        let mut spec = self.poisson_from_density(rho);
        self.x_axis.inv.process(&mut spec);
        let scale = 1.0 / self.nx as f64;
        FieldOnGrid {
            e: spec.iter().map(|c| c.re * scale).collect(),
            mean_density,
        }
    }

    /// `f(x, v) <- f(x, v - (q/m) E(x) dt)` for the given nodal field.
    pub fn kick_v(&self, s: &mut SpectralState, e: &[f64], dt: f64) {
        self.check(s);
        assert_eq!(e.len(), self.nx);
        if dt == 0.0 || e.iter().all(|&x| x == 0.0) {
            return;
        }
        let qm = self.species.q_over_m();
        let k = &self.v_axis.k;
        self.v_axis.map_lines(&mut s.values, |i, spec| {
            let shift = qm * e[i] * dt;
            if shift == 0.0 {
                return;
            }
            for (c, &kv) in spec.iter_mut().zip(k) {
                *c *= Complex64::from_polar(1.0, -kv * shift);
            }
        });
    }

    /// Kick with the self-consistent field of the current state.
    pub fn kick_self_consistent(&self, s: &mut SpectralState, dt: f64) -> FieldOnGrid {
        let field = self.electric_field(s);
        self.kick_v(s, &field.e, dt);
        field
    }

    /// One full split step followed by the filter (if enabled).
    pub fn step(&self, s: &mut SpectralState, dt: f64) {
        self.step_with(s, dt, |solver, st| solver.electric_field(st).e);
    }

    /// One full step using `field(solver, state)` for every kick.
    pub fn step_with(
        &self,
        s: &mut SpectralState,
        dt: f64,
        field: impl Fn(&Self, &SpectralState) -> Vec<f64>,
    ) {
        let c = &self.coefficients;
        for (&d, &k) in c.drift.iter().zip(&c.kick) {
            let e = field(self, s);
            self.kick_v(s, &e, k * dt);
            self.advect_x(s, d * dt);
        }
        if self.filter {
            self.apply_filter(s);
        }
        s.t += dt;
    }

    /// Damps high modes in both directions.
    pub fn apply_filter(&self, s: &mut SpectralState) {
        self.check(s);
        let fv = &self.v_axis.filter;
        self.v_axis.map_lines(&mut s.values, |_, spec| {
            for (c, &w) in spec.iter_mut().zip(fv) {
                *c *= w;
            }
        });
        let mut cols = transpose(&s.values, self.nx, self.nv);
        let fx = &self.x_axis.filter;
        self.x_axis.map_lines(&mut cols, |_, spec| {
            for (c, &w) in spec.iter_mut().zip(fx) {
                *c *= w;
            }
        });
        s.values = transpose(&cols, self.nv, self.nx);
    }

    /// Grid diagnostics; `star_disc` is left unset, `hk_variation` is
    /// computed when `with_hk` is true.
    pub fn diagnostics(&self, s: &SpectralState, with_hk: bool) -> DiagnosticsRecord {
        let field = self.electric_field(s);
        let dx = s.dx();
        let dv = s.dv();
        let field_energy = field.energy(dx);
        let nv = s.nv;
        let v_min = s.domain.v_min;
        let kinetic = 0.5
            * dx
            * dv
            * par::sum_range(s.values.len(), |idx| {
                let v = v_min + (idx % nv) as f64 * dv;
                v * v * s.values[idx]
            });
        let mass = dx * dv * par::sum_range(s.values.len(), |idx| s.values[idx]);
        let entropy = dx
            * dv
            * par::sum_range(s.values.len(), |idx| {
                let f = s.values[idx];
                if f > 0.0 {
                    f * f.ln()
                } else {
                    0.0
                }
            });
        let mut rec = DiagnosticsRecord::new(s.t, Segment::Spectral, field_energy, kinetic, mass, entropy);
        if with_hk {
            rec.hk_variation = Some(self.hk_variation(s));
        }
        rec
    }

    pub fn hk_variation(&self, s: &SpectralState) -> f64 {
        super::hk_variation_grid(&s.values, s.nx, s.nv, s.dx(), s.dv())
    }

    /// Spectral interpolation onto an `n_pad` times finer grid; see
    /// [`super::pad::zero_pad`].
    pub fn zero_pad(&self, s: &SpectralState, n_pad: usize) -> Result<crate::model::GriddedDensity> {
        super::pad::zero_pad(s, n_pad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(v: f64) -> f64 {
        (-0.5 * v * v).exp() / (2.0 * PI).sqrt()
    }

    fn landau_like(nx: usize, nv: usize) -> (SpectralSolver, SpectralState) {
        let d = PhaseSpaceDomain::new(0.0, 4.0 * PI, -6.5, 6.5).unwrap();
        let s = SpectralState::from_fn(d, nx, nv, |x, v| (1.0 + 0.3 * (0.5 * x).cos()) * gauss(v)).unwrap();
        (SpectralSolver::for_state(&s, Species::ELECTRON).unwrap(), s)
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn ruth3_fractions_sum_to_one() {
        SplitCoefficients::ruth3().validate().unwrap();
        assert!(SplitCoefficients { drift: vec![0.5], kick: vec![1.0] }.validate().is_err());
    }

    #[test]
    fn zero_drift_is_identity() {
        let (solver, s) = landau_like(16, 32);
        let mut t = s.clone();
        solver.advect_x(&mut t, 0.0);
        assert_eq!(t.values, s.values);
    }

    #[test]
    fn drift_matches_analytic_shear() {
        let (solver, s) = landau_like(32, 64);
        let mut t = s.clone();
        let dt = 0.37;
        solver.advect_x(&mut t, dt);
        for i in 0..s.nx {
            for j in 0..s.nv {
                let (x, v) = (s.x_node(i), s.v_node(j));
                let exact = (1.0 + 0.3 * (0.5 * (x - v * dt)).cos()) * gauss(v);
                assert!((t.at(i, j) - exact).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn drift_composes() {
        let (solver, s) = landau_like(16, 32);
        let mut a = s.clone();
        let mut b = s.clone();
        solver.advect_x(&mut a, 0.2);
        solver.advect_x(&mut b, 0.1);
        solver.advect_x(&mut b, 0.1);
        assert!(max_diff(&a.values, &b.values) < 1e-13);
    }

    #[test]
    fn drift_preserves_mass_and_l2() {
        let (solver, s) = landau_like(16, 32);
        let mut t = s.clone();
        solver.advect_x(&mut t, 1.3);
        assert!((t.mass() - s.mass()).abs() <= 1e-12 * s.mass());
        assert!((t.l2_norm() - s.l2_norm()).abs() <= 1e-10);
    }

    #[test]
    fn poisson_cosine_density() {
        let d = PhaseSpaceDomain::new(0.0, 2.0 * PI, -1.0, 1.0).unwrap();
        let solver = SpectralSolver::new(d, 32, 8, Species::new(1.0, 1.0).unwrap()).unwrap();
        let rho: Vec<f64> = (0..32).map(|i| 1.0 + (i as f64 * 2.0 * PI / 32.0).cos()).collect();
        let field = solver.field_from_density(&rho);
        for (i, e) in field.e.iter().enumerate() {
            let x = i as f64 * 2.0 * PI / 32.0;
            assert!((e - x.sin()).abs() < 1e-12, "{i}: {e}");
        }
        assert!(field.is_neutral());
    }

    #[test]
    fn neutral_density_gives_zero_field() {
        let (solver, _) = landau_like(16, 16);
        let field = solver.field_from_density(&[1.0; 16]);
        assert!(field.e.iter().all(|e| e.abs() < 1e-15));
        assert!(!solver.field_from_density(&[1.1; 16]).is_neutral());
    }

    #[test]
    fn poisson_is_linear_in_fluctuation() {
        let (solver, _) = landau_like(16, 16);
        let r1: Vec<f64> = (0..16).map(|i| 1.0 + 0.1 * (i as f64).sin()).collect();
        let r2: Vec<f64> = (0..16).map(|i| 1.0 + 0.2 * (0.3 * i as f64).cos()).collect();
        let (a, b) = (2.0, -0.5);
        let mix: Vec<f64> = r1.iter().zip(&r2).map(|(x, y)| a * x + b * y - (a + b - 1.0)).collect();
        let e1 = solver.field_from_density(&r1).e;
        let e2 = solver.field_from_density(&r2).e;
        let em = solver.field_from_density(&mix).e;
        for i in 0..16 {
            assert!((em[i] - a * e1[i] - b * e2[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_kick_shifts_gaussian() {
        let (solver, s) = landau_like(8, 128);
        let mut t = s.clone();
        let e0 = 0.4;
        let dt = 0.75;
        solver.kick_v(&mut t, &vec![e0; 8], dt);
        let shift = Species::ELECTRON.q_over_m() * e0 * dt;
        for i in 0..s.nx {
            let x = s.x_node(i);
            for j in 0..s.nv {
                let v = s.v_node(j);
                let exact = (1.0 + 0.3 * (0.5 * x).cos()) * gauss(v - shift);
                assert!((t.at(i, j) - exact).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn kick_preserves_row_mass() {
        let (solver, s) = landau_like(16, 64);
        let mut t = s.clone();
        let e: Vec<f64> = (0..16).map(|i| (i as f64).cos()).collect();
        solver.kick_v(&mut t, &e, 0.3);
        for (a, b) in s.density().iter().zip(t.density()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((t.l2_norm() - s.l2_norm()).abs() < 1e-10);
        let mut u = s.clone();
        solver.kick_v(&mut u, &[0.0; 16], 0.3);
        assert_eq!(u.values, s.values);
    }

    #[test]
    fn free_streaming_step_equals_drift() {
        let (solver, s) = landau_like(16, 32);
        let mut a = s.clone();
        solver.step_with(&mut a, 0.1, |sv, _| vec![0.0; sv.nx]);
        let mut b = s.clone();
        solver.advect_x(&mut b, 0.1);
        solver.apply_filter(&mut b);
        assert!(max_diff(&a.values, &b.values) < 1e-13);
    }

    #[test]
    fn equilibrium_has_no_field() {
        let d = PhaseSpaceDomain::new(0.0, 4.0 * PI, -6.5, 6.5).unwrap();
        let mut s = SpectralState::from_fn(d, 16, 64, |_, v| gauss(v)).unwrap();
        let solver = SpectralSolver::for_state(&s, Species::ELECTRON).unwrap();
        for _ in 0..20 {
            solver.step(&mut s, 0.1);
        }
        assert!(solver.diagnostics(&s, false).field_energy < 1e-12);
    }

    #[test]
    fn step_conserves_mass() {
        let (solver, mut s) = landau_like(32, 64);
        let m0 = s.mass();
        for _ in 0..10 {
            solver.step(&mut s, 0.1);
        }
        assert!((s.mass() - m0).abs() <= 1e-12 * m0);
    }
}
