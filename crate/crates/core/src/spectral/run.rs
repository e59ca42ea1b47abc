use super::{SpectralSolver, SpectralState};
use crate::error::{Error, Result};
use crate::model::{DiagnosticsRecord, InitialCondition, PhaseSpaceDomain, Species};

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralRunConfig {
    pub ic: InitialCondition,
    pub domain: PhaseSpaceDomain,
    pub species: Species,
    pub nx: usize,
    pub nv: usize,
    pub dt: f64,
    pub t_max: f64,
    /// Diagnostics every `output_stride` steps (and at the final step).
    pub output_stride: usize,
    /// Hardy-Krause variation every this many steps; `None` disables it.
    pub hk_stride: Option<usize>,
    pub filter: bool,
}

impl SpectralRunConfig {
    pub fn new(ic: InitialCondition, v_max: f64, nx: usize, nv: usize, dt: f64, t_max: f64) -> Self {
        SpectralRunConfig {
            domain: ic.domain(v_max),
            ic,
            species: Species::ELECTRON,
            nx,
            nv,
            dt,
            t_max,
            output_stride: 1,
            hk_stride: None,
            filter: true,
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.ic.validate()?;
        self.domain.validate()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidInput(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max >= 0.0) {
            return Err(Error::InvalidInput(format!("t_max must be nonnegative, got {}", self.t_max)));
        }
        if self.output_stride == 0 || self.hk_stride == Some(0) {
            return Err(Error::InvalidInput("strides must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SpectralRun {
    pub records: Vec<DiagnosticsRecord>,
    pub state: SpectralState,
}

pub fn run_spectral(cfg: &SpectralRunConfig) -> Result<SpectralRun> {
    run_spectral_with(cfg, |_, _| Ok(()))
}

/// Like [`run_spectral`], calling `observe(step, state)` after every step.
pub fn run_spectral_with(
    cfg: &SpectralRunConfig,
    mut observe: impl FnMut(usize, &SpectralState) -> Result<()>,
) -> Result<SpectralRun> {
    cfg.validate()?;
    let solver = SpectralSolver::new(cfg.domain, cfg.nx, cfg.nv, cfg.species)?.with_filter(cfg.filter);
    let mut state = SpectralState::from_initial(&cfg.ic, cfg.domain, cfg.nx, cfg.nv)?;
    let steps = cfg.steps();
    let mut records = Vec::new();
    let mut warned = false;
    for n in 0..=steps {
        if n > 0 {
            solver.step(&mut state, cfg.dt);
            state.t = n as f64 * cfg.dt;
        }
        let with_hk = cfg.hk_stride.is_some_and(|h| n % h == 0);
        if n % cfg.output_stride == 0 || n == steps || with_hk {
            let rec = solver.diagnostics(&state, with_hk);
            if !warned && !solver.electric_field(&state).is_neutral() {
                log::warn!("non-neutral plasma: mean density differs from 1 by more than 1e-6");
                warned = true;
            }
            records.push(rec);
        }
        observe(n, &state)?;
    }
    Ok(SpectralRun { records, state })
}
