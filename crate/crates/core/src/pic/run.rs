use super::estimators::{discrete_entropy, kinetic_energy, total_mass};
use super::integrator::{push, IntegratorKind};
use super::spline::{FieldSolution, SplinePoissonSolver};
use crate::error::{Error, Result};
use crate::lowdisc::star_discrepancy_in_window;
use crate::model::{DiagnosticsRecord, ParticleEnsemble, PhaseSpaceDomain, Segment, Species};

/// Periodic windowed star discrepancy of the markers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarDiscSettings {
    pub window: PhaseSpaceDomain,
    /// Evaluate every this many steps.
    pub every: usize,
    /// Subsample the window content to at most this many markers.
    pub cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PicRunConfig {
    pub domain: PhaseSpaceDomain,
    pub species: Species,
    pub n_f: usize,
    pub dt: f64,
    pub t_start: f64,
    pub t_max: f64,
    pub integrator: IntegratorKind,
    pub output_stride: usize,
    pub star_disc: Option<StarDiscSettings>,
}

impl PicRunConfig {
    pub fn new(domain: PhaseSpaceDomain, n_f: usize, dt: f64, t_max: f64, integrator: IntegratorKind) -> Self {
        PicRunConfig {
            domain,
            species: Species::ELECTRON,
            n_f,
            dt,
            t_start: 0.0,
            t_max,
            integrator,
            output_stride: 1,
            star_disc: None,
        }
    }

    pub fn steps(&self) -> usize {
        ((self.t_max - self.t_start) / self.dt).round().max(0.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidInput(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max >= self.t_start) {
            return Err(Error::InvalidInput("t_max lies before the start time".into()));
        }
        if self.output_stride == 0 || self.star_disc.is_some_and(|s| s.every == 0) {
            return Err(Error::InvalidInput("strides must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PicRun {
    pub records: Vec<DiagnosticsRecord>,
    pub ensemble: ParticleEnsemble,
    pub field: FieldSolution,
}

/// Monte-Carlo diagnostics of an ensemble and its field.
pub fn pic_diagnostics(e: &ParticleEnsemble, field: &FieldSolution, t: f64) -> DiagnosticsRecord {
    DiagnosticsRecord::new(
        t,
        Segment::Pic,
        field.field_energy(),
        kinetic_energy(e),
        total_mass(e),
        discrete_entropy(e).value,
    )
}

pub fn run_pic(ensemble: ParticleEnsemble, cfg: &PicRunConfig) -> Result<PicRun> {
    run_pic_with(ensemble, cfg, |_, _, _| Ok(()))
}

/// Runs the PIC loop, calling `observe(step, t, ensemble)` after every step.
pub fn run_pic_with(
    mut ensemble: ParticleEnsemble,
    cfg: &PicRunConfig,
    mut observe: impl FnMut(usize, f64, &ParticleEnsemble) -> Result<()>,
) -> Result<PicRun> {
    cfg.validate()?;
    let solver = SplinePoissonSolver::new(cfg.domain, cfg.n_f, cfg.species)?;
    ensemble.wrap_positions(&cfg.domain);
    let steps = cfg.steps();
    let mut records = Vec::new();
    let mut field = solver.field(&ensemble, cfg.t_start);
    let skipped = super::estimators::discrete_entropy(&ensemble).skipped_fraction;
    if skipped > 0.0 {
        log::info!("entropy skips {:.3}% of markers with nonpositive f", 100.0 * skipped);
    }
    for n in 0..=steps {
        let t = cfg.t_start + n as f64 * cfg.dt;
        if n > 0 {
            let report = push(cfg.integrator, &mut ensemble, &solver, cfg.dt)?;
            if report.iterations > 0 {
                log::debug!("step {n}: fixed point converged in {} iterations", report.iterations);
            }
            field = solver.field(&ensemble, t);
        }
        let emit = n % cfg.output_stride == 0 || n == steps;
        let disc = cfg.star_disc.filter(|s| n % s.every == 0);
        if emit || disc.is_some() {
            let mut rec = pic_diagnostics(&ensemble, &field, t);
            if let Some(s) = disc {
                rec.star_disc = match star_discrepancy_in_window(&ensemble, &s.window, s.cap) {
                    Ok(w) => Some(w.d_star),
                    Err(Error::EmptyPointSet) => None,
                    Err(err) => return Err(err),
                };
            }
            records.push(rec);
        }
        observe(n, t, &ensemble)?;
    }
    Ok(PicRun {
        records,
        ensemble,
        field,
    })
}
