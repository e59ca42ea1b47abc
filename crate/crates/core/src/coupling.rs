//! Spectral to PIC handoff: the spectral state is refined by zero padding,
//! its absolute value normalized into a sampling density, markers are drawn
//! by the bilinear Rosenblatt transform and carry the (possibly negative)
//! interpolated plasma density as `f_like`.

use crate::error::{Error, Result};
use crate::lowdisc::{generate_pairs, SequenceKind};
use crate::model::{normalize_to_sampling_density, DiagnosticsRecord, GriddedDensity, ParticleEnsemble};
use crate::pic::{run_pic_with, IntegratorKind, PicRunConfig, StarDiscSettings};
use crate::sampling::{rosenblatt_sample, BilinearSampler};
use crate::spectral::{run_spectral_with, SpectralRunConfig, SpectralState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HandoffConfig {
    pub t0: f64,
    pub n_p: usize,
    pub n_pad: usize,
    pub sequence: SequenceKind,
    pub n_f: usize,
}

impl HandoffConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_p == 0 || self.n_pad == 0 {
            return Err(Error::InvalidInput("n_p and n_pad must be at least 1".into()));
        }
        if self.n_f < 4 {
            return Err(Error::InvalidInput(format!("n_f must be at least 4, got {}", self.n_f)));
        }
        self.sequence.validate()
    }
}

/// Result of a handoff together with the refined grid it was drawn from.
#[derive(Clone, Debug)]
pub struct Handoff {
    pub ensemble: ParticleEnsemble,
    pub fine: GriddedDensity,
}

pub fn handoff(s: &SpectralState, cfg: &HandoffConfig) -> Result<ParticleEnsemble> {
    Ok(handoff_detailed(s, cfg)?.ensemble)
}

pub fn handoff_detailed(s: &SpectralState, cfg: &HandoffConfig) -> Result<Handoff> {
    cfg.validate()?;
    let fine = crate::spectral::zero_pad(s, cfg.n_pad)?;
    let g = normalize_to_sampling_density(&fine)?;
    let sampler = BilinearSampler::new(g)?;
    let pairs = generate_pairs(cfg.sequence, cfg.n_p)?;
    let mut ensemble = rosenblatt_sample(&sampler, &pairs)?;
    for k in 0..ensemble.len() {
        ensemble.f_like[k] = fine.interpolate(ensemble.x[k], ensemble.v[k]);
    }
    ensemble.refresh_weights();
    Ok(Handoff { ensemble, fine })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledConfig {
    /// Spectral segment; its `t_max` is the switch time.
    pub spectral: SpectralRunConfig,
    pub handoff: HandoffConfig,
    pub integrator: IntegratorKind,
    pub dt_pic: f64,
    pub t_max: f64,
    pub pic_output_stride: usize,
    pub star_disc: Option<StarDiscSettings>,
}

impl CoupledConfig {
    pub fn new(spectral: SpectralRunConfig, handoff: HandoffConfig, t_max: f64) -> Self {
        let mut spectral = spectral;
        spectral.t_max = handoff.t0;
        CoupledConfig {
            dt_pic: spectral.dt,
            pic_output_stride: spectral.output_stride,
            spectral,
            handoff,
            integrator: IntegratorKind::Ruth3,
            t_max,
            star_disc: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spectral.validate()?;
        self.handoff.validate()?;
        if (self.spectral.t_max - self.handoff.t0).abs() > 1e-12 {
            return Err(Error::InvalidInput("spectral segment must end at t0".into()));
        }
        if !(self.handoff.t0 < self.t_max) {
            return Err(Error::InvalidInput("t0 must lie before t_max".into()));
        }
        Ok(())
    }

    pub fn pic_config(&self) -> PicRunConfig {
        PicRunConfig {
            domain: self.spectral.domain,
            species: self.spectral.species,
            n_f: self.handoff.n_f,
            dt: self.dt_pic,
            t_start: self.handoff.t0,
            t_max: self.t_max,
            integrator: self.integrator,
            output_stride: self.pic_output_stride,
            star_disc: self.star_disc,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoupledRun {
    /// Spectral records up to and including `t0`, then PIC records from `t0`.
    pub records: Vec<DiagnosticsRecord>,
    pub spectral_state: SpectralState,
    pub ensemble: ParticleEnsemble,
}

pub fn run_coupled(cfg: &CoupledConfig) -> Result<CoupledRun> {
    run_coupled_with(cfg, |_, _| Ok(()), |_, _, _| Ok(()))
}

/// Like [`run_coupled`] with per-step observers for each segment.
pub fn run_coupled_with(
    cfg: &CoupledConfig,
    on_spectral: impl FnMut(usize, &SpectralState) -> Result<()>,
    on_pic: impl FnMut(usize, f64, &ParticleEnsemble) -> Result<()>,
) -> Result<CoupledRun> {
    cfg.validate()?;
    let spectral = run_spectral_with(&cfg.spectral, on_spectral)?;
    let ensemble = handoff(&spectral.state, &cfg.handoff)?;
    let pic = run_pic_with(ensemble, &cfg.pic_config(), on_pic)?;
    let mut records = spectral.records;
    records.extend(pic.records);
    Ok(CoupledRun {
        records,
        spectral_state: spectral.state,
        ensemble: pic.ensemble,
    })
}
