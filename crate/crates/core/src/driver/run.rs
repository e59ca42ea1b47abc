use std::path::{Path, PathBuf};

use super::config::{PicInit, RunConfig, SolverKind};
use super::io::{write_grid_dump, write_particle_dump, write_timeseries};
use crate::coupling::{run_coupled_with, CoupledConfig, HandoffConfig};
use crate::error::{Error, Result};
use crate::lowdisc::generate_pairs;
use crate::model::DiagnosticsRecord;
use crate::pic::{run_pic_with, PicRunConfig, StarDiscSettings};
use crate::sampling::{its_tensor_product, uniform_sample};
use crate::spectral::{run_spectral_with, SpectralRunConfig, SpectralState};

pub const CONFIG_ECHO: &str = "config.toml";
pub const TIMESERIES: &str = "timeseries.csv";
pub const DUMP_DIR: &str = "dumps";

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub timeseries: PathBuf,
    pub dumps: Vec<PathBuf>,
}

impl RunConfig {
    pub fn spectral_config(&self, t_max: f64) -> SpectralRunConfig {
        let mut c = SpectralRunConfig::new(self.ic, self.v_max, self.nx, self.nv, self.dt, t_max);
        c.output_stride = self.output_stride;
        c.hk_stride = self.hk_every;
        c.filter = self.filter;
        c
    }

    pub fn star_disc(&self) -> Result<Option<StarDiscSettings>> {
        Ok(match self.star_every {
            Some(every) => Some(StarDiscSettings {
                window: self.star_window_domain()?,
                every,
                cap: self.star_cap,
            }),
            None => None,
        })
    }

    pub fn pic_config(&self) -> Result<PicRunConfig> {
        let mut c = PicRunConfig::new(self.domain(), self.n_f, self.dt, self.t_max, self.integrator);
        c.output_stride = self.output_stride;
        c.star_disc = self.star_disc()?;
        Ok(c)
    }

    pub fn coupled_config(&self) -> Result<CoupledConfig> {
        let t0 = self
            .t0
            .ok_or_else(|| Error::Validation(vec!["coupled solver requires t0".into()]))?;
        let handoff = HandoffConfig {
            t0,
            n_p: self.n_p,
            n_pad: self.n_pad,
            sequence: self.sequence,
            n_f: self.n_f,
        };
        let mut c = CoupledConfig::new(self.spectral_config(t0), handoff, self.t_max);
        c.integrator = self.integrator;
        c.star_disc = self.star_disc()?;
        Ok(c)
    }
}

struct Dumper {
    dir: PathBuf,
    every: Option<usize>,
    written: Vec<PathBuf>,
}

impl Dumper {
    fn due(&self, step: usize) -> bool {
        self.every.is_some_and(|e| step % e == 0)
    }

    fn spectral(&mut self, step: usize, s: &SpectralState) -> Result<()> {
        if self.due(step) {
            let path = self.dir.join(format!("spectral_{step:06}"));
            write_grid_dump(&path, &s.to_gridded(), s.t)?;
            self.written.push(path);
        }
        Ok(())
    }

    fn pic(&mut self, step: usize, t: f64, e: &crate::model::ParticleEnsemble, cfg: &RunConfig) -> Result<()> {
        if self.due(step) {
            let path = self.dir.join(format!("pic_{step:06}"));
            write_particle_dump(&path, e, &cfg.domain(), t)?;
            self.written.push(path);
        }
        Ok(())
    }
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Runs the configured solver and writes the echoed config, the
/// diagnostics CSV and the periodic dumps into the output directory.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    let violations = cfg.violations();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    create_dir(&cfg.output_dir)?;
    let echo = cfg.output_dir.join(CONFIG_ECHO);
    std::fs::write(&echo, cfg.to_toml()).map_err(|e| Error::io(&echo, e))?;
    let mut dumper = Dumper {
        dir: cfg.output_dir.join(DUMP_DIR),
        every: cfg.dump_every,
        written: Vec::new(),
    };
    if dumper.every.is_some() {
        create_dir(&dumper.dir)?;
    }
    log::info!("running {} solver on the {} scenario", cfg.solver.as_str(), cfg.scenario.as_str());
    let records = match cfg.solver {
        SolverKind::Spectral => {
            run_spectral_with(&cfg.spectral_config(cfg.t_max), |n, s| dumper.spectral(n, s))?.records
        }
        SolverKind::Pic => {
            let domain = cfg.domain();
            let pairs = generate_pairs(cfg.sequence, cfg.n_p)?;
            let ensemble = match cfg.pic_init {
                PicInit::Its => its_tensor_product(&cfg.ic, &pairs, &domain)?,
                PicInit::Uniform => uniform_sample(&cfg.ic, &pairs, &domain)?,
            };
            let pc = cfg.pic_config()?;
            run_pic_with(ensemble, &pc, |n, t, e| dumper.pic(n, t, e, cfg))?.records
        }
        SolverKind::Coupled => {
            let cc = cfg.coupled_config()?;
            let mut spectral_dumps = Dumper {
                dir: dumper.dir.clone(),
                every: dumper.every,
                written: Vec::new(),
            };
            let run = run_coupled_with(
                &cc,
                |n, s| spectral_dumps.spectral(n, s),
                |n, t, e| dumper.pic(n, t, e, cfg),
            )?;
            let mut all = spectral_dumps.written;
            all.append(&mut dumper.written);
            dumper.written = all;
            run.records
        }
    };
    let timeseries = cfg.output_dir.join(TIMESERIES);
    write_timeseries(&timeseries, &records)?;
    Ok(RunOutput {
        records,
        timeseries,
        dumps: dumper.written,
    })
}
