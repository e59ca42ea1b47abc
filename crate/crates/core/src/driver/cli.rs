use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::config::RunConfig;
use super::io::{read_grid_dump, read_meta, read_particle_dump, write_grid_dump, write_particle_dump};
use super::run::execute;
use crate::densest::{bilinear_ridge_fit, default_ridge_lambda, osde_linear, LinearSplineBasis2D};
use crate::error::{Error, Result};
use crate::lowdisc::{generate_pairs, star_discrepancy_in_window, SequenceKind};
use crate::model::{normalize_to_sampling_density, PhaseSpaceDomain};
use crate::par;
use crate::sampling::{rosenblatt_sample, BilinearSampler};
use crate::spectral::hk_variation_gridded;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "VPQMC_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vlasov-qmc", version, about = "Vlasov-Poisson solvers with quasi-Monte-Carlo particle sampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SequenceArg {
    Sobol,
    PseudoRandom,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReconstructMethod {
    /// Orthogonal-series density estimate with linear splines.
    Osde,
    /// Ridge-regularised least-squares interpolation of the marker values.
    Ridge,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulation from a config file and/or key=value overrides.
    Run {
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Overrides such as `dt=0.01`; they win over the file.
        overrides: Vec<String>,
    },
    /// Draw markers from a grid dump by the bilinear Rosenblatt transform.
    Sample {
        /// Grid dump stem (without .bin/.json).
        grid: PathBuf,
        #[arg(short, long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value = "sobol")]
        sequence: SequenceArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        skip: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Rebuild a grid density from a particle dump.
    Reconstruct {
        particles: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        nx: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        nv: u64,
        #[arg(long, value_enum, default_value = "osde")]
        method: ReconstructMethod,
        /// Ridge weight; defaults to a data-scaled value.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Windowed star discrepancy of a particle dump.
    Discrepancy {
        particles: PathBuf,
        /// x_min,x_max,v_min,v_max
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0.0, 2.0, -1.0, 1.0])]
        window: Vec<f64>,
        #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// Hardy-Krause variation of a grid dump.
    HkVariation { grid: PathBuf },
    /// Print the sidecar metadata of a dump.
    DumpInfo { dump: PathBuf },
}

fn sequence(arg: SequenceArg, seed: u64, skip: u64) -> SequenceKind {
    match arg {
        SequenceArg::Sobol => SequenceKind::Sobol { skip },
        SequenceArg::PseudoRandom => SequenceKind::PseudoRandom { seed },
    }
}

/// Executes one subcommand, writing its report to stdout.
pub fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, overrides } => {
            let cfg = RunConfig::from_file_and_overrides(config.as_deref(), &overrides)?;
            let out = execute(&cfg)?;
            println!(
                "{}",
                serde_json::json!({
                    "timeseries": out.timeseries.display().to_string(),
                    "records": out.records.len(),
                    "dumps": out.dumps.len(),
                })
            );
        }
        Command::Sample { grid, n, sequence: s, seed, skip, out } => {
            let (f, t) = read_grid_dump(&grid)?;
            let sampler = BilinearSampler::new(normalize_to_sampling_density(&f)?)?;
            let pairs = generate_pairs(sequence(s, seed, skip), n as usize)?;
            let mut e = rosenblatt_sample(&sampler, &pairs)?;
            for k in 0..e.len() {
                e.f_like[k] = f.interpolate(e.x[k], e.v[k]);
            }
            e.refresh_weights();
            write_particle_dump(&out, &e, &f.domain, t)?;
            println!("{}", serde_json::json!({ "particles": e.len(), "out": out.display().to_string() }));
        }
        Command::Reconstruct { particles, nx, nv, method, lambda, out } => {
            let (e, domain, t) = read_particle_dump(&particles)?;
            let basis = LinearSplineBasis2D::new(domain, nx as usize, nv as usize)?;
            let g = match method {
                ReconstructMethod::Osde => osde_linear(&e, &basis, true)?,
                ReconstructMethod::Ridge => {
                    let lambda = lambda.unwrap_or_else(|| default_ridge_lambda(&e.x, &e.v, &basis));
                    bilinear_ridge_fit(&e.x, &e.v, &e.f_like, &basis, lambda)?
                }
            };
            write_grid_dump(&out, &g, t)?;
            println!("{}", serde_json::json!({ "nx": g.nx, "nv": g.nv, "out": out.display().to_string() }));
        }
        Command::Discrepancy { particles, window, cap } => {
            if window.len() != 4 {
                return Err(Error::InvalidInput(format!("--window needs 4 values, got {}", window.len())));
            }
            let (e, _, t) = read_particle_dump(&particles)?;
            let w = PhaseSpaceDomain::new(window[0], window[1], window[2], window[3])?;
            let d = star_discrepancy_in_window(&e, &w, Some(cap as usize))?;
            println!(
                "{}",
                serde_json::json!({ "t": t, "d_star": d.d_star, "n_in_window": d.n_in_window, "n_used": d.n_used })
            );
        }
        Command::HkVariation { grid } => {
            let (g, t) = read_grid_dump(&grid)?;
            println!("{}", serde_json::json!({ "t": t, "hk_variation": hk_variation_gridded(&g) }));
        }
        Command::DumpInfo { dump } => {
            let meta = read_meta(&dump)?;
            let text = serde_json::to_string(&meta).map_err(|e| Error::Format(e.to_string()))?;
            println!("{text}");
        }
    }
    Ok(())
}

/// Machine-readable error line.
pub fn error_line(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                par::init_global_threads(n);
            }
            _ => {
                eprintln!("{}", error_line(&Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))));
                return EXIT_USAGE;
            }
        }
    }
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            match e {
                Error::Parse { .. } | Error::Validation(_) => EXIT_USAGE,
                _ => EXIT_RUNTIME,
            }
        }
    }
}
