//! Run configuration: a TOML file whose sections are organisational only
//! (keys are flattened), plus `key=value` overrides that win over the file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::lowdisc::SequenceKind;
use crate::model::{InitialCondition, PhaseSpaceDomain};
use crate::pic::IntegratorKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Landau,
    LinearLandau,
    BumpOnTail,
    Custom,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Landau => "landau",
            ScenarioKind::LinearLandau => "linear_landau",
            ScenarioKind::BumpOnTail => "bump_on_tail",
            ScenarioKind::Custom => "custom",
        }
    }

    fn preset(&self) -> Option<InitialCondition> {
        match self {
            ScenarioKind::Landau => Some(InitialCondition::landau()),
            ScenarioKind::LinearLandau => Some(InitialCondition::linear_landau()),
            ScenarioKind::BumpOnTail => Some(InitialCondition::bump_on_tail()),
            ScenarioKind::Custom => None,
        }
    }

    fn default_v_max(&self) -> f64 {
        match self {
            ScenarioKind::BumpOnTail => 10.0,
            _ => 6.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Spectral,
    Pic,
    Coupled,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Spectral => "spectral",
            SolverKind::Pic => "pic",
            SolverKind::Coupled => "coupled",
        }
    }
}

/// How a pure PIC run draws its initial markers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PicInit {
    /// Tensor-product inverse transform of the initial condition.
    Its,
    /// Uniform on the phase-space domain with `g = 1/area`.
    Uniform,
}

impl PicInit {
    pub fn as_str(&self) -> &'static str {
        match self {
            PicInit::Its => "its",
            PicInit::Uniform => "uniform",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub ic: InitialCondition,
    pub v_max: f64,
    pub solver: SolverKind,
    pub nx: usize,
    pub nv: usize,
    pub n_f: usize,
    pub n_p: usize,
    pub dt: f64,
    pub t_max: f64,
    pub t0: Option<f64>,
    pub n_pad: usize,
    pub integrator: IntegratorKind,
    pub sequence: SequenceKind,
    pub pic_init: PicInit,
    pub filter: bool,
    pub output_stride: usize,
    pub hk_every: Option<usize>,
    pub star_every: Option<usize>,
    pub star_window: [f64; 4],
    pub star_cap: Option<usize>,
    pub dump_every: Option<usize>,
    pub output_dir: PathBuf,
}

/// Every accepted key with the section it is echoed under.
pub const KEYS: &[(&str, &str)] = &[
    ("scenario", "scenario"),
    ("epsilon", "scenario"),
    ("k", "scenario"),
    ("n_b", "scenario"),
    ("sigma_b", "scenario"),
    ("v_b", "scenario"),
    ("v_max", "scenario"),
    ("solver", "solver"),
    ("nx", "solver"),
    ("nv", "solver"),
    ("n_f", "solver"),
    ("n_p", "solver"),
    ("dt", "solver"),
    ("t_max", "solver"),
    ("t0", "solver"),
    ("n_pad", "solver"),
    ("integrator", "solver"),
    ("filter", "solver"),
    ("sequence", "sampling"),
    ("seed", "sampling"),
    ("skip", "sampling"),
    ("pic_init", "sampling"),
    ("output_stride", "diagnostics"),
    ("hk_every", "diagnostics"),
    ("star_every", "diagnostics"),
    ("star_window", "diagnostics"),
    ("star_cap", "diagnostics"),
    ("dump_every", "diagnostics"),
    ("output_dir", "output"),
];

/// Flattened raw values with the source line they came from (0 for overrides).
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (toml::Value, usize)>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn key_line(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(0, |i| i + 1)
}

fn check_key(key: &str, line: usize) -> Result<()> {
    if KEYS.iter().any(|(k, _)| *k == key) {
        Ok(())
    } else {
        Err(Error::Parse {
            line,
            key: key.to_string(),
            message: "unknown key".into(),
        })
    }
}

impl RawConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            key: String::new(),
            message: e.message().to_string(),
        })?;
        let mut raw = RawConfig::default();
        for (key, value) in table {
            match value {
                toml::Value::Table(section) => {
                    for (k, v) in section {
                        if matches!(v, toml::Value::Table(_)) {
                            return Err(Error::Parse {
                                line: key_line(text, &k),
                                key: format!("{key}.{k}"),
                                message: "nested sections are not supported".into(),
                            });
                        }
                        let line = key_line(text, &k);
                        raw.insert(k, v, line)?;
                    }
                }
                v => {
                    let line = key_line(text, &key);
                    raw.insert(key, v, line)?;
                }
            }
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    fn insert(&mut self, key: String, value: toml::Value, line: usize) -> Result<()> {
        check_key(&key, line)?;
        if self.entries.contains_key(&key) {
            return Err(Error::Parse {
                line,
                key,
                message: "key given twice".into(),
            });
        }
        self.entries.insert(key, (value, line));
        Ok(())
    }

    /// Applies a `key=value` override; the key may carry a `section.` prefix.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let Some((key, value)) = assignment.split_once('=') else {
            return Err(Error::Parse {
                line: 0,
                key: assignment.to_string(),
                message: "override must look like key=value".into(),
            });
        };
        let key = key.trim();
        let key = key.rsplit_once('.').map_or(key, |(_, k)| k).to_string();
        check_key(&key, 0)?;
        let value = value.trim();
        let parsed = format!("v = {value}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));
        self.entries.insert(key, (parsed, 0));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&(toml::Value, usize)> {
        self.entries.get(key)
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let mut errors = Vec::new();
        let mut p = Reader { raw: self, errors: &mut errors };
        let scenario = match p.string("scenario").as_deref() {
            None | Some("landau") => ScenarioKind::Landau,
            Some("linear_landau") => ScenarioKind::LinearLandau,
            Some("bump_on_tail") => ScenarioKind::BumpOnTail,
            Some("custom") => ScenarioKind::Custom,
            Some(other) => {
                p.fail("scenario", format!("unknown scenario '{other}'"));
                ScenarioKind::Landau
            }
        };
        let base = scenario.preset().unwrap_or(InitialCondition {
            epsilon: f64::NAN,
            k: f64::NAN,
            n_b: 0.0,
            sigma_b: 1.0,
            v_b: 0.0,
        });
        let ic = InitialCondition {
            epsilon: p.float("epsilon").unwrap_or(base.epsilon),
            k: p.float("k").unwrap_or(base.k),
            n_b: p.float("n_b").unwrap_or(base.n_b),
            sigma_b: p.float("sigma_b").unwrap_or(base.sigma_b),
            v_b: p.float("v_b").unwrap_or(base.v_b),
        };
        let v_max = p.float("v_max").unwrap_or(scenario.default_v_max());
        let solver = match p.string("solver").as_deref() {
            None | Some("spectral") => SolverKind::Spectral,
            Some("pic") => SolverKind::Pic,
            Some("coupled") => SolverKind::Coupled,
            Some(other) => {
                p.fail("solver", format!("unknown solver '{other}'"));
                SolverKind::Spectral
            }
        };
        let integrator = match p.string("integrator") {
            None => IntegratorKind::Ruth3,
            Some(s) => s.parse().unwrap_or_else(|e: Error| {
                p.fail("integrator", e.to_string());
                IntegratorKind::Ruth3
            }),
        };
        let seed = p.uint("seed").unwrap_or(0) as u64;
        let skip = p.uint("skip").unwrap_or(1) as u64;
        let sequence = match p.string("sequence").as_deref() {
            None | Some("sobol") => SequenceKind::Sobol { skip },
            Some("pseudo_random") | Some("random") => SequenceKind::PseudoRandom { seed },
            Some(other) => {
                p.fail("sequence", format!("unknown sequence '{other}'"));
                SequenceKind::Sobol { skip }
            }
        };
        let pic_init = match p.string("pic_init").as_deref() {
            None | Some("its") => PicInit::Its,
            Some("uniform") => PicInit::Uniform,
            Some(other) => {
                p.fail("pic_init", format!("unknown pic_init '{other}'"));
                PicInit::Its
            }
        };
        let star_window = p.window("star_window").unwrap_or([0.0, 2.0, -1.0, 1.0]);
        let cfg = RunConfig {
            scenario,
            ic,
            v_max,
            solver,
            nx: p.uint("nx").unwrap_or(64),
            nv: p.uint("nv").unwrap_or(64),
            n_f: p.uint("n_f").unwrap_or(16),
            n_p: p.uint("n_p").unwrap_or(100_000),
            dt: p.float("dt").unwrap_or(0.05),
            t_max: p.float("t_max").unwrap_or(50.0),
            t0: p.float("t0"),
            n_pad: p.uint("n_pad").unwrap_or(32),
            integrator,
            sequence,
            pic_init,
            filter: p.boolean("filter").unwrap_or(true),
            output_stride: p.uint("output_stride").unwrap_or(1),
            hk_every: p.uint("hk_every"),
            star_every: p.uint("star_every"),
            star_window,
            star_cap: p.uint("star_cap").or(Some(4000)),
            dump_every: p.uint("dump_every"),
            output_dir: PathBuf::from(p.text("output_dir").unwrap_or_else(|| "out".into())),
        };
        errors.extend(cfg.violations());
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Validation(errors))
        }
    }
}

struct Reader<'a> {
    raw: &'a RawConfig,
    errors: &'a mut Vec<String>,
}

impl Reader<'_> {
    fn fail(&mut self, key: &str, msg: String) {
        let line = self.raw.get(key).map_or(0, |e| e.1);
        if line > 0 {
            self.errors.push(format!("{key} (line {line}): {msg}"));
        } else {
            self.errors.push(format!("{key}: {msg}"));
        }
    }

    fn text(&mut self, key: &str) -> Option<String> {
        match self.raw.get(key)?.0.clone() {
            toml::Value::String(s) => Some(s),
            other => {
                self.fail(key, format!("expected a string, found {other}"));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        self.text(key).map(|s| s.trim().to_ascii_lowercase().replace('-', "_"))
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        match self.raw.get(key)?.0.clone() {
            toml::Value::Float(f) => Some(f),
            toml::Value::Integer(i) => Some(i as f64),
            other => {
                self.fail(key, format!("expected a number, found {other}"));
                None
            }
        }
    }

    fn uint(&mut self, key: &str) -> Option<usize> {
        match self.raw.get(key)?.0.clone() {
            toml::Value::Integer(i) if i >= 0 => Some(i as usize),
            toml::Value::Float(f) if f >= 0.0 && f.fract() == 0.0 && f < 1e15 => Some(f as usize),
            other => {
                self.fail(key, format!("expected a nonnegative integer, found {other}"));
                None
            }
        }
    }

    fn boolean(&mut self, key: &str) -> Option<bool> {
        match self.raw.get(key)?.0.clone() {
            toml::Value::Boolean(b) => Some(b),
            other => {
                self.fail(key, format!("expected true or false, found {other}"));
                None
            }
        }
    }

    fn window(&mut self, key: &str) -> Option<[f64; 4]> {
        let value = self.raw.get(key)?.0.clone();
        let nums: Option<Vec<f64>> = match &value {
            toml::Value::Array(a) => a
                .iter()
                .map(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
                .collect(),
            toml::Value::String(s) => s.split(',').map(|p| p.trim().parse().ok()).collect(),
            _ => None,
        };
        match nums {
            Some(v) if v.len() == 4 => Some([v[0], v[1], v[2], v[3]]),
            _ => {
                self.fail(key, format!("expected [x_min, x_max, v_min, v_max], found {value}"));
                None
            }
        }
    }
}

impl RunConfig {
    pub fn from_file_and_overrides(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut raw = match path {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        for o in overrides {
            raw.apply_override(o)?;
        }
        raw.resolve()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        RawConfig::from_toml_str(text)?.resolve()
    }

    pub fn domain(&self) -> PhaseSpaceDomain {
        self.ic.domain(self.v_max)
    }

    pub fn star_window_domain(&self) -> Result<PhaseSpaceDomain> {
        let [a, b, c, d] = self.star_window;
        PhaseSpaceDomain::new(a, b, c, d)
    }

    /// Every violated invariant, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.scenario == ScenarioKind::Custom && (self.ic.epsilon.is_nan() || self.ic.k.is_nan()) {
            v.push("custom scenario requires epsilon and k".to_string());
        } else if let Err(e) = self.ic.validate() {
            v.push(format!("initial condition: {e}"));
        }
        if !(self.v_max > 0.0) || !self.v_max.is_finite() {
            v.push(format!("v_max must be positive, got {}", self.v_max));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            v.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            v.push(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.output_stride == 0 {
            v.push("output_stride must be at least 1".into());
        }
        for (name, s) in [
            ("hk_every", self.hk_every),
            ("star_every", self.star_every),
            ("dump_every", self.dump_every),
            ("star_cap", self.star_cap),
        ] {
            if s == Some(0) {
                v.push(format!("{name} must be at least 1"));
            }
        }
        if matches!(self.solver, SolverKind::Spectral | SolverKind::Coupled) && (self.nx < 2 || self.nv < 4) {
            v.push(format!("spectral grid needs nx >= 2 and nv >= 4, got {}x{}", self.nx, self.nv));
        }
        if matches!(self.solver, SolverKind::Pic | SolverKind::Coupled) {
            if self.n_f < 4 {
                v.push(format!("n_f must be at least 4, got {}", self.n_f));
            }
            if self.n_p == 0 {
                v.push("n_p must be at least 1".into());
            }
        }
        if self.solver == SolverKind::Coupled {
            match self.t0 {
                None => v.push("coupled solver requires t0".into()),
                Some(t0) if !(t0 > 0.0 && t0 < self.t_max) => {
                    v.push(format!("t0 must lie in (0, t_max), got {t0}"))
                }
                _ => {}
            }
            if self.n_pad == 0 {
                v.push("n_pad must be at least 1".into());
            }
        }
        if let SequenceKind::Sobol { skip: 0 } = self.sequence {
            v.push("skip must be at least 1".into());
        }
        let [a, b, c, d] = self.star_window;
        if !(a < b && c < d) {
            v.push("star_window must satisfy x_min < x_max and v_min < v_max".into());
        } else if self.ic.validate().is_ok() {
            let dom = self.domain();
            if a < dom.x_min || b > dom.x_max || c < dom.v_min || d > dom.v_max {
                v.push("star_window must lie inside the phase-space domain".into());
            }
        }
        v
    }

    /// Resolved configuration as TOML; parsing it back gives the same config.
    pub fn to_toml(&self) -> String {
        let mut values: BTreeMap<&str, String> = BTreeMap::new();
        let f = |x: f64| format!("{x:?}");
        values.insert("scenario", format!("\"{}\"", self.scenario.as_str()));
        values.insert("epsilon", f(self.ic.epsilon));
        values.insert("k", f(self.ic.k));
        values.insert("n_b", f(self.ic.n_b));
        values.insert("sigma_b", f(self.ic.sigma_b));
        values.insert("v_b", f(self.ic.v_b));
        values.insert("v_max", f(self.v_max));
        values.insert("solver", format!("\"{}\"", self.solver.as_str()));
        values.insert("nx", self.nx.to_string());
        values.insert("nv", self.nv.to_string());
        values.insert("n_f", self.n_f.to_string());
        values.insert("n_p", self.n_p.to_string());
        values.insert("dt", f(self.dt));
        values.insert("t_max", f(self.t_max));
        if let Some(t0) = self.t0 {
            values.insert("t0", f(t0));
        }
        values.insert("n_pad", self.n_pad.to_string());
        values.insert("integrator", format!("\"{}\"", self.integrator.as_str()));
        values.insert("filter", self.filter.to_string());
        match self.sequence {
            SequenceKind::Sobol { skip } => {
                values.insert("sequence", "\"sobol\"".into());
                values.insert("skip", skip.to_string());
            }
            SequenceKind::PseudoRandom { seed } => {
                values.insert("sequence", "\"pseudo_random\"".into());
                values.insert("seed", seed.to_string());
            }
        }
        values.insert("pic_init", format!("\"{}\"", self.pic_init.as_str()));
        values.insert("output_stride", self.output_stride.to_string());
        for (name, s) in [
            ("hk_every", self.hk_every),
            ("star_every", self.star_every),
            ("star_cap", self.star_cap),
            ("dump_every", self.dump_every),
        ] {
            if let Some(s) = s {
                values.insert(name, s.to_string());
            }
        }
        let w = self.star_window;
        values.insert("star_window", format!("[{}, {}, {}, {}]", f(w[0]), f(w[1]), f(w[2]), f(w[3])));
        values.insert("output_dir", toml::Value::String(self.output_dir.display().to_string()).to_string());
        let mut out = String::new();
        let mut section = "";
        for (key, sec) in KEYS {
            if let Some(v) = values.get(key) {
                if *sec != section {
                    if !out.is_empty() {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "[{sec}]");
                    section = sec;
                }
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_landau_has_default_box() {
        let mut raw = RawConfig::default();
        for o in ["scenario=landau", "solver=spectral", "nx=64", "nv=64", "dt=0.01", "t_max=50"] {
            raw.apply_override(o).unwrap();
        }
        let cfg = raw.resolve().unwrap();
        assert!((cfg.domain().length() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(cfg.ic, InitialCondition::landau());
    }

    #[test]
    fn sections_are_flattened_and_overrides_win() {
        let text = "[solver]\nsolver = \"pic\"\ndt = 0.1\n\n[sampling]\nsequence = \"pseudo_random\"\nseed = 9\n";
        let mut raw = RawConfig::from_toml_str(text).unwrap();
        raw.apply_override("solver.dt=0.02").unwrap();
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.solver, SolverKind::Pic);
        assert_eq!(cfg.dt, 0.02);
        assert_eq!(cfg.sequence, SequenceKind::PseudoRandom { seed: 9 });
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = RawConfig::from_toml_str("dt = 0.1\nbogus = 3\n").unwrap_err();
        match err {
            Error::Parse { line, key, .. } => {
                assert_eq!(line, 2);
                assert_eq!(key, "bogus");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn validation_lists_every_violation() {
        let err = RunConfig::from_toml_str("solver = \"coupled\"\ndt = 0\noutput_stride = 0\n").unwrap_err();
        let Error::Validation(list) = err else { panic!("expected validation error") };
        assert!(list.iter().any(|m| m.contains("dt")));
        assert!(list.iter().any(|m| m.contains("t0")));
        assert!(list.iter().any(|m| m.contains("output_stride")));
    }

    #[test]
    fn custom_scenario_needs_epsilon_and_k() {
        assert!(RunConfig::from_toml_str("scenario = \"custom\"\n").is_err());
        let cfg = RunConfig::from_toml_str("scenario = \"custom\"\nepsilon = 0.1\nk = 0.4\n").unwrap();
        assert_eq!(cfg.ic.k, 0.4);
    }

    #[test]
    fn echo_parses_back_to_the_same_config() {
        let text = "scenario = \"bump_on_tail\"\nsolver = \"coupled\"\nt0 = 5\nt_max = 8\nstar_every = 4\nhk_every = 2\nintegrator = \"symplectic_euler\"\n";
        let cfg = RunConfig::from_toml_str(text).unwrap();
        let again = RunConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn output_dir_keeps_its_spelling() {
        let mut raw = RawConfig::default();
        raw.apply_override("output_dir=/tmp/Run-A").unwrap();
        assert_eq!(raw.resolve().unwrap().output_dir, PathBuf::from("/tmp/Run-A"));
    }
}
