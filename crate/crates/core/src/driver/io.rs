//! Time-series CSV and binary dumps (little-endian f64 payload plus a JSON
//! sidecar).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DiagnosticsRecord, GriddedDensity, ParticleEnsemble, PhaseSpaceDomain, Segment};

pub const CSV_HEADER: &str = "t,segment,field_energy,kinetic_energy,total_energy,mass,entropy,star_disc,hk_variation";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn format_record(r: &DiagnosticsRecord) -> String {
    [
        num(r.t),
        r.segment.as_str().to_string(),
        num(r.field_energy),
        num(r.kinetic_energy),
        num(r.total_energy),
        num(r.total_mass),
        num(r.entropy),
        opt(r.star_disc),
        opt(r.hk_variation),
    ]
    .join(",")
}

pub fn write_timeseries(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut out = String::with_capacity(160 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format_record(r));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_timeseries(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Format(format!("{}: unexpected CSV header", path.display())));
    }
    let mut records = Vec::new();
    for (no, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 9 {
            return Err(Error::Format(format!("line {}: expected 9 columns, found {}", no + 2, cells.len())));
        }
        let f = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Format(format!("line {}: bad number '{s}'", no + 2)))
        };
        let o = |s: &str| if s.is_empty() { Ok(None) } else { f(s).map(Some) };
        let segment = match cells[1] {
            "spectral" => Segment::Spectral,
            "pic" => Segment::Pic,
            other => return Err(Error::Format(format!("line {}: unknown segment '{other}'", no + 2))),
        };
        records.push(DiagnosticsRecord {
            t: f(cells[0])?,
            segment,
            field_energy: f(cells[2])?,
            kinetic_energy: f(cells[3])?,
            total_energy: f(cells[4])?,
            total_mass: f(cells[5])?,
            entropy: f(cells[6])?,
            star_disc: o(cells[7])?,
            hk_variation: o(cells[8])?,
        });
    }
    Ok(records)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainMeta {
    pub x_min: f64,
    pub x_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl From<PhaseSpaceDomain> for DomainMeta {
    fn from(d: PhaseSpaceDomain) -> Self {
        DomainMeta {
            x_min: d.x_min,
            x_max: d.x_max,
            v_min: d.v_min,
            v_max: d.v_max,
        }
    }
}

impl DomainMeta {
    pub fn to_domain(&self) -> Result<PhaseSpaceDomain> {
        PhaseSpaceDomain::new(self.x_min, self.x_max, self.v_min, self.v_max)
    }
}

/// JSON sidecar describing a dump payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DumpMeta {
    /// `nx * nv` values, x-major, v nodes include both endpoints.
    Grid {
        nx: usize,
        nv: usize,
        domain: DomainMeta,
        t: f64,
        endianness: String,
        dtype: String,
    },
    /// Four consecutive columns `x, v, f_like, g_like` of length `n_p`.
    Particles {
        n_p: usize,
        t: f64,
        domain: DomainMeta,
        columns: Vec<String>,
        endianness: String,
        dtype: String,
    },
}

impl DumpMeta {
    pub fn t(&self) -> f64 {
        match self {
            DumpMeta::Grid { t, .. } | DumpMeta::Particles { t, .. } => *t,
        }
    }

    fn expected_len(&self) -> usize {
        match self {
            DumpMeta::Grid { nx, nv, .. } => nx * nv,
            DumpMeta::Particles { n_p, .. } => 4 * n_p,
        }
    }

    fn check_encoding(&self) -> Result<()> {
        let (e, d) = match self {
            DumpMeta::Grid { endianness, dtype, .. } | DumpMeta::Particles { endianness, dtype, .. } => {
                (endianness, dtype)
            }
        };
        if e != "little" || d != "f64" {
            return Err(Error::Format(format!("unsupported encoding {e}/{d}, expected little/f64")));
        }
        Ok(())
    }
}

/// `(payload, sidecar)` paths for a dump given either file or the bare stem.
pub fn dump_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some("bin") | Some("json") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let mut bin = stem.clone().into_os_string();
    bin.push(".bin");
    let mut json = stem.into_os_string();
    json.push(".json");
    (PathBuf::from(bin), PathBuf::from(json))
}

fn write_payload(path: &Path, meta: &DumpMeta, values: impl Iterator<Item = f64>) -> Result<()> {
    let (bin, json) = dump_paths(path);
    let mut bytes = Vec::with_capacity(8 * meta.expected_len());
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&bin, bytes).map_err(|e| Error::io(&bin, e))?;
    let mut f = fs::File::create(&json).map_err(|e| Error::io(&json, e))?;
    let text = serde_json::to_string_pretty(meta).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(f, "{text}").map_err(|e| Error::io(&json, e))
}

pub fn read_meta(path: &Path) -> Result<DumpMeta> {
    let (_, json) = dump_paths(path);
    let text = fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", json.display())))
}

fn read_payload(path: &Path) -> Result<(DumpMeta, Vec<f64>)> {
    let meta = read_meta(path)?;
    meta.check_encoding()?;
    let (bin, _) = dump_paths(path);
    let bytes = fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
    if bytes.len() != 8 * meta.expected_len() {
        return Err(Error::Format(format!(
            "{}: payload has {} bytes, sidecar implies {}",
            bin.display(),
            bytes.len(),
            8 * meta.expected_len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((meta, values))
}

pub fn write_grid_dump(path: &Path, g: &GriddedDensity, t: f64) -> Result<()> {
    let meta = DumpMeta::Grid {
        nx: g.nx,
        nv: g.nv,
        domain: g.domain.into(),
        t,
        endianness: "little".into(),
        dtype: "f64".into(),
    };
    write_payload(path, &meta, g.values.iter().copied())
}

pub fn read_grid_dump(path: &Path) -> Result<(GriddedDensity, f64)> {
    match read_payload(path)? {
        (DumpMeta::Grid { nx, nv, domain, t, .. }, values) => Ok((GriddedDensity::new(domain.to_domain()?, nx, nv, values)?, t)),
        _ => Err(Error::Format(format!("{}: not a grid dump", path.display()))),
    }
}

pub fn write_particle_dump(path: &Path, e: &ParticleEnsemble, domain: &PhaseSpaceDomain, t: f64) -> Result<()> {
    let meta = DumpMeta::Particles {
        n_p: e.len(),
        t,
        domain: (*domain).into(),
        columns: ["x", "v", "f_like", "g_like"].iter().map(|s| s.to_string()).collect(),
        endianness: "little".into(),
        dtype: "f64".into(),
    };
    let values = e.x.iter().chain(&e.v).chain(&e.f_like).chain(&e.g_like).copied();
    write_payload(path, &meta, values)
}

pub fn read_particle_dump(path: &Path) -> Result<(ParticleEnsemble, PhaseSpaceDomain, f64)> {
    match read_payload(path)? {
        (DumpMeta::Particles { n_p, t, domain, .. }, values) => {
            let col = |c: usize| values[c * n_p..(c + 1) * n_p].to_vec();
            let e = ParticleEnsemble::new(col(0), col(1), col(2), col(3))?;
            Ok((e, domain.to_domain()?, t))
        }
        _ => Err(Error::Format(format!("{}: not a particle dump", path.display()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Segment;

    fn grid() -> GriddedDensity {
        let d = PhaseSpaceDomain::new(0.0, 2.0, -1.5, 1.5).unwrap();
        GriddedDensity::from_fn(d, 5, 7, |x, v| (x * 1.37).sin() * v.exp() / 3.0).unwrap()
    }

    #[test]
    fn grid_dump_round_trip_is_bit_exact() {
        let dir = std::env::temp_dir().join(format!("vpqmc-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g");
        let g = grid();
        write_grid_dump(&path, &g, 0.1 + 0.2).unwrap();
        let (back, t) = read_grid_dump(&path).unwrap();
        assert_eq!(t.to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(back.nx, g.nx);
        assert!(back.values.iter().zip(&g.values).all(|(a, b)| a.to_bits() == b.to_bits()));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn truncated_payload_is_a_format_error() {
        let dir = std::env::temp_dir().join(format!("vpqmc-io-trunc-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g");
        write_grid_dump(&path, &grid(), 0.0).unwrap();
        let (bin, _) = dump_paths(&path);
        let bytes = std::fs::read(&bin).unwrap();
        std::fs::write(&bin, &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(read_grid_dump(&path), Err(Error::Format(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_row_has_nine_cells_with_empty_optionals() {
        let r = DiagnosticsRecord::new(0.5, Segment::Pic, 1.0, 2.0, 3.0, f64::NAN);
        let row = format_record(&r);
        assert_eq!(row.split(',').count(), 9);
        assert!(row.ends_with(",,"));
        assert_eq!(CSV_HEADER.split(',').count(), 9);
    }
}
