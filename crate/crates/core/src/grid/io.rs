//! Field serialization: raw little-endian f64 (row-major over axes, then
//! components) or CSV, each with a JSON sidecar carrying the grid.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DecayClass, GridSpec, Mask, SampledField};
use crate::error::{Error, Result};

pub const LAYOUT: &str = "row-major over axes (last axis fastest), then components";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    BinaryF64Le,
    Csv,
    MaskU8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub grid: GridSpec,
    pub components: usize,
    pub decay: DecayClass,
    pub format: Format,
    pub layout: String,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_sidecar(path: &Path, field_grid: GridSpec, components: usize, decay: DecayClass, format: Format) -> Result<()> {
    let meta = Sidecar { grid: field_grid, components, decay, format, layout: LAYOUT.into() };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn write_binary(field: &SampledField, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for v in field.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    write_sidecar(path, *field.grid(), field.components(), field.decay(), Format::BinaryF64Le)
}

pub fn read_binary(path: &Path) -> Result<SampledField> {
    let meta: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    if meta.format != Format::BinaryF64Le {
        return Err(Error::InvalidParameter("sidecar does not describe a binary field".into()));
    }
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::ShapeMismatch("binary payload is not a whole number of f64".into()));
    }
    let values = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    SampledField::new(meta.grid, meta.components, values, meta.decay)
}

/// CSV with one row per grid point: coordinates followed by components.
pub fn write_csv(field: &SampledField, path: &Path) -> Result<()> {
    let grid = field.grid();
    let mut out = BufWriter::new(fs::File::create(path)?);
    let axes: Vec<String> = (0..grid.dim()).map(|d| format!("x{d}")).collect();
    let comps: Vec<String> = (0..field.components()).map(|c| format!("u{c}")).collect();
    writeln!(out, "{},{}", axes.join(","), comps.join(","))?;
    let mut x = vec![0.0; grid.dim()];
    for i in 0..grid.len() {
        grid.point(i, &mut x);
        let row: Vec<String> = x.iter().chain(field.at(i)).map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    write_sidecar(path, *grid, field.components(), field.decay(), Format::Csv)
}

pub fn write_mask(mask: &Mask, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = mask.bits().iter().map(|&b| b as u8).collect();
    fs::write(path, bytes)?;
    write_sidecar(path, *mask.grid(), 1, DecayClass::Unknown, Format::MaskU8)
}

pub fn read_mask(path: &Path) -> Result<Mask> {
    let meta: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    let bits = fs::read(path)?.into_iter().map(|b| b != 0).collect();
    Mask::new(meta.grid, bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let dir = std::env::temp_dir().join(format!("fracvar-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let g = GridSpec::truncated(2, 1.0, 8).unwrap();
        let f = SampledField::from_fn(g, 2, DecayClass::SchwartzLike, |x, o| {
            o[0] = x[0];
            o[1] = x[0] * x[1] + 0.125;
        });
        let p = dir.join("f.bin");
        write_binary(&f, &p).unwrap();
        assert_eq!(read_binary(&p).unwrap(), f);
        assert_eq!(fs::metadata(&p).unwrap().len(), (64 * 2 * 8) as u64);

        let m = Mask::open_box(g, &[-0.5, -0.5], &[0.5, 0.5]);
        let mp = dir.join("m.bin");
        write_mask(&m, &mp).unwrap();
        assert_eq!(read_mask(&mp).unwrap(), m);
        write_csv(&f, &dir.join("f.csv")).unwrap();
        let text = fs::read_to_string(dir.join("f.csv")).unwrap();
        assert_eq!(text.lines().count(), 65);
        fs::remove_dir_all(dir).ok();
    }
}
