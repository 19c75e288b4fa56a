use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Diagnostics, Field, Grid, SolverError};

/// CSV layout: a header `Nx,Ny,Lx,Ly,t`, one line with those values, then
/// `Ny` rows of `Nx` samples.
pub fn write_csv<W: Write>(field: &Field, mut w: W) -> Result<(), SolverError> {
    let g = field.grid;
    writeln!(w, "Nx,Ny,Lx,Ly,t")?;
    writeln!(w, "{},{},{},{},{}", g.nx, g.ny, g.lx, g.ly, field.t)?;
    for row in field.data.chunks_exact(g.nx) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

fn bad(msg: impl Into<String>) -> SolverError {
    SolverError::Format(msg.into())
}

pub fn read_csv<R: Read>(r: R) -> Result<Field, SolverError> {
    let mut lines = BufReader::new(r).lines();
    let mut next = || lines.next().transpose().map_err(SolverError::from)?.ok_or_else(|| bad("unexpected end of file"));
    if next()?.trim() != "Nx,Ny,Lx,Ly,t" {
        return Err(bad("missing header Nx,Ny,Lx,Ly,t"));
    }
    let meta = next()?;
    let parts: Vec<&str> = meta.trim().split(',').collect();
    if parts.len() != 5 {
        return Err(bad("metadata line needs five values"));
    }
    let int = |s: &str| s.trim().parse::<usize>().map_err(|e| bad(format!("{s}: {e}")));
    let real = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));
    let grid = Grid::with_domain(int(parts[0])?, int(parts[1])?, real(parts[2])?, real(parts[3])?)?;
    let t = real(parts[4])?;
    let mut data = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        let line = next()?;
        let row: Vec<f64> = line.trim().split(',').map(real).collect::<Result<_, _>>()?;
        if row.len() != grid.nx {
            return Err(bad(format!("row {j} has {} values, expected {}", row.len(), grid.nx)));
        }
        data.extend(row);
    }
    Field::new(grid, t, data)
}

/// JSON sidecar describing a raw dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSidecar {
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Ny")]
    pub ny: usize,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub t: f64,
    pub dtype: String,
    pub layout: String,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

/// Writes little-endian f64 samples to `path` and the sidecar to
/// `path.json`.
pub fn write_raw(field: &Field, path: &Path) -> Result<(), SolverError> {
    let bytes: Vec<u8> = field.data.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(path, bytes)?;
    let g = field.grid;
    let meta = RawSidecar { nx: g.nx, ny: g.ny, lx: g.lx, ly: g.ly, t: field.t, dtype: "f64le".into(), layout: "row-major, x fastest".into() };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta).map_err(|e| bad(e.to_string()))?)?;
    Ok(())
}

pub fn read_raw(path: &Path) -> Result<Field, SolverError> {
    let meta: RawSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?).map_err(|e| bad(e.to_string()))?;
    if meta.dtype != "f64le" {
        return Err(bad(format!("unsupported dtype {}", meta.dtype)));
    }
    let grid = Grid::with_domain(meta.nx, meta.ny, meta.lx, meta.ly)?;
    let bytes = fs::read(path)?;
    if bytes.len() != 8 * grid.len() {
        return Err(bad(format!("{} bytes, expected {}", bytes.len(), 8 * grid.len())));
    }
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    Field::new(grid, meta.t, data)
}

/// Diagnostics as CSV with header `t,E,Z`.
pub fn write_diagnostics_csv<W: Write>(rows: &[Diagnostics], mut w: W) -> Result<(), SolverError> {
    writeln!(w, "t,E,Z")?;
    for d in rows {
        writeln!(w, "{},{},{}", d.t, d.energy, d.enstrophy)?;
    }
    Ok(())
}
