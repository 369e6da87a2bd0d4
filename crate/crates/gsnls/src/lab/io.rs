//! Result files: CSV tables, JSON summaries, binary coefficient dumps.
//!
//! CSV is RFC-4180-style with a mandatory header row and `.` decimals; the
//! cells written here are plain numbers and bare words, so no quoting is
//! needed. Floats print through Rust's shortest-roundtrip formatter, which
//! keeps re-runs bitwise comparable.

use crate::integrator::Trajectory;
use crate::spectral::Field;
use crate::Result;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

/// Write a CSV table; every row must match the header width.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-frame diagnostics of one trajectory.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let rows: Vec<Vec<String>> = (0..traj.n_frames())
        .map(|i| {
            vec![
                traj.times[i].to_string(),
                traj.mass[i].to_string(),
                traj.energy[i].to_string(),
                traj.norm_energy[i].to_string(),
                traj.norm_lalpha[i].to_string(),
            ]
        })
        .collect();
    write_csv(path, &["t", "mass", "energy", "norm_EA", "norm_Lalpha1"], &rows)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| crate::Error::Config(format!("json write: {e}")))?;
    w.flush()?;
    Ok(())
}

const FRAME_MAGIC: &[u8; 6] = b"GSNLS1";

/// Binary dump of recorded coefficient frames.
///
/// Layout: 16-byte header (magic "GSNLS1" padded with two zero bytes, N as
/// u32 LE, frame count as u32 LE) followed by interleaved re/im f64 LE.
pub fn write_frames(path: &Path, frames: &[Field]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let n = frames.first().map_or(0, |f| f.coeffs().len());
    w.write_all(FRAME_MAGIC)?;
    w.write_all(&[0u8, 0u8])?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(frames.len() as u32).to_le_bytes())?;
    for f in frames {
        debug_assert_eq!(f.coeffs().len(), n);
        for c in f.coeffs() {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read back a frame dump as raw coefficient vectors.
pub fn read_frames(path: &Path) -> Result<Vec<Vec<num_complex::Complex64>>> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..6] != FRAME_MAGIC {
        return Err(crate::Error::Config(format!(
            "{path:?} is not a coefficient frame dump"
        )));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let count = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let need = 16 + count * n * 16;
    if bytes.len() < need {
        return Err(crate::Error::Config(format!(
            "{path:?}: truncated frame dump ({} of {need} bytes)",
            bytes.len()
        )));
    }
    let mut frames = Vec::with_capacity(count);
    let mut off = 16;
    for _ in 0..count {
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
            coeffs.push(num_complex::Complex64::new(re, im));
            off += 16;
        }
        frames.push(coeffs);
    }
    Ok(frames)
}
