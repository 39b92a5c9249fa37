//! Binary file formats.
//!
//! Velocity model ("VEL1"): magic, u32 nz, u32 nx, f32 dx, then nz*nx
//! little-endian f32 cells, row-major.
//!
//! Shot record ("FWI1"): 16-byte header (magic, u32 n_receivers, u32 n_time,
//! u32 n_channels), then one row-major `[receiver][time]` f32 block per
//! channel. Channel 0 is pressure, channel 1 vertical particle velocity.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Grid2D, Result, ShotRecord, VelocityModel, WaveError};

const VEL_MAGIC: &[u8; 4] = b"VEL1";
const SHOT_MAGIC: &[u8; 4] = b"FWI1";

fn write_f32_block<W: Write>(w: &mut W, data: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(data.len() * 4);
    for &x in data {
        buf.extend_from_slice(&(x as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_f32_block<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 4];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn write_velocity_model(path: &Path, model: &VelocityModel) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(VEL_MAGIC)?;
    w.write_all(&(model.grid.nz as u32).to_le_bytes())?;
    w.write_all(&(model.grid.nx as u32).to_le_bytes())?;
    w.write_all(&(model.grid.dx as f32).to_le_bytes())?;
    write_f32_block(&mut w, model.values())?;
    w.flush()?;
    Ok(())
}

/// Reads a "VEL1" file. The absorbing-layer width is not part of the format;
/// the caller supplies it (usually [`Grid2D::DEFAULT_PML`]).
pub fn read_velocity_model(path: &Path, pml_width: usize) -> Result<VelocityModel> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != VEL_MAGIC {
        return Err(WaveError::Format(format!("not a VEL1 file: magic {magic:?}")));
    }
    let nz = read_u32(&mut r)? as usize;
    let nx = read_u32(&mut r)? as usize;
    let mut dxb = [0u8; 4];
    r.read_exact(&mut dxb)?;
    let dx = f32::from_le_bytes(dxb) as f64;
    let grid = Grid2D::new(nz, nx, dx, pml_width)?;
    let v = read_f32_block(&mut r, nz * nx)?;
    VelocityModel::new(grid, v)
}

pub fn write_shot_record(path: &Path, record: &ShotRecord) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SHOT_MAGIC)?;
    w.write_all(&(record.n_receivers as u32).to_le_bytes())?;
    w.write_all(&(record.n_time as u32).to_le_bytes())?;
    w.write_all(&2u32.to_le_bytes())?;
    write_f32_block(&mut w, &record.pressure)?;
    write_f32_block(&mut w, &record.vz)?;
    w.flush()?;
    Ok(())
}

pub fn read_shot_record(path: &Path, dt_out: f64) -> Result<ShotRecord> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SHOT_MAGIC {
        return Err(WaveError::Format(format!("not a FWI1 file: magic {magic:?}")));
    }
    let n_receivers = read_u32(&mut r)? as usize;
    let n_time = read_u32(&mut r)? as usize;
    let n_channels = read_u32(&mut r)? as usize;
    if n_channels != 2 {
        return Err(WaveError::Format(format!("expected 2 channels, found {n_channels}")));
    }
    let pressure = read_f32_block(&mut r, n_receivers * n_time)?;
    let vz = read_f32_block(&mut r, n_receivers * n_time)?;
    Ok(ShotRecord { n_receivers, n_time, dt_out, pressure, vz })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_model_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.vel");
        let grid = Grid2D::with_defaults(12, 9).unwrap();
        let v: Vec<f64> = (0..12 * 9).map(|i| 1500.0 + i as f64).collect();
        let m = VelocityModel::new(grid, v).unwrap();
        write_velocity_model(&path, &m).unwrap();
        let back = read_velocity_model(&path, grid.pml_width).unwrap();
        assert_eq!(back.grid.nz, 12);
        assert_eq!(back.grid.nx, 9);
        for (a, b) in back.values().iter().zip(m.values()) {
            assert_eq!(*a, *b as f32 as f64);
        }
    }

    #[test]
    fn shot_record_roundtrip_and_magic_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.shot");
        let mut rec = ShotRecord::zeros(4, 7, 1e-3);
        for (i, x) in rec.pressure.iter_mut().enumerate() {
            *x = i as f64 * 0.25;
        }
        rec.vz[5] = -3.5;
        write_shot_record(&path, &rec).unwrap();
        let back = read_shot_record(&path, 1e-3).unwrap();
        assert_eq!(back.n_receivers, 4);
        assert_eq!(back.n_time, 7);
        assert_eq!(back.pressure[8], 2.0);
        assert_eq!(back.vz[5], -3.5);

        std::fs::write(&path, b"XXXXgarbage").unwrap();
        assert!(matches!(read_shot_record(&path, 1e-3), Err(WaveError::Format(_))));
    }
}
