//! Shard files: a sequence of fixed-size sample records, CRC-32 checked
//! against the manifest. Record layout: "SMP1" magic, u32 sample index,
//! u32 family tag, u32 n_receivers, u32 n_time, u32 n_channels, u32 nz,
//! u32 nx, f32 v_min, f32 v_max, then the seismic and label f32 blocks.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use velmodel::Family;

use crate::sample::{Sample, SampleMeta, N_CHANNELS};
use crate::{DataError, Result};

const MAGIC: &[u8; 4] = b"SMP1";
const HEADER_BYTES: usize = 4 + 7 * 4 + 2 * 4;

pub fn record_bytes(n_receivers: usize, n_time: usize, nz: usize, nx: usize) -> usize {
    HEADER_BYTES + 4 * (n_receivers * n_time * N_CHANNELS + nz * nx)
}

fn push_u32(buf: &mut Vec<u8>, x: u32) {
    buf.extend_from_slice(&x.to_le_bytes());
}

fn encode(sample: &Sample) -> Vec<u8> {
    let mut buf = Vec::with_capacity(record_bytes(
        sample.n_receivers,
        sample.n_time,
        sample.nz,
        sample.nx,
    ));
    buf.extend_from_slice(MAGIC);
    push_u32(&mut buf, sample.meta.index as u32);
    push_u32(&mut buf, sample.meta.family.tag());
    push_u32(&mut buf, sample.n_receivers as u32);
    push_u32(&mut buf, sample.n_time as u32);
    push_u32(&mut buf, N_CHANNELS as u32);
    push_u32(&mut buf, sample.nz as u32);
    push_u32(&mut buf, sample.nx as u32);
    buf.extend_from_slice(&(sample.meta.v_min as f32).to_le_bytes());
    buf.extend_from_slice(&(sample.meta.v_max as f32).to_le_bytes());
    for x in &sample.seismic {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    for x in &sample.label {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf
}

fn decode(buf: &[u8], path: &Path) -> Result<Sample> {
    let corrupt = |reason: &str| DataError::Corrupt {
        path: path.display().to_string(),
        reason: reason.to_string(),
    };
    if buf.len() < HEADER_BYTES || &buf[..4] != MAGIC {
        return Err(corrupt("bad record header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes([buf[o], buf[o + 1], buf[o + 2], buf[o + 3]]);
    let f32_at = |o: usize| f32::from_le_bytes([buf[o], buf[o + 1], buf[o + 2], buf[o + 3]]);
    let index = u32_at(4) as usize;
    let family = Family::from_tag(u32_at(8)).map_err(|_| corrupt("bad family tag"))?;
    let n_receivers = u32_at(12) as usize;
    let n_time = u32_at(16) as usize;
    let n_channels = u32_at(20) as usize;
    let nz = u32_at(24) as usize;
    let nx = u32_at(28) as usize;
    if n_channels != N_CHANNELS {
        return Err(corrupt("unexpected channel count"));
    }
    let v_min = f32_at(32) as f64;
    let v_max = f32_at(36) as f64;
    let need = record_bytes(n_receivers, n_time, nz, nx);
    if buf.len() != need {
        return Err(corrupt("record size mismatch"));
    }
    let mut off = HEADER_BYTES;
    let mut read_block = |n: usize| -> Vec<f32> {
        let out = buf[off..off + 4 * n]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        off += 4 * n;
        out
    };
    let seismic = read_block(n_receivers * n_time * N_CHANNELS);
    let label = read_block(nz * nx);
    Ok(Sample {
        seismic,
        label,
        n_receivers,
        n_time,
        nz,
        nx,
        meta: SampleMeta { family, index, v_min, v_max },
    })
}

/// Writes samples in order and returns the shard's CRC-32.
pub fn write_shard(path: &Path, samples: &[Sample]) -> Result<u32> {
    let mut hasher = crc32fast::Hasher::new();
    let mut w = BufWriter::new(File::create(path)?);
    for s in samples {
        let rec = encode(s);
        hasher.update(&rec);
        w.write_all(&rec)?;
    }
    w.flush()?;
    Ok(hasher.finalize())
}

/// Appending writer used by the dataset builder to stream one split to disk
/// without holding it in memory.
pub struct ShardWriter {
    w: BufWriter<File>,
    hasher: crc32fast::Hasher,
    count: usize,
}

impl ShardWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self {
            w: BufWriter::new(File::create(path)?),
            hasher: crc32fast::Hasher::new(),
            count: 0,
        })
    }

    pub fn append(&mut self, sample: &Sample) -> Result<()> {
        let rec = encode(sample);
        self.hasher.update(&rec);
        self.w.write_all(&rec)?;
        self.count += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(u32, usize)> {
        self.w.flush()?;
        Ok((self.hasher.finalize(), self.count))
    }
}

/// Random-access shard reader; the whole file is checksum-verified once at
/// open time.
pub struct ShardReader {
    data: Vec<u8>,
    record_size: usize,
    path: std::path::PathBuf,
    /// Sample indices in storage order.
    pub indices: Vec<usize>,
}

impl ShardReader {
    pub fn open(path: &Path, expected_crc: u32, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::new();
        File::open(path)?.read_to_end(&mut data)?;
        let mut hasher = crc32fast::Hasher::new();
        hasher.update(&data);
        let crc = hasher.finalize();
        if crc != expected_crc {
            return Err(DataError::Corrupt {
                path: path.display().to_string(),
                reason: format!("crc {crc:08x} != manifest {expected_crc:08x}"),
            });
        }
        if indices.is_empty() {
            return Ok(Self {
                data,
                record_size: 0,
                path: path.to_path_buf(),
                indices: Vec::new(),
            });
        }
        if data.len() % indices.len() != 0 {
            return Err(DataError::Corrupt {
                path: path.display().to_string(),
                reason: format!("{} bytes for {} records", data.len(), indices.len()),
            });
        }
        let record_size = data.len() / indices.len();
        Ok(Self { data, record_size, path: path.to_path_buf(), indices: indices.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Fetch by dataset sample index (as listed in the manifest split).
    pub fn get(&self, sample_index: usize) -> Result<Sample> {
        let pos = self.indices.iter().position(|&i| i == sample_index).ok_or_else(|| {
            DataError::InvalidArgument(format!(
                "sample {sample_index} is not in shard {}",
                self.path.display()
            ))
        })?;
        self.get_at(pos)
    }

    /// Fetch by storage position.
    pub fn get_at(&self, pos: usize) -> Result<Sample> {
        if pos >= self.indices.len() {
            return Err(DataError::InvalidArgument(format!(
                "record {pos} out of range ({} records)",
                self.indices.len()
            )));
        }
        decode(&self.data[pos * self.record_size..(pos + 1) * self.record_size], &self.path)
    }
}

/// Reads every sample of a shard (checksum verified).
pub fn read_shard_samples(path: &Path, expected_crc: u32, indices: &[usize]) -> Result<Vec<Sample>> {
    let reader = ShardReader::open(path, expected_crc, indices)?;
    (0..reader.len()).map(|p| reader.get_at(p)).collect()
}
