//! Plain-text dataset manifest: `key=value` lines, `#` comments, split
//! index lists, shard names and checksums.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use velmodel::{Family, GenConfig};
use wavesim::Acquisition;

use crate::sample::Normalization;
use crate::{DataError, Result};

pub const SPLITS: [&str; 3] = ["train", "val", "test"];

#[derive(Debug, Clone, PartialEq)]
pub struct ShardEntry {
    pub file: String,
    pub crc32: u32,
    /// Dataset sample indices in storage order.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub gen_config: GenConfig,
    pub acquisition: Acquisition,
    pub wavelet_f0: f64,
    pub wavelet_t0: f64,
    pub normalization: Normalization,
    pub n_total: usize,
    pub shards: BTreeMap<String, ShardEntry>,
    /// Directory holding the shard files; set on read/write.
    pub root: PathBuf,
}

impl DatasetManifest {
    pub fn split(&self, name: &str) -> Result<&ShardEntry> {
        self.shards
            .get(name)
            .ok_or_else(|| DataError::InvalidArgument(format!("no split named \"{name}\"")))
    }

    pub fn shard_path(&self, entry: &ShardEntry) -> PathBuf {
        self.root.join(&entry.file)
    }

    pub fn n_train(&self) -> usize {
        self.shards.get("train").map_or(0, |e| e.indices.len())
    }

    pub fn n_val(&self) -> usize {
        self.shards.get("val").map_or(0, |e| e.indices.len())
    }

    pub fn n_test(&self) -> usize {
        self.shards.get("test").map_or(0, |e| e.indices.len())
    }
}

fn fmt_pair_f(v: (f64, f64)) -> String {
    format!("{:e},{:e}", v.0, v.1)
}

fn fmt_pair_u(v: (usize, usize)) -> String {
    format!("{},{}", v.0, v.1)
}

fn fmt_positions(p: &[(usize, usize)]) -> String {
    p.iter().map(|(z, x)| format!("{z}:{x}")).collect::<Vec<_>>().join(";")
}

pub fn write_manifest(path: &Path, m: &DatasetManifest) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "fwi-dataset v1");
    let _ = writeln!(s, "family={}", m.gen_config.family.name());
    let _ = writeln!(s, "n_total={}", m.n_total);
    let _ = writeln!(s, "seed={}", m.gen_config.rng_seed);
    let _ = writeln!(s, "nz={}", m.gen_config.nz);
    let _ = writeln!(s, "nx={}", m.gen_config.nx);
    let _ = writeln!(s, "n_layers={}", fmt_pair_u(m.gen_config.n_layers_range));
    let _ = writeln!(s, "v_range={}", fmt_pair_f(m.gen_config.v_range));
    let _ = writeln!(s, "dip_range={}", fmt_pair_f(m.gen_config.dip_range));
    let _ = writeln!(s, "thickness={}", fmt_pair_u(m.gen_config.thickness_range));
    let _ = writeln!(s, "curve_amplitude={}", fmt_pair_f(m.gen_config.curve_amplitude_range));
    let _ = writeln!(s, "fault_probability={:e}", m.gen_config.fault_probability);
    let _ = writeln!(s, "fault_throw={}", fmt_pair_u(m.gen_config.fault_throw_range));
    let _ = writeln!(s, "sources={}", fmt_positions(&m.acquisition.sources));
    let _ = writeln!(s, "receivers={}", fmt_positions(&m.acquisition.receivers));
    let _ = writeln!(s, "n_time_out={}", m.acquisition.n_time_out);
    let _ = writeln!(s, "dt_out={:e}", m.acquisition.dt_out);
    let _ = writeln!(s, "f0={:e}", m.wavelet_f0);
    let _ = writeln!(s, "t0={:e}", m.wavelet_t0);
    let _ = writeln!(s, "seis_scale={:e}", m.normalization.seis_scale);
    for (name, entry) in &m.shards {
        let _ = writeln!(s, "shard_{name}={}", entry.file);
        let _ = writeln!(s, "crc_{name}={:08x}", entry.crc32);
        let _ = writeln!(
            s,
            "indices_{name}={}",
            entry.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        );
    }
    std::fs::write(path, s)?;
    Ok(())
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn get(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| DataError::Manifest(format!("missing key \"{key}\"")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .parse()
            .map_err(|_| DataError::Manifest(format!("unparsable value for \"{key}\"")))
    }

    fn pair_f(&self, key: &str) -> Result<(f64, f64)> {
        let raw = self.get(key)?;
        let (a, b) = raw
            .split_once(',')
            .ok_or_else(|| DataError::Manifest(format!("\"{key}\" is not a pair")))?;
        Ok((
            a.parse().map_err(|_| DataError::Manifest(format!("bad pair in \"{key}\"")))?,
            b.parse().map_err(|_| DataError::Manifest(format!("bad pair in \"{key}\"")))?,
        ))
    }

    fn pair_u(&self, key: &str) -> Result<(usize, usize)> {
        let (a, b) = self.pair_f(key)?;
        Ok((a as usize, b as usize))
    }

    fn positions(&self, key: &str) -> Result<Vec<(usize, usize)>> {
        self.get(key)?
            .split(';')
            .map(|part| {
                let (z, x) = part
                    .split_once(':')
                    .ok_or_else(|| DataError::Manifest(format!("bad position in \"{key}\"")))?;
                Ok((
                    z.parse().map_err(|_| DataError::Manifest(format!("bad row in \"{key}\"")))?,
                    x.parse().map_err(|_| DataError::Manifest(format!("bad col in \"{key}\"")))?,
                ))
            })
            .collect()
    }
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("fwi-dataset v1") => {}
        other => return Err(DataError::Manifest(format!("bad header line {other:?}"))),
    }
    let mut map = BTreeMap::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| DataError::Manifest(format!("bad line \"{line}\"")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let f = Fields(map);

    let family = Family::parse(f.get("family")?).map_err(|e| DataError::Manifest(e.to_string()))?;
    let gen_config = GenConfig {
        family,
        nz: f.parse("nz")?,
        nx: f.parse("nx")?,
        n_layers_range: f.pair_u("n_layers")?,
        v_range: f.pair_f("v_range")?,
        dip_range: f.pair_f("dip_range")?,
        thickness_range: f.pair_u("thickness")?,
        curve_amplitude_range: f.pair_f("curve_amplitude")?,
        fault_probability: f.parse("fault_probability")?,
        fault_throw_range: f.pair_u("fault_throw")?,
        rng_seed: f.parse("seed")?,
    };
    let acquisition = Acquisition::new(
        f.positions("sources")?,
        f.positions("receivers")?,
        f.parse("n_time_out")?,
        f.parse("dt_out")?,
    )?;
    let normalization = Normalization {
        seis_scale: f.parse("seis_scale")?,
        v_min: gen_config.v_range.0,
        v_max: gen_config.v_range.1,
    };

    let mut shards = BTreeMap::new();
    for name in SPLITS {
        if let Ok(file) = f.get(&format!("shard_{name}")) {
            let crc = u32::from_str_radix(f.get(&format!("crc_{name}"))?, 16)
                .map_err(|_| DataError::Manifest(format!("bad crc for split {name}")))?;
            let idx_raw = f.get(&format!("indices_{name}"))?;
            let indices = if idx_raw.is_empty() {
                Vec::new()
            } else {
                idx_raw
                    .split(',')
                    .map(|t| {
                        t.parse().map_err(|_| {
                            DataError::Manifest(format!("bad index list for split {name}"))
                        })
                    })
                    .collect::<Result<Vec<usize>>>()?
            };
            shards.insert(name.to_string(), ShardEntry { file: file.to_string(), crc32: crc, indices });
        }
    }

    Ok(DatasetManifest {
        gen_config,
        acquisition,
        wavelet_f0: f.parse("f0")?,
        wavelet_t0: f.parse("t0")?,
        normalization,
        n_total: f.parse("n_total")?,
        shards,
        root: path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf(),
    })
}
