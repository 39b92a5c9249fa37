//! Dataset construction: generate models, forward-model shots, calibrate
//! the trace scale, split deterministically, stream shards to disk.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use velmodel::{gen_model, GenConfig};
use wavesim::{ricker, Acquisition, SourceWavelet};

use crate::manifest::{write_manifest, DatasetManifest, ShardEntry};
use crate::sample::{assemble, simulate_raw, Normalization, RawSample, Sample, SampleMeta};
use crate::shard::{ShardReader, ShardWriter};
use crate::{DataError, Result};

pub const DEFAULT_CALIBRATION_SAMPLES: usize = 64;
const BUILD_CHUNK: usize = 16;
const WAVELET_F0: f64 = 50.0;
const WAVELET_DT: f64 = 1e-4;

fn dataset_wavelet(f0: f64, t0: f64) -> SourceWavelet {
    // support runs ~1.5/f0 past the peak; round up generously
    let n = ((t0 + 2.0 / f0) / WAVELET_DT).ceil() as usize;
    ricker(f0, t0, WAVELET_DT, n).expect("valid wavelet parameters")
}

/// 99.9th percentile of absolute trace amplitude over the calibration pass.
fn calibration_scale<'a>(raws: impl Iterator<Item = &'a RawSample>) -> Result<f64> {
    let mut values: Vec<f32> = Vec::new();
    for raw in raws {
        for block in raw.shots_p.iter().chain(raw.shots_vz.iter()) {
            values.extend(block.iter().map(|x| x.abs() as f32));
        }
    }
    if values.is_empty() {
        return Err(DataError::InvalidArgument("empty calibration pass".into()));
    }
    let k = ((values.len() - 1) as f64 * 0.999).floor() as usize;
    let (_, scale, _) = values.select_nth_unstable_by(k, |a, b| a.total_cmp(b));
    let scale = *scale as f64;
    if !(scale > 0.0) {
        return Err(DataError::InvalidArgument(
            "degenerate normalization: calibration amplitudes are all zero".into(),
        ));
    }
    Ok(scale)
}

/// Generates `n` samples of `cfg`, splits them `(train, val, test)` by a
/// seeded shuffle, writes one shard per split under `out_dir`, and returns
/// the manifest (also written as `manifest.txt`).
pub fn build_dataset(
    cfg: &GenConfig,
    n: usize,
    splits: (usize, usize, usize),
    out_dir: &Path,
) -> Result<DatasetManifest> {
    cfg.validate()?;
    let (n_train, n_val, n_test) = splits;
    if n_train + n_val + n_test != n {
        return Err(DataError::InvalidArgument(format!(
            "splits {splits:?} do not sum to n = {n}"
        )));
    }
    if n == 0 {
        return Err(DataError::InvalidArgument("empty dataset".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    let grid = {
        let (m, _, _) = gen_model(cfg, 0)?;
        m.grid
    };
    let acq = Acquisition::surface_default(&grid)?;
    let t0 = 1.5 / WAVELET_F0;
    let wavelet = dataset_wavelet(WAVELET_F0, t0);

    // Calibration pass: simulate the first samples once, reuse them later.
    let n_cal = n.min(DEFAULT_CALIBRATION_SAMPLES);
    let mut cached_raw: BTreeMap<usize, RawSample> = (0..n_cal)
        .into_par_iter()
        .map(|i| {
            let (model, _, _) = gen_model(cfg, i)?;
            Ok((i, simulate_raw(&model, &acq, &wavelet, i)?))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let seis_scale = calibration_scale(cached_raw.values())?;

    let norm = Normalization { seis_scale, v_min: cfg.v_range.0, v_max: cfg.v_range.1 };

    // Split assignment: stream 0 is reserved for the shuffle (samples use
    // streams index+1).
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    shuffle_rng.set_stream(0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut shuffle_rng);
    let mut split_indices: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    split_indices.insert("train", order[..n_train].to_vec());
    split_indices.insert("val", order[n_train..n_train + n_val].to_vec());
    split_indices.insert("test", order[n_train + n_val..].to_vec());
    for list in split_indices.values_mut() {
        list.sort_unstable();
    }

    let build_one = |i: usize, cached: &BTreeMap<usize, RawSample>| -> Result<Sample> {
        let (model, _, _) = gen_model(cfg, i)?;
        let meta = SampleMeta {
            family: cfg.family,
            index: i,
            v_min: cfg.v_range.0,
            v_max: cfg.v_range.1,
        };
        let raw_owned;
        let raw = match cached.get(&i) {
            Some(r) => r,
            None => {
                raw_owned = simulate_raw(&model, &acq, &wavelet, i)?;
                &raw_owned
            }
        };
        Ok(assemble(raw, &model, &norm, meta))
    };

    let mut shards = BTreeMap::new();
    for (name, indices) in &split_indices {
        let file = format!("{name}.shard");
        let mut writer = ShardWriter::create(&out_dir.join(&file))?;
        for chunk in indices.chunks(BUILD_CHUNK) {
            let samples: Vec<Sample> = chunk
                .par_iter()
                .map(|&i| build_one(i, &cached_raw))
                .collect::<Result<_>>()?;
            for s in &samples {
                writer.append(s)?;
            }
        }
        // calibration cache is only useful for the earliest indices; free it
        // once train (the first alphabetical split that contains them) is out
        if *name == "train" {
            cached_raw.retain(|i, _| !indices.contains(i));
        }
        let (crc32, count) = writer.finish()?;
        debug_assert_eq!(count, indices.len());
        shards.insert(
            name.to_string(),
            ShardEntry { file, crc32, indices: indices.clone() },
        );
    }

    let manifest = DatasetManifest {
        gen_config: cfg.clone(),
        acquisition: acq,
        wavelet_f0: WAVELET_F0,
        wavelet_t0: t0,
        normalization: norm,
        n_total: n,
        shards,
        root: out_dir.to_path_buf(),
    };
    write_manifest(&out_dir.join("manifest.txt"), &manifest)?;
    Ok(manifest)
}

/// Reads specific samples from a split (shard checksum verified on open).
pub fn load_batch(
    manifest: &DatasetManifest,
    split: &str,
    batch_indices: &[usize],
) -> Result<Vec<Sample>> {
    let entry = manifest.split(split)?;
    for &i in batch_indices {
        if !entry.indices.contains(&i) {
            return Err(DataError::InvalidArgument(format!(
                "sample {i} is not in split \"{split}\""
            )));
        }
    }
    let reader = ShardReader::open(&manifest.shard_path(entry), entry.crc32, &entry.indices)?;
    batch_indices.iter().map(|&i| reader.get(i)).collect()
}

/// Reads a whole split into memory (checksum verified).
pub fn load_split(manifest: &DatasetManifest, split: &str) -> Result<Vec<Sample>> {
    let entry = manifest.split(split)?;
    let reader = ShardReader::open(&manifest.shard_path(entry), entry.crc32, &entry.indices)?;
    (0..reader.len()).map(|p| reader.get_at(p)).collect()
}
