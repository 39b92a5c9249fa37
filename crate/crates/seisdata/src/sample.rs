use rayon::prelude::*;
use velmodel::Family;
use wavesim::{simulate_shot, Acquisition, SourceWavelet, VelocityModel};

use crate::{DataError, Result};

/// Two recorded fields per shot.
pub const N_CHANNELS_PER_SHOT: usize = 2;
/// Channel count of the assembled tensor (3 shots x 2 fields).
pub const N_CHANNELS: usize = 6;

/// Linear maps onto `(-1, 1)` for traces and velocity images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    /// Global trace divisor (99.9th-percentile absolute amplitude of the
    /// calibration pass).
    pub seis_scale: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Normalization {
    pub fn normalize_seis(&self, x: f64) -> f32 {
        ((x / self.seis_scale) as f32).clamp(-1.0, 1.0)
    }

    pub fn normalize_v(&self, v: f64) -> f32 {
        self.normalize_v_f64(v) as f32
    }

    pub fn normalize_v_f64(&self, v: f64) -> f64 {
        2.0 * (v - self.v_min) / (self.v_max - self.v_min) - 1.0
    }

    pub fn denormalize_v(&self, y: f64) -> f64 {
        (y + 1.0) * 0.5 * (self.v_max - self.v_min) + self.v_min
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMeta {
    pub family: Family,
    pub index: usize,
    pub v_min: f64,
    pub v_max: f64,
}

/// One training pair. `seismic` is `[receiver][time][channel]` row-major
/// with values in `[-1, 1]`; `label` is the `[nz][nx]` normalized image.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub seismic: Vec<f32>,
    pub label: Vec<f32>,
    pub n_receivers: usize,
    pub n_time: usize,
    pub nz: usize,
    pub nx: usize,
    pub meta: SampleMeta,
}

impl Sample {
    #[inline]
    pub fn seis_at(&self, r: usize, t: usize, c: usize) -> f32 {
        self.seismic[(r * self.n_time + t) * N_CHANNELS + c]
    }
}

/// Raw (unnormalized) per-shot recordings plus the label source, kept so a
/// calibration pass can reuse its simulations.
pub(crate) struct RawSample {
    pub shots_p: Vec<Vec<f64>>,
    pub shots_vz: Vec<Vec<f64>>,
    pub n_receivers: usize,
    pub n_time: usize,
}

pub(crate) fn simulate_raw(
    model: &VelocityModel,
    acq: &Acquisition,
    wavelet: &SourceWavelet,
    index: usize,
) -> Result<RawSample> {
    let shots: Vec<_> = (0..acq.sources.len())
        .into_par_iter()
        .map(|s| {
            simulate_shot(model, acq, s, wavelet, false)
                .map(|(rec, _)| rec)
                .map_err(|e| DataError::Sample { index, source: e })
        })
        .collect::<Result<_>>()?;
    Ok(RawSample {
        n_receivers: acq.receivers.len(),
        n_time: acq.n_time_out,
        shots_p: shots.iter().map(|r| r.pressure.clone()).collect(),
        shots_vz: shots.into_iter().map(|r| r.vz).collect(),
    })
}

pub(crate) fn assemble(
    raw: &RawSample,
    model: &VelocityModel,
    norm: &Normalization,
    meta: SampleMeta,
) -> Sample {
    let (n_rec, n_time) = (raw.n_receivers, raw.n_time);
    let n_shots = raw.shots_p.len();
    let mut seismic = vec![0.0f32; n_rec * n_time * N_CHANNELS_PER_SHOT * n_shots];
    let n_chan = N_CHANNELS_PER_SHOT * n_shots;
    for s in 0..n_shots {
        for r in 0..n_rec {
            for t in 0..n_time {
                let base = (r * n_time + t) * n_chan;
                seismic[base + 2 * s] = norm.normalize_seis(raw.shots_p[s][r * n_time + t]);
                seismic[base + 2 * s + 1] = norm.normalize_seis(raw.shots_vz[s][r * n_time + t]);
            }
        }
    }
    let label = model.values().iter().map(|&v| norm.normalize_v(v)).collect();
    Sample {
        seismic,
        label,
        n_receivers: n_rec,
        n_time,
        nz: model.grid.nz,
        nx: model.grid.nx,
        meta,
    }
}

/// Forward-models all shots of `acq` on `model` and assembles the
/// normalized tensor pair.
pub fn build_sample(
    model: &VelocityModel,
    acq: &Acquisition,
    wavelet: &SourceWavelet,
    norm: &Normalization,
    meta: SampleMeta,
) -> Result<Sample> {
    if acq.sources.len() * N_CHANNELS_PER_SHOT != N_CHANNELS {
        return Err(DataError::InvalidArgument(format!(
            "expected {} sources for the {}-channel layout, got {}",
            N_CHANNELS / N_CHANNELS_PER_SHOT,
            N_CHANNELS,
            acq.sources.len()
        )));
    }
    let raw = simulate_raw(model, acq, wavelet, meta.index)?;
    Ok(assemble(&raw, model, norm, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm() -> Normalization {
        Normalization { seis_scale: 1e-5, v_min: 1500.0, v_max: 4500.0 }
    }

    #[test]
    fn label_normalization_endpoints() {
        let n = norm();
        assert_eq!(n.normalize_v(1500.0), -1.0);
        assert_eq!(n.normalize_v(4500.0), 1.0);
        assert_eq!(n.normalize_v(3000.0), 0.0);
    }

    #[test]
    fn seismic_values_clamp() {
        let n = norm();
        assert_eq!(n.normalize_seis(1e-5), 1.0);
        assert_eq!(n.normalize_seis(5e-5), 1.0);
        assert_eq!(n.normalize_seis(-7e-5), -1.0);
        assert!((n.normalize_seis(5e-6) - 0.5).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn label_roundtrip(v in 1500.0..4500.0f64) {
            let n = norm();
            // exact map round trip
            let back = n.denormalize_v(n.normalize_v_f64(v));
            prop_assert!((back - v).abs() < 1e-6, "roundtrip {} -> {}", v, back);
            // stored-precision round trip recovers to f32 resolution
            let stored = n.denormalize_v(n.normalize_v(v) as f64);
            prop_assert!((stored - v).abs() < 3e-4, "stored roundtrip {} -> {}", v, stored);
        }
    }
}
