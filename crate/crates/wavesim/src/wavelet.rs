use crate::{Result, WaveError};

/// Discrete source time function. Samples are pressure-rate amplitudes on a
/// uniform time grid of spacing `dt`, with the main pulse delayed by `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceWavelet {
    pub samples: Vec<f64>,
    pub dt: f64,
    pub t0: f64,
    pub f0: f64,
}

impl SourceWavelet {
    /// Value at an arbitrary time by linear interpolation; zero outside the
    /// sampled support. Keeps the source linear in its samples.
    pub fn at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let s = t / self.dt;
        let k = s.floor() as usize;
        if k + 1 >= self.samples.len() {
            return if k < self.samples.len() { self.samples[k] } else { 0.0 };
        }
        let frac = s - k as f64;
        self.samples[k] * (1.0 - frac) + self.samples[k + 1] * frac
    }

    /// All-zero wavelet with the same sampling, for null tests.
    pub fn zeroed(&self) -> SourceWavelet {
        SourceWavelet { samples: vec![0.0; self.samples.len()], ..self.clone() }
    }

    pub fn scaled(&self, factor: f64) -> SourceWavelet {
        SourceWavelet {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            ..self.clone()
        }
    }
}

/// Ricker wavelet: `(1 - 2 pi^2 f0^2 tau^2) exp(-pi^2 f0^2 tau^2)` with
/// `tau = k*dt - t0`. Unit peak at `t = t0`.
pub fn ricker(f0: f64, t0: f64, dt: f64, n: usize) -> Result<SourceWavelet> {
    if !(f0.is_finite() && t0.is_finite() && dt.is_finite()) {
        return Err(WaveError::InvalidArgument("ricker parameters must be finite".into()));
    }
    if f0 <= 0.0 || dt <= 0.0 || n == 0 {
        return Err(WaveError::InvalidArgument(format!(
            "ricker needs f0 > 0, dt > 0, n >= 1 (got f0={f0}, dt={dt}, n={n})"
        )));
    }
    let a = (std::f64::consts::PI * f0).powi(2);
    let samples = (0..n)
        .map(|k| {
            let tau = k as f64 * dt - t0;
            let arg = a * tau * tau;
            (1.0 - 2.0 * arg) * (-arg).exp()
        })
        .collect();
    Ok(SourceWavelet { samples, dt, t0, f0 })
}
