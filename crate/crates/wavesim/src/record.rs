use crate::{Grid2D, Result, WaveError};

/// Source/receiver layout plus the output time grid. Positions are
/// `(iz, ix)` cells in interior coordinates (PML excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct Acquisition {
    pub sources: Vec<(usize, usize)>,
    pub receivers: Vec<(usize, usize)>,
    pub n_time_out: usize,
    pub dt_out: f64,
}

impl Acquisition {
    pub const DEFAULT_N_TIME: usize = 1000;
    pub const DEFAULT_DT_OUT: f64 = 1e-3;
    pub const DEFAULT_N_RECEIVERS: usize = 32;
    pub const DEFAULT_N_SOURCES: usize = 3;

    pub fn new(
        sources: Vec<(usize, usize)>,
        receivers: Vec<(usize, usize)>,
        n_time_out: usize,
        dt_out: f64,
    ) -> Result<Self> {
        if sources.is_empty() || receivers.is_empty() {
            return Err(WaveError::InvalidArgument(
                "acquisition needs at least one source and one receiver".into(),
            ));
        }
        if n_time_out == 0 || !(dt_out > 0.0) {
            return Err(WaveError::InvalidArgument(format!(
                "bad output time grid: n={n_time_out}, dt={dt_out}"
            )));
        }
        Ok(Self { sources, receivers, n_time_out, dt_out })
    }

    /// Standard surface layout: 3 shots at columns {nx/6, nx/2, 5nx/6} and
    /// 32 receivers evenly spread along the top interior row.
    pub fn surface_default(grid: &Grid2D) -> Result<Self> {
        Self::surface(grid, Self::DEFAULT_N_SOURCES, Self::DEFAULT_N_RECEIVERS,
                      Self::DEFAULT_N_TIME, Self::DEFAULT_DT_OUT)
    }

    pub fn surface(
        grid: &Grid2D,
        n_sources: usize,
        n_receivers: usize,
        n_time_out: usize,
        dt_out: f64,
    ) -> Result<Self> {
        let nx = grid.nx;
        let sources = (0..n_sources)
            .map(|s| (0usize, (2 * s + 1) * nx / (2 * n_sources)))
            .collect();
        let receivers = (0..n_receivers)
            .map(|r| {
                let ix = if n_receivers == 1 { nx / 2 } else { r * (nx - 1) / (n_receivers - 1) };
                (0usize, ix)
            })
            .collect();
        let acq = Self::new(sources, receivers, n_time_out, dt_out)?;
        acq.validate(grid)?;
        Ok(acq)
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        for &(iz, ix) in self.sources.iter().chain(self.receivers.iter()) {
            if iz >= grid.nz || ix >= grid.nx {
                return Err(WaveError::InvalidArgument(format!(
                    "position ({iz},{ix}) outside interior {}x{}",
                    grid.nz, grid.nx
                )));
            }
        }
        Ok(())
    }
}

/// Receiver time series for one shot: pressure and vertical particle
/// velocity, `n_receivers` rows by `n_time` columns, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub n_receivers: usize,
    pub n_time: usize,
    pub dt_out: f64,
    pub pressure: Vec<f64>,
    pub vz: Vec<f64>,
}

impl ShotRecord {
    pub fn zeros(n_receivers: usize, n_time: usize, dt_out: f64) -> Self {
        Self {
            n_receivers,
            n_time,
            dt_out,
            pressure: vec![0.0; n_receivers * n_time],
            vz: vec![0.0; n_receivers * n_time],
        }
    }

    #[inline]
    pub fn p(&self, r: usize, k: usize) -> f64 {
        self.pressure[r * self.n_time + k]
    }

    #[inline]
    pub fn vz_at(&self, r: usize, k: usize) -> f64 {
        self.vz[r * self.n_time + k]
    }

    pub fn is_finite(&self) -> bool {
        self.pressure.iter().chain(self.vz.iter()).all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.pressure
            .iter()
            .chain(self.vz.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}
