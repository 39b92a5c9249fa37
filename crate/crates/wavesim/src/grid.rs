use crate::{Result, WaveError};

/// Regular 2D grid: `nz` rows of depth by `nx` columns of lateral offset,
/// isotropic spacing `dx` in meters, surrounded by `pml_width` absorbing
/// cells per side. `pml_width == 0` leaves hard (reflecting) edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nz: usize,
    pub nx: usize,
    pub dx: f64,
    pub pml_width: usize,
}

impl Grid2D {
    pub const DEFAULT_DX: f64 = 5.0;
    pub const DEFAULT_PML: usize = 10;

    pub fn new(nz: usize, nx: usize, dx: f64, pml_width: usize) -> Result<Self> {
        if nz < 8 || nx < 8 {
            return Err(WaveError::InvalidArgument(format!(
                "grid must be at least 8x8, got {nz}x{nx}"
            )));
        }
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(WaveError::InvalidArgument(format!("dx must be positive, got {dx}")));
        }
        Ok(Self { nz, nx, dx, pml_width })
    }

    /// Grid with the default 5 m spacing and 10-cell PML.
    pub fn with_defaults(nz: usize, nx: usize) -> Result<Self> {
        Self::new(nz, nx, Self::DEFAULT_DX, Self::DEFAULT_PML)
    }

    pub fn n_cells(&self) -> usize {
        self.nz * self.nx
    }
}

/// Compressional velocity field in m/s on a [`Grid2D`], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityModel {
    pub grid: Grid2D,
    v: Vec<f64>,
}

impl VelocityModel {
    pub fn new(grid: Grid2D, v: Vec<f64>) -> Result<Self> {
        if v.len() != grid.n_cells() {
            return Err(WaveError::InvalidArgument(format!(
                "velocity buffer holds {} cells, grid wants {}",
                v.len(),
                grid.n_cells()
            )));
        }
        if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(WaveError::InvalidArgument(format!(
                "velocities must be finite and positive, found {bad}"
            )));
        }
        Ok(Self { grid, v })
    }

    pub fn constant(grid: Grid2D, v: f64) -> Result<Self> {
        Self::new(grid, vec![v; grid.n_cells()])
    }

    #[inline]
    pub fn v(&self, iz: usize, ix: usize) -> f64 {
        self.v[iz * self.grid.nx + ix]
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.v
    }

    pub fn v_max(&self) -> f64 {
        self.v.iter().cloned().fold(f64::MIN, f64::max)
    }

    pub fn v_min(&self) -> f64 {
        self.v.iter().cloned().fold(f64::MAX, f64::min)
    }

    /// Mean absolute difference against another model on the same grid.
    pub fn mae(&self, other: &VelocityModel) -> f64 {
        assert_eq!(self.grid.nz, other.grid.nz);
        assert_eq!(self.grid.nx, other.grid.nx);
        let n = self.v.len() as f64;
        self.v
            .iter()
            .zip(other.v.iter())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / n
    }

    /// Gaussian blur with standard deviation `sigma` in cells; separable,
    /// edge-replicated. Used to build smooth initial models.
    pub fn smoothed(&self, sigma: f64) -> VelocityModel {
        if sigma <= 0.0 {
            return self.clone();
        }
        let radius = (3.0 * sigma).ceil() as isize;
        let kernel: Vec<f64> = (-radius..=radius)
            .map(|k| (-0.5 * (k as f64 / sigma).powi(2)).exp())
            .collect();
        let norm: f64 = kernel.iter().sum();
        let (nz, nx) = (self.grid.nz as isize, self.grid.nx as isize);
        let mut tmp = vec![0.0; self.v.len()];
        for i in 0..nz {
            for j in 0..nx {
                let mut acc = 0.0;
                for (ki, w) in kernel.iter().enumerate() {
                    let jj = (j + ki as isize - radius).clamp(0, nx - 1);
                    acc += w * self.v[(i * nx + jj) as usize];
                }
                tmp[(i * nx + j) as usize] = acc / norm;
            }
        }
        let mut out = vec![0.0; self.v.len()];
        for i in 0..nz {
            for j in 0..nx {
                let mut acc = 0.0;
                for (ki, w) in kernel.iter().enumerate() {
                    let ii = (i + ki as isize - radius).clamp(0, nz - 1);
                    acc += w * tmp[(ii * nx + j) as usize];
                }
                out[(i * nx + j) as usize] = acc / norm;
            }
        }
        VelocityModel { grid: self.grid, v: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_tiny_dims() {
        assert!(Grid2D::new(4, 100, 5.0, 10).is_err());
        assert!(Grid2D::new(100, 4, 5.0, 10).is_err());
        assert!(Grid2D::new(100, 100, 0.0, 10).is_err());
        assert!(Grid2D::new(100, 100, f64::NAN, 10).is_err());
    }

    #[test]
    fn model_rejects_bad_velocities() {
        let g = Grid2D::with_defaults(16, 16).unwrap();
        assert!(VelocityModel::new(g, vec![1500.0; 10]).is_err());
        let mut v = vec![1500.0; g.n_cells()];
        v[7] = -3.0;
        assert!(VelocityModel::new(g, v.clone()).is_err());
        v[7] = f64::INFINITY;
        assert!(VelocityModel::new(g, v).is_err());
    }

    #[test]
    fn smoothing_preserves_constant_models() {
        let g = Grid2D::with_defaults(16, 16).unwrap();
        let m = VelocityModel::constant(g, 2500.0).unwrap();
        let s = m.smoothed(4.0);
        for &v in s.values() {
            assert!((v - 2500.0).abs() < 1e-9);
        }
    }
}
