use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavesim::{Grid2D, VelocityModel};

use crate::{Family, GenConfig, GenError, Result};

/// Layer geometry of one generated model: interface reference depths at
/// column 0 (strictly increasing), the shared dip, optional per-interface
/// cosine perturbations, and per-layer velocities sorted by depth.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub interface_depths: Vec<f64>,
    pub dip: f64,
    /// `(amplitude_rows, phase_radians)` per interface; empty for St.
    pub curves: Vec<(f64, f64)>,
    pub velocities: Vec<f64>,
}

impl LayerSpec {
    /// Interface depth in fractional rows at a given column.
    fn depth_at(&self, k: usize, col: usize, nx: usize) -> f64 {
        let mut d = self.interface_depths[k] + self.dip * col as f64;
        if let Some(&(amp, phase)) = self.curves.get(k) {
            d += amp * ((2.0 * std::f64::consts::PI * col as f64) / nx as f64 + phase).cos();
        }
        d
    }
}

/// Planar dip-slip fault: everything right of the plane is thrown down by
/// `throw` rows, within the `extent` row band.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultSpec {
    pub x_position: usize,
    /// Lateral drift of the fault plane in cells per row.
    pub dip: f64,
    pub throw: usize,
    pub extent: (usize, usize),
}

impl FaultSpec {
    #[inline]
    fn displaces(&self, row: usize, col: usize) -> bool {
        if row < self.extent.0 || row >= self.extent.1 {
            return false;
        }
        let plane = self.x_position as f64 + self.dip * (row - self.extent.0) as f64;
        (col as f64) > plane
    }
}

fn sample_rng(cfg: &GenConfig, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Generates sample `index` of the configured family. Same `(cfg, index)`
/// always yields the same model, bit for bit.
pub fn gen_model(
    cfg: &GenConfig,
    index: usize,
) -> Result<(VelocityModel, LayerSpec, Option<FaultSpec>)> {
    cfg.validate()?;
    let mut rng = sample_rng(cfg, index);
    let (nz, nx) = (cfg.nz, cfg.nx);

    let n_layers = rng.gen_range(cfg.n_layers_range.0..=cfg.n_layers_range.1);
    let dip = rng.gen_range(cfg.dip_range.0..=cfg.dip_range.1);

    let max_amp = if cfg.family == Family::Curved { cfg.curve_amplitude_range.1 } else { 0.0 };
    // Interfaces are anchored at the center column, so the dip excursion to
    // either edge is half a width; reserve it plus the largest cosine swing
    // to keep interfaces inside the grid.
    let excursion = dip.abs() * nx as f64 / 2.0 + max_amp;
    let margin_top = 2.0 + excursion;
    let margin_bot = 2.0 + excursion;
    let band = nz as f64 - margin_top - margin_bot;
    let usable = band.max(0.0) as usize;

    let n_interfaces = n_layers - 1;
    if n_interfaces > 0 && usable < n_layers * cfg.thickness_range.0 {
        return Err(GenError::CannotFit {
            layers: n_layers,
            min_thickness: cfg.thickness_range.0,
            rows: usable,
        });
    }

    // Layer thicknesses: minimum plus a share of the leftover band, clamped
    // to the configured maximum. Depths are drawn at the center column.
    let mut center_depths = Vec::with_capacity(n_interfaces);
    if n_interfaces > 0 {
        let weights: Vec<f64> = (0..n_layers).map(|_| rng.gen_range(0.2..1.0f64)).collect();
        let total_w: f64 = weights.iter().sum();
        let slack = band - (n_layers * cfg.thickness_range.0) as f64;
        let span = (cfg.thickness_range.1 - cfg.thickness_range.0) as f64;
        let mut depth = margin_top;
        for k in 0..n_interfaces {
            let extra = (weights[k] / total_w * slack).min(span);
            depth += cfg.thickness_range.0 as f64 + extra;
            center_depths.push(depth);
        }
    }

    let mut velocities: Vec<f64> =
        (0..n_layers).map(|_| rng.gen_range(cfg.v_range.0..=cfg.v_range.1)).collect();
    velocities.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut curves = Vec::new();
    if cfg.family == Family::Curved {
        for k in 0..n_interfaces {
            let drawn = rng.gen_range(cfg.curve_amplitude_range.0..=cfg.curve_amplitude_range.1);
            // Bound the bump so neighbouring interfaces cannot touch.
            let gap_up = if k == 0 {
                center_depths[0] - margin_top + max_amp
            } else {
                center_depths[k] - center_depths[k - 1]
            };
            let gap_down = if k + 1 < n_interfaces {
                center_depths[k + 1] - center_depths[k]
            } else {
                nz as f64 - margin_bot - center_depths[k] + max_amp
            };
            let amp = drawn.min(0.45 * gap_up.min(gap_down)).max(0.0);
            let phase = rng.gen_range(0.0..(2.0 * std::f64::consts::PI));
            curves.push((amp, phase));
        }
    }

    // Re-reference the stored depths to column 0.
    let center_offset = dip * nx as f64 / 2.0;
    let interface_depths: Vec<f64> = center_depths.iter().map(|d| d - center_offset).collect();

    let fault = if rng.gen_range(0.0..1.0f64) < cfg.fault_probability && n_interfaces > 0 {
        let throw = rng.gen_range(cfg.fault_throw_range.0..=cfg.fault_throw_range.1);
        let x_position = rng.gen_range(nx / 4..(3 * nx) / 4);
        let fdip = rng.gen_range(-0.3..0.3f64);
        let row_start = rng.gen_range(1..nz / 3);
        Some(FaultSpec { x_position, dip: fdip, throw, extent: (row_start, nz) })
    } else {
        None
    };

    let layers = LayerSpec { interface_depths, dip, curves, velocities };

    let mut v = vec![0.0; nz * nx];
    for i in 0..nz {
        for j in 0..nx {
            // Displaced side samples the undisturbed column `throw` rows up.
            let sample_row = match &fault {
                Some(f) if f.displaces(i, j) => i as f64 - f.throw as f64,
                _ => i as f64,
            };
            let mut layer = 0;
            for k in 0..layers.interface_depths.len() {
                if layers.depth_at(k, j, nx) <= sample_row {
                    layer = k + 1;
                } else {
                    break;
                }
            }
            v[i * nx + j] = layers.velocities[layer];
        }
    }

    let grid = Grid2D::new(nz, nx, Grid2D::DEFAULT_DX, Grid2D::DEFAULT_PML)?;
    let model = VelocityModel::new(grid, v)?;
    Ok((model, layers, fault))
}

/// Velocity-versus-depth profile at one lateral position.
pub fn vertical_profile(model: &VelocityModel, col: usize) -> Result<Vec<f64>> {
    if col >= model.grid.nx {
        return Err(GenError::InvalidArgument(format!(
            "column {col} out of range (nx = {})",
            model.grid.nx
        )));
    }
    Ok((0..model.grid.nz).map(|i| model.v(i, col)).collect())
}
