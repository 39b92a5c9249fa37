//! Staggered-grid stepper and its exact adjoint.
//!
//! Layout: pressure `p` lives at integer nodes `(i, j)` of the padded grid,
//! `vx` at `(i, j+1/2)`, `vz` at `(i+1/2, j)`. One leapfrog step updates the
//! particle velocities from the pressure gradient, then the pressure from
//! the velocity divergence. Convolutional-PML memory fields (`psi*` for the
//! velocity updates, `phi*` for the pressure update) damp outgoing waves in
//! the padding; their coefficients are identically (1, 0) in the interior so
//! a single uniform loop covers the whole grid.
//!
//! The adjoint sweep in [`kernel`] reverses the forward statements one by
//! one over the same coefficient tables, so the computed velocity gradient
//! is the transpose of the actual linearized discrete map, not of a separate
//! discretization. Inversion-grade gradient tests rely on that.

use crate::{Acquisition, Result, ShotRecord, SourceWavelet, VelocityModel, WaveError};

/// Theoretical PML reflection coefficient for the quadratic damping ramp.
const PML_REFLECTION: f64 = 1e-5;
/// Steps between non-finite scans of the pressure field.
const CHECK_INTERVAL: usize = 250;

/// CFL-stable time step for the 2D second-order staggered scheme:
/// `safety * dx / (v_max * sqrt(2))`.
pub fn stable_dt(model: &VelocityModel, safety: f64) -> f64 {
    assert!(safety > 0.0 && safety <= 1.0, "safety must be in (0, 1], got {safety}");
    safety * model.grid.dx / (model.v_max() * std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    pub save_wavefield: bool,
    /// Overrides the internal CFL step; expert/testing knob.
    pub dt: Option<f64>,
}

/// Pressure snapshots of the padded grid, one per time step (step 0 is the
/// quiescent initial state). Sized `(n_steps + 1) * nzp * nxp` — large; only
/// request it when a gradient or energy computation needs it.
#[derive(Debug, Clone)]
pub struct WavefieldHistory {
    pub frames: Vec<Vec<f64>>,
    pub nzp: usize,
    pub nxp: usize,
    pub dt: f64,
}

impl WavefieldHistory {
    /// Sum of squared pressure over all stored steps, restricted to the
    /// interior (non-PML) cells. The wave-energy preconditioner input.
    pub fn interior_energy(&self, nz: usize, nx: usize, pml: usize) -> Vec<f64> {
        let mut energy = vec![0.0; nz * nx];
        for frame in &self.frames {
            for i in 0..nz {
                let row = (i + pml) * self.nxp + pml;
                for j in 0..nx {
                    let v = frame[row + j];
                    energy[i * nx + j] += v * v;
                }
            }
        }
        energy
    }
}

/// Runs one shot. Internal time step comes from `stable_dt(model, 0.9)`;
/// recordings are decimated to the acquisition's output grid by taking the
/// nearest internal step. The source enters as an additive pressure
/// increment at a single interior cell, scaled by `dt / dx^2`.
pub fn simulate_shot(
    model: &VelocityModel,
    acq: &Acquisition,
    shot_index: usize,
    wavelet: &SourceWavelet,
    save_wavefield: bool,
) -> Result<(ShotRecord, Option<WavefieldHistory>)> {
    simulate_shot_opts(model, acq, shot_index, wavelet, SimOptions { save_wavefield, dt: None })
}

pub fn simulate_shot_opts(
    model: &VelocityModel,
    acq: &Acquisition,
    shot_index: usize,
    wavelet: &SourceWavelet,
    opts: SimOptions,
) -> Result<(ShotRecord, Option<WavefieldHistory>)> {
    let stepper = kernel::Stepper::new(model, acq, shot_index, opts.dt)?;
    stepper.forward(wavelet, opts.save_wavefield)
}

/// Sum of squared samples (both channels) over the trailing 20% of the time
/// axis. Near zero when the absorbing boundary works: by the tail of the
/// record the direct field has left the grid and only edge reflections
/// remain.
pub fn residual_energy(record: &ShotRecord) -> f64 {
    let start = (record.n_time as f64 * 0.8).floor() as usize;
    let mut e = 0.0;
    for r in 0..record.n_receivers {
        for k in start..record.n_time {
            e += record.p(r, k).powi(2) + record.vz_at(r, k).powi(2);
        }
    }
    e
}

pub mod kernel {
    //! Low-level engine shared by forward modeling and gradient work.
    //!
    //! Exposed so inversion code can run the exact adjoint of the recording
    //! map against the same stepping coefficients the forward pass used.

    use super::*;

    pub struct Stepper {
        pub nz: usize,
        pub nx: usize,
        pub pml: usize,
        pub nzp: usize,
        pub nxp: usize,
        pub dt: f64,
        inv_dx: f64,
        /// v^2 on the padded grid (edge-replicated).
        kappa: Vec<f64>,
        src_cell: usize,
        src_scale: f64,
        rec_cells: Vec<usize>,
        /// Internal step index recorded into each output sample.
        pub rec_step_of_sample: Vec<usize>,
        pub n_steps: usize,
        n_time_out: usize,
        dt_out: f64,
        // PML profile coefficients at integer and half-offset positions.
        bxi: Vec<f64>,
        axi: Vec<f64>,
        bxh: Vec<f64>,
        axh: Vec<f64>,
        bzi: Vec<f64>,
        azi: Vec<f64>,
        bzh: Vec<f64>,
        azh: Vec<f64>,
    }

    fn pml_profiles(n_pad: usize, pml: usize, dx: f64, dt: f64, d0: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let damping = |pos: f64| -> f64 {
            let left = pml as f64 - pos;
            let right = pos - (n_pad as f64 - 1.0 - pml as f64);
            let depth = left.max(right).max(0.0) * dx;
            if depth <= 0.0 || pml == 0 {
                0.0
            } else {
                let l = pml as f64 * dx;
                d0 * (depth / l).powi(2)
            }
        };
        let mut bi = vec![1.0; n_pad];
        let mut ai = vec![0.0; n_pad];
        let mut bh = vec![1.0; n_pad];
        let mut ah = vec![0.0; n_pad];
        for u in 0..n_pad {
            let di = damping(u as f64);
            if di > 0.0 {
                bi[u] = (-di * dt).exp();
                ai[u] = bi[u] - 1.0;
            }
            let dh = damping(u as f64 + 0.5);
            if dh > 0.0 {
                bh[u] = (-dh * dt).exp();
                ah[u] = bh[u] - 1.0;
            }
        }
        (bi, ai, bh, ah)
    }

    impl Stepper {
        pub fn new(
            model: &VelocityModel,
            acq: &Acquisition,
            shot_index: usize,
            dt_override: Option<f64>,
        ) -> Result<Self> {
            acq.validate(&model.grid)?;
            if shot_index >= acq.sources.len() {
                return Err(WaveError::InvalidArgument(format!(
                    "shot index {shot_index} out of range ({} sources)",
                    acq.sources.len()
                )));
            }
            let (nz, nx, pml) = (model.grid.nz, model.grid.nx, model.grid.pml_width);
            let (nzp, nxp) = (nz + 2 * pml, nx + 2 * pml);
            let dx = model.grid.dx;
            let dt = dt_override.unwrap_or_else(|| stable_dt(model, 0.9));
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(WaveError::InvalidArgument(format!("bad time step {dt}")));
            }

            let mut kappa = vec![0.0; nzp * nxp];
            for ip in 0..nzp {
                let i = ip.saturating_sub(pml).min(nz - 1);
                for jp in 0..nxp {
                    let j = jp.saturating_sub(pml).min(nx - 1);
                    let v = model.v(i, j);
                    kappa[ip * nxp + jp] = v * v;
                }
            }

            // Damping amplitude from the quadratic-ramp reflection formula.
            // The reference speed is the model maximum rounded up to 500 m/s
            // so that small model updates during inversion cannot perturb
            // the absorbing-layer coefficients.
            let c_ref = (model.v_max() / 500.0).ceil().max(1.0) * 500.0;
            let d0 = if pml > 0 {
                -3.0 * c_ref * PML_REFLECTION.ln() / (2.0 * pml as f64 * dx)
            } else {
                0.0
            };
            let (bxi, axi, bxh, axh) = pml_profiles(nxp, pml, dx, dt, d0);
            let (bzi, azi, bzh, azh) = pml_profiles(nzp, pml, dx, dt, d0);

            let (sz, sx) = acq.sources[shot_index];
            let src_cell = (sz + pml) * nxp + (sx + pml);
            let rec_cells = acq
                .receivers
                .iter()
                .map(|&(rz, rx)| (rz + pml) * nxp + (rx + pml))
                .collect();

            let rec_step_of_sample: Vec<usize> = (0..acq.n_time_out)
                .map(|k| (k as f64 * acq.dt_out / dt).round() as usize)
                .collect();
            let n_steps = rec_step_of_sample.iter().copied().max().unwrap_or(0).max(1);

            Ok(Self {
                nz,
                nx,
                pml,
                nzp,
                nxp,
                dt,
                inv_dx: 1.0 / dx,
                kappa,
                src_cell,
                src_scale: dt / (dx * dx),
                rec_cells,
                rec_step_of_sample,
                n_steps,
                n_time_out: acq.n_time_out,
                dt_out: acq.dt_out,
                bxi,
                axi,
                bxh,
                axh,
                bzi,
                azi,
                bzh,
                azh,
            })
        }

        #[inline]
        pub fn source_amplitude(&self, wavelet: &SourceWavelet, step: usize) -> f64 {
            wavelet.at(step as f64 * self.dt) * self.src_scale
        }

        fn step_fields(
            &self,
            p: &mut [f64],
            vx: &mut [f64],
            vz: &mut [f64],
            psix: &mut [f64],
            psiz: &mut [f64],
            phix: &mut [f64],
            phiz: &mut [f64],
            src_value: f64,
        ) {
            let (nzp, nxp) = (self.nzp, self.nxp);
            let (dt, inv_dx) = (self.dt, self.inv_dx);

            for i in 0..nzp {
                let row = i * nxp;
                for j in 0..nxp - 1 {
                    let u = row + j;
                    let g = (p[u + 1] - p[u]) * inv_dx;
                    let ps = self.bxh[j] * psix[u] + self.axh[j] * g;
                    psix[u] = ps;
                    vx[u] -= dt * (g + ps);
                }
            }
            for i in 0..nzp - 1 {
                let row = i * nxp;
                for j in 0..nxp {
                    let u = row + j;
                    let g = (p[u + nxp] - p[u]) * inv_dx;
                    let ps = self.bzh[i] * psiz[u] + self.azh[i] * g;
                    psiz[u] = ps;
                    vz[u] -= dt * (g + ps);
                }
            }
            for i in 0..nzp {
                let row = i * nxp;
                for j in 0..nxp {
                    let u = row + j;
                    let h1 = (vx[u] - if j > 0 { vx[u - 1] } else { 0.0 }) * inv_dx;
                    let f1 = self.bxi[j] * phix[u] + self.axi[j] * h1;
                    phix[u] = f1;
                    let h2 = (vz[u] - if i > 0 { vz[u - nxp] } else { 0.0 }) * inv_dx;
                    let f2 = self.bzi[i] * phiz[u] + self.azi[i] * h2;
                    phiz[u] = f2;
                    p[u] -= dt * self.kappa[u] * (h1 + f1 + h2 + f2);
                }
            }
            p[self.src_cell] += src_value;
        }

        pub fn forward(
            &self,
            wavelet: &SourceWavelet,
            save_wavefield: bool,
        ) -> Result<(ShotRecord, Option<WavefieldHistory>)> {
            let n = self.nzp * self.nxp;
            let mut p = vec![0.0; n];
            let mut vx = vec![0.0; n];
            let mut vz = vec![0.0; n];
            let mut psix = vec![0.0; n];
            let mut psiz = vec![0.0; n];
            let mut phix = vec![0.0; n];
            let mut phiz = vec![0.0; n];

            let mut record =
                ShotRecord::zeros(self.rec_cells.len(), self.n_time_out, self.dt_out);
            let mut frames: Vec<Vec<f64>> = Vec::new();
            if save_wavefield {
                frames.reserve(self.n_steps + 1);
                frames.push(p.clone());
            }

            // Output samples whose nearest internal step is `n` get state n.
            let mut sample_at_step = vec![Vec::new(); self.n_steps + 1];
            for (k, &s) in self.rec_step_of_sample.iter().enumerate() {
                sample_at_step[s].push(k);
            }
            let capture = |step: usize, p: &[f64], vz: &[f64], record: &mut ShotRecord| {
                for &k in &sample_at_step[step] {
                    for (r, &cell) in self.rec_cells.iter().enumerate() {
                        record.pressure[r * self.n_time_out + k] = p[cell];
                        record.vz[r * self.n_time_out + k] = vz[cell];
                    }
                }
            };

            capture(0, &p, &vz, &mut record);
            for step in 0..self.n_steps {
                let src = self.source_amplitude(wavelet, step);
                self.step_fields(&mut p, &mut vx, &mut vz, &mut psix, &mut psiz, &mut phix, &mut phiz, src);
                if ((step + 1) % CHECK_INTERVAL == 0 || step + 1 == self.n_steps)
                    && !p.iter().all(|x| x.is_finite())
                {
                    return Err(WaveError::Instability { step: step + 1 });
                }
                capture(step + 1, &p, &vz, &mut record);
                if save_wavefield {
                    frames.push(p.clone());
                }
            }

            let history = save_wavefield.then(|| WavefieldHistory {
                frames,
                nzp: self.nzp,
                nxp: self.nxp,
                dt: self.dt,
            });
            Ok((record, history))
        }

        /// Exact adjoint of the linearized forward map: given data-space
        /// residuals (same layout as a [`ShotRecord`]) and the forward
        /// pressure history, returns `dE/dv` on the interior grid, where
        /// `E = sum(residual * recording)`. Padded-cell sensitivities fold
        /// back onto the interior cells whose velocity they replicate.
        pub fn adjoint_velocity_gradient(
            &self,
            model: &VelocityModel,
            wavelet: &SourceWavelet,
            history: &WavefieldHistory,
            residual_p: &[f64],
            residual_vz: &[f64],
        ) -> Result<Vec<f64>> {
            let n = self.nzp * self.nxp;
            if history.frames.len() != self.n_steps + 1 {
                return Err(WaveError::InvalidArgument(format!(
                    "history holds {} frames, stepper expects {}",
                    history.frames.len(),
                    self.n_steps + 1
                )));
            }
            let n_rec = self.rec_cells.len();
            if residual_p.len() != n_rec * self.n_time_out
                || residual_vz.len() != n_rec * self.n_time_out
            {
                return Err(WaveError::InvalidArgument("residual shape mismatch".into()));
            }

            let (nzp, nxp) = (self.nzp, self.nxp);
            let (dt, inv_dx) = (self.dt, self.inv_dx);

            let mut lp = vec![0.0; n];
            let mut lvx = vec![0.0; n];
            let mut lvz = vec![0.0; n];
            let mut lpsix = vec![0.0; n];
            let mut lpsiz = vec![0.0; n];
            let mut lphix = vec![0.0; n];
            let mut lphiz = vec![0.0; n];
            let mut lh1 = vec![0.0; n];
            let mut lh2 = vec![0.0; n];
            let mut lg1 = vec![0.0; n];
            let mut lg2 = vec![0.0; n];
            let mut grad_kappa = vec![0.0; n];

            let mut sample_at_step = vec![Vec::new(); self.n_steps + 1];
            for (k, &s) in self.rec_step_of_sample.iter().enumerate() {
                sample_at_step[s].push(k);
            }
            let inject = |step: usize, lp: &mut [f64], lvz: &mut [f64]| {
                for &k in &sample_at_step[step] {
                    for (r, &cell) in self.rec_cells.iter().enumerate() {
                        lp[cell] += residual_p[r * self.n_time_out + k];
                        lvz[cell] += residual_vz[r * self.n_time_out + k];
                    }
                }
            };

            inject(self.n_steps, &mut lp, &mut lvz);
            for step in (0..self.n_steps).rev() {
                // Reverse of the pressure update. The forward divergence
                // term D is recovered from consecutive pressure frames:
                // p' = p - dt*kappa*D + src  =>  D = (p - p' + src)/(dt*kappa).
                let src = self.source_amplitude(wavelet, step);
                let before = &history.frames[step];
                let after = &history.frames[step + 1];
                for u in 0..n {
                    let mut num = before[u] - after[u];
                    if u == self.src_cell {
                        num += src;
                    }
                    let div = num / (dt * self.kappa[u]);
                    grad_kappa[u] -= dt * div * lp[u];
                    let w = -dt * self.kappa[u] * lp[u];
                    lh1[u] = w;
                    lh2[u] = w;
                    lphix[u] += w;
                    lphiz[u] += w;
                }
                // Reverse of the PML memory updates feeding the divergence.
                for i in 0..nzp {
                    let row = i * nxp;
                    for j in 0..nxp {
                        let u = row + j;
                        lh2[u] += self.azi[i] * lphiz[u];
                        lphiz[u] *= self.bzi[i];
                        lh1[u] += self.axi[j] * lphix[u];
                        lphix[u] *= self.bxi[j];
                    }
                }
                // Transpose of the backward differences h1 = Dx^- vx,
                // h2 = Dz^- vz (forward loops ran over the full grid).
                for i in 0..nzp - 1 {
                    let row = i * nxp;
                    for j in 0..nxp {
                        let u = row + j;
                        lvz[u] += (lh2[u] - lh2[u + nxp]) * inv_dx;
                    }
                }
                {
                    let row = (nzp - 1) * nxp;
                    for j in 0..nxp {
                        let u = row + j;
                        lvz[u] += lh2[u] * inv_dx;
                    }
                }
                for i in 0..nzp {
                    let row = i * nxp;
                    for j in 0..nxp - 1 {
                        let u = row + j;
                        lvx[u] += (lh1[u] - lh1[u + 1]) * inv_dx;
                    }
                    let u = row + nxp - 1;
                    lvx[u] += lh1[u] * inv_dx;
                }
                // Reverse of the velocity updates and their PML memories.
                for i in 0..nzp - 1 {
                    let row = i * nxp;
                    for j in 0..nxp {
                        let u = row + j;
                        let g = -dt * lvz[u];
                        lpsiz[u] += g;
                        lg2[u] = g + self.azh[i] * lpsiz[u];
                        lpsiz[u] *= self.bzh[i];
                    }
                }
                for j in 0..nxp {
                    lg2[(nzp - 1) * nxp + j] = 0.0;
                }
                for i in 0..nzp {
                    let row = i * nxp;
                    for j in 0..nxp - 1 {
                        let u = row + j;
                        let g = -dt * lvx[u];
                        lpsix[u] += g;
                        lg1[u] = g + self.axh[j] * lpsix[u];
                        lpsix[u] *= self.bxh[j];
                    }
                    lg1[row + nxp - 1] = 0.0;
                }
                // Transpose of the forward differences g = Dx^+ p, Dz^+ p.
                for i in 0..nzp {
                    let row = i * nxp;
                    for j in 0..nxp {
                        let u = row + j;
                        let left = if j > 0 { lg1[u - 1] } else { 0.0 };
                        let up = if i > 0 { lg2[u - nxp] } else { 0.0 };
                        lp[u] += (left - lg1[u] + up - lg2[u]) * inv_dx;
                    }
                }
                inject(step, &mut lp, &mut lvz);
            }

            // dv = 2 v * dkappa, with padded replicas folded back onto the
            // interior cells that produced them.
            let (nz, nx, pml) = (self.nz, self.nx, self.pml);
            let mut grad_v = vec![0.0; nz * nx];
            for ip in 0..nzp {
                let i = ip.saturating_sub(pml).min(nz - 1);
                for jp in 0..nxp {
                    let j = jp.saturating_sub(pml).min(nx - 1);
                    grad_v[i * nx + j] += grad_kappa[ip * nxp + jp];
                }
            }
            for i in 0..nz {
                for j in 0..nx {
                    grad_v[i * nx + j] *= 2.0 * model.v(i, j);
                }
            }
            Ok(grad_v)
        }
    }
}
