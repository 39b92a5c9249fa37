//! Misfit evaluation and adjoint-state gradients.

use rayon::prelude::*;
use wavesim::{kernel::Stepper, Acquisition, ShotRecord, SourceWavelet, VelocityModel};

use crate::{ForwardSpec, InvertError, Regularizer, Result};

fn check_observed(observed: &[ShotRecord], acq: &Acquisition) -> Result<()> {
    if observed.len() != acq.sources.len() {
        return Err(InvertError::InvalidArgument(format!(
            "{} observed records for {} sources",
            observed.len(),
            acq.sources.len()
        )));
    }
    for (s, rec) in observed.iter().enumerate() {
        if rec.n_receivers != acq.receivers.len() || rec.n_time != acq.n_time_out {
            return Err(InvertError::InvalidArgument(format!(
                "record {s} is {}x{}, acquisition wants {}x{}",
                rec.n_receivers,
                rec.n_time,
                acq.receivers.len(),
                acq.n_time_out
            )));
        }
    }
    Ok(())
}

/// Forward-models every shot of the acquisition under the frozen operator.
pub fn simulate_observed(
    model: &VelocityModel,
    acq: &Acquisition,
    wavelet: &SourceWavelet,
    fwd: &ForwardSpec,
) -> Result<Vec<ShotRecord>> {
    (0..acq.sources.len())
        .into_par_iter()
        .map(|shot| {
            let stepper = Stepper::new(model, acq, shot, Some(fwd.dt))?;
            let (rec, _) = stepper.forward(wavelet, false)?;
            Ok(rec)
        })
        .collect()
}

/// Full objective: `1/2 sum_shots ||f(m) - d||^2 + lambda * R(m)`
/// (both recorded channels enter the data term).
pub fn misfit(
    model: &VelocityModel,
    observed: &[ShotRecord],
    acq: &Acquisition,
    wavelet: &SourceWavelet,
    lambda_reg: f64,
    reg: &Regularizer,
    fwd: &ForwardSpec,
) -> Result<f64> {
    check_observed(observed, acq)?;
    let data: f64 = (0..acq.sources.len())
        .into_par_iter()
        .map(|shot| -> Result<f64> {
            let stepper = Stepper::new(model, acq, shot, Some(fwd.dt))?;
            let (sim, _) = stepper.forward(wavelet, false)?;
            let obs = &observed[shot];
            let mut e = 0.0;
            for u in 0..sim.pressure.len() {
                e += (sim.pressure[u] - obs.pressure[u]).powi(2)
                    + (sim.vz[u] - obs.vz[u]).powi(2);
            }
            Ok(0.5 * e)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let r = reg.value(model.values(), model.grid.nz, model.grid.nx);
    Ok(data + lambda_reg * r)
}

#[derive(Debug, Clone)]
pub struct ObjectiveEval {
    /// d(objective)/dv on the interior grid, regularization included.
    pub gradient: Vec<f64>,
    /// Forward wave energy `sum_shots sum_t p^2`, the preconditioner input.
    pub source_energy: Vec<f64>,
    /// Objective value at the evaluation point.
    pub misfit: f64,
}

/// Data-term gradient only (residual back-propagation, summed over shots).
pub fn gradient_adjoint(
    model: &VelocityModel,
    observed: &[ShotRecord],
    acq: &Acquisition,
    wavelet: &SourceWavelet,
    fwd: &ForwardSpec,
) -> Result<Vec<f64>> {
    let eval = objective_gradient(model, observed, acq, wavelet, 0.0, &Regularizer::L2, fwd)?;
    Ok(eval.gradient)
}

/// One forward pass per shot with stored pressure history, one adjoint sweep
/// per shot, deterministic shot-ordered reduction. Also accumulates the
/// forward wave energy and the objective value from the same simulations.
pub fn objective_gradient(
    model: &VelocityModel,
    observed: &[ShotRecord],
    acq: &Acquisition,
    wavelet: &SourceWavelet,
    lambda_reg: f64,
    reg: &Regularizer,
    fwd: &ForwardSpec,
) -> Result<ObjectiveEval> {
    check_observed(observed, acq)?;
    let (nz, nx, pml) = (model.grid.nz, model.grid.nx, model.grid.pml_width);

    let per_shot: Vec<(Vec<f64>, Vec<f64>, f64)> = (0..acq.sources.len())
        .into_par_iter()
        .map(|shot| -> Result<(Vec<f64>, Vec<f64>, f64)> {
            let stepper = Stepper::new(model, acq, shot, Some(fwd.dt))?;
            let (sim, history) = stepper.forward(wavelet, true)?;
            let history = history.expect("history requested");
            let obs = &observed[shot];
            let n = sim.pressure.len();
            let mut res_p = vec![0.0; n];
            let mut res_vz = vec![0.0; n];
            let mut e = 0.0;
            for u in 0..n {
                res_p[u] = sim.pressure[u] - obs.pressure[u];
                res_vz[u] = sim.vz[u] - obs.vz[u];
                e += res_p[u] * res_p[u] + res_vz[u] * res_vz[u];
            }
            let grad =
                stepper.adjoint_velocity_gradient(model, wavelet, &history, &res_p, &res_vz)?;
            let energy = history.interior_energy(nz, nx, pml);
            Ok((grad, energy, 0.5 * e))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut gradient = vec![0.0; nz * nx];
    let mut source_energy = vec![0.0; nz * nx];
    let mut data_misfit = 0.0;
    for (g, en, e) in per_shot {
        for u in 0..gradient.len() {
            gradient[u] += g[u];
            source_energy[u] += en[u];
        }
        data_misfit += e;
    }

    let mut total = data_misfit;
    if lambda_reg != 0.0 {
        let rg = reg.gradient(model.values(), nz, nx);
        for u in 0..gradient.len() {
            gradient[u] += lambda_reg * rg[u];
        }
        total += lambda_reg * reg.value(model.values(), nz, nx);
    }

    Ok(ObjectiveEval { gradient, source_energy, misfit: total })
}
