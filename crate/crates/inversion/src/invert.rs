//! Preconditioned steepest-descent loop with Armijo backtracking.

use wavesim::{Acquisition, ShotRecord, SourceWavelet, VelocityModel};

use crate::adjoint::{misfit, objective_gradient};
use crate::{ForwardSpec, InvertError, Regularizer, Result};

#[derive(Debug, Clone, Copy)]
pub struct LineSearchParams {
    pub c1: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self { c1: 1e-4, shrink: 0.5, max_backtracks: 12 }
    }
}

#[derive(Debug, Clone)]
pub struct InversionConfig {
    pub max_iters: usize,
    pub lambda_reg: f64,
    pub regularizer: Regularizer,
    pub precondition: bool,
    pub line_search: LineSearchParams,
    /// Velocity box constraints in m/s; iterates are clamped on accept and
    /// the frozen forward step is CFL-safe for the upper bound.
    pub v_bounds: (f64, f64),
    /// Ground truth for per-iteration error reporting only; never steers
    /// the optimization.
    pub truth_for_reporting: Option<VelocityModel>,
}

impl InversionConfig {
    pub fn new(v_bounds: (f64, f64)) -> Self {
        Self {
            max_iters: 30,
            lambda_reg: 0.0,
            regularizer: Regularizer::Tv { epsilon: 1.0 },
            precondition: true,
            line_search: LineSearchParams::default(),
            v_bounds,
            truth_for_reporting: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterRow {
    pub iter: usize,
    pub misfit: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub model_mae: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct InversionState {
    pub model: VelocityModel,
    pub misfit_history: Vec<f64>,
    /// Objective gradient at the final iterate.
    pub gradient: Vec<f64>,
    /// Last accepted step length (0 when no step was taken).
    pub step: f64,
    pub iterations: usize,
    /// Line search exhausted at the minimum step before max_iters.
    pub stagnated: bool,
    pub rows: Vec<IterRow>,
}

/// Wave-energy preconditioner: divides the gradient by the forward energy
/// plus a floor of 1e-3 of its maximum. Positive elementwise scaling, so
/// sign patterns survive; deep cells (weak illumination) get boosted
/// relative to shallow ones.
pub fn precondition(gradient: &[f64], source_energy: &[f64]) -> Vec<f64> {
    assert_eq!(gradient.len(), source_energy.len());
    let max_e = source_energy.iter().cloned().fold(0.0f64, f64::max);
    if max_e <= 0.0 {
        return gradient.to_vec();
    }
    let floor = 1e-3 * max_e;
    gradient
        .iter()
        .zip(source_energy.iter())
        .map(|(g, e)| g / (e + floor))
        .collect()
}

fn clamp_model(m: &mut VelocityModel, bounds: (f64, f64)) {
    for v in m.values_mut() {
        *v = v.clamp(bounds.0, bounds.1);
    }
}

pub fn invert(
    observed: &[ShotRecord],
    acq: &Acquisition,
    wavelet: &SourceWavelet,
    m0: &VelocityModel,
    cfg: &InversionConfig,
) -> Result<(VelocityModel, InversionState)> {
    invert_with_observer(observed, acq, wavelet, m0, cfg, |_, _, _| {})
}

/// Same as [`invert`] with a per-accepted-iterate callback
/// `(iteration, model, row)` for snapshotting or progress display.
pub fn invert_with_observer<F>(
    observed: &[ShotRecord],
    acq: &Acquisition,
    wavelet: &SourceWavelet,
    m0: &VelocityModel,
    cfg: &InversionConfig,
    mut observer: F,
) -> Result<(VelocityModel, InversionState)>
where
    F: FnMut(usize, &VelocityModel, &IterRow),
{
    let (lo, hi) = cfg.v_bounds;
    if !(lo < hi) {
        return Err(InvertError::InvalidArgument(format!("bad velocity bounds ({lo}, {hi})")));
    }
    if m0.v_min() < lo || m0.v_max() > hi {
        return Err(InvertError::InvalidArgument(
            "initial model violates the velocity bounds".into(),
        ));
    }
    let fwd = ForwardSpec::for_bound(m0.grid.dx, hi);

    let mut model = m0.clone();
    let mut history = Vec::new();
    let mut rows: Vec<IterRow> = Vec::new();
    let mut stagnated = false;
    let mut last_step = 0.0f64;
    let mut current_misfit: Option<f64> = None;
    let mut gradient = vec![0.0; model.grid.n_cells()];

    for iter in 0..cfg.max_iters {
        let eval = objective_gradient(
            &model,
            observed,
            acq,
            wavelet,
            cfg.lambda_reg,
            &cfg.regularizer,
            &fwd,
        )?;
        gradient = eval.gradient.clone();
        let misfit_k = current_misfit.unwrap_or(eval.misfit);
        if history.is_empty() {
            history.push(misfit_k);
        }

        let grad_norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm == 0.0 {
            let row = IterRow {
                iter,
                misfit: misfit_k,
                grad_norm,
                step: 0.0,
                model_mae: cfg.truth_for_reporting.as_ref().map(|t| model.mae(t)),
            };
            observer(iter, &model, &row);
            rows.push(row);
            break;
        }

        let direction: Vec<f64> = if cfg.precondition {
            precondition(&gradient, &eval.source_energy).iter().map(|g| -g).collect()
        } else {
            gradient.iter().map(|g| -g).collect()
        };
        // Directional derivative of the objective along the step.
        let slope: f64 = gradient.iter().zip(&direction).map(|(g, d)| g * d).sum();
        debug_assert!(slope < 0.0);

        let d_max = direction.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let mut alpha = if last_step > 0.0 {
            2.0 * last_step
        } else {
            // First trial moves the largest cell by 5% of the velocity range.
            0.05 * (hi - lo) / d_max
        };

        let mut accepted = None;
        for _ in 0..=cfg.line_search.max_backtracks {
            let mut trial = model.clone();
            for (v, d) in trial.values_mut().iter_mut().zip(&direction) {
                *v += alpha * d;
            }
            clamp_model(&mut trial, cfg.v_bounds);
            let trial_misfit = misfit(
                &trial,
                observed,
                acq,
                wavelet,
                cfg.lambda_reg,
                &cfg.regularizer,
                &fwd,
            )?;
            if trial_misfit <= misfit_k + cfg.line_search.c1 * alpha * slope {
                accepted = Some((trial, trial_misfit));
                break;
            }
            alpha *= cfg.line_search.shrink;
        }

        match accepted {
            Some((next, next_misfit)) => {
                model = next;
                current_misfit = Some(next_misfit);
                history.push(next_misfit);
                last_step = alpha;
                let row = IterRow {
                    iter,
                    misfit: next_misfit,
                    grad_norm,
                    step: alpha,
                    model_mae: cfg.truth_for_reporting.as_ref().map(|t| model.mae(t)),
                };
                observer(iter, &model, &row);
                rows.push(row);
            }
            None => {
                stagnated = true;
                let row = IterRow {
                    iter,
                    misfit: misfit_k,
                    grad_norm,
                    step: 0.0,
                    model_mae: cfg.truth_for_reporting.as_ref().map(|t| model.mae(t)),
                };
                observer(iter, &model, &row);
                rows.push(row);
                break;
            }
        }
    }

    let iterations = rows.len();
    let state = InversionState {
        model: model.clone(),
        misfit_history: history,
        gradient,
        step: last_step,
        iterations,
        stagnated,
        rows,
    };
    Ok((model, state))
}
