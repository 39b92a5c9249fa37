//! Behavior of the descent loop: self-consistency at the truth, descent
//! guarantees, preconditioner properties, bound handling, and a small
//! two-layer recovery run.

use wavesim::{ricker, Acquisition, Grid2D, SourceWavelet, VelocityModel};

use inversion::{
    invert, misfit, objective_gradient, precondition, simulate_observed, ForwardSpec,
    InversionConfig, Regularizer,
};

fn two_layer(nz: usize, nx: usize, v_top: f64, v_bot: f64, interface: usize) -> VelocityModel {
    let grid = Grid2D::new(nz, nx, 5.0, 10).unwrap();
    let mut v = vec![v_top; grid.n_cells()];
    for i in interface..nz {
        for j in 0..nx {
            v[i * nx + j] = v_bot;
        }
    }
    VelocityModel::new(grid, v).unwrap()
}

fn test_wavelet() -> SourceWavelet {
    ricker(25.0, 1.5 / 25.0, 1e-4, 4000).unwrap()
}

#[test]
fn misfit_is_zero_at_the_generating_model() {
    let m = two_layer(64, 64, 1800.0, 2800.0, 32);
    let acq = Acquisition::surface(&m.grid, 2, 24, 400, 1e-3).unwrap();
    let w = test_wavelet();
    let fwd = ForwardSpec::for_bound(5.0, 4500.0);
    let observed = simulate_observed(&m, &acq, &w, &fwd).unwrap();
    let e = misfit(&m, &observed, &acq, &w, 0.0, &Regularizer::L2, &fwd).unwrap();
    assert!(e <= 1e-12, "self-misfit {e}");

    // and any perturbation must raise it
    let mut worse = m.clone();
    for v in worse.values_mut() {
        *v += 200.0;
    }
    let e2 = misfit(&worse, &observed, &acq, &w, 0.0, &Regularizer::L2, &fwd).unwrap();
    assert!(e2 > 1e-12, "perturbed misfit {e2} not meaningfully larger than {e}");
}

#[test]
fn zero_residual_gives_zero_gradient_and_immediate_stop() {
    let m = two_layer(48, 48, 1800.0, 2600.0, 24);
    let acq = Acquisition::surface(&m.grid, 2, 16, 300, 1e-3).unwrap();
    let w = test_wavelet();
    let fwd = ForwardSpec::for_bound(5.0, 4500.0);
    let observed = simulate_observed(&m, &acq, &w, &fwd).unwrap();

    let eval = objective_gradient(&m, &observed, &acq, &w, 0.0, &Regularizer::L2, &fwd).unwrap();
    assert!(eval.gradient.iter().all(|g| *g == 0.0));

    let mut cfg = InversionConfig::new((1500.0, 4500.0));
    cfg.lambda_reg = 0.0;
    cfg.max_iters = 5;
    let (result, state) = invert(&observed, &acq, &w, &m, &cfg).unwrap();
    assert_eq!(state.iterations, 1);
    let gnorm: f64 = state.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
    assert!(gnorm < 1e-8, "gradient norm {gnorm}");
    assert_eq!(result.values(), m.values());
}

#[test]
fn preconditioner_scaling_properties() {
    // uniform energy: pure rescaling, argmax preserved
    let g = vec![1.0, -4.0, 2.0, 0.5];
    let e = vec![3.0; 4];
    let p = precondition(&g, &e);
    let scale = p[0] / g[0];
    for (a, b) in g.iter().zip(&p) {
        assert!((b - a * scale).abs() < 1e-15);
    }
    // zero gradient stays zero
    let z = precondition(&[0.0; 4], &e);
    assert!(z.iter().all(|x| *x == 0.0));
    // sign pattern survives arbitrary positive energies
    let e2 = vec![0.1, 40.0, 2.0, 7.0];
    let p2 = precondition(&g, &e2);
    for (a, b) in g.iter().zip(&p2) {
        assert_eq!(a.signum(), b.signum());
    }
}

#[test]
fn preconditioning_boosts_poorly_illuminated_depth() {
    // Homogeneous trial model against two-layer data: the raw gradient
    // decays with depth from geometric spreading; after energy division the
    // deep rows must gain relative to shallow rows.
    let truth = two_layer(64, 64, 2000.0, 3000.0, 40);
    let start = VelocityModel::constant(truth.grid, 2000.0).unwrap();
    let acq = Acquisition::surface(&truth.grid, 3, 32, 500, 1e-3).unwrap();
    let w = test_wavelet();
    let fwd = ForwardSpec::for_bound(5.0, 4500.0);
    let observed = simulate_observed(&truth, &acq, &w, &fwd).unwrap();

    let eval =
        objective_gradient(&start, &observed, &acq, &w, 0.0, &Regularizer::L2, &fwd).unwrap();
    let pre = precondition(&eval.gradient, &eval.source_energy);

    let row_mean = |v: &[f64], row: usize| -> f64 {
        (0..64).map(|j| v[row * 64 + j].abs()).sum::<f64>() / 64.0
    };
    let raw_ratio = row_mean(&eval.gradient, 50) / row_mean(&eval.gradient, 10);
    let pre_ratio = row_mean(&pre, 50) / row_mean(&pre, 10);
    assert!(
        pre_ratio > raw_ratio,
        "deep/shallow ratio did not improve: raw {raw_ratio:.3e}, preconditioned {pre_ratio:.3e}"
    );
}

#[test]
fn two_layer_recovery_improves_and_descends() {
    let truth = two_layer(48, 48, 1900.0, 2700.0, 24);
    let acq = Acquisition::surface(&truth.grid, 3, 24, 400, 1e-3).unwrap();
    let w = test_wavelet();
    let fwd = ForwardSpec::for_bound(5.0, 4500.0);
    let observed = simulate_observed(&truth, &acq, &w, &fwd).unwrap();

    let m0 = truth.smoothed(6.0);
    let initial_mae = m0.mae(&truth);

    // The regularization weight balances the data term (whose scale follows
    // the source amplitude) against TV in model units; it must be tiny here.
    let mut cfg = InversionConfig::new((1500.0, 4500.0));
    cfg.max_iters = 10;
    cfg.lambda_reg = 1e-15;
    cfg.regularizer = Regularizer::Tv { epsilon: 1.0 };
    cfg.precondition = true;
    cfg.truth_for_reporting = Some(truth.clone());
    let (result, state) = invert(&observed, &acq, &w, &m0, &cfg).unwrap();

    let final_mae = result.mae(&truth);
    assert!(
        final_mae < initial_mae,
        "no improvement: initial {initial_mae:.2}, final {final_mae:.2}"
    );
    for pair in state.misfit_history.windows(2) {
        assert!(pair[1] < pair[0], "misfit not strictly decreasing: {pair:?}");
    }
    assert!(result.v_min() >= 1500.0 && result.v_max() <= 4500.0);
    assert!(state.rows.iter().all(|r| r.model_mae.is_some()));
}

#[test]
fn armijo_inequality_holds_without_preconditioning() {
    let truth = two_layer(32, 32, 1900.0, 2500.0, 16);
    let acq = Acquisition::surface(&truth.grid, 2, 16, 250, 1e-3).unwrap();
    let w = test_wavelet();
    let fwd = ForwardSpec::for_bound(5.0, 4500.0);
    let observed = simulate_observed(&truth, &acq, &w, &fwd).unwrap();

    let m0 = truth.smoothed(5.0);
    let mut cfg = InversionConfig::new((1500.0, 4500.0));
    cfg.max_iters = 6;
    cfg.precondition = false;
    let (_, state) = invert(&observed, &acq, &w, &m0, &cfg).unwrap();

    let c1 = cfg.line_search.c1;
    // With the raw negative gradient as direction, the accepted decrease is
    // at least c1 * step * ||grad||^2.
    for (k, row) in state.rows.iter().enumerate() {
        if row.step > 0.0 {
            let before = state.misfit_history[k];
            let after = state.misfit_history[k + 1];
            assert!(
                after <= before - c1 * row.step * row.grad_norm * row.grad_norm + 1e-12,
                "iter {k}: {after} vs {before}"
            );
        }
    }
}

#[test]
fn rejects_out_of_bounds_start() {
    let m = two_layer(32, 32, 1000.0, 2500.0, 16);
    let acq = Acquisition::surface(&m.grid, 1, 8, 100, 1e-3).unwrap();
    let w = test_wavelet();
    let fwd = ForwardSpec::for_bound(5.0, 4500.0);
    let observed = simulate_observed(&m, &acq, &w, &fwd).unwrap();
    let cfg = InversionConfig::new((1500.0, 4500.0));
    assert!(invert(&observed, &acq, &w, &m, &cfg).is_err());
}
