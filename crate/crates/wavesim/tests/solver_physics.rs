//! Physics-level checks of the forward solver: null source, linearity,
//! travel times, absorbing-boundary quality, CFL robustness, lateral
//! shift symmetry, and the instability error path.

use wavesim::{
    residual_energy, ricker, simulate_shot, simulate_shot_opts, stable_dt, Acquisition, Grid2D,
    SimOptions, VelocityModel, WaveError,
};

fn homogeneous(nz: usize, nx: usize, v: f64, pml: usize) -> VelocityModel {
    let grid = Grid2D::new(nz, nx, 5.0, pml).unwrap();
    VelocityModel::constant(grid, v).unwrap()
}

#[test]
fn stable_dt_matches_reference_values() {
    // 0.9 * 5 / (4500 * sqrt(2))
    let m = homogeneous(16, 16, 4500.0, 0);
    let dt = stable_dt(&m, 0.9);
    assert!((dt - 7.0711e-4).abs() < 1e-7, "dt = {dt}");

    // unit-cancellation case: dx = 5, v_max = 5, safety = 1 -> 1/sqrt(2)
    let m = homogeneous(16, 16, 5.0, 0);
    let dt = stable_dt(&m, 1.0);
    assert!((dt - 1.0 / std::f64::consts::SQRT_2).abs() < 1e-12);

    // doubling dx doubles dt
    let g1 = Grid2D::new(16, 16, 5.0, 0).unwrap();
    let g2 = Grid2D::new(16, 16, 10.0, 0).unwrap();
    let m1 = VelocityModel::constant(g1, 3000.0).unwrap();
    let m2 = VelocityModel::constant(g2, 3000.0).unwrap();
    assert!((stable_dt(&m2, 0.9) - 2.0 * stable_dt(&m1, 0.9)).abs() < 1e-15);
}

#[test]
fn zero_wavelet_gives_zero_record() {
    let m = homogeneous(32, 32, 3000.0, 10);
    let acq = Acquisition::surface(&m.grid, 1, 8, 200, 1e-3).unwrap();
    let w = ricker(50.0, 0.03, 1e-4, 2000).unwrap().zeroed();
    let (rec, _) = simulate_shot(&m, &acq, 0, &w, false).unwrap();
    assert_eq!(rec.max_abs(), 0.0);
}

#[test]
fn source_linearity() {
    let m = homogeneous(48, 48, 2500.0, 10);
    let acq = Acquisition::surface(&m.grid, 1, 12, 300, 1e-3).unwrap();
    let w = ricker(40.0, 0.04, 1e-4, 4000).unwrap();
    let (base, _) = simulate_shot(&m, &acq, 0, &w, false).unwrap();
    let (doubled, _) = simulate_shot(&m, &acq, 0, &w.scaled(2.0), false).unwrap();
    let (negated, _) = simulate_shot(&m, &acq, 0, &w.scaled(-1.0), false).unwrap();

    let scale = base.max_abs();
    assert!(scale > 0.0);
    for u in 0..base.pressure.len() {
        assert!((doubled.pressure[u] - 2.0 * base.pressure[u]).abs() <= 1e-10 * scale);
        assert!((negated.pressure[u] + base.pressure[u]).abs() <= 1e-10 * scale);
        assert!((doubled.vz[u] - 2.0 * base.vz[u]).abs() <= 1e-10 * scale);
    }
}

#[test]
fn first_break_travel_time_in_homogeneous_medium() {
    // Receivers 300 m apart along a line from the source at v = 3000 m/s:
    // the differential arrival is 0.1 s. Differencing two offsets cancels
    // the constant phase shift a 2D cylindrical wave puts on the waveform
    // (which biases any absolute single-trace pick by a fraction of a
    // period).
    let v = 3000.0;
    let m = homogeneous(80, 200, v, 10);
    let dt_out = 1e-3;
    let acq = Acquisition::new(
        vec![(40, 20)],
        vec![(40, 50), (40, 110)], // offsets 150 m and 450 m
        350,
        dt_out,
    )
    .unwrap();
    let f0 = 30.0;
    let w = ricker(f0, 1.5 / f0, 1e-4, 4000).unwrap();
    let (rec, _) = simulate_shot(&m, &acq, 0, &w, false).unwrap();

    // Lag maximizing the cross-correlation of the far trace with the near.
    let mut best = (0usize, f64::MIN);
    for lag in 0..rec.n_time {
        let mut c = 0.0;
        for k in 0..rec.n_time - lag {
            c += rec.p(1, k + lag) * rec.p(0, k);
        }
        if c > best.1 {
            best = (lag, c);
        }
    }
    let picked = best.0 as f64 * dt_out;
    let expected = 300.0 / v;
    assert!(
        (picked - expected).abs() <= 2.0 * dt_out + 1e-12,
        "picked differential arrival {picked}, expected {expected}"
    );

    // Coarse absolute check on the near trace: the matched-filter pick must
    // sit within half a period of the geometric arrival at 150 m.
    let wav_out = ricker(f0, 1.5 / f0, dt_out, 350).unwrap();
    let mut abs_best = (0usize, f64::MIN);
    for lag in 0..rec.n_time {
        let mut c = 0.0;
        for k in 0..rec.n_time - lag {
            c += rec.p(0, k + lag) * wav_out.samples[k];
        }
        if c > abs_best.1 {
            abs_best = (lag, c);
        }
    }
    let abs_picked = abs_best.0 as f64 * dt_out;
    assert!(
        (abs_picked - 150.0 / v).abs() <= 0.5 / f0,
        "absolute pick {abs_picked} too far from {}",
        150.0 / v
    );
}

#[test]
fn pml_absorbs_edge_reflections() {
    // Same interior, same shot; absorbing vs hard edges. The trailing-window
    // energy ratio bounds the PML reflectivity.
    let interior = 100;
    let absorbing = homogeneous(interior, interior, 2000.0, 10);
    let reflecting = homogeneous(interior, interior, 2000.0, 0);
    let acq = Acquisition::surface(&absorbing.grid, 1, 16, 1000, 1e-3).unwrap();
    let w = ricker(25.0, 0.06, 1e-4, 8000).unwrap();

    let (rec_pml, _) = simulate_shot(&absorbing, &acq, 0, &w, false).unwrap();
    let (rec_hard, _) = simulate_shot(&reflecting, &acq, 0, &w, false).unwrap();

    let e_pml = residual_energy(&rec_pml);
    let e_hard = residual_energy(&rec_hard);
    assert!(e_hard > 0.0);
    assert!(e_pml >= 0.0);
    let ratio = e_pml / e_hard;
    assert!(ratio < 1e-3, "PML/reflecting energy ratio {ratio:.3e}");
}

#[test]
fn residual_energy_of_zero_record_is_zero() {
    let rec = wavesim::ShotRecord::zeros(4, 100, 1e-3);
    assert_eq!(residual_energy(&rec), 0.0);
}

#[test]
fn long_run_stays_finite_on_layered_model() {
    // 2000 steps at the 0.9-safety CFL step on a strongly contrasted model.
    let grid = Grid2D::new(64, 64, 5.0, 10).unwrap();
    let mut v = vec![1500.0; grid.n_cells()];
    for i in 20..40 {
        for j in 0..64 {
            v[i * 64 + j] = 3200.0;
        }
    }
    for i in 40..64 {
        for j in 0..64 {
            v[i * 64 + j] = 4500.0;
        }
    }
    let m = VelocityModel::new(grid, v).unwrap();
    let dt = stable_dt(&m, 0.9);
    let dt_out = dt; // one output sample per internal step -> 2000 steps
    let acq = Acquisition::surface(&m.grid, 1, 16, 2001, dt_out).unwrap();
    let w = ricker(50.0, 0.03, 1e-4, 2000).unwrap();
    let (rec, hist) = simulate_shot(&m, &acq, 0, &w, true).unwrap();
    assert!(rec.is_finite());
    let h = hist.unwrap();
    assert_eq!(h.frames.len(), 2001);
    assert!(h.frames.last().unwrap().iter().all(|x| x.is_finite()));
}

#[test]
fn lateral_source_shift_shifts_traces() {
    // Laterally homogeneous (depth-layered) model, receivers at every
    // column: shifting the source k columns shifts the traces k receivers.
    // The record is short enough that edge effects stay below round-off.
    let grid = Grid2D::new(48, 192, 5.0, 10).unwrap();
    let mut v = vec![1800.0; grid.n_cells()];
    for i in 24..48 {
        for j in 0..192 {
            v[i * 192 + j] = 2600.0;
        }
    }
    let m = VelocityModel::new(grid, v).unwrap();
    let receivers: Vec<(usize, usize)> = (0..192).map(|j| (0, j)).collect();
    let shift = 7usize;
    let acq1 = Acquisition::new(vec![(0, 80)], receivers.clone(), 150, 1e-3).unwrap();
    let acq2 = Acquisition::new(vec![(0, 80 + shift)], receivers, 150, 1e-3).unwrap();
    let w = ricker(40.0, 0.03, 1e-4, 2000).unwrap();
    let (r1, _) = simulate_shot(&m, &acq1, 0, &w, false).unwrap();
    let (r2, _) = simulate_shot(&m, &acq2, 0, &w, false).unwrap();

    let scale = r1.max_abs();
    assert!(scale > 0.0);
    for r in 40..120 {
        for k in 0..150 {
            let a = r1.p(r, k);
            let b = r2.p(r + shift, k);
            assert!(
                (a - b).abs() <= 1e-9 * scale,
                "mismatch at receiver {r}, sample {k}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn unstable_time_step_reports_step_index() {
    let m = homogeneous(32, 32, 3000.0, 10);
    let acq = Acquisition::surface(&m.grid, 1, 8, 1500, 1e-3).unwrap();
    let w = ricker(50.0, 0.03, 1e-4, 2000).unwrap();
    // Far beyond the CFL limit: exponential growth overflows mid-run.
    let bad_dt = stable_dt(&m, 1.0) * 2.0;
    let err = simulate_shot_opts(
        &m,
        &acq,
        0,
        &w,
        SimOptions { save_wavefield: false, dt: Some(bad_dt) },
    )
    .unwrap_err();
    match err {
        WaveError::Instability { step } => assert!(step > 0),
        other => panic!("expected instability, got {other:?}"),
    }
}

#[test]
fn shot_index_out_of_range_is_rejected() {
    let m = homogeneous(32, 32, 3000.0, 10);
    let acq = Acquisition::surface(&m.grid, 2, 8, 100, 1e-3).unwrap();
    let w = ricker(50.0, 0.03, 1e-4, 100).unwrap();
    assert!(matches!(
        simulate_shot(&m, &acq, 5, &w, false),
        Err(WaveError::InvalidArgument(_))
    ));
}
