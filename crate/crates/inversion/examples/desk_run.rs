//! Scratch desk experiment: two-layer recovery at acceptance scale.
//! Run: cargo run --release -p inversion --example desk_run [lambda] [sigma]

use inversion::{invert, simulate_observed, ForwardSpec, InversionConfig, Regularizer};
use wavesim::{ricker, Acquisition, Grid2D, VelocityModel};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lambda: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let sigma: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(8.0);

    let grid = Grid2D::new(64, 64, 5.0, 10).unwrap();
    let mut v = vec![2000.0; grid.n_cells()];
    for i in 32..64 {
        for j in 0..64 {
            v[i * 64 + j] = 3000.0;
        }
    }
    let truth = VelocityModel::new(grid, v).unwrap();
    let geom = args.get(3).map(|s| s.as_str()).unwrap_or("surface");
    let f0: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(15.0);
    let acq = match geom {
        "surface" => Acquisition::surface(&grid, 3, 32, 1000, 1e-3).unwrap(),
        "rich" => {
            // top sources, receivers along top and down both sides
            let sources = vec![(0, 10), (0, 32), (0, 53)];
            let mut receivers: Vec<(usize, usize)> = (0..32).map(|r| (0, 2 * r + 1)).collect();
            receivers.extend((1..32).map(|r| (2 * r, 0)));
            receivers.extend((1..32).map(|r| (2 * r, 63)));
            Acquisition::new(sources, receivers, 1000, 1e-3).unwrap()
        }
        "cross" => {
            // sources on top and sides, side curtains of receivers
            let sources = vec![(0, 10), (0, 32), (0, 53), (20, 0), (40, 0), (20, 63), (40, 63)];
            let mut receivers: Vec<(usize, usize)> = (0..32).map(|r| (0, 2 * r + 1)).collect();
            receivers.extend((1..32).map(|r| (2 * r, 0)));
            receivers.extend((1..32).map(|r| (2 * r, 63)));
            Acquisition::new(sources, receivers, 1000, 1e-3).unwrap()
        }
        other => panic!("unknown geometry {other}"),
    };
    let w = ricker(f0, 1.5 / f0, 1e-4, 8000).unwrap();
    let fwd = ForwardSpec::for_bound(5.0, 4500.0);
    let observed = simulate_observed(&truth, &acq, &w, &fwd).unwrap();

    let m0 = truth.smoothed(sigma);
    let initial_mae = m0.mae(&truth);

    let mut cfg = InversionConfig::new((1500.0, 4500.0));
    cfg.max_iters = 30;
    cfg.lambda_reg = lambda;
    cfg.regularizer = Regularizer::Tv { epsilon: 1.0 };
    cfg.precondition = true;
    cfg.truth_for_reporting = Some(truth.clone());

    let t = std::time::Instant::now();
    let (result, state) = invert(&observed, &acq, &w, &m0, &cfg).unwrap();
    let final_mae = result.mae(&truth);
    println!(
        "lambda={lambda:.3e} sigma={sigma} initial_mae={initial_mae:.3} final_mae={final_mae:.3} ratio={:.3} iters={} stagnated={} elapsed={:.1}s",
        final_mae / initial_mae,
        state.iterations,
        state.stagnated,
        t.elapsed().as_secs_f64()
    );
    for r in state.rows.iter().step_by(5) {
        println!(
            "  iter {:2}  misfit {:.3e}  |g| {:.3e}  step {:.3e}  mae {:.2}",
            r.iter,
            r.misfit,
            r.grad_norm,
            r.step,
            r.model_mae.unwrap()
        );
    }
}
