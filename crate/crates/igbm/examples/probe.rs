use igbm::couplings::{Connectivity, CouplingSpec};
use igbm::meanfield::*;
use igbm::params::{KappaDist, ModelParams};
use std::time::Instant;

fn params(j0: f64, kappa0: f64) -> ModelParams {
    ModelParams {
        coupling: CouplingSpec {
            n: 2000,
            connectivity: Connectivity::Full,
            j0,
            j: 0.5,
            alpha: 0.5,
            hebbian_p: 0,
        },
        i0: 0.0,
        sigma_i2: 0.1,
        sigma: 0.1,
        sigma0: 1.0,
        gamma: 1e-4,
        kappa: KappaDist::Gamma { kappa0, nu: 1.0 },
    }
}

fn main() {
    let sizes = GridSizes::default();
    let t0 = Instant::now();

    // Fig. 1-style curve at kappa0 = 0.2.
    for &k0 in &[0.2, 0.7, 1.2] {
        let p = params(0.5, k0);
        let grid = ThetaGrid::new(&p.kappa, sizes).unwrap();
        let mut ctrl = FixedPointCtrl::default();
        for &u0 in &[0.0, 0.5, 1.0, 2.0, 3.0] {
            let t = Instant::now();
            match solve_fixed_point(&p, u0, &grid, &ctrl) {
                Ok(res) => {
                    println!(
                        "k0={k0} u0={u0}: m={:.5} q={:.5} chi={:.5} C0={:.5} iters={} ({:.2?})",
                        res.op.m, res.op.q, res.op.chi, res.op.chat0, res.iters, t.elapsed()
                    );
                    ctrl.init = Some(res.op.clone());
                }
                Err(e) => println!("k0={k0} u0={u0}: ERROR {e}"),
            }
        }
        ctrl.init = None;
    }
    println!("fig1 total: {:.2?}", t0.elapsed());

    // Phase boundary at kappa0 = 0.2 (Fig. 2 reports ~0.75).
    let t1 = Instant::now();
    let tpl = params(0.5, 0.2);
    let ctrl = FixedPointCtrl { max_iter: 800, tol: 1e-8, ..Default::default() };
    let curve = phase_boundary_curve(&tpl, &[0.2, 0.45, 0.7, 0.95, 1.2], (0.3, 1.8), 1e-3, sizes, &ctrl)
        .unwrap();
    for (k0, j0c) in curve {
        println!("kappa0={k0}: J0c={j0c:?}");
    }
    println!("boundary total: {:.2?}", t1.elapsed());
}
