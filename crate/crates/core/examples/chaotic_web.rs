//! Stroboscopic map of a periodically driven Hamiltonian on the sphere.
//!
//! One period of `sin 4w₁ sin 4w₂ sin 4w₃ + ε w₁ sin² t` is 30 midpoint
//! steps. Iterates spread into a stochastic web around the separatrices of
//! the undriven system, yet every one of them stays on the unit sphere.
//!
//! ```bash
//! cargo run --release --example chaotic_web -- 2000
//! ```

use std::f64::consts::TAU;

use collective::integrators::{integrate_with, Sampling};
use collective::prelude::*;

fn main() -> Result<()> {
    let periods: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(500);
    let r = HopfSo3;
    let h = TrigProduct::driven(4.0, 0.01);
    let x0 = lift(&r, &DualElement::new(vec![1.0, 0.0, 0.0]))?;

    // the fixed-point map is not contractive at this step, so use Newton
    let cfg = IntegratorConfig::new(Method::Midpoint, TAU / 30.0)
        .with_solver(StageSolver::Newton)
        .with_stage_tol(1e-15);
    let field = CollectiveField::new(&r, &h)?;
    let traj = integrate_with(&field, &x0, 0.0, TAU * periods as f64, &cfg, Sampling { stride: 30 })?;

    let radius = traj
        .samples
        .iter()
        .map(|s| (s.w.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    println!("{} iterates, max | ‖w‖ - 1 | = {radius:.2e}", traj.len() - 1);
    for s in traj.samples.iter().skip(1).take(10) {
        println!("{:+.6} {:+.6} {:+.6}", s.w[0], s.w[1], s.w[2]);
    }
    Ok(())
}
