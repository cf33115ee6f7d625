//! A central force problem on T*R³, reduced to sl(2)* by `(‖q‖², ‖p‖², q·p)`.
//!
//! The Hamiltonian splits into kinetic and potential parts, so Störmer-Verlet
//! runs with explicit substeps. Angular momentum `q × p` is bilinear in the
//! `(q, p)` splitting and stays put to roundoff.
//!
//! ```bash
//! cargo run --release --example sl2_leapfrog
//! ```

use collective::integrators::{integrate_with, Sampling};
use collective::prelude::*;

fn main() -> Result<()> {
    let r = Sl2FromO3Invariants;
    // ½‖p‖² + ‖q‖² / 2 + ‖q‖⁴ / 20
    let h = CentralForce { potential: vec![0.0, 0.5, 0.05] };
    let x0 = PhasePoint::new(vec![1.0, 0.0, 0.0, 0.0, 0.8, 0.3]);

    let field = CollectiveField::new(&r, &h)?.assume_separable(true);
    let cfg = IntegratorConfig::new(Method::StormerVerlet, 0.01);
    let traj = integrate_with(&field, &x0, 0.0, 100.0, &cfg, Sampling { stride: 100 })?;

    for report in invariant_drift(&traj, &r) {
        println!("{:<8} drift {:.2e}", report.quantity, report.max_abs_deviation);
    }
    println!("energy   drift {:.2e} (bounded, second order in dt)", energy_drift(&traj, &h).max_abs_deviation);
    println!("casimir  drift {:.2e}", casimir_drift(&traj, &r)[0].max_abs_deviation);
    for s in traj.samples.iter().step_by(20) {
        println!("t = {:6.1}  w = [{:.5}, {:.5}, {:+.5}]", s.t, s.w[0], s.w[1], s.w[2]);
    }
    Ok(())
}
