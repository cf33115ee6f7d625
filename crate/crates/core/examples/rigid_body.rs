//! Free rigid body on so(3)* through the Hopf realization on T*R².
//!
//! Integrates the same start with the implicit midpoint rule and with a
//! Gauss method, then reports how well `‖w‖²` and the energy are kept.
//!
//! ```bash
//! cargo run --release --example rigid_body
//! ```

use collective::prelude::*;

fn main() -> Result<()> {
    let r = HopfSo3;
    let h = RigidBody::reference();
    let x0 = lift(&r, &DualElement::new(vec![0.0, 0.6, 0.8]))?;

    for method in [Method::Midpoint, Method::Gauss(3)] {
        let cfg = IntegratorConfig::new(method, 0.05).with_stage_tol(1e-15);
        let traj = integrate(&r, &h, &x0, 0.0, 200.0, &cfg)?;
        let casimir = &casimir_drift(&traj, &r)[0];
        let energy = energy_drift(&traj, &h);
        let end = &traj.last().unwrap().w;
        println!("{:<10} w(200) = [{:+.6}, {:+.6}, {:+.6}]", method.label(), end[0], end[1], end[2]);
        println!("           {} drift {:.2e}, energy drift {:.2e}", casimir.quantity, casimir.max_abs_deviation, energy.max_abs_deviation);
        println!("           {:.2} stage iterations per step", traj.stats.mean_iterations());
    }
    Ok(())
}
