//! Gaussian-kernel landmark geodesics in the plane.
//!
//! The realization maps `n` landmarks with momenta to a momentum density on
//! the diffeomorphism group; the collective Hamiltonian is the kernel metric.
//! Translation and rotation symmetry give conserved total momentum and total
//! angular momentum.
//!
//! ```bash
//! cargo run --release --example landmarks
//! ```

use collective::prelude::*;

fn main() -> Result<()> {
    let width = 1.0;
    let r = Landmarks::new(2, 3, width)?;
    let h = landmark_collective_hamiltonian(2, 3, width);
    // three landmarks on a triangle, then their momenta
    let x0 = PhasePoint::new(vec![
        1.0, 0.0, -0.5, 0.866, -0.5, -0.866,
        0.05, 0.225, -0.123, -0.075, 0.223, -0.075,
    ]);

    let traj = integrate(&r, &h, &x0, 0.0, 30.0, &IntegratorConfig::new(Method::Gauss(2), 0.05))?;
    println!("energy drift {:.2e}", energy_drift(&traj, &h).max_abs_deviation);
    for report in invariant_drift(&traj, &r) {
        println!("{:<12} drift {:.2e}", report.quantity, report.max_abs_deviation);
    }
    let end = &traj.last().unwrap().x;
    for i in 0..3 {
        println!("landmark {i} ends at ({:+.4}, {:+.4})", end[2 * i], end[2 * i + 1]);
    }
    Ok(())
}
