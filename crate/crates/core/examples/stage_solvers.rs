//! The nonlinear solvers behind the implicit stages, used directly.
//!
//! ```bash
//! cargo run --release --example stage_solvers
//! ```

use collective::solver::{fixed_point, newton, JacobianSource};

fn main() {
    // y = cos y by iteration
    let (y, rep) = fixed_point(|y: &[f64], out: &mut [f64]| out[0] = y[0].cos(), &[0.0], 1e-13, 200);
    println!("fixed point: y = {:.15} after {} iterations", y[0], rep.iterations);

    // y - cos y = 0 by Newton with a finite-difference Jacobian
    let (y, rep) = newton(
        |y: &[f64], out: &mut [f64]| out[0] = y[0] - y[0].cos(),
        &[0.0],
        1e-13,
        50,
        JacobianSource::FiniteDifference(None),
    );
    println!("newton:      y = {:.15} after {} iterations", y[0], rep.iterations);

    // no real root: Newton stops and says why
    let (_, rep) = newton(
        |y: &[f64], out: &mut [f64]| out[0] = y[0] * y[0] + 1.0,
        &[0.5],
        1e-13,
        500,
        JacobianSource::FiniteDifference(None),
    );
    println!("y² + 1 = 0:  converged = {}, failure = {:?}", rep.converged, rep.failure);
}
