//! A reference solution with a verified error bound, checked against the
//! closed-form precession of an axisymmetric rigid body.
//!
//! ```bash
//! cargo run --release --example reference_solution
//! ```

use collective::oracle::axisymmetric_precession;
use collective::prelude::*;

fn main() -> Result<()> {
    let w0 = [0.6, 0.0, 0.8];
    let r = HopfSo3;
    let x0 = lift(&r, &DualElement::new(w0.to_vec()))?;
    for c in [0.2, 1.5] {
        let h = RigidBody::new(vec![0.5, 0.5, c]);
        let reference = reference_solve(&r, &h, &x0, 0.0, 10.0, 1e-12)?;
        let exact = axisymmetric_precession(&w0, c, 10.0);
        let err = reference.w.iter().zip(exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "c = {c}: {} steps, estimated accuracy {:.1e}, error vs closed form {err:.1e}",
            reference.steps, reference.accuracy
        );
    }
    // asking for less than roundoff allows is an error, not a silent stall
    match reference_solve(&r, &RigidBody::reference(), &x0, 0.0, 1.0, 1e-14) {
        Err(e) => println!("tol 1e-14: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
