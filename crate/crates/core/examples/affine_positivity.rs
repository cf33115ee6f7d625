//! Orbit data on the affine group: the sign of `p` for `J(q, p) = (qp, p)`.
//!
//! Collective midpoint maps never move a point between orbits, so the open
//! half-plane `p > 0` and the line `p = 0` are both respected at moderate
//! steps. A step too large to resolve the motion lets a point cross.
//!
//! ```bash
//! cargo run --release --example affine_positivity
//! ```

use collective::diagnostics::sign_pattern;
use collective::prelude::*;

fn main() -> Result<()> {
    let r = AffineA1;
    // H = w₁ + ½w₂²
    let h = Polynomial::new(
        2,
        vec![
            Monomial { coefficient: 1.0, powers: vec![1, 0] },
            Monomial { coefficient: 0.5, powers: vec![0, 2] },
        ],
    )?;

    for (x0, dt) in [([0.5, 1.5], 0.1), ([2.0, 0.0], 0.1), ([0.5, 1.5], 1.5), ([0.5, 1.5], 3.0)] {
        let x0 = PhasePoint::new(x0.to_vec());
        let pattern = sign_pattern(&r, &x0, 1e-14);
        let traj = integrate(&r, &h, &x0, 0.0, 6.0, &IntegratorConfig::new(Method::Midpoint, dt))?;
        let report = orthant_check(&traj, &pattern);
        match report.first_violation {
            None => println!("x0 = {:?}, dt = {dt}: {:?} kept", x0.0, pattern[0].1),
            Some(v) => println!("x0 = {:?}, dt = {dt}: left the orbit at t = {}, p = {:.4}", x0.0, v.t, v.value),
        }
    }
    Ok(())
}
