//! Both legs of the two matrix dual pairs on `n × k` matrices.
//!
//! The same phase space carries momentum maps to o(n)* and sp(2k)*, or to
//! gl(n)* and gl(k)*. A Hamiltonian on one leg is collective for that leg and
//! leaves the other leg's momentum fixed, so those values show up here as
//! invariants. Casimirs of the integrated leg are conserved as well.
//!
//! ```bash
//! cargo run --release --example matrix_dual_pairs
//! ```

use collective::prelude::*;
use collective::realizations::{GeneralLinear, GeneralLinearSide, OrthoSymplectic, OrthoSymplecticSide};

/// `½ Σ cᵢ wᵢ²` with distinct weights, valid on any dual.
struct Weighted;

impl Hamiltonian for Weighted {
    fn value(&self, _t: f64, w: &[f64]) -> f64 {
        w.iter().enumerate().map(|(i, v)| 0.5 * (1.0 + 0.3 * i as f64) * v * v).sum()
    }
    fn gradient(&self, _t: f64, w: &[f64]) -> Vec<f64> {
        w.iter().enumerate().map(|(i, v)| (1.0 + 0.3 * i as f64) * v).collect()
    }
}

fn report(r: &dyn Realization, h: &dyn Hamiltonian) -> Result<()> {
    let n = r.phase_dim();
    let x0 = PhasePoint::new((0..n).map(|i| 0.4 * ((i as f64) * 1.7).sin()).collect());
    let traj = integrate(r, h, &x0, 0.0, 5.0, &IntegratorConfig::new(Method::Gauss(2), 0.02).with_stage_tol(1e-15))?;
    let worst = |reports: Vec<DriftReport>| reports.iter().map(|d| d.max_abs_deviation).fold(0.0, f64::max);
    println!(
        "{:<28} casimirs {:.1e}  invariants {:.1e}  energy {:.1e}",
        r.name(),
        worst(casimir_drift(&traj, r)),
        worst(invariant_drift(&traj, r)),
        energy_drift(&traj, h).max_abs_deviation
    );
    Ok(())
}

fn main() -> Result<()> {
    let (n, k) = (3, 2);
    for side in [OrthoSymplecticSide::On, OrthoSymplecticSide::Sp2k] {
        report(&OrthoSymplectic::new(n, k, side)?, &Weighted)?;
    }
    for side in [GeneralLinearSide::Gln, GeneralLinearSide::Glk] {
        let r = GeneralLinear::new(n, k, side)?;
        let m = match side {
            GeneralLinearSide::Gln => n,
            GeneralLinearSide::Glk => k,
        };
        report(&r, &QuadraticMatrixTrace::new((1..=m).map(|i| i as f64).collect(), None))?;
    }
    Ok(())
}
