//! Observed convergence orders of the Gauss methods.
//!
//! Each study compares endpoints against a high-accuracy reference solution;
//! Gauss with `s` stages should show order `2s` until roundoff takes over.
//!
//! ```bash
//! cargo run --release --example gauss_orders
//! ```

use collective::diagnostics::convergence_order;
use collective::prelude::*;

fn main() -> Result<()> {
    let r = HopfSo3;
    let h = RigidBody::reference();
    let x0 = lift(&r, &DualElement::new(vec![0.0, 0.6, 0.8]))?;
    let dts = [0.4, 0.2, 0.1];

    // the stage tolerance has to sit below the smallest endpoint error
    for s in 1..=4 {
        let template = IntegratorConfig::new(Method::Gauss(s), dts[0]).with_stage_tol(1e-15);
        let study = convergence_order(&r, &h, &x0, 0.0, 4.0, &template, &dts, 1e-12)?;
        let orders: Vec<String> = study
            .orders
            .iter()
            .map(|o| o.map_or("below floor".into(), |v| format!("{v:.2}")))
            .collect();
        let errors: Vec<String> = study.errors.iter().map(|e| format!("{e:.2e}")).collect();
        println!("gauss{s}: errors [{}] orders [{}]", errors.join(", "), orders.join(", "));
    }

    let tableau = gauss_tableau(3)?;
    println!("gauss3 nodes {:?}, symplecticity defect {:.1e}", tableau.c, tableau.symplecticity_defect());
    Ok(())
}
