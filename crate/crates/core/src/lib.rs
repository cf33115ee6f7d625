//! Collective symplectic integrators for Lie-Poisson systems.
//!
//! A Hamiltonian `H` on the dual `g*` of a Lie algebra is pulled back along a
//! momentum map `J: M → g*` to the collective Hamiltonian `H ∘ J` on a
//! symplectic vector space `M`. A symplectic Runge-Kutta method applied there
//! and pushed forward by `J` is a Poisson integrator on `g*` that keeps
//! coadjoint orbits fixed.
//!
//! ```
//! use collective::prelude::*;
//!
//! let r = HopfSo3;
//! let h = RigidBody::reference();
//! let x0 = lift(&r, &DualElement::new(vec![0.0, 0.6, 0.8])).unwrap();
//! let cfg = IntegratorConfig::new(Method::Midpoint, 0.04);
//! let traj = integrate(&r, &h, &x0, 0.0, 1.0, &cfg).unwrap();
//! let drift = casimir_drift(&traj, &r);
//! assert!(drift[0].max_rel_deviation < 1e-11);
//! ```

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod hamiltonians;
pub mod integrators;
pub mod oracle;
pub mod realizations;
pub mod solver;

pub use error::{Error, RangeError, Result};

pub mod prelude {
    pub use crate::diagnostics::{
        casimir_drift, convergence_order, energy_drift, energy_envelope, invariant_drift, orthant_check,
        DriftReport, SignConstraint, Trajectory,
    };
    pub use crate::error::{Error, RangeError, Result};
    pub use crate::geometry::{
        collective_vector_field, lift, reduce, CollectiveField, DualElement, Hamiltonian, PhasePoint,
        Realization,
    };
    pub use crate::hamiltonians::*;
    pub use crate::integrators::{gauss_tableau, integrate, IntegratorConfig, Method, StageSolver};
    pub use crate::oracle::reference_solve;
    pub use crate::realizations::*;
}
