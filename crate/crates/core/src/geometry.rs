//! Realizations of Lie-Poisson spaces and collective vector fields.
//!
//! A realization is a momentum map `J: M -> g*` from a symplectic vector space
//! `M`. A Hamiltonian `H` on `g*` pulls back to the collective Hamiltonian
//! `H ∘ J` on `M`, whose vector field is the infinitesimal generator of the
//! group action evaluated at `∇H(J(x))`:
//!
//! ```text
//! X_{H∘J}(x) = ξ_{∇H(J(x))}(x) = Ω⁻¹ TJ(x)ᵀ ∇H(J(x))
//! ```
//!
//! Sign convention: canonical coordinates evolve as `q̇ = ∂H/∂p`,
//! `ṗ = -∂H/∂q`, which is the convention under which the displayed collective
//! fields of every catalog realization hold.
//!
//! Matrix-valued duals are flattened row-major and paired with their gradients
//! by the Frobenius inner product, so every pairing in this crate is a plain
//! dot product.

use std::ops::Deref;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, RangeError, Result};

/// A point of the symplectic vector space `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint(pub Vec<f64>);

/// A point of `g*` in a realization's declared coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualElement(pub Vec<f64>);

macro_rules! vector_newtype {
    ($t:ident) => {
        impl $t {
            pub fn new(v: Vec<f64>) -> Self {
                Self(v)
            }
            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }
            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
            pub fn norm(&self) -> f64 {
                norm(&self.0)
            }
        }

        impl Deref for $t {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<Vec<f64>> for $t {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }
    };
}

vector_newtype!(PhasePoint);
vector_newtype!(DualElement);

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How the canonical pairs `(qᵢ, pᵢ)` are laid out in a phase vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `(q₁, …, qₙ, p₁, …, pₙ)`.
    Blocks { pairs: usize },
    /// `(q₁, p₁, q₂, p₂, …)`.
    Interleaved { pairs: usize },
}

impl Layout {
    pub fn pairs(&self) -> usize {
        match *self {
            Layout::Blocks { pairs } | Layout::Interleaved { pairs } => pairs,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.pairs()
    }

    pub fn q_index(&self, i: usize) -> usize {
        match *self {
            Layout::Blocks { .. } => i,
            Layout::Interleaved { .. } => 2 * i,
        }
    }

    pub fn p_index(&self, i: usize) -> usize {
        match *self {
            Layout::Blocks { pairs } => pairs + i,
            Layout::Interleaved { .. } => 2 * i + 1,
        }
    }

    /// Applies `Ω⁻¹`: turns a gradient into a Hamiltonian vector field.
    pub fn hamiltonian_field(&self, grad: &[f64], out: &mut [f64]) {
        for i in 0..self.pairs() {
            let (qi, pi) = (self.q_index(i), self.p_index(i));
            out[qi] = grad[pi];
            out[pi] = -grad[qi];
        }
    }

    /// Applies `Ω`: recovers the gradient from a Hamiltonian vector field.
    pub fn field_gradient(&self, field: &[f64], out: &mut [f64]) {
        for i in 0..self.pairs() {
            let (qi, pi) = (self.q_index(i), self.p_index(i));
            out[qi] = -field[pi];
            out[pi] = field[qi];
        }
    }

    /// The canonical Poisson bracket `{F, G} = ∇Fᵀ Ω⁻¹ ∇G`.
    pub fn bracket(&self, grad_f: &[f64], grad_g: &[f64]) -> f64 {
        (0..self.pairs())
            .map(|i| {
                let (qi, pi) = (self.q_index(i), self.p_index(i));
                grad_f[qi] * grad_g[pi] - grad_f[pi] * grad_g[qi]
            })
            .sum()
    }
}

/// A momentum-map realization `J: M -> g*`.
///
/// Implementors hard-code their coordinates. Everything here is a pure
/// function of its arguments; realizations are shared freely across threads.
pub trait Realization: Send + Sync {
    fn name(&self) -> String;

    fn layout(&self) -> Layout;

    fn phase_dim(&self) -> usize {
        self.layout().dim()
    }

    fn dual_dim(&self) -> usize;

    fn momentum_map(&self, x: &[f64]) -> Vec<f64>;

    /// Analytic derivative `TJ(x)`, shape `dual_dim × phase_dim`.
    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64>;

    /// Closed-form infinitesimal generator `ξ_a(x)`, when the realization has one.
    fn generator(&self, _a: &[f64], _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// A deterministic right inverse of `J` on its range.
    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError>;

    /// Membership test for `J(M)`; `Ok` when `w` is in range.
    fn range_check(&self, w: &[f64]) -> Result<(), RangeError>;

    fn in_range(&self, w: &[f64]) -> bool {
        self.range_check(w).is_ok()
    }

    fn invariant_names(&self) -> Vec<String>;

    /// Quadratic (or bilinear) group invariants `I(x)`.
    fn quadratic_invariants(&self, x: &[f64]) -> Vec<f64>;

    fn casimir_names(&self) -> Vec<String>;

    fn casimirs(&self, w: &[f64]) -> Vec<f64>;

    /// Whether the invariants are bilinear in the `(q, p)` splitting, so that
    /// partitioned methods such as Störmer-Verlet preserve them.
    fn partition_compatible(&self) -> bool;

    /// Phase coordinates whose sign is constant on group orbits.
    fn sign_invariant_coordinates(&self) -> Vec<usize> {
        Vec::new()
    }
}

/// A Hamiltonian `H: g* -> R`, optionally time dependent.
pub trait Hamiltonian: Send + Sync {
    fn value(&self, t: f64, w: &[f64]) -> f64;

    /// `∇H` at `w`, an element of `g` in the dual's coordinates.
    fn gradient(&self, t: f64, w: &[f64]) -> Vec<f64>;

    fn is_autonomous(&self) -> bool {
        true
    }

    /// Dual dimension this Hamiltonian requires, if it is fixed.
    fn dim(&self) -> Option<usize> {
        None
    }
}

/// A (possibly time-dependent) vector field on a vector space.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]);
}

/// A Hamiltonian system presented in partitioned `(q, p)` form.
pub trait PartitionedField: Sync {
    fn pairs(&self) -> usize;
    fn grad_q(&self, t: f64, q: &[f64], p: &[f64], out: &mut [f64]);
    fn grad_p(&self, t: f64, q: &[f64], p: &[f64], out: &mut [f64]);
    /// `H = T(p) + V(q)`: Störmer-Verlet substeps become explicit.
    fn separable(&self) -> bool {
        false
    }
}

/// Adapter turning a closure into a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        (self.f)(t, x, out)
    }
}

/// `Ω⁻¹ TJ(x)ᵀ a`, the generator computed through the analytic Jacobian.
pub fn generator_via_jacobian(r: &dyn Realization, a: &[f64], x: &[f64]) -> Vec<f64> {
    let jac = r.momentum_jacobian(x);
    let grad: Vec<f64> = (0..jac.ncols())
        .map(|j| (0..jac.nrows()).map(|i| jac[(i, j)] * a[i]).sum())
        .collect();
    let mut out = vec![0.0; grad.len()];
    r.layout().hamiltonian_field(&grad, &mut out);
    out
}

fn check_gradient_dim(r: &dyn Realization, a: &[f64]) -> Result<()> {
    if a.len() != r.dual_dim() {
        return Err(Error::config(format!(
            "{}: Hamiltonian gradient has dimension {} but the dual has dimension {}",
            r.name(),
            a.len(),
            r.dual_dim()
        )));
    }
    Ok(())
}

/// The collective vector field `X_{H∘J}(x)`.
pub fn collective_vector_field(
    r: &dyn Realization,
    h: &dyn Hamiltonian,
    t: f64,
    x: &PhasePoint,
) -> Result<Vec<f64>> {
    if x.len() != r.phase_dim() {
        return Err(Error::config(format!(
            "{}: phase point has dimension {} but M has dimension {}",
            r.name(),
            x.len(),
            r.phase_dim()
        )));
    }
    let a = h.gradient(t, &r.momentum_map(x));
    check_gradient_dim(r, &a)?;
    Ok(r.generator(&a, x)
        .unwrap_or_else(|| generator_via_jacobian(r, &a, x)))
}

/// The reduction `x ↦ J(x)`.
pub fn reduce(r: &dyn Realization, x: &PhasePoint) -> DualElement {
    DualElement(r.momentum_map(x))
}

/// Lifts `w ∈ J(M)` to a point of its fibre.
pub fn lift(r: &dyn Realization, w: &DualElement) -> Result<PhasePoint, RangeError> {
    if w.len() != r.dual_dim() {
        return Err(RangeError::new(
            &r.name(),
            format!("dimension {} differs from dual dimension {}", w.len(), r.dual_dim()),
            w,
        ));
    }
    r.range_check(w)?;
    r.fiber_lift(w).map(PhasePoint)
}

/// A collective Hamiltonian `H ∘ J` packaged as a vector field on `M`.
pub struct CollectiveField<'a> {
    realization: &'a dyn Realization,
    hamiltonian: &'a dyn Hamiltonian,
    separable: bool,
}

impl<'a> CollectiveField<'a> {
    pub fn new(realization: &'a dyn Realization, hamiltonian: &'a dyn Hamiltonian) -> Result<Self> {
        if let Some(d) = hamiltonian.dim() {
            if d != realization.dual_dim() {
                return Err(Error::config(format!(
                    "{}: Hamiltonian expects dual dimension {d}, realization has {}",
                    realization.name(),
                    realization.dual_dim()
                )));
            }
        }
        Ok(Self {
            realization,
            hamiltonian,
            separable: false,
        })
    }

    /// Declares `H ∘ J = T(p) + V(q)`, which makes Störmer-Verlet explicit.
    pub fn assume_separable(mut self, separable: bool) -> Self {
        self.separable = separable;
        self
    }

    pub fn realization(&self) -> &'a dyn Realization {
        self.realization
    }

    pub fn hamiltonian(&self) -> &'a dyn Hamiltonian {
        self.hamiltonian
    }

    /// `∇(H∘J)(x) = TJ(x)ᵀ ∇H(J(x))`.
    pub fn collective_gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let mut field = vec![0.0; x.len()];
        self.eval(t, x, &mut field);
        self.realization.layout().field_gradient(&field, out);
    }

    fn assemble(&self, q: &[f64], p: &[f64]) -> Vec<f64> {
        let layout = self.realization.layout();
        let mut x = vec![0.0; layout.dim()];
        for i in 0..layout.pairs() {
            x[layout.q_index(i)] = q[i];
            x[layout.p_index(i)] = p[i];
        }
        x
    }

    fn split_gradient(&self, t: f64, q: &[f64], p: &[f64], want_q: bool, out: &mut [f64]) {
        let x = self.assemble(q, p);
        let mut grad = vec![0.0; x.len()];
        self.collective_gradient(t, &x, &mut grad);
        let layout = self.realization.layout();
        for (i, o) in out.iter_mut().enumerate() {
            *o = if want_q {
                grad[layout.q_index(i)]
            } else {
                grad[layout.p_index(i)]
            };
        }
    }
}

impl VectorField for CollectiveField<'_> {
    fn dim(&self) -> usize {
        self.realization.phase_dim()
    }

    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let w = self.realization.momentum_map(x);
        let a = self.hamiltonian.gradient(t, &w);
        let v = self
            .realization
            .generator(&a, x)
            .unwrap_or_else(|| generator_via_jacobian(self.realization, &a, x));
        out.copy_from_slice(&v);
    }
}

impl PartitionedField for CollectiveField<'_> {
    fn pairs(&self) -> usize {
        self.realization.layout().pairs()
    }
    fn grad_q(&self, t: f64, q: &[f64], p: &[f64], out: &mut [f64]) {
        self.split_gradient(t, q, p, true, out)
    }
    fn grad_p(&self, t: f64, q: &[f64], p: &[f64], out: &mut [f64]) {
        self.split_gradient(t, q, p, false, out)
    }
    fn separable(&self) -> bool {
        self.separable
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts_invert_each_other() {
        for layout in [Layout::Blocks { pairs: 3 }, Layout::Interleaved { pairs: 3 }] {
            let g = [1.0, -2.0, 3.0, 0.5, 7.0, -1.5];
            let mut f = [0.0; 6];
            let mut back = [0.0; 6];
            layout.hamiltonian_field(&g, &mut f);
            layout.field_gradient(&f, &mut back);
            assert_eq!(g, back);
            // {F, F} = 0
            assert_eq!(layout.bracket(&g, &g), 0.0);
        }
    }

    #[test]
    fn canonical_bracket_of_coordinates() {
        let layout = Layout::Interleaved { pairs: 1 };
        // {q, p} = 1
        assert_eq!(layout.bracket(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
    }
}
