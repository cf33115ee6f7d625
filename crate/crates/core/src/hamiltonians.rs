//! Hamiltonians on `g*` with analytic gradients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Hamiltonian, Realization};
use crate::realizations::RealizationId;

/// `H(w) = Σ aᵢ wᵢ²`, the free rigid body when `dim = 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidBody {
    pub coefficients: Vec<f64>,
}

impl RigidBody {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    /// `½w₁² + ¼w₂² + (5/3)w₃²`.
    pub fn reference() -> Self {
        Self::new(vec![0.5, 0.25, 5.0 / 3.0])
    }
}

impl Hamiltonian for RigidBody {
    fn value(&self, _t: f64, w: &[f64]) -> f64 {
        self.coefficients.iter().zip(w).map(|(a, x)| a * x * x).sum()
    }
    fn gradient(&self, _t: f64, w: &[f64]) -> Vec<f64> {
        self.coefficients.iter().zip(w).map(|(a, x)| 2.0 * a * x).collect()
    }
    fn dim(&self) -> Option<usize> {
        Some(self.coefficients.len())
    }
}

/// `H(w) = w₁ + ½w₁² + ½w₂` on sl(2)*; its collective form is
/// `‖q‖² + ½‖q‖⁴ + ½‖p‖²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sl2Quartic;

impl Hamiltonian for Sl2Quartic {
    fn value(&self, _t: f64, w: &[f64]) -> f64 {
        w[0] + 0.5 * w[0] * w[0] + 0.5 * w[1]
    }
    fn gradient(&self, _t: f64, w: &[f64]) -> Vec<f64> {
        vec![1.0 + w[0], 0.5, 0.0]
    }
    fn dim(&self) -> Option<usize> {
        Some(3)
    }
}

/// Central force on sl(2)*: `H(w) = ½w₂ + V(w₁)`, i.e. `‖p‖²/2 + V(‖q‖²)`,
/// with `V(s) = Σⱼ cⱼ sʲ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralForce {
    pub potential: Vec<f64>,
}

impl Hamiltonian for CentralForce {
    fn value(&self, _t: f64, w: &[f64]) -> f64 {
        let v: f64 = self.potential.iter().rev().fold(0.0, |acc, c| acc * w[0] + c);
        0.5 * w[1] + v
    }
    fn gradient(&self, _t: f64, w: &[f64]) -> Vec<f64> {
        let dv = self
            .potential
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (j, c)| acc * w[0] + j as f64 * c);
        vec![dv, 0.5, 0.0]
    }
    fn dim(&self) -> Option<usize> {
        Some(3)
    }
}

/// `H(w) = Π sin(k wᵢ)`, optionally driven: `+ ε w₁ sin² t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigProduct {
    pub k: f64,
    pub epsilon: f64,
}

impl TrigProduct {
    pub fn new(k: f64) -> Self {
        Self { k, epsilon: 0.0 }
    }

    pub fn driven(k: f64, epsilon: f64) -> Self {
        Self { k, epsilon }
    }
}

impl Hamiltonian for TrigProduct {
    fn value(&self, t: f64, w: &[f64]) -> f64 {
        let prod: f64 = w.iter().map(|x| (self.k * x).sin()).product();
        prod + self.epsilon * w[0] * t.sin().powi(2)
    }
    fn gradient(&self, t: f64, w: &[f64]) -> Vec<f64> {
        let sc: Vec<(f64, f64)> = w.iter().map(|x| (self.k * x).sin_cos()).collect();
        let mut g: Vec<f64> = (0..w.len())
            .map(|i| {
                let others: f64 = (0..w.len()).filter(|&j| j != i).map(|j| sc[j].0).product();
                self.k * sc[i].1 * others
            })
            .collect();
        g[0] += self.epsilon * t.sin().powi(2);
        g
    }
    fn is_autonomous(&self) -> bool {
        self.epsilon == 0.0
    }
}

/// `H(w) = Σ cos wᵢ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CosineSum;

impl Hamiltonian for CosineSum {
    fn value(&self, _t: f64, w: &[f64]) -> f64 {
        w.iter().map(|x| x.cos()).sum()
    }
    fn gradient(&self, _t: f64, w: &[f64]) -> Vec<f64> {
        w.iter().map(|x| -x.sin()).collect()
    }
}

/// `H(W) = ½ tr(Wᵀ D W) + tr(Lᵀ W)` on a square matrix dual, `D = diag(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticMatrixTrace {
    pub diag: Vec<f64>,
    pub linear: Vec<f64>,
}

impl QuadraticMatrixTrace {
    pub fn new(diag: Vec<f64>, linear: Option<Vec<f64>>) -> Self {
        let n = diag.len();
        let linear = linear.unwrap_or_else(|| vec![0.0; n * n]);
        Self { diag, linear }
    }
}

impl Hamiltonian for QuadraticMatrixTrace {
    fn value(&self, _t: f64, w: &[f64]) -> f64 {
        let n = self.diag.len();
        let quad: f64 = (0..n)
            .map(|i| self.diag[i] * (0..n).map(|j| w[i * n + j].powi(2)).sum::<f64>())
            .sum();
        0.5 * quad + self.linear.iter().zip(w).map(|(l, x)| l * x).sum::<f64>()
    }
    fn gradient(&self, _t: f64, w: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n * n)
            .map(|idx| self.diag[idx / n] * w[idx] + self.linear[idx])
            .collect()
    }
    fn dim(&self) -> Option<usize> {
        Some(self.diag.len().pow(2))
    }
}

/// One monomial `c · Π wᵢ^{eᵢ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coefficient: f64,
    pub powers: Vec<u32>,
}

/// A polynomial in the dual coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.powers.len() != dim) {
            return Err(Error::config(format!(
                "polynomial term {t:?} has {} exponents but the dual has dimension {dim}",
                t.powers.len()
            )));
        }
        Ok(Self { dim, terms })
    }
}

impl Hamiltonian for Polynomial {
    fn value(&self, _t: f64, w: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coefficient
                    * t.powers
                        .iter()
                        .zip(w)
                        .map(|(&e, x)| x.powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }
    fn gradient(&self, _t: f64, w: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for t in &self.terms {
            for i in 0..self.dim {
                let e = t.powers[i];
                if e == 0 {
                    continue;
                }
                let rest: f64 = (0..self.dim)
                    .map(|j| {
                        if j == i {
                            w[j].powi(e as i32 - 1)
                        } else {
                            w[j].powi(t.powers[j] as i32)
                        }
                    })
                    .product();
                g[i] += t.coefficient * e as f64 * rest;
            }
        }
        g
    }
    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }
}

/// Gaussian-kernel landmark Hamiltonian on `w = (q, p) ∈ T*R^{dn}`:
/// `H = ½ Σᵢⱼ (pᵢ·pⱼ) exp(−‖qᵢ − qⱼ‖² / 2σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandmarkGaussian {
    pub d: usize,
    pub n: usize,
    pub sigma: f64,
}

impl LandmarkGaussian {
    fn kernel(&self, q: &[f64], i: usize, j: usize) -> (f64, f64) {
        let r2: f64 = (0..self.d)
            .map(|c| (q[i * self.d + c] - q[j * self.d + c]).powi(2))
            .sum();
        ((-r2 / (2.0 * self.sigma * self.sigma)).exp(), r2)
    }

    fn pdot(&self, p: &[f64], i: usize, j: usize) -> f64 {
        (0..self.d).map(|c| p[i * self.d + c] * p[j * self.d + c]).sum()
    }
}

impl Hamiltonian for LandmarkGaussian {
    fn value(&self, _t: f64, w: &[f64]) -> f64 {
        let (q, p) = w.split_at(self.d * self.n);
        let mut h = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                h += self.pdot(p, i, j) * self.kernel(q, i, j).0;
            }
        }
        0.5 * h
    }
    fn gradient(&self, _t: f64, w: &[f64]) -> Vec<f64> {
        let (d, n) = (self.d, self.n);
        let (q, p) = w.split_at(d * n);
        let mut g = vec![0.0; 2 * d * n];
        let s2 = self.sigma * self.sigma;
        for i in 0..n {
            for j in 0..n {
                let (k, _) = self.kernel(q, i, j);
                let pp = self.pdot(p, i, j);
                for c in 0..d {
                    // ∂H/∂pᵢ = Σⱼ K_ij pⱼ
                    g[d * n + i * d + c] += k * p[j * d + c];
                    // ∂H/∂qᵢ = −Σⱼ (pᵢ·pⱼ) K_ij (qᵢ − qⱼ)/σ²
                    g[i * d + c] -= pp * k * (q[i * d + c] - q[j * d + c]) / s2;
                }
            }
        }
        g
    }
    fn dim(&self) -> Option<usize> {
        Some(2 * self.d * self.n)
    }
}

/// The landmark collective Hamiltonian with a Gaussian kernel of width `sigma`.
pub fn landmark_collective_hamiltonian(d: usize, n_landmarks: usize, sigma: f64) -> LandmarkGaussian {
    LandmarkGaussian {
        d,
        n: n_landmarks,
        sigma,
    }
}

/// Named, parameterized Hamiltonians addressable from experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianCatalogEntry {
    /// `Σ aᵢ wᵢ²`
    RigidBody { coefficients: Vec<f64> },
    /// `w₁ + ½w₁² + ½w₂`
    Sl2Fig1,
    /// `Π sin(k wᵢ)`
    TrigProduct { k: f64 },
    /// `Π sin(k wᵢ) + ε w₁ sin² t`
    DrivenTrig { k: f64, epsilon: f64 },
    /// `Σ cos wᵢ`
    CosineSum,
    /// `½w₂ + Σⱼ cⱼ w₁ʲ`
    CentralForce { potential: Vec<f64> },
    /// `½ tr(WᵀDW) + tr(LᵀW)`
    QuadraticMatrixTrace {
        diag: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        linear: Option<Vec<f64>>,
    },
    /// `Σ c Π wᵢ^{eᵢ}`
    CustomPolynomial { terms: Vec<Monomial> },
    /// Gaussian landmark kernel; width taken from the landmark realization.
    LandmarkGaussian,
}

impl HamiltonianCatalogEntry {
    /// Instantiates the entry for a realization, checking dimensions.
    pub fn build(
        &self,
        id: &RealizationId,
        realization: &dyn Realization,
    ) -> Result<Box<dyn Hamiltonian>> {
        let m = realization.dual_dim();
        let h: Box<dyn Hamiltonian> = match self {
            Self::RigidBody { coefficients } => Box::new(RigidBody::new(coefficients.clone())),
            Self::Sl2Fig1 => Box::new(Sl2Quartic),
            Self::TrigProduct { k } => Box::new(TrigProduct::new(*k)),
            Self::DrivenTrig { k, epsilon } => Box::new(TrigProduct::driven(*k, *epsilon)),
            Self::CosineSum => Box::new(CosineSum),
            Self::CentralForce { potential } => Box::new(CentralForce {
                potential: potential.clone(),
            }),
            Self::QuadraticMatrixTrace { diag, linear } => {
                if let Some(l) = linear {
                    if l.len() != diag.len().pow(2) {
                        return Err(Error::config(format!(
                            "hamiltonian.linear must have {} entries",
                            diag.len().pow(2)
                        )));
                    }
                }
                Box::new(QuadraticMatrixTrace::new(diag.clone(), linear.clone()))
            }
            Self::CustomPolynomial { terms } => Box::new(Polynomial::new(m, terms.clone())?),
            Self::LandmarkGaussian => match *id {
                RealizationId::Landmarks {
                    d,
                    n_landmarks,
                    kernel_width,
                } => Box::new(landmark_collective_hamiltonian(d, n_landmarks, kernel_width)),
                _ => {
                    return Err(Error::config(
                        "hamiltonian landmark_gaussian requires the landmarks realization",
                    ))
                }
            },
        };
        if let Some(d) = h.dim() {
            if d != m {
                return Err(Error::config(format!(
                    "hamiltonian expects dual dimension {d} but {} has dimension {m}",
                    realization.name()
                )));
            }
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_landmark_is_free_motion() {
        let h = landmark_collective_hamiltonian(2, 1, 0.7);
        let w = [0.3, -1.0, 2.0, 0.5];
        assert!((h.value(0.0, &w) - 0.5 * (4.0 + 0.25)).abs() < 1e-15);
        let g = h.gradient(0.0, &w);
        assert_eq!(&g[..2], &[0.0, 0.0]);
        assert_eq!(&g[2..], &[2.0, 0.5]);
    }

    #[test]
    fn two_landmark_energy_example() {
        let h = landmark_collective_hamiltonian(2, 2, 1.0);
        let w = [0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        assert!((h.value(0.0, &w) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn central_force_matches_sl2_quartic() {
        // V(s) = s + ½s² is the sl2_fig1 Hamiltonian
        let cf = CentralForce {
            potential: vec![0.0, 1.0, 0.5],
        };
        let w = [1.3, 0.4, -0.2];
        assert!((cf.value(0.0, &w) - Sl2Quartic.value(0.0, &w)).abs() < 1e-15);
        assert_eq!(cf.gradient(0.0, &w), Sl2Quartic.gradient(0.0, &w));
    }

    #[test]
    fn polynomial_rejects_wrong_arity() {
        let t = Monomial {
            coefficient: 1.0,
            powers: vec![1, 2],
        };
        assert!(Polynomial::new(3, vec![t]).is_err());
    }

    #[test]
    fn catalog_dimension_mismatch_is_config_error() {
        let id = RealizationId::AffineA1;
        let r = crate::realizations::build(&id).unwrap();
        let entry = HamiltonianCatalogEntry::RigidBody {
            coefficients: vec![1.0, 1.0, 1.0],
        };
        assert!(entry.build(&id, r.as_ref()).is_err());
    }

    #[test]
    fn driven_trig_is_nonautonomous() {
        assert!(!TrigProduct::driven(4.0, 0.01).is_autonomous());
        assert!(TrigProduct::new(4.0).is_autonomous());
    }
}
