#![allow(dead_code)]

use collective::diagnostics::{Sample, Trajectory};
use collective::geometry::{CollectiveField, PhasePoint, Realization, VectorField};
use collective::hamiltonians::{HamiltonianCatalogEntry, Monomial};
use collective::realizations::{GeneralLinearSide, OrthoSymplecticSide, RealizationId};
use collective::integrators::{IntegratorConfig, Method};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal deviates by Box-Muller.
pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            let v: f64 = rng.random_range(0.0..1.0);
            scale * (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        })
        .collect()
}

/// Classical explicit RK4; the non-symplectic control.
pub fn rk4_trajectory(field: &CollectiveField<'_>, x0: &[f64], dt: f64, steps: usize) -> Trajectory {
    let r = field.realization();
    let n = x0.len();
    let mut traj = Trajectory::new(r.name(), IntegratorConfig::new(Method::Midpoint, dt));
    let mut x = x0.to_vec();
    let push = |traj: &mut Trajectory, t: f64, x: &[f64]| {
        traj.samples.push(Sample {
            t,
            x: x.to_vec(),
            w: r.momentum_map(x),
        })
    };
    push(&mut traj, 0.0, &x);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for step in 0..steps {
        let t = step as f64 * dt;
        field.eval(t, &x, &mut k1);
        let y: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * dt * k1[i]).collect();
        field.eval(t + 0.5 * dt, &y, &mut k2);
        let y: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * dt * k2[i]).collect();
        field.eval(t + 0.5 * dt, &y, &mut k3);
        let y: Vec<f64> = (0..n).map(|i| x[i] + dt * k3[i]).collect();
        field.eval(t + dt, &y, &mut k4);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        push(&mut traj, t + dt, &x);
    }
    traj
}

/// A random in-range dual point, as the image of a random phase point.
pub fn random_in_range(r: &dyn Realization, rng: &mut ChaCha8Rng, scale: f64) -> (PhasePoint, Vec<f64>) {
    let x = PhasePoint(gaussian_vec(rng, r.phase_dim(), scale));
    let w = r.momentum_map(&x);
    (x, w)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One Hamiltonian per realization family, covering every catalog entry kind.
pub fn catalog() -> Vec<(RealizationId, HamiltonianCatalogEntry)> {
    use HamiltonianCatalogEntry as H;
    vec![
        (
            RealizationId::AffineA1,
            H::CustomPolynomial {
                terms: vec![
                    Monomial { coefficient: 0.5, powers: vec![2, 0] },
                    Monomial { coefficient: 0.3, powers: vec![1, 2] },
                    Monomial { coefficient: -2.0, powers: vec![0, 1] },
                ],
            },
        ),
        (
            RealizationId::AffineA1Diagonal,
            H::CustomPolynomial {
                terms: vec![
                    Monomial { coefficient: 1.0, powers: vec![3, 0] },
                    Monomial { coefficient: 0.5, powers: vec![1, 1] },
                ],
            },
        ),
        (RealizationId::O3ToSo3, H::RigidBody { coefficients: vec![0.5, 0.25, 5.0 / 3.0] }),
        (RealizationId::HopfSo3, H::TrigProduct { k: 4.0 }),
        (RealizationId::HopfSo3, H::DrivenTrig { k: 4.0, epsilon: 0.01 }),
        (RealizationId::HopfSo3, H::CosineSum),
        (RealizationId::Sl2FromO3Invariants, H::Sl2Fig1),
        (RealizationId::Sl2FromO3Invariants, H::CentralForce { potential: vec![0.0, 1.0, 0.5, 0.1] }),
        (
            RealizationId::OnSp2k { n: 3, k: 1, side: OrthoSymplecticSide::On },
            H::QuadraticMatrixTrace { diag: vec![1.0, 2.0, 3.0], linear: None },
        ),
        (
            RealizationId::OnSp2k { n: 3, k: 1, side: OrthoSymplecticSide::Sp2k },
            H::QuadraticMatrixTrace { diag: vec![1.0, 0.5], linear: Some(vec![0.1, 0.2, 0.3, 0.4]) },
        ),
        (
            RealizationId::GlnGlk { n: 2, k: 1, side: GeneralLinearSide::Gln },
            H::QuadraticMatrixTrace { diag: vec![1.0, 0.5], linear: None },
        ),
        (
            RealizationId::GlnGlk { n: 2, k: 3, side: GeneralLinearSide::Glk },
            H::QuadraticMatrixTrace { diag: vec![1.0, 0.5, 0.2], linear: None },
        ),
        (
            RealizationId::Landmarks { d: 2, n_landmarks: 3, kernel_width: 1.0 },
            H::LandmarkGaussian,
        ),
        (
            RealizationId::Landmarks { d: 3, n_landmarks: 2, kernel_width: 0.7 },
            H::LandmarkGaussian,
        ),
    ]
}

/// Fourth-order central difference of `f` at `x` along every coordinate.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let h = 1e-3 * norm(x).clamp(1e-3, 1.0);
    (0..x.len())
        .map(|i| {
            let at = |s: f64| {
                let mut y = x.to_vec();
                y[i] += s * h;
                f(&y)
            };
            (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h)
        })
        .collect()
}
