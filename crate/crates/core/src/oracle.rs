//! Reference solutions and closed forms used to validate the integrators.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{norm, DualElement, Hamiltonian, PhasePoint, Realization};
use crate::integrators::{integrate, IntegratorConfig, Method};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub w: DualElement,
    pub x: PhasePoint,
    /// Distance between the last two halving levels, in `x`.
    pub accuracy: f64,
    pub steps: usize,
}

/// Largest step count tried before giving up.
const MAX_REFERENCE_STEPS: usize = 1 << 22;
/// Halvings without a twofold gap reduction after which the gap is taken to
/// be at the roundoff floor.
const STALLED_HALVINGS: usize = 3;

/// Endpoint of the flow of `h` by 5-stage Gauss with successive halving of
/// the step until two consecutive endpoints agree within `tol/10`.
///
/// Fails when the step count would exceed `MAX_REFERENCE_STEPS` or when the
/// gap stops shrinking, which happens once it reaches accumulated roundoff.
pub fn reference_solve(
    r: &dyn Realization,
    h: &dyn Hamiltonian,
    x0: &PhasePoint,
    t0: f64,
    t_end: f64,
    tol: f64,
) -> Result<ReferenceSolution> {
    if !(tol >= 1e-13) {
        return Err(Error::config(format!("reference tolerance must be at least 1e-13 (got {tol})")));
    }
    let span = t_end - t0;
    if span == 0.0 {
        return Ok(ReferenceSolution {
            w: DualElement(r.momentum_map(x0)),
            x: x0.clone(),
            accuracy: 0.0,
            steps: 0,
        });
    }
    let mut steps = (span.abs() / 0.2).ceil().max(1.0) as usize;
    let endpoint = |steps: usize| -> Result<Vec<f64>> {
        let mut cfg = IntegratorConfig::new(Method::Gauss(5), span / steps as f64).with_stage_tol(1e-15);
        cfg.max_stage_iters = 500;
        let traj = integrate(r, h, x0, t0, t_end, &cfg)?;
        Ok(traj.last().expect("nonempty trajectory").x.clone())
    };
    let mut prev = endpoint(steps)?;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    loop {
        steps *= 2;
        if steps > MAX_REFERENCE_STEPS || (span / steps as f64).abs() < f64::EPSILON * span.abs() {
            return Err(Error::Oracle(format!(
                "no agreement to {tol:e} before the step count reached {MAX_REFERENCE_STEPS}"
            )));
        }
        let next = endpoint(steps)?;
        let diff: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| a - b).collect();
        let gap = norm(&diff);
        let target = 0.1 * tol * norm(&next).max(1.0);
        if gap <= target {
            return Ok(ReferenceSolution {
                w: DualElement(r.momentum_map(&next)),
                x: PhasePoint(next),
                accuracy: gap,
                steps,
            });
        }
        if gap <= 0.5 * best {
            best = gap;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled == STALLED_HALVINGS {
                return Err(Error::Oracle(format!(
                    "halving gap stalled at {best:e} above the target {target:e}; \
                     the tolerance {tol:e} is below the roundoff floor of this problem"
                )));
            }
        }
        prev = next;
    }
}

/// `(I − (dt/2)A)⁻¹(I + (dt/2)A)`, the midpoint rule on `ẋ = Ax`.
pub fn cayley(a: &DMatrix<f64>, dt: f64) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let lhs = &id - a * (0.5 * dt);
    let rhs = &id + a * (0.5 * dt);
    lhs.lu().solve(&rhs)
}

/// Diagonal Padé approximant of `eᶻ` of degree `s`, the stability function
/// of the `s`-stage Gauss method.
pub fn pade_stability(s: usize, z: f64) -> f64 {
    let fact = |n: usize| -> f64 { (1..=n).map(|k| k as f64).product() };
    let coeff = |j: usize| fact(2 * s - j) * fact(s) / (fact(2 * s) * fact(j) * fact(s - j));
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..=s {
        let c = coeff(j) * z.powi(j as i32);
        num += c;
        den += if j % 2 == 0 { c } else { -c };
    }
    num / den
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=20 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Exact Lie-Poisson flow of `H = ½(w₁² + w₂²) + c w₃²` on `so(3)*`:
/// `(w₁, w₂)` rotates about the `w₃` axis at rate `(2c − 1)w₃`.
pub fn axisymmetric_precession(w0: &[f64], c: f64, t: f64) -> [f64; 3] {
    let angle = (2.0 * c - 1.0) * w0[2] * t;
    let (s, co) = angle.sin_cos();
    [co * w0[0] - s * w0[1], s * w0[0] + co * w0[1], w0[2]]
}
