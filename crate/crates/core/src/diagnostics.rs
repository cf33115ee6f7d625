//! Measurements along trajectories: Casimir and invariant drift, energy
//! behaviour, convergence order and orthant preservation.
//!
//! Every report is a pure function of its inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{norm, Hamiltonian, PhasePoint, Realization};
use crate::integrators::{integrate, IntegratorConfig, Method};
use crate::oracle::reference_solve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

/// Aggregate stage-solver counters over a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverStats {
    pub steps: usize,
    pub total_iterations: usize,
    pub max_iterations: usize,
    pub max_residual: f64,
}

impl SolverStats {
    pub fn record(&mut self, iterations: usize, residual: f64) {
        self.steps += 1;
        self.total_iterations += iterations;
        self.max_iterations = self.max_iterations.max(iterations);
        self.max_residual = self.max_residual.max(residual);
    }

    pub fn merge(&mut self, other: &SolverStats) {
        self.steps += other.steps;
        self.total_iterations += other.total_iterations;
        self.max_iterations = self.max_iterations.max(other.max_iterations);
        self.max_residual = self.max_residual.max(other.max_residual);
    }

    pub fn mean_iterations(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.total_iterations as f64 / self.steps as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub realization: String,
    pub config: IntegratorConfig,
    pub samples: Vec<Sample>,
    pub stats: SolverStats,
}

impl Trajectory {
    pub fn new(realization: impl Into<String>, config: IntegratorConfig) -> Self {
        Self {
            realization: realization.into(),
            config,
            samples: Vec::new(),
            stats: SolverStats::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Times move monotonically in the direction of `dt`.
    pub fn is_time_ordered(&self) -> bool {
        let sign = self.config.dt.signum();
        self.samples.windows(2).all(|p| (p[1].t - p[0].t) * sign > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub quantity: String,
    pub initial: f64,
    pub max_abs_deviation: f64,
    /// Deviation over `|initial|`, or over 1 when the initial value is zero.
    pub max_rel_deviation: f64,
    /// Least-squares slope of `|deviation|` against time.
    pub slope: f64,
    /// False when theory does not predict conservation (non-autonomous energy).
    pub conserved_by_theory: bool,
}

impl DriftReport {
    /// Builds a report from a scalar series evaluated at `times`.
    pub fn from_series(quantity: impl Into<String>, times: &[f64], values: &[f64]) -> Self {
        let quantity = quantity.into();
        let Some(&initial) = values.first() else {
            return Self {
                quantity,
                initial: f64::NAN,
                max_abs_deviation: 0.0,
                max_rel_deviation: 0.0,
                slope: 0.0,
                conserved_by_theory: true,
            };
        };
        let dev: Vec<f64> = values.iter().map(|v| (v - initial).abs()).collect();
        let max_abs = dev.iter().copied().fold(0.0, f64::max);
        let denom = if initial != 0.0 { initial.abs() } else { 1.0 };
        Self {
            quantity,
            initial,
            max_abs_deviation: max_abs,
            max_rel_deviation: max_abs / denom,
            slope: linear_fit_slope(times, &dev),
            conserved_by_theory: true,
        }
    }
}

/// Least-squares slope of `y` against `x`; zero for fewer than two points.
pub fn linear_fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return 0.0;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..n {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx).powi(2);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn reports_over<F>(traj: &Trajectory, names: Vec<String>, eval: F) -> Vec<DriftReport>
where
    F: Fn(&Sample) -> Vec<f64>,
{
    let times = traj.times();
    let series: Vec<Vec<f64>> = traj.samples.iter().map(eval).collect();
    names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let values: Vec<f64> = series.iter().map(|v| v[i]).collect();
            DriftReport::from_series(name, &times, &values)
        })
        .collect()
}

/// One report per Casimir of the realization's dual, evaluated along `w(t)`.
pub fn casimir_drift(traj: &Trajectory, r: &dyn Realization) -> Vec<DriftReport> {
    reports_over(traj, r.casimir_names(), |s| r.casimirs(&s.w))
}

/// One report per group invariant, evaluated along `x(t)`.
pub fn invariant_drift(traj: &Trajectory, r: &dyn Realization) -> Vec<DriftReport> {
    reports_over(traj, r.invariant_names(), |s| r.quadratic_invariants(&s.x))
}

/// Report on `H(t, w(t))`.
pub fn energy_drift(traj: &Trajectory, h: &dyn Hamiltonian) -> DriftReport {
    let times = traj.times();
    let values: Vec<f64> = traj.samples.iter().map(|s| h.value(s.t, &s.w)).collect();
    let mut report = DriftReport::from_series("H", &times, &values);
    report.conserved_by_theory = h.is_autonomous();
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEnvelope {
    pub window: f64,
    /// `(window centre, max |H − H₀|)` per window.
    pub maxima: Vec<(f64, f64)>,
    pub max_abs_deviation: f64,
    /// Least-squares slope of the window maxima per unit time.
    pub slope: f64,
}

impl EnergyEnvelope {
    /// Largest deviation among samples with `t ≤ t_cut` (relative to the start).
    pub fn max_until(&self, t_cut: f64) -> f64 {
        self.maxima
            .iter()
            .filter(|(c, _)| *c <= t_cut)
            .map(|m| m.1)
            .fold(0.0, f64::max)
    }
}

/// Maxima of `|H − H₀|` over consecutive windows of length `window`.
pub fn energy_envelope(traj: &Trajectory, h: &dyn Hamiltonian, window: f64) -> EnergyEnvelope {
    let mut maxima = Vec::new();
    if let Some(first) = traj.samples.first() {
        let h0 = h.value(first.t, &first.w);
        let t0 = first.t;
        let span = traj.samples.last().map_or(0.0, |l| (l.t - t0).abs());
        // a sample landing exactly on a window edge at the end belongs to the last window
        let windows = ((span / window) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let mut current: Option<(usize, f64)> = None;
        for s in &traj.samples {
            let idx = (((s.t - t0).abs() / window).floor() as usize).min(windows - 1);
            let dev = (h.value(s.t, &s.w) - h0).abs();
            match current {
                Some((i, m)) if i == idx => current = Some((i, m.max(dev))),
                Some((i, m)) => {
                    maxima.push((t0 + (i as f64 + 0.5) * window, m));
                    current = Some((idx, dev));
                }
                None => current = Some((idx, dev)),
            }
        }
        if let Some((i, m)) = current {
            maxima.push((t0 + (i as f64 + 0.5) * window, m));
        }
    }
    let t: Vec<f64> = maxima.iter().map(|m| m.0).collect();
    let y: Vec<f64> = maxima.iter().map(|m| m.1).collect();
    EnergyEnvelope {
        window,
        max_abs_deviation: y.iter().copied().fold(0.0, f64::max),
        slope: linear_fit_slope(&t, &y),
        maxima,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub method: Method,
    pub dts: Vec<f64>,
    /// Euclidean endpoint error in `w` against the reference solution.
    pub errors: Vec<f64>,
    /// Order per adjacent `dt` pair; `None` when the pair is below the floor.
    pub orders: Vec<Option<f64>>,
    /// Errors below this are treated as roundoff.
    pub floor: f64,
    pub inconclusive: bool,
    pub reference_accuracy: f64,
}

impl ConvergenceStudy {
    pub fn conclusive_orders(&self) -> Vec<f64> {
        self.orders.iter().flatten().copied().collect()
    }
}

/// Observed order `log(e₁/e₂)/log(dt₁/dt₂)` per adjacent pair of step sizes.
///
/// Pairs in which either error lies below `100·ε·(1 + ‖w_ref‖)·√steps` are
/// excluded; if none remain the study is flagged inconclusive. The reference
/// accuracy is reported but not used for exclusion, so `reference_tol` and the
/// stage tolerance of `template` should sit well below the smallest error.
#[allow(clippy::too_many_arguments)]
pub fn convergence_order(
    r: &dyn Realization,
    h: &dyn Hamiltonian,
    x0: &PhasePoint,
    t0: f64,
    t_end: f64,
    template: &IntegratorConfig,
    dts: &[f64],
    reference_tol: f64,
) -> Result<ConvergenceStudy> {
    if dts.len() < 2 {
        return Err(Error::config("a convergence study needs at least two step sizes"));
    }
    let reference = reference_solve(r, h, x0, t0, t_end, reference_tol)?;
    let w_ref = reference.w.as_slice();
    let mut errors = Vec::with_capacity(dts.len());
    let mut floors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let mut cfg = *template;
        cfg.dt = dt;
        let traj = integrate(r, h, x0, t0, t_end, &cfg)?;
        let w = &traj.last().expect("trajectory has an initial sample").w;
        let diff: Vec<f64> = w.iter().zip(w_ref).map(|(a, b)| a - b).collect();
        errors.push(norm(&diff));
        let steps = crate::integrators::step_count(t0, t_end, dt).max(1) as f64;
        floors.push(100.0 * f64::EPSILON * (1.0 + norm(w_ref)) * steps.sqrt());
    }
    let floor = floors.iter().copied().fold(0.0, f64::max);
    let orders: Vec<Option<f64>> = (0..dts.len() - 1)
        .map(|i| {
            let (e1, e2) = (errors[i], errors[i + 1]);
            let limit = floors[i].max(floors[i + 1]);
            if e1 > limit && e2 > limit {
                Some((e1 / e2).ln() / (dts[i] / dts[i + 1]).ln())
            } else {
                None
            }
        })
        .collect();
    let inconclusive = orders.iter().all(Option::is_none);
    Ok(ConvergenceStudy {
        method: template.method,
        dts: dts.to_vec(),
        errors,
        orders,
        floor,
        inconclusive,
        reference_accuracy: reference.accuracy,
    })
}

/// Required sign of one phase-space coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConstraint {
    Positive,
    Negative,
    /// `|x| ≤ tol`.
    Zero { tol: f64 },
}

impl SignConstraint {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            SignConstraint::Positive => v > 0.0,
            SignConstraint::Negative => v < 0.0,
            SignConstraint::Zero { tol } => v.abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthantViolation {
    pub t: f64,
    pub coordinate: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthantReport {
    pub preserved: bool,
    pub first_violation: Option<OrthantViolation>,
}

/// Scans `x(t)` against `(coordinate, constraint)` pairs.
pub fn orthant_check(traj: &Trajectory, pattern: &[(usize, SignConstraint)]) -> OrthantReport {
    for s in &traj.samples {
        for &(i, c) in pattern {
            if !c.holds(s.x[i]) {
                return OrthantReport {
                    preserved: false,
                    first_violation: Some(OrthantViolation {
                        t: s.t,
                        coordinate: i,
                        value: s.x[i],
                    }),
                };
            }
        }
    }
    OrthantReport {
        preserved: true,
        first_violation: None,
    }
}

/// The sign pattern of `x` on the realization's sign-invariant coordinates.
pub fn sign_pattern(r: &dyn Realization, x: &[f64], zero_tol: f64) -> Vec<(usize, SignConstraint)> {
    r.sign_invariant_coordinates()
        .into_iter()
        .map(|i| {
            let c = if x[i].abs() <= zero_tol {
                SignConstraint::Zero { tol: zero_tol }
            } else if x[i] > 0.0 {
                SignConstraint::Positive
            } else {
                SignConstraint::Negative
            };
            (i, c)
        })
        .collect()
}
