//! Symplectic one-step methods on `M` and the fixed-step trajectory driver.
//!
//! * implicit midpoint, `x₁ = x₀ + Δt f(t + Δt/2, (x₀ + x₁)/2)`;
//! * Gauss-Legendre collocation with `s = 1..=5` stages (order `2s`);
//! * Störmer-Verlet for systems in partitioned `(q, p)` form.
//!
//! Midpoint and Gauss share one collocation kernel, so `Gauss(1)` and
//! `Midpoint` produce bit-identical steps.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Sample, SolverStats, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{norm, CollectiveField, PartitionedField, PhasePoint, Realization, VectorField};
use crate::geometry::{Hamiltonian, Layout};
use crate::solver::{fixed_point, newton, JacobianSource, SolveFailure, SolveReport};

/// Coefficients of an `s`-stage Runge-Kutta method.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ButcherTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// `max |bᵢaᵢⱼ + bⱼaⱼᵢ − bᵢbⱼ|`; zero for symplectic methods.
    pub fn symplecticity_defect(&self) -> f64 {
        let s = self.stages();
        let mut worst: f64 = 0.0;
        for i in 0..s {
            for j in 0..s {
                let m = self.b[i] * self.a[i][j] + self.b[j] * self.a[j][i] - self.b[i] * self.b[j];
                worst = worst.max(m.abs());
            }
        }
        worst
    }
}

/// Legendre polynomial `P_s(x)` and its derivative.
fn legendre(s: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if s == 0 {
        return (1.0, 0.0);
    }
    for n in 1..s {
        let n = n as f64;
        let p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = s as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Roots of `P_s` on `[−1, 1]`, increasing.
fn legendre_roots(s: usize) -> Vec<f64> {
    match s {
        1 => vec![0.0],
        2 => {
            let r = (1.0f64 / 3.0).sqrt();
            vec![-r, r]
        }
        3 => {
            let r = (3.0f64 / 5.0).sqrt();
            vec![-r, 0.0, r]
        }
        _ => {
            let start: &[f64] = match s {
                4 => &[-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6],
                _ => &[-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664],
            };
            start
                .iter()
                .map(|&x0| {
                    let mut x = x0;
                    for _ in 0..5 {
                        let (p, dp) = legendre(s, x);
                        x -= p / dp;
                    }
                    x
                })
                .collect()
        }
    }
}

/// The `s`-stage Gauss-Legendre collocation tableau, `1 ≤ s ≤ 5`.
pub fn gauss_tableau(s: usize) -> Result<ButcherTableau> {
    if !(1..=5).contains(&s) {
        return Err(Error::config(format!(
            "Gauss methods are available for 1 ≤ s ≤ 5 stages (got {s})"
        )));
    }
    if s == 1 {
        return Ok(midpoint_tableau());
    }
    let roots = legendre_roots(s);
    let c: Vec<f64> = roots.iter().map(|x| 0.5 * (1.0 + x)).collect();
    let b: Vec<f64> = roots
        .iter()
        .map(|&x| {
            let (_, dp) = legendre(s, x);
            1.0 / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    let lagrange = |j: usize, tau: f64| -> f64 {
        (0..s)
            .filter(|&m| m != j)
            .map(|m| (tau - c[m]) / (c[j] - c[m]))
            .product()
    };
    // aᵢⱼ = ∫₀^{cᵢ} ℓⱼ, by the same quadrature rescaled to [0, cᵢ]
    let a: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| c[i] * (0..s).map(|m| b[m] * lagrange(j, c[i] * c[m])).sum::<f64>())
                .collect()
        })
        .collect();
    Ok(ButcherTableau { a, b, c })
}

fn midpoint_tableau() -> ButcherTableau {
    ButcherTableau {
        a: vec![vec![0.5]],
        b: vec![1.0],
        c: vec![0.5],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Midpoint,
    Gauss(usize),
    StormerVerlet,
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Midpoint => "midpoint".into(),
            Method::Gauss(s) => format!("gauss{s}"),
            Method::StormerVerlet => "stormer_verlet".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageSolver {
    #[default]
    FixedPoint,
    Newton,
}

fn default_stage_tol() -> f64 {
    1e-13
}

fn default_continuation() -> u32 {
    8
}

fn default_max_stage_iters() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    #[serde(default = "default_stage_tol")]
    pub stage_tol: f64,
    #[serde(default = "default_max_stage_iters")]
    pub max_stage_iters: usize,
    #[serde(default)]
    pub solver: StageSolver,
    /// When the stage solve fails, retry with damped Newton while ramping the
    /// step from a fraction back to `dt`, doubling the number of ramp levels
    /// up to `2^continuation` (0 disables the retry).
    #[serde(default = "default_continuation")]
    pub continuation: u32,
}

impl IntegratorConfig {
    pub fn new(method: Method, dt: f64) -> Self {
        Self {
            method,
            dt,
            stage_tol: default_stage_tol(),
            max_stage_iters: default_max_stage_iters(),
            solver: StageSolver::FixedPoint,
            continuation: default_continuation(),
        }
    }

    pub fn with_stage_tol(mut self, tol: f64) -> Self {
        self.stage_tol = tol;
        self
    }

    pub fn with_solver(mut self, solver: StageSolver) -> Self {
        self.solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(Error::config(format!("integrator.dt must be finite and nonzero (got {})", self.dt)));
        }
        if !(self.stage_tol > 0.0 && self.stage_tol.is_finite()) {
            return Err(Error::config("integrator.stage_tol must be positive"));
        }
        if self.max_stage_iters == 0 {
            return Err(Error::config("integrator.max_stage_iters must be at least 1"));
        }
        if self.continuation > 16 {
            return Err(Error::config("integrator.continuation must be at most 16"));
        }
        if let Method::Gauss(s) = self.method {
            gauss_tableau(s)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub x_next: Vec<f64>,

    pub solver_iterations: usize,
    /// Relative stage residual `‖Y − g(Y)‖ / (1 + ‖Y‖)`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFailure {
    pub t: f64,
    pub dt: f64,
    pub iterations: usize,
    pub residual: f64,
    pub failure: Option<SolveFailure>,
}

impl std::fmt::Display for StepFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "stage solver failed at t = {} (dt = {}) after {} iterations, residual {:e} ({:?})",
            self.t, self.dt, self.iterations, self.residual, self.failure
        )
    }
}

/// Aborted integration: the samples computed so far plus the failing step.
#[derive(Debug, Clone)]
pub struct IntegrationFailure {
    pub partial: Trajectory,
    pub failure: StepFailure,
}

impl std::fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "integration failed after {} samples: {}",
            self.partial.samples.len(),
            self.failure
        )
    }
}

impl std::error::Error for IntegrationFailure {}

fn solve_implicit<G>(cfg: &IntegratorConfig, mut g: G, y0: &[f64]) -> (Vec<f64>, SolveReport)
where
    G: FnMut(&[f64], &mut [f64]),
{
    match cfg.solver {
        StageSolver::FixedPoint => fixed_point(g, y0, cfg.stage_tol, cfg.max_stage_iters),
        StageSolver::Newton => newton(
            |y: &[f64], out: &mut [f64]| {
                g(y, out);
                for (o, yi) in out.iter_mut().zip(y) {
                    *o = yi - *o;
                }
            },
            y0,
            cfg.stage_tol,
            cfg.max_stage_iters,
            JacobianSource::FiniteDifference(None),
        ),
    }
}

fn relative_residual(report: &SolveReport, y: &[f64]) -> f64 {
    report.final_residual / (1.0 + norm(y))
}

/// Solves the stage equations `Yᵢ = x + frac·dt Σⱼ aᵢⱼ f(t + cⱼdt, Yⱼ)` from
/// `y0`; on return `stage_f` holds `f` at the returned stages.
#[allow(clippy::too_many_arguments)]
fn solve_stages(
    f: &dyn VectorField,
    t: f64,
    x: &[f64],
    dt: f64,
    frac: f64,
    tab: &ButcherTableau,
    cfg: &IntegratorConfig,
    y0: &[f64],
    stage_f: &mut [f64],
) -> (Vec<f64>, SolveReport) {
    let n = x.len();
    let s = tab.stages();
    solve_implicit(
        cfg,
        |y: &[f64], out: &mut [f64]| {
            for j in 0..s {
                f.eval(t + tab.c[j] * dt, &y[j * n..(j + 1) * n], &mut stage_f[j * n..(j + 1) * n]);
            }
            for i in 0..s {
                for m in 0..n {
                    let acc: f64 = (0..s).map(|j| tab.a[i][j] * stage_f[j * n + m]).sum();
                    out[i * n + m] = x[m] + frac * dt * acc;
                }
            }
        },
        y0,
    )
}

/// Continuation in the step fraction: solves at `frac = 1/L, 2/L, …, 1`, each
/// level seeded by rescaling the previous stage increments, for
/// `L = 2, 4, …, 2^cfg.continuation`.
fn continued_stages(
    f: &dyn VectorField,
    t: f64,
    x: &[f64],
    dt: f64,
    tab: &ButcherTableau,
    cfg: &IntegratorConfig,
    stage_f: &mut [f64],
) -> Option<(Vec<f64>, SolveReport, usize)> {
    let n = x.len();
    let newton_cfg = cfg.with_solver(StageSolver::Newton);
    let mut spent = 0;
    for doubling in 1..=cfg.continuation {
        let levels = 1usize << doubling;
        let mut y: Vec<f64> = (0..tab.stages()).flat_map(|_| x.iter().copied()).collect();
        let mut prev = 0.0;
        let mut ok = true;
        let mut last = None;
        for level in 1..=levels {
            let frac = level as f64 / levels as f64;
            if prev > 0.0 {
                let ratio = frac / prev;
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk = x[k % n] + ratio * (*yk - x[k % n]);
                }
            }
            let (next, report) = solve_stages(f, t, x, dt, frac, tab, &newton_cfg, &y, stage_f);
            spent += report.iterations;
            if !report.converged {
                ok = false;
                break;
            }
            y = next;
            prev = frac;
            last = Some(report);
        }
        if ok {
            return last.map(|r| (y, r, spent));
        }
    }
    None
}

fn collocation_step(
    f: &dyn VectorField,
    t: f64,
    x: &[f64],
    dt: f64,
    tab: &ButcherTableau,
    cfg: &IntegratorConfig,
) -> Result<StepResult, StepFailure> {
    let n = x.len();
    let s = tab.stages();
    let mut stage_f = vec![0.0; s * n];
    let y0: Vec<f64> = (0..s).flat_map(|_| x.iter().copied()).collect();
    let (mut y, mut report) = solve_stages(f, t, x, dt, 1.0, tab, cfg, &y0, &mut stage_f);
    let mut iterations = report.iterations;
    if !report.converged {
        match continued_stages(f, t, x, dt, tab, cfg, &mut stage_f) {
            Some((yc, rc, spent)) => {
                y = yc;
                report = rc;
                iterations += spent;
            }
            None => {
                return Err(StepFailure {
                    t,
                    dt,
                    iterations: report.iterations,
                    residual: relative_residual(&report, &y),
                    failure: report.failure,
                });
            }
        }
    }
    let residual = relative_residual(&report, &y);
    // the solver's last evaluation was at the returned stages, so stage_f holds f(Yⱼ)
    let x_next = (0..n)
        .map(|m| x[m] + dt * (0..s).map(|i| tab.b[i] * stage_f[i * n + m]).sum::<f64>())
        .collect();
    Ok(StepResult {
        x_next,
        solver_iterations: iterations,
        residual,
    })
}

/// One implicit-midpoint step.
pub fn midpoint_step(
    f: &dyn VectorField,
    t: f64,
    x: &[f64],
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<StepResult, StepFailure> {
    collocation_step(f, t, x, dt, &midpoint_tableau(), cfg)
}

/// One Gauss-Legendre collocation step with the given tableau.
pub fn gauss_step(
    f: &dyn VectorField,
    t: f64,
    x: &[f64],
    dt: f64,
    tableau: &ButcherTableau,
    cfg: &IntegratorConfig,
) -> Result<StepResult, StepFailure> {
    collocation_step(f, t, x, dt, tableau, cfg)
}

/// One more application of a substep map past the solver's iterate, so the
/// substep error is scaled by `Δt` rather than entering the update directly.
fn polish(g: &mut impl FnMut(&[f64], &mut [f64]), y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    g(y, &mut out);
    out
}

/// One Störmer-Verlet step on a partitioned system.
///
/// ```text
/// p½ = p − Δt/2 ∂H/∂q(q, p½)
/// q₁ = q + Δt/2 (∂H/∂p(q, p½) + ∂H/∂p(q₁, p½))
/// p₁ = p½ − Δt/2 ∂H/∂q(q₁, p½)
/// ```
///
/// All gradients are evaluated at `t + Δt/2`. The two implicit substeps are
/// explicit when the field reports itself separable.
pub fn stormer_verlet_step(
    f: &dyn PartitionedField,
    t: f64,
    q: &[f64],
    p: &[f64],
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, Vec<f64>, usize, f64), StepFailure> {
    let n = q.len();
    let tm = t + 0.5 * dt;
    let h = 0.5 * dt;
    let fail = |report: &SolveReport, y: &[f64]| StepFailure {
        t,
        dt,
        iterations: report.iterations,
        residual: relative_residual(report, y),
        failure: report.failure,
    };
    let mut grad = vec![0.0; n];
    let mut iterations = 0;
    let mut residual: f64 = 0.0;

    let p_half = if f.separable() {
        f.grad_q(tm, q, p, &mut grad);
        (0..n).map(|i| p[i] - h * grad[i]).collect::<Vec<_>>()
    } else {
        let mut substep = |ph: &[f64], out: &mut [f64]| {
            f.grad_q(tm, q, ph, out);
            for i in 0..n {
                out[i] = p[i] - h * out[i];
            }
        };
        let (y, rep) = solve_implicit(cfg, &mut substep, p);
        if !rep.converged {
            return Err(fail(&rep, &y));
        }
        iterations += rep.iterations;
        residual = residual.max(relative_residual(&rep, &y));
        polish(&mut substep, &y)
    };

    let mut dh0 = vec![0.0; n];
    f.grad_p(tm, q, &p_half, &mut dh0);
    let q_next = if f.separable() {
        // ∂H/∂p depends on p only
        (0..n).map(|i| q[i] + dt * dh0[i]).collect::<Vec<_>>()
    } else {
        let mut substep = |q1: &[f64], out: &mut [f64]| {
            f.grad_p(tm, q1, &p_half, out);
            for i in 0..n {
                out[i] = q[i] + h * (dh0[i] + out[i]);
            }
        };
        let (y, rep) = solve_implicit(cfg, &mut substep, q);
        if !rep.converged {
            return Err(fail(&rep, &y));
        }
        iterations += rep.iterations;
        residual = residual.max(relative_residual(&rep, &y));
        polish(&mut substep, &y)
    };

    f.grad_q(tm, &q_next, &p_half, &mut grad);
    let p_next = (0..n).map(|i| p_half[i] - h * grad[i]).collect();
    Ok((q_next, p_next, iterations, residual))
}

/// Step function bound to one method and vector field.
pub struct Stepper<'a> {
    field: &'a CollectiveField<'a>,
    cfg: IntegratorConfig,
    tableau: Option<ButcherTableau>,
    layout: Layout,
}

impl<'a> Stepper<'a> {
    pub fn new(field: &'a CollectiveField<'a>, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let r = field.realization();
        let tableau = match cfg.method {
            Method::Midpoint => Some(midpoint_tableau()),
            Method::Gauss(s) => Some(gauss_tableau(s)?),
            Method::StormerVerlet => {
                if !(r.partition_compatible() || field.separable()) {
                    return Err(Error::config(format!(
                        "Störmer-Verlet requires a partition-compatible realization or a separable Hamiltonian; {} is neither",
                        r.name()
                    )));
                }
                None
            }
        };
        Ok(Self {
            field,
            cfg: *cfg,
            tableau,
            layout: r.layout(),
        })
    }

    pub fn step(&self, t: f64, x: &[f64], dt: f64) -> Result<StepResult, StepFailure> {
        match &self.tableau {
            Some(tab) => collocation_step(self.field, t, x, dt, tab, &self.cfg),
            None => {
                let pairs = self.layout.pairs();
                let q: Vec<f64> = (0..pairs).map(|i| x[self.layout.q_index(i)]).collect();
                let p: Vec<f64> = (0..pairs).map(|i| x[self.layout.p_index(i)]).collect();
                let (q1, p1, iterations, residual) =
                    stormer_verlet_step(self.field, t, &q, &p, dt, &self.cfg)?;
                let mut x_next = vec![0.0; x.len()];
                for i in 0..pairs {
                    x_next[self.layout.q_index(i)] = q1[i];
                    x_next[self.layout.p_index(i)] = p1[i];
                }
                Ok(StepResult {
                    x_next,
                    solver_iterations: iterations,
                    residual,
                })
            }
        }
    }
}

/// Sampling options for [`integrate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    /// Keep every `stride`-th step; the initial and final samples are always kept.
    pub stride: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { stride: 1 }
    }
}

/// Number of steps covering `[t0, t_end]` with the last step shortened.
pub fn step_count(t0: f64, t_end: f64, dt: f64) -> usize {
    let span = t_end - t0;
    if span == 0.0 {
        return 0;
    }
    ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Integrates the collective field of `h` on `r` over `[t0, t_end]`.
pub fn integrate(
    r: &dyn Realization,
    h: &dyn Hamiltonian,
    x0: &PhasePoint,
    t0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let field = CollectiveField::new(r, h)?;
    integrate_with(&field, x0, t0, t_end, cfg, Sampling::default())
}

pub fn integrate_with(
    field: &CollectiveField<'_>,
    x0: &PhasePoint,
    t0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
    sampling: Sampling,
) -> Result<Trajectory> {
    let r = field.realization();
    if x0.len() != r.phase_dim() {
        return Err(Error::config(format!(
            "initial point has dimension {} but {} has phase dimension {}",
            x0.len(),
            r.name(),
            r.phase_dim()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("initial point must be finite"));
    }
    if !(t0.is_finite() && t_end.is_finite()) {
        return Err(Error::config("time span must be finite"));
    }
    if t_end != t0 && (t_end - t0).signum() != cfg.dt.signum() {
        return Err(Error::config(format!(
            "dt = {} points away from t_end = {} (t0 = {})",
            cfg.dt, t_end, t0
        )));
    }
    let stepper = Stepper::new(field, cfg)?;
    let stride = sampling.stride.max(1);
    let steps = step_count(t0, t_end, cfg.dt);

    let sample = |t: f64, x: &[f64]| Sample {
        t,
        x: x.to_vec(),
        w: r.momentum_map(x),
    };
    let mut traj = Trajectory::new(r.name(), *cfg);
    traj.samples.push(sample(t0, x0));
    let mut x = x0.to_vec();
    let mut stats = SolverStats::default();
    for k in 0..steps {
        let t = t0 + k as f64 * cfg.dt;
        let dt = if k + 1 == steps { t_end - t } else { cfg.dt };
        match stepper.step(t, &x, dt) {
            Ok(res) => {
                stats.record(res.solver_iterations, res.residual);
                x = res.x_next;
            }
            Err(failure) => {
                traj.stats = stats;
                return Err(Error::Integration(Box::new(IntegrationFailure {
                    partial: traj,
                    failure,
                })));
            }
        }
        if (k + 1) % stride == 0 || k + 1 == steps {
            let t_next = if k + 1 == steps { t_end } else { t0 + (k + 1) as f64 * cfg.dt };
            traj.samples.push(sample(t_next, &x));
        }
    }
    traj.stats = stats;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FnField;

    #[test]
    fn gauss_one_is_midpoint_tableau() {
        let t = gauss_tableau(1).unwrap();
        assert_eq!(t.a, vec![vec![0.5]]);
        assert_eq!(t.b, vec![1.0]);
        assert_eq!(t.c, vec![0.5]);
    }

    #[test]
    fn gauss_two_known_coefficients() {
        let t = gauss_tableau(2).unwrap();
        let r3 = 3f64.sqrt() / 6.0;
        let expect_a = [[0.25, 0.25 - r3], [0.25 + r3, 0.25]];
        for i in 0..2 {
            assert!((t.b[i] - 0.5).abs() < 1e-15);
            for j in 0..2 {
                assert!((t.a[i][j] - expect_a[i][j]).abs() < 1e-15);
            }
        }
        assert!((t.c[0] - (0.5 - r3)).abs() < 1e-15);
        assert!((t.c[1] - (0.5 + r3)).abs() < 1e-15);
    }

    #[test]
    fn tableaux_are_symplectic_and_consistent() {
        for s in 1..=5 {
            let t = gauss_tableau(s).unwrap();
            assert!(t.symplecticity_defect() < 1e-14, "s = {s}: {}", t.symplecticity_defect());
            assert!((t.b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for i in 0..s {
                let row: f64 = t.a[i].iter().sum();
                assert!((row - t.c[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn stage_counts_outside_range_are_rejected() {
        assert!(gauss_tableau(0).is_err());
        assert!(gauss_tableau(6).is_err());
    }

    #[test]
    fn zero_field_is_a_fixed_point() {
        let f = FnField::new(3, |_, _, out: &mut [f64]| out.fill(0.0));
        let cfg = IntegratorConfig::new(Method::Midpoint, 0.3);
        let x = [1.0, -2.0, 0.5];
        let res = midpoint_step(&f, 0.0, &x, 0.3, &cfg).unwrap();
        assert_eq!(res.x_next, x.to_vec());
    }

    #[test]
    fn step_count_lands_on_end() {
        assert_eq!(step_count(0.0, 20.0, 0.1), 200);
        assert_eq!(step_count(0.0, 1.0, 0.3), 4);
        assert_eq!(step_count(1.0, 1.0, 0.3), 0);
        assert_eq!(step_count(1.0, 0.0, -0.25), 4);
    }

    #[test]
    fn invalid_dt_is_rejected() {
        assert!(IntegratorConfig::new(Method::Midpoint, 0.0).validate().is_err());
        assert!(IntegratorConfig::new(Method::Midpoint, f64::NAN).validate().is_err());
        assert!(IntegratorConfig::new(Method::Gauss(7), 0.1).validate().is_err());
    }
}
