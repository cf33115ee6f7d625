//! Declarative experiments: a TOML schema, the built-in catalog, a runner and
//! the CSV/JSON writers.
//!
//! ```toml
//! name = "fig2_rigid_body"
//! t_span = [0.0, 20.0]
//!
//! [realization]
//! kind = "hopf_so3"
//!
//! [hamiltonian]
//! kind = "rigid_body"
//! coefficients = [0.5, 0.25, 1.6666666666666667]
//!
//! [initial]
//! w = [[0.0, 0.6, 0.8]]
//!
//! [integrator]
//! method = "midpoint"        # or { gauss = 3 }, or "stormer_verlet"
//! dt = 0.04
//!
//! [output]
//! kind = "orbit"             # orbit | drift | strobe | order
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::diagnostics::{
    casimir_drift, convergence_order, energy_drift, invariant_drift, ConvergenceStudy, DriftReport, Sample,
    SolverStats,
};
use crate::error::{Error, Result};
use crate::geometry::{lift, CollectiveField, DualElement, Hamiltonian, PhasePoint, Realization};
use crate::hamiltonians::HamiltonianCatalogEntry;
use crate::integrators::{integrate_with, step_count, IntegratorConfig, Method, Sampling, StepFailure};
use crate::realizations::{self, RealizationId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Seed for randomized initial conditions.
    #[serde(default)]
    pub seed: u64,
    pub realization: RealizationId,
    pub hamiltonian: HamiltonianCatalogEntry,
    /// Declares `H ∘ J = T(p) + V(q)`, making Störmer-Verlet explicit.
    #[serde(default)]
    pub separable: bool,
    pub initial: InitialConditions,
    pub integrator: IntegratorConfig,
    pub t_span: [f64; 2],
    pub output: OutputSpec,
}

/// Exactly one of `w` (lifted), `x` or `random` must be given.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConditions {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomInitial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomInitial {
    pub count: usize,
    pub distribution: InitialDistribution,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDistribution {
    /// Uniform on the sphere of radius `scale` in `g*`, then lifted.
    DualSphere,
    /// Independent normal coordinates on `M` with deviation `scale`.
    PhaseGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Orbit,
    Drift,
    Strobe,
    Order,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub kind: OutputKind,
    /// Keep every `stride`-th step in orbit and drift output.
    #[serde(default = "one_usize")]
    pub stride: usize,
    /// Add the phase-space coordinates `x1..xn` to orbit CSV rows.
    #[serde(default)]
    pub include_x: bool,
    /// Steps per period of the strobe map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub studies: Vec<OrderStudy>,
    /// File stem of the outputs; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// CSV columns plotted by the gnuplot script.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_axes: Option<Vec<String>>,
}

fn default_reference_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderStudy {
    pub method: Method,
    pub dts: Vec<f64>,
    #[serde(default = "default_reference_tol")]
    pub reference_tol: f64,
}

const BUILTINS: [(&str, &str); 10] = [
    ("fig1_top", include_str!("../configs/fig1_top.toml")),
    ("fig1_middle", include_str!("../configs/fig1_middle.toml")),
    ("fig1_bottom", include_str!("../configs/fig1_bottom.toml")),
    ("fig2_rigid_body", include_str!("../configs/fig2_rigid_body.toml")),
    ("fig3_gauss_orders", include_str!("../configs/fig3_gauss_orders.toml")),
    ("fig4_trig", include_str!("../configs/fig4_trig.toml")),
    ("fig5_chaotic_web", include_str!("../configs/fig5_chaotic_web.toml")),
    ("affine_orbits", include_str!("../configs/affine_orbits.toml")),
    ("landmark_demo", include_str!("../configs/landmark_demo.toml")),
    ("bifoliation_demo", include_str!("../configs/bifoliation_demo.toml")),
];

/// Names and one-line descriptions of the built-in experiments.
pub fn list_experiments() -> Vec<(String, String)> {
    BUILTINS
        .iter()
        .map(|(name, _)| {
            let cfg = builtin(name).expect("built-in configs parse");
            (cfg.name, cfg.description)
        })
        .collect()
}

/// TOML source of a built-in experiment.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, src)| *src)
}

pub fn builtin(name: &str) -> Option<ExperimentConfig> {
    builtin_source(name).map(|src| ExperimentConfig::from_toml_str(src).expect("built-in configs parse"))
}

/// The polynomial Hamiltonian of the `bifoliation_demo` experiment.
pub fn bifoliation_hamiltonian() -> crate::hamiltonians::Polynomial {
    let cfg = builtin("bifoliation_demo").expect("built-in");
    match cfg.hamiltonian {
        HamiltonianCatalogEntry::CustomPolynomial { terms } => {
            crate::hamiltonians::Polynomial::new(4, terms).expect("valid built-in polynomial")
        }
        _ => unreachable!("bifoliation_demo uses a custom polynomial"),
    }
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(src).map_err(|e| Error::config(e.to_string().trim_end().to_owned()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&src).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    pub fn file_stem(&self) -> &str {
        self.output.path.as_deref().unwrap_or(&self.name)
    }

    /// Builds the realization and Hamiltonian, checking their dimensions.
    pub fn build_system(&self) -> Result<(Box<dyn Realization>, Box<dyn Hamiltonian>)> {
        let r = realizations::build(&self.realization)?;
        let h = self.hamiltonian.build(&self.realization, r.as_ref())?;
        Ok((r, h))
    }

    /// Schema checks beyond parsing. Range errors on lifted `w` surface here.
    pub fn validate(&self) -> Result<()> {
        let (r, _h) = self.build_system()?;
        self.integrator.validate()?;
        let [t0, t1] = self.t_span;
        if !(t0.is_finite() && t1.is_finite()) {
            return Err(Error::config("t_span must be finite"));
        }
        if t1 != t0 && (t1 - t0).signum() != self.integrator.dt.signum() {
            return Err(Error::config("integrator.dt must point from t_span[0] towards t_span[1]"));
        }
        if self.integrator.method == Method::StormerVerlet && !(r.partition_compatible() || self.separable) {
            return Err(Error::config(format!(
                "stormer_verlet needs a partition-compatible realization or separable = true; {} is not partition-compatible",
                r.name()
            )));
        }
        let given = [
            !self.initial.w.is_empty(),
            !self.initial.x.is_empty(),
            self.initial.random.is_some(),
        ];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(Error::config("initial: give exactly one of w, x or random"));
        }
        for w in &self.initial.w {
            if w.len() != r.dual_dim() {
                return Err(Error::config(format!(
                    "initial.w entries need {} components, got {}",
                    r.dual_dim(),
                    w.len()
                )));
            }
            r.range_check(w)?;
        }
        for x in &self.initial.x {
            if x.len() != r.phase_dim() {
                return Err(Error::config(format!(
                    "initial.x entries need {} components, got {}",
                    r.phase_dim(),
                    x.len()
                )));
            }
        }
        if let Some(rand) = &self.initial.random {
            if rand.count == 0 {
                return Err(Error::config("initial.random.count must be at least 1"));
            }
            if !(rand.scale > 0.0 && rand.scale.is_finite()) {
                return Err(Error::config("initial.random.scale must be positive"));
            }
        }
        if self.output.stride == 0 {
            return Err(Error::config("output.stride must be at least 1"));
        }
        match self.output.kind {
            OutputKind::Strobe => match self.output.period_steps {
                Some(p) if p > 0 => {}
                _ => return Err(Error::config("strobe output needs output.period_steps ≥ 1")),
            },
            OutputKind::Order => {
                if self.output.studies.is_empty() {
                    return Err(Error::config("order output needs at least one [[output.studies]] entry"));
                }
                for s in &self.output.studies {
                    if s.dts.len() < 2 || s.dts.iter().any(|dt| !(dt.is_finite() && *dt > 0.0)) {
                        return Err(Error::config("each order study needs at least two positive dts"));
                    }
                    IntegratorConfig::new(s.method, s.dts[0]).validate()?;
                }
            }
            _ => {}
        }
        if let Some(axes) = &self.output.plot_axes {
            let cols = csv_header(r.as_ref(), true);
            if let Some(bad) = axes.iter().find(|a| !cols.contains(a)) {
                return Err(Error::config(format!("output.plot_axes: unknown column {bad:?}")));
            }
        }
        Ok(())
    }

    /// Initial phase points, lifting `w` or drawing from the seeded generator.
    pub fn initial_points(&self, r: &dyn Realization) -> Result<Vec<PhasePoint>> {
        if !self.initial.w.is_empty() {
            return self
                .initial
                .w
                .iter()
                .map(|w| lift(r, &DualElement::new(w.clone())).map_err(Error::from))
                .collect();
        }
        if !self.initial.x.is_empty() {
            return Ok(self.initial.x.iter().cloned().map(PhasePoint).collect());
        }
        let spec = self.initial.random.as_ref().expect("validated");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut normal = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
        (0..spec.count)
            .map(|_| match spec.distribution {
                InitialDistribution::PhaseGaussian => Ok(PhasePoint(
                    normal(r.phase_dim()).into_iter().map(|v| v * spec.scale).collect(),
                )),
                InitialDistribution::DualSphere => {
                    let g = normal(r.dual_dim());
                    let n = crate::geometry::norm(&g);
                    let w = g.iter().map(|v| spec.scale * v / n).collect();
                    lift(r, &DualElement(w)).map_err(Error::from)
                }
            })
            .collect()
    }
}

/// Result of one trajectory of an experiment.
#[derive(Debug, Clone, Serialize)]
pub struct BatchResult {
    pub index: usize,
    /// Samples written to the CSV.
    pub samples: Vec<Sample>,
    pub stats: SolverStats,
    pub casimirs: Vec<DriftReport>,
    pub invariants: Vec<DriftReport>,
    pub energy: Option<DriftReport>,
    pub failure: Option<StepFailure>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub realization: String,
    pub dual_dim: usize,
    pub phase_dim: usize,
    pub batches: Vec<BatchResult>,
    pub studies: Vec<ConvergenceStudy>,
    /// Set when any trajectory aborted; the batches then hold partial data.
    pub failure: Option<String>,
    /// Drift quantity names in CSV column order.
    drift_columns: Vec<String>,
}

impl RunOutput {
    pub fn stats(&self) -> SolverStats {
        let mut s = SolverStats::default();
        for b in &self.batches {
            s.merge(&b.stats);
        }
        s
    }

    pub fn rows(&self) -> usize {
        match self.config.output.kind {
            OutputKind::Order => self.studies.iter().map(|s| s.dts.len()).sum(),
            _ => self.batches.iter().map(|b| b.samples.len()).sum(),
        }
    }
}

fn run_trajectory(
    cfg: &ExperimentConfig,
    field: &CollectiveField<'_>,
    index: usize,
    x0: &PhasePoint,
) -> Result<BatchResult> {
    let r = field.realization();
    let h = field.hamiltonian();
    let [t0, t1] = cfg.t_span;
    let stride = match cfg.output.kind {
        OutputKind::Strobe => cfg.output.period_steps.unwrap_or(1),
        _ => cfg.output.stride,
    };
    // drift diagnostics see every step; only the output is thinned
    let (traj, failure) = match integrate_with(field, x0, t0, t1, &cfg.integrator, Sampling { stride: 1 }) {
        Ok(t) => (t, None),
        Err(Error::Integration(f)) => (f.partial, Some(f.failure)),
        Err(e) => return Err(e),
    };
    let casimirs = casimir_drift(&traj, r);
    let invariants = invariant_drift(&traj, r);
    let energy = Some(energy_drift(&traj, h));
    let stats = traj.stats;
    let last = traj.samples.len().saturating_sub(1);
    let mut samples: Vec<Sample> = traj
        .samples
        .into_iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == last)
        .map(|(_, s)| s)
        .collect();
    if cfg.output.kind == OutputKind::Strobe {
        let period = stride;
        let steps = step_count(t0, t1, cfg.integrator.dt);
        samples.remove(0);
        if failure.is_none() && steps % period != 0 {
            samples.pop();
        }
    }
    Ok(BatchResult {
        index,
        samples,
        stats,
        casimirs,
        invariants,
        energy,
        failure,
    })
}

/// Runs a validated experiment. Trajectories are integrated in parallel on
/// the current rayon pool; results keep the order of the initial points.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let (r, h) = cfg.build_system()?;
    let field = CollectiveField::new(r.as_ref(), h.as_ref())?.assume_separable(cfg.separable);
    let points = cfg.initial_points(r.as_ref())?;
    for x in &points {
        if x.len() != r.phase_dim() {
            return Err(Error::config("initial point has the wrong dimension"));
        }
    }
    let mut studies = Vec::new();
    let batches: Vec<BatchResult> = if cfg.output.kind == OutputKind::Order {
        let [t0, t1] = cfg.t_span;
        let x0 = &points[0];
        studies = cfg
            .output
            .studies
            .par_iter()
            .map(|s| {
                let template = IntegratorConfig { method: s.method, ..cfg.integrator };
                convergence_order(r.as_ref(), h.as_ref(), x0, t0, t1, &template, &s.dts, s.reference_tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Vec::new()
    } else {
        points
            .par_iter()
            .enumerate()
            .map(|(i, x0)| run_trajectory(cfg, &field, i, x0))
            .collect::<Result<Vec<_>>>()?
    };
    let failure = batches
        .iter()
        .find_map(|b| b.failure.as_ref().map(|f| format!("trajectory {}: {f}", b.index)));
    let mut drift_columns = r.casimir_names();
    drift_columns.extend(r.invariant_names());
    drift_columns.push("H".into());
    Ok(RunOutput {
        config: cfg.clone(),
        realization: r.name(),
        dual_dim: r.dual_dim(),
        phase_dim: r.phase_dim(),
        batches,
        studies,
        failure,
        drift_columns,
    })
}

/// Shortest round-trip decimal form of a double.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

fn csv_header(r: &dyn Realization, include_x: bool) -> Vec<String> {
    let mut cols = vec!["traj".to_string(), "t".to_string()];
    cols.extend((1..=r.dual_dim()).map(|i| format!("w{i}")));
    if include_x {
        cols.extend((1..=r.phase_dim()).map(|i| format!("x{i}")));
    }
    cols
}

fn orbit_header(out: &RunOutput) -> Vec<String> {
    let mut cols = vec!["traj".to_string(), "t".to_string()];
    cols.extend((1..=out.dual_dim).map(|i| format!("w{i}")));
    if out.config.output.include_x {
        cols.extend((1..=out.phase_dim).map(|i| format!("x{i}")));
    }
    cols
}

fn write_rows(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

/// The CSV document of a run.
///
/// * orbit and strobe: `traj,t,w1..wm[,x1..xn]`;
/// * drift: `traj,t` followed by `value − initial` for each Casimir,
///   invariant and `H`;
/// * order: `method,dt,error,order`, with `order` empty on the first row of a
///   study and on pairs below the roundoff floor.
pub fn render_csv(out: &RunOutput) -> String {
    match out.config.output.kind {
        OutputKind::Orbit | OutputKind::Strobe => {
            let include_x = out.config.output.include_x;
            let rows = out.batches.iter().flat_map(|b| {
                b.samples.iter().map(move |s| {
                    let mut row = vec![b.index.to_string(), format_float(s.t)];
                    row.extend(s.w.iter().map(|v| format_float(*v)));
                    if include_x {
                        row.extend(s.x.iter().map(|v| format_float(*v)));
                    }
                    row
                })
            });
            write_rows(&orbit_header(out), rows)
        }
        OutputKind::Drift => {
            let (r, h) = out.config.build_system().expect("validated");
            let mut header = vec!["traj".to_string(), "t".to_string()];
            header.extend(out.drift_columns.iter().cloned());
            let mut rows = Vec::new();
            for b in &out.batches {
                let quantities = |s: &Sample| {
                    let mut v = r.casimirs(&s.w);
                    v.extend(r.quadratic_invariants(&s.x));
                    v.push(h.value(s.t, &s.w));
                    v
                };
                let Some(first) = b.samples.first() else { continue };
                let base = quantities(first);
                for s in &b.samples {
                    let mut row = vec![b.index.to_string(), format_float(s.t)];
                    row.extend(quantities(s).iter().zip(&base).map(|(v, v0)| format_float(v - v0)));
                    rows.push(row);
                }
            }
            write_rows(&header, rows.into_iter())
        }
        OutputKind::Order => {
            let header: Vec<String> = ["method", "dt", "error", "order"].iter().map(|s| s.to_string()).collect();
            let rows = out.studies.iter().flat_map(|st| {
                st.dts.iter().enumerate().map(move |(i, dt)| {
                    let order = if i == 0 {
                        String::new()
                    } else {
                        st.orders[i - 1].map(format_float).unwrap_or_default()
                    };
                    vec![st.method.label(), format_float(*dt), format_float(st.errors[i]), order]
                })
            });
            write_rows(&header, rows)
        }
    }
}

/// Conventions that the output depends on and the inputs do not pin down.
pub fn conventions() -> serde_json::Value {
    json!({
        "hamiltonian_vector_field": "dq/dt = dH/dp, dp/dt = -dH/dq",
        "lie_poisson_so3": "dw/dt = grad H(w) × w",
        "casimir_error": "max over samples of |C(t) - C(0)| / |C(0)|, or absolute when C(0) = 0",
        "order_error": "Euclidean norm of w(t_end) - w_ref(t_end); reference by 5-stage Gauss with step halving",
        "order_floor": "pairs with an error below 100 · eps · (1 + |w_ref|) · steps are excluded",
        "time_dependence": "stage i evaluated at t + c_i dt; Störmer-Verlet at t + dt/2",
        "stage_solver_stop": "|Y - g(Y)| <= stage_tol · (1 + |Y|) for fixed point; |F| <= stage_tol · (1 + |Y0|) for Newton",
        "fig3_initial_condition": "w0 = (1/2, 1/2, 1/√2), |w0| = 1",
        "strobe": "samples after each period; the initial point is not included",
    })
}

/// The diagnostics JSON document of a run.
pub fn render_json(out: &RunOutput) -> serde_json::Value {
    let trajectories: Vec<serde_json::Value> = out
        .batches
        .iter()
        .map(|b| {
            json!({
                "index": b.index,
                "samples": b.samples.len(),
                "initial_w": b.samples.first().map(|s| s.w.clone()),
                "solver": b.stats,
                "casimirs": b.casimirs,
                "invariants": b.invariants,
                "energy": b.energy,
                "failure": b.failure,
            })
        })
        .collect();
    let stats = out.stats();
    json!({
        "library": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "experiment": out.config.name,
        "status": if out.failure.is_some() { "integration_failure" } else { "ok" },
        "failure": out.failure,
        "realization": out.realization,
        "config": out.config,
        "conventions": conventions(),
        "solver": {
            "steps": stats.steps,
            "total_iterations": stats.total_iterations,
            "mean_iterations": stats.mean_iterations(),
            "max_iterations": stats.max_iterations,
            "max_residual": stats.max_residual,
        },
        "trajectories": trajectories,
        "studies": out.studies,
    })
}

/// A gnuplot script plotting the CSV of a run.
pub fn render_gnuplot(out: &RunOutput, csv_name: &str) -> String {
    let cfg = &out.config;
    let mut s = String::new();
    let _ = writeln!(s, "# {}: {}", cfg.name, cfg.description);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key off");
    let header = orbit_header(out);
    let col = |name: &str| header.iter().position(|c| c == name).map(|i| i + 1).unwrap_or(1);
    match cfg.output.kind {
        OutputKind::Orbit | OutputKind::Strobe => {
            let default: Vec<String> = (1..=out.dual_dim.min(3)).map(|i| format!("w{i}")).collect();
            let axes = cfg.output.plot_axes.clone().unwrap_or(default);
            let style = if cfg.output.kind == OutputKind::Strobe { "points pt 7 ps 0.2" } else { "lines" };
            for (a, name) in ["x", "y", "z"].iter().zip(&axes) {
                let _ = writeln!(s, "set {a}label '{name}'");
            }
            let using: Vec<String> = axes.iter().map(|a| col(a).to_string()).collect();
            let cmd = if axes.len() >= 3 { "splot" } else { "plot" };
            let _ = writeln!(
                s,
                "{cmd} '{csv_name}' skip 1 using {}:1 with {style} palette",
                using.join(":")
            );
        }
        OutputKind::Drift => {
            let _ = writeln!(s, "set xlabel 't'");
            let _ = writeln!(s, "set ylabel 'deviation from initial value'");
            let _ = writeln!(s, "set key on");
            let plots: Vec<String> = out
                .drift_columns
                .iter()
                .enumerate()
                .map(|(i, name)| format!("'{csv_name}' skip 1 using 2:{} with lines title '{name}'", i + 3))
                .collect();
            let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        }
        OutputKind::Order => {
            let _ = writeln!(s, "set logscale xy");
            let _ = writeln!(s, "set xlabel 'dt'");
            let _ = writeln!(s, "set ylabel 'error at t_end'");
            let _ = writeln!(s, "set key on");
            let plots: Vec<String> = out
                .studies
                .iter()
                .map(|st| {
                    let m = st.method.label();
                    format!("'{csv_name}' skip 1 using (strcol(1) eq '{m}' ? $2 : NaN):3 with linespoints title '{m}'")
                })
                .collect();
            let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        }
    }
    s
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub gnuplot: Option<PathBuf>,
}

pub fn write_outputs(out: &RunOutput, dir: &Path, gnuplot: bool) -> std::io::Result<WrittenFiles> {
    std::fs::create_dir_all(dir)?;
    let stem = out.config.file_stem();
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    std::fs::write(&csv, render_csv(out))?;
    let doc = serde_json::to_string_pretty(&render_json(out)).expect("diagnostics serialize");
    std::fs::write(&json, doc + "\n")?;
    let gnuplot = if gnuplot {
        let path = dir.join(format!("{stem}.gp"));
        std::fs::write(&path, render_gnuplot(out, &format!("{stem}.csv")))?;
        Some(path)
    } else {
        None
    };
    Ok(WrittenFiles { csv, json, gnuplot })
}

/// Process exit status for an error: 2 configuration, 3 range, 4 integration.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 2,
        Error::Range(_) => 3,
        Error::Integration(_) | Error::Oracle(_) => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_validate() {
        let names = list_experiments();
        assert_eq!(names.len(), 10);
        for (name, _) in names {
            let cfg = builtin(&name).unwrap();
            assert_eq!(cfg.name, name);
            let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            assert_eq!(again, cfg);
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let src = builtin_source("fig2_rigid_body").unwrap().replace("t_span", "colour = 1\nt_span");
        let err = ExperimentConfig::from_toml_str(&src).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn out_of_range_initial_w_is_a_range_error() {
        let src = builtin_source("fig1_top").unwrap().replace("[0.5, 0.5, 0.5]", "[-0.5, 0.5, 0.5]");
        let err = ExperimentConfig::from_toml_str(&src).unwrap_err();
        assert!(matches!(err, Error::Range(_)), "{err}");
        assert_eq!(exit_code(&err), 3);
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-20, 2.5e300, -0.0] {
            assert_eq!(format_float(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
