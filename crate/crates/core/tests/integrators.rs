mod common;

use collective::diagnostics::{convergence_order, invariant_drift};
use collective::error::Error;
use collective::geometry::{CollectiveField, FnField, Hamiltonian, Layout, PhasePoint, Realization};
use collective::hamiltonians::{Monomial, Polynomial, RigidBody, Sl2Quartic};
use collective::integrators::{
    gauss_step, gauss_tableau, integrate, integrate_with, midpoint_step, step_count, IntegratorConfig, Method,
    Sampling, StageSolver, Stepper,
};
use collective::oracle::{cayley, pade_stability};
use collective::realizations::{self, HopfSo3, Sl2FromO3Invariants};
use common::{catalog, gaussian_vec, max_abs_diff, norm, rng};
use nalgebra::{DMatrix, DVector};

fn linear_field(a: DMatrix<f64>) -> FnField<impl Fn(f64, &[f64], &mut [f64])> {
    let n = a.nrows();
    FnField::new(n, move |_t: f64, x: &[f64], out: &mut [f64]| {
        let y = &a * DVector::from_column_slice(x);
        out.copy_from_slice(y.as_slice());
    })
}

fn fig1_start() -> PhasePoint {
    PhasePoint::new(Sl2FromO3Invariants.fiber_lift(&[1.0, 2.5, 0.0]).unwrap())
}

fn fig2_start() -> PhasePoint {
    PhasePoint::new(HopfSo3.fiber_lift(&[0.6, 0.0, 0.8]).unwrap())
}

#[test]
fn gauss_two_tableau_and_order_conditions() {
    let t = gauss_tableau(2).unwrap();
    let r = 3f64.sqrt() / 6.0;
    assert!(max_abs_diff(&t.c, &[0.5 - r, 0.5 + r]) <= 1e-15);
    assert!(max_abs_diff(&t.b, &[0.5, 0.5]) <= 1e-15);
    assert!(max_abs_diff(&t.a[0], &[0.25, 0.25 - r]) <= 1e-15);
    assert!(max_abs_diff(&t.a[1], &[0.25 + r, 0.25]) <= 1e-15);
    // quadrature conditions Σ bᵢcᵢ^(k−1) = 1/k through order 4
    for k in 1..=4 {
        let q: f64 = (0..2).map(|i| t.b[i] * t.c[i].powi(k - 1)).sum();
        assert!((q - 1.0 / k as f64).abs() <= 1e-15, "k = {k}");
    }
}

#[test]
fn every_tableau_is_symplectic() {
    for s in 1..=5 {
        let t = gauss_tableau(s).unwrap();
        for i in 0..s {
            for j in 0..s {
                let d = t.b[i] * t.a[i][j] + t.b[j] * t.a[j][i] - t.b[i] * t.b[j];
                assert!(d.abs() <= 1e-14, "s = {s}, ({i}, {j}): {d:e}");
            }
        }
        // nodes are the roots of the shifted Legendre polynomial: Σ bᵢ cᵢ^(k−1) = 1/k up to 2s
        for k in 1..=2 * s as i32 {
            let q: f64 = (0..s).map(|i| t.b[i] * t.c[i].powi(k - 1)).sum();
            assert!((q - 1.0 / k as f64).abs() <= 1e-14, "s = {s}, k = {k}");
        }
    }
    assert!(matches!(gauss_tableau(0), Err(Error::Config(_))));
    assert!(matches!(gauss_tableau(6), Err(Error::Config(_))));
}

#[test]
fn midpoint_on_linear_fields_is_the_cayley_map() {
    let mut g = rng(21);
    let a = DMatrix::from_vec(3, 3, gaussian_vec(&mut g, 9, 0.5));
    let f = linear_field(a.clone());
    let x0 = [0.3, -1.2, 0.8];
    let dt = 0.2;
    let cfg = IntegratorConfig::new(Method::Midpoint, dt);
    let got = midpoint_step(&f, 0.0, &x0, dt, &cfg).unwrap().x_next;
    let want = cayley(&a, dt).unwrap() * DVector::from_column_slice(&x0);
    assert!(max_abs_diff(&got, want.as_slice()) <= 1e-12);
}

#[test]
fn midpoint_harmonic_oscillator_preserves_the_norm() {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let f = linear_field(a.clone());
    let cfg = IntegratorConfig::new(Method::Midpoint, 0.1).with_stage_tol(1e-16);
    let x1 = midpoint_step(&f, 0.0, &[1.0, 0.0], 0.1, &cfg).unwrap().x_next;
    let want = cayley(&a, 0.1).unwrap() * DVector::from_column_slice(&[1.0, 0.0]);
    assert!(max_abs_diff(&x1, want.as_slice()) <= 1e-15);
    assert!((norm(&x1) - 1.0).abs() <= 1e-15);
}

#[test]
fn zero_field_is_a_fixed_point_for_every_method() {
    let f = FnField::new(4, |_t: f64, _x: &[f64], out: &mut [f64]| out.fill(0.0));
    let x0 = [1.0, -2.0, 0.5, 3.0];
    for dt in [0.1, -0.7, 5.0] {
        let cfg = IntegratorConfig::new(Method::Midpoint, dt);
        assert_eq!(midpoint_step(&f, 0.0, &x0, dt, &cfg).unwrap().x_next, x0.to_vec());
        for s in 1..=5 {
            let tab = gauss_tableau(s).unwrap();
            assert_eq!(gauss_step(&f, 0.0, &x0, dt, &tab, &cfg).unwrap().x_next, x0.to_vec());
        }
    }
}

#[test]
fn one_stage_gauss_is_bitwise_midpoint() {
    let r = HopfSo3;
    let h = RigidBody::reference();
    let field = CollectiveField::new(&r, &h).unwrap();
    let tab = gauss_tableau(1).unwrap();
    let mut g = rng(22);
    for solver in [StageSolver::FixedPoint, StageSolver::Newton] {
        let cfg = IntegratorConfig::new(Method::Midpoint, 0.05).with_solver(solver);
        for _ in 0..20 {
            let x = gaussian_vec(&mut g, 4, 1.0);
            let m = midpoint_step(&field, 0.3, &x, 0.05, &cfg).unwrap();
            let s1 = gauss_step(&field, 0.3, &x, 0.05, &tab, &cfg).unwrap();
            assert_eq!(m, s1);
        }
    }
}

#[test]
fn gauss_stability_functions_are_diagonal_pade() {
    let f = FnField::new(1, |_t: f64, x: &[f64], out: &mut [f64]| out[0] = x[0]);
    let cfg = IntegratorConfig::new(Method::Gauss(2), 0.1).with_stage_tol(1e-15);
    let tab = gauss_tableau(2).unwrap();
    let x1 = gauss_step(&f, 0.0, &[1.0], 0.1, &tab, &cfg).unwrap().x_next[0];
    let h: f64 = 0.1;
    let r = (1.0 + h / 2.0 + h * h / 12.0) / (1.0 - h / 2.0 + h * h / 12.0);
    assert!((x1 - r).abs() <= 1e-12);
    // e^0.1 = 1.10517091808…, matched to O(h⁵)
    assert!((x1 - 1.10517091808).abs() <= 2e-8);
    assert!((x1 - h.exp()).abs() <= h.powi(5) / 100.0);
    for s in 1..=5 {
        let tab = gauss_tableau(s).unwrap();
        let x1 = gauss_step(&f, 0.0, &[1.0], 0.1, &tab, &cfg).unwrap().x_next[0];
        assert!((x1 - pade_stability(s, 0.1)).abs() <= 1e-12, "s = {s}");
    }
}

#[test]
fn hopf_invariant_is_kept_by_every_gauss_method() {
    let h = RigidBody::reference();
    let x0 = fig2_start();
    let i0 = HopfSo3.quadratic_invariants(&x0)[0];
    for s in 1..=5 {
        let cfg = IntegratorConfig::new(Method::Gauss(s), 0.04).with_stage_tol(1e-15);
        let traj = integrate(&HopfSo3, &h, &x0, 0.0, 400.0, &cfg).unwrap();
        assert_eq!(traj.samples.len(), 10_001);
        let drift = invariant_drift(&traj, &HopfSo3);
        assert!(drift[0].max_rel_deviation <= 1e-11, "s = {s}: {:e}", drift[0].max_rel_deviation);
        assert_eq!(drift[0].initial, i0);
    }
}

fn sl2_field<'a>(r: &'a dyn Realization, h: &'a dyn Hamiltonian) -> CollectiveField<'a> {
    CollectiveField::new(r, h).unwrap().assume_separable(true)
}

#[test]
fn stormer_verlet_free_motion_is_exact() {
    let r = Sl2FromO3Invariants;
    let h = Polynomial::new(3, vec![Monomial { coefficient: 0.5, powers: vec![0, 1, 0] }]).unwrap();
    let cfg = IntegratorConfig::new(Method::StormerVerlet, 0.3);
    let x0 = [0.2, -1.0, 0.5, 1.5, 0.3, -0.7];
    for field in [sl2_field(&r, &h), CollectiveField::new(&r, &h).unwrap()] {
        let x1 = Stepper::new(&field, &cfg).unwrap().step(0.0, &x0, 0.3).unwrap().x_next;
        let want = [0.2 + 0.3 * 1.5, -1.0 + 0.3 * 0.3, 0.5 - 0.3 * 0.7, 1.5, 0.3, -0.7];
        assert!(max_abs_diff(&x1, &want) <= 1e-14, "{x1:?}");
    }
}

#[test]
fn stormer_verlet_keeps_angular_momentum_on_the_sl2_system() {
    let r = Sl2FromO3Invariants;
    let h = Sl2Quartic;
    let field = sl2_field(&r, &h);
    let cfg = IntegratorConfig::new(Method::StormerVerlet, 0.01);
    let traj = integrate_with(&field, &fig1_start(), 0.0, 100.0, &cfg, Sampling::default()).unwrap();
    assert_eq!(traj.samples.len(), 10_001);
    for d in invariant_drift(&traj, &r) {
        assert!(d.max_rel_deviation <= 1e-11, "{}: {:e}", d.quantity, d.max_rel_deviation);
    }
}

#[test]
fn stormer_verlet_is_second_order() {
    let r = Sl2FromO3Invariants;
    let h = Sl2Quartic;
    let cfg = IntegratorConfig::new(Method::StormerVerlet, 0.02).with_stage_tol(1e-15);
    let study = convergence_order(&r, &h, &fig1_start(), 0.0, 1.0, &cfg, &[0.02, 0.01, 0.005], 1e-12).unwrap();
    assert!(!study.inconclusive);
    for p in study.conclusive_orders() {
        assert!((p - 2.0).abs() <= 0.1, "{study:?}");
    }
}

#[test]
fn trajectories_land_on_the_end_time() {
    let r = HopfSo3;
    let h = RigidBody::reference();
    let x0 = fig2_start();
    let cfg = IntegratorConfig::new(Method::Midpoint, 0.3);
    let traj = integrate(&r, &h, &x0, 0.0, 1.0, &cfg).unwrap();
    assert_eq!(traj.samples.len(), step_count(0.0, 1.0, 0.3) + 1);
    assert_eq!(traj.samples.len(), 5);
    assert_eq!(traj.last().unwrap().t, 1.0);
    assert!(traj.is_time_ordered());

    let single = integrate(&r, &h, &x0, 2.0, 2.0, &cfg).unwrap();
    assert_eq!(single.samples.len(), 1);
    assert_eq!(single.samples[0].x, x0.0);

    let back = integrate(&r, &h, &x0, 1.0, 0.0, &IntegratorConfig::new(Method::Midpoint, -0.25)).unwrap();
    assert_eq!(back.samples.len(), 5);
    assert_eq!(back.last().unwrap().t, 0.0);
    assert!(back.is_time_ordered());

    let wrong_way = integrate(&r, &h, &x0, 0.0, 1.0, &IntegratorConfig::new(Method::Midpoint, -0.1));
    assert!(matches!(wrong_way, Err(Error::Config(_))));
}

fn canonical_form(layout: &Layout) -> DMatrix<f64> {
    let n = layout.dim();
    let mut om = DMatrix::zeros(n, n);
    for i in 0..layout.pairs() {
        om[(layout.q_index(i), layout.p_index(i))] = 1.0;
        om[(layout.p_index(i), layout.q_index(i))] = -1.0;
    }
    om
}

fn step_jacobian(stepper: &Stepper<'_>, x: &[f64], dt: f64) -> DMatrix<f64> {
    let n = x.len();
    let eps = 1e-5;
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += eps;
        xm[j] -= eps;
        let fp = stepper.step(0.0, &xp, dt).unwrap().x_next;
        let fm = stepper.step(0.0, &xm, dt).unwrap().x_next;
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * eps);
        }
    }
    jac
}

#[test]
fn one_step_maps_are_symplectic() {
    let mut g = rng(23);
    let hopf = HopfSo3;
    let rb = RigidBody::reference();
    let hopf_field = CollectiveField::new(&hopf, &rb).unwrap();
    let sl2 = Sl2FromO3Invariants;
    let quartic = Sl2Quartic;
    let sl2_field = CollectiveField::new(&sl2, &quartic).unwrap();
    let mut methods: Vec<(Method, &CollectiveField<'_>)> = vec![(Method::Midpoint, &hopf_field)];
    for s in 1..=5 {
        methods.push((Method::Gauss(s), &hopf_field));
    }
    methods.push((Method::StormerVerlet, &sl2_field));
    methods.push((Method::Midpoint, &sl2_field));
    for (method, field) in methods {
        let stepper = Stepper::new(field, &IntegratorConfig::new(method, 0.1).with_stage_tol(1e-15)).unwrap();
        let om = canonical_form(&field.realization().layout());
        for _ in 0..5 {
            let x = gaussian_vec(&mut g, om.nrows(), 0.7);
            let d = step_jacobian(&stepper, &x, 0.1);
            let defect = (d.transpose() * &om * &d - &om).amax();
            assert!(defect <= 1e-7, "{}: {defect:e}", method.label());
        }
    }
}

#[test]
fn midpoint_is_time_symmetric() {
    let r = HopfSo3;
    let h = RigidBody::reference();
    let field = CollectiveField::new(&r, &h).unwrap();
    let cfg = IntegratorConfig::new(Method::Midpoint, 0.1);
    let stepper = Stepper::new(&field, &cfg).unwrap();
    let mut g = rng(24);
    for _ in 0..20 {
        let x0 = gaussian_vec(&mut g, 4, 1.0);
        let x1 = stepper.step(0.0, &x0, 0.1).unwrap().x_next;
        let back = stepper.step(0.1, &x1, -0.1).unwrap().x_next;
        assert!(max_abs_diff(&back, &x0) <= 1e-12 * (1.0 + norm(&x0)));
    }
}

fn invariant_scale(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-3)
}

fn worst_invariant_drift(r: &dyn Realization, h: &dyn Hamiltonian, x0: &PhasePoint, cfg: &IntegratorConfig) -> f64 {
    let traj = integrate(r, h, x0, 0.0, 1000.0 * cfg.dt, cfg).unwrap();
    let scale = invariant_scale(&r.quadratic_invariants(x0));
    invariant_drift(&traj, r)
        .iter()
        .map(|d| d.max_abs_deviation / scale)
        .fold(0.0, f64::max)
}

#[test]
fn gauss_methods_keep_every_catalog_invariant() {
    let mut g = rng(25);
    for (id, entry) in catalog() {
        let r = realizations::build(&id).unwrap();
        if r.invariant_names().is_empty() {
            continue;
        }
        let h = entry.build(&id, r.as_ref()).unwrap();
        let x0 = PhasePoint::new(gaussian_vec(&mut g, r.phase_dim(), 0.5));
        for s in 1..=5 {
            let cfg = IntegratorConfig::new(Method::Gauss(s), 0.02).with_stage_tol(1e-13);
            let drift = worst_invariant_drift(r.as_ref(), h.as_ref(), &x0, &cfg);
            assert!(drift <= 1e-10, "{} / gauss{s}: {drift:e}", r.name());
        }
    }
}

#[test]
fn stormer_verlet_keeps_bilinear_invariants_of_partitioned_realizations() {
    let mut g = rng(26);
    for (id, entry) in catalog() {
        let r = realizations::build(&id).unwrap();
        if !r.partition_compatible() || r.invariant_names().is_empty() {
            continue;
        }
        let h = entry.build(&id, r.as_ref()).unwrap();
        let x0 = PhasePoint::new(gaussian_vec(&mut g, r.phase_dim(), 0.5));
        let cfg = IntegratorConfig::new(Method::StormerVerlet, 0.02).with_stage_tol(1e-13);
        let drift = worst_invariant_drift(r.as_ref(), h.as_ref(), &x0, &cfg);
        assert!(drift <= 1e-10, "{}: {drift:e}", r.name());
    }
}

#[test]
fn loose_stage_tolerance_shows_in_the_invariants() {
    let h = RigidBody::reference();
    let x0 = fig2_start();
    let tight = IntegratorConfig::new(Method::Gauss(2), 0.04).with_stage_tol(1e-13);
    let loose = tight.with_stage_tol(1e-6);
    let d_tight = worst_invariant_drift(&HopfSo3, &h, &x0, &tight);
    let d_loose = worst_invariant_drift(&HopfSo3, &h, &x0, &loose);
    assert!(d_tight <= 1e-10, "{d_tight:e}");
    assert!(d_loose > 100.0 * d_tight.max(1e-15), "{d_loose:e} vs {d_tight:e}");
}

#[test]
fn continuation_rescues_a_step_fixed_point_cannot_take() {
    // fixed point contracts only for dt·λ/2 < 1
    let lambda = 50.0;
    let f = FnField::new(1, move |_t: f64, x: &[f64], out: &mut [f64]| out[0] = -lambda * x[0]);
    let dt = 0.1;
    let mut cfg = IntegratorConfig::new(Method::Midpoint, dt);
    let res = midpoint_step(&f, 0.0, &[1.0], dt, &cfg).unwrap();
    let z = -lambda * dt;
    assert!((res.x_next[0] - (1.0 + z / 2.0) / (1.0 - z / 2.0)).abs() <= 1e-12);

    cfg.continuation = 0;
    let failure = midpoint_step(&f, 0.0, &[1.0], dt, &cfg).unwrap_err();
    assert_eq!(failure.dt, dt);
    assert!(failure.residual > cfg.stage_tol);

    cfg.continuation = 17;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
}
