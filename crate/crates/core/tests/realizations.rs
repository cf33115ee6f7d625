mod common;

use collective::error::Error;
use collective::geometry::{CollectiveField, Hamiltonian, PhasePoint, Realization, VectorField};
use collective::hamiltonians::landmark_collective_hamiltonian;
use collective::integrators::{integrate, IntegratorConfig, Method};
use collective::realizations::{
    self, omega, square, GeneralLinearSide, HopfSo3, Landmarks, O3ToSo3, OrthoSymplectic,
    OrthoSymplecticSide, RealizationId, Sl2FromO3Invariants,
};
use common::{catalog, fd_gradient, gaussian_vec, max_abs_diff, norm, rng};
use nalgebra::{DMatrix, SymmetricEigen};

#[test]
fn hopf_momentum_map_at_equal_real_components() {
    let r = realizations::build(&RealizationId::HopfSo3).unwrap();
    assert_eq!(r.momentum_map(&[1.0, 0.0, 1.0, 0.0]), vec![0.5, 0.0, 0.0]);
}

#[test]
fn o3_casimir_is_squared_norm() {
    let r = realizations::build(&RealizationId::O3ToSo3).unwrap();
    assert_eq!(r.casimirs(&[0.0, 0.0, 1.0])[0], 1.0);
}

#[test]
fn o_n_momentum_map_example() {
    let r = realizations::build(&RealizationId::OnSp2k {
        n: 3,
        k: 1,
        side: OrthoSymplecticSide::On,
    })
    .unwrap();
    // Q = e₁, P = e₂
    let x = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let w = r.momentum_map(&x);
    assert_eq!(w, vec![0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    // axial vector agrees with q×p
    let axial = [w[5], w[6], w[1]];
    assert_eq!(axial, [0.0, 0.0, 1.0]);
    assert_eq!(O3ToSo3.momentum_map(&x), vec![0.0, 0.0, 1.0]);
}

#[test]
fn sp_side_gram_is_psd_with_bounded_rank() {
    let mut g = rng(11);
    for (n, k) in [(3, 1), (2, 2), (3, 2), (1, 3)] {
        let r = OrthoSymplectic::new(n, k, OrthoSymplecticSide::Sp2k).unwrap();
        let bound = (2 * k).min(n);
        for _ in 0..100 {
            let x = gaussian_vec(&mut g, r.phase_dim(), 1.0);
            let w = square(&r.momentum_map(&x));
            // W = Ω XᵀX
            let gram = omega(k).transpose() * w;
            assert!((&gram - gram.transpose()).amax() <= 1e-12 * (1.0 + gram.amax()));
            let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
            let top = eig.amax();
            assert!(eig.iter().all(|&l| l >= -1e-10), "{eig:?}");
            let rank = eig.iter().filter(|&&l| l > 1e-10 * top.max(1.0)).count();
            assert!(rank <= bound, "rank {rank} > {bound} for n={n}, k={k}");
            assert!(r.in_range(&r.momentum_map(&x)));
        }
    }
}

#[test]
fn o_n_side_is_antisymmetric_of_rank_at_most_two_k() {
    let mut g = rng(12);
    let (n, k) = (4, 1);
    let r = OrthoSymplectic::new(n, k, OrthoSymplecticSide::On).unwrap();
    for _ in 0..100 {
        let x = gaussian_vec(&mut g, r.phase_dim(), 1.0);
        let w = square(&r.momentum_map(&x));
        assert!((&w + w.transpose()).amax() <= 1e-14);
        let sv = w.singular_values();
        let rank = sv.iter().filter(|&&s| s > 1e-10 * sv.amax()).count();
        assert!(rank <= 2 * k);
    }
}

#[test]
fn hopf_norm_is_quarter_of_invariant() {
    let mut g = rng(13);
    for _ in 0..100 {
        let z = gaussian_vec(&mut g, 4, 1.5);
        let w = HopfSo3.momentum_map(&z);
        let i = HopfSo3.quadratic_invariants(&z)[0];
        assert!((norm(&w) - i / 4.0).abs() <= 1e-12 * (1.0 + i));
        assert!((HopfSo3.casimirs(&w)[1] - i / 4.0).abs() <= 1e-12 * (1.0 + i));
    }
}

#[test]
fn sl2_casimir_pulls_back_to_squared_angular_momentum() {
    let mut g = rng(14);
    for _ in 0..100 {
        let x = gaussian_vec(&mut g, 6, 1.0);
        let c = Sl2FromO3Invariants::casimir(&Sl2FromO3Invariants.momentum_map(&x));
        let l = O3ToSo3.momentum_map(&x);
        let l2: f64 = l.iter().map(|v| v * v).sum();
        assert!((c - l2).abs() <= 1e-12 * (1.0 + l2), "{c} vs {l2}");
        assert!(c >= -1e-12);
    }
}

#[test]
fn quadratic_invariants_poisson_commute_with_the_momentum_map() {
    let mut g = rng(15);
    let mut seen = Vec::new();
    for (id, _) in catalog() {
        // landmark invariants belong to the Hamiltonian, not to an identity map
        if matches!(id, RealizationId::Landmarks { .. }) || seen.contains(&id) {
            continue;
        }
        seen.push(id.clone());
        let r = realizations::build(&id).unwrap();
        let layout = r.layout();
        for _ in 0..10 {
            let x = gaussian_vec(&mut g, r.phase_dim(), 1.0);
            let m = r.dual_dim();
            let grads_j: Vec<Vec<f64>> = (0..m)
                .map(|b| fd_gradient(|y| r.momentum_map(y)[b], &x))
                .collect();
            let names = r.invariant_names();
            for a in 0..names.len() {
                let grad_i = fd_gradient(|y| r.quadratic_invariants(y)[a], &x);
                for (b, grad_j) in grads_j.iter().enumerate() {
                    let br = layout.bracket(&grad_i, grad_j);
                    assert!(br.abs() <= 1e-8, "{}: {{{}, J[{b}]}} = {br:e}", r.name(), names[a]);
                }
            }
        }
    }
}

#[test]
fn the_invariant_list_matches_its_names() {
    let mut g = rng(16);
    for (id, _) in catalog() {
        let r = realizations::build(&id).unwrap();
        let x = gaussian_vec(&mut g, r.phase_dim(), 1.0);
        assert_eq!(r.quadratic_invariants(&x).len(), r.invariant_names().len(), "{}", r.name());
        let w = r.momentum_map(&x);
        assert_eq!(w.len(), r.dual_dim());
        assert_eq!(r.casimirs(&w).len(), r.casimir_names().len(), "{}", r.name());
    }
}

fn landmark_field(d: usize, n: usize, sigma: f64) -> (Landmarks, impl Hamiltonian) {
    (Landmarks::new(d, n, sigma).unwrap(), landmark_collective_hamiltonian(d, n, sigma))
}

#[test]
fn single_landmark_moves_freely() {
    for d in [2, 3] {
        let (r, h) = landmark_field(d, 1, 0.8);
        let field = CollectiveField::new(&r, &h).unwrap();
        let mut g = rng(17);
        let x = gaussian_vec(&mut g, 2 * d, 1.0);
        let (q, p) = x.split_at(d);
        let norm2: f64 = p.iter().map(|v| v * v).sum();
        assert!((h.value(0.0, &x) - 0.5 * norm2).abs() <= 1e-15);
        let mut out = vec![0.0; 2 * d];
        field.eval(0.0, &x, &mut out);
        assert_eq!(&out[..d], p);
        assert!(out[d..].iter().all(|&v| v == 0.0), "{out:?}");
        assert_eq!(q.len(), d);
    }
}

#[test]
fn two_landmark_energy_example() {
    let (_, h) = landmark_field(2, 2, 1.0);
    // q₁, q₂, then p₁, p₂
    let x = [0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    assert!((h.value(0.0, &x) - 0.5).abs() <= 1e-15);
    let fd = fd_gradient(|y| h.value(0.0, y), &x);
    assert!(max_abs_diff(&h.gradient(0.0, &x), &fd) <= 1e-9);
    let mut g = rng(18);
    for _ in 0..20 {
        let y = gaussian_vec(&mut g, 8, 1.0);
        let fd = fd_gradient(|z| h.value(0.0, z), &y);
        assert!(max_abs_diff(&h.gradient(0.0, &y), &fd) <= 1e-8);
    }
}

#[test]
fn coincident_opposite_landmarks_keep_zero_total_momentum() {
    let (r, h) = landmark_field(2, 2, 1.0);
    let x0 = PhasePoint::new(vec![0.3, -0.2, 0.3, -0.2, 0.7, 0.4, -0.7, -0.4]);
    let traj = integrate(&r, &h, &x0, 0.0, 5.0, &IntegratorConfig::new(Method::Midpoint, 0.05)).unwrap();
    for s in &traj.samples {
        let inv = r.quadratic_invariants(&s.x);
        assert!(inv[0].abs() <= 1e-14 && inv[1].abs() <= 1e-14, "{inv:?}");
    }
}

#[test]
fn invalid_parameters_are_configuration_errors() {
    let bad = [
        RealizationId::OnSp2k { n: 3, k: 0, side: OrthoSymplecticSide::On },
        RealizationId::OnSp2k { n: 0, k: 1, side: OrthoSymplecticSide::Sp2k },
        RealizationId::GlnGlk { n: 2, k: 0, side: GeneralLinearSide::Gln },
        RealizationId::GlnGlk { n: 0, k: 2, side: GeneralLinearSide::Glk },
        RealizationId::Landmarks { d: 4, n_landmarks: 2, kernel_width: 1.0 },
        RealizationId::Landmarks { d: 2, n_landmarks: 0, kernel_width: 1.0 },
        RealizationId::Landmarks { d: 2, n_landmarks: 2, kernel_width: 0.0 },
        RealizationId::Landmarks { d: 3, n_landmarks: 2, kernel_width: f64::NAN },
    ];
    for id in &bad {
        match realizations::build(id) {
            Err(Error::Config(_)) => {}
            Err(e) => panic!("{id:?}: unexpected error {e}"),
            Ok(r) => panic!("{id:?}: built {}", r.name()),
        }
    }
}

#[test]
fn gl_sides_are_transposes_of_each_other() {
    let mut g = rng(19);
    let (n, k) = (3, 2);
    let rn = realizations::build(&RealizationId::GlnGlk { n, k, side: GeneralLinearSide::Gln }).unwrap();
    let rk = realizations::build(&RealizationId::GlnGlk { n, k, side: GeneralLinearSide::Glk }).unwrap();
    let x = gaussian_vec(&mut g, 2 * n * k, 1.0);
    // each side's invariants are the other side's momentum map
    assert!(max_abs_diff(&rn.quadratic_invariants(&x), &rk.momentum_map(&x)) <= 1e-15);
    assert!(max_abs_diff(&rk.quadratic_invariants(&x), &rn.momentum_map(&x)) <= 1e-15);
    let wn = DMatrix::from_row_slice(n, n, &rn.momentum_map(&x));
    let wk = DMatrix::from_row_slice(k, k, &rk.momentum_map(&x));
    // tr (QPᵀ)ⁱ = tr (QᵀP)ⁱ
    let (mut pn, mut pk) = (wn.clone(), wk.clone());
    for _ in 0..3 {
        assert!((pn.trace() - pk.trace()).abs() <= 1e-12 * (1.0 + pn.trace().abs()));
        pn = &pn * &wn;
        pk = &pk * &wk;
    }
}
