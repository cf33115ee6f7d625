//! Catalog of concrete realizations.
//!
//! | id | M | g* | J |
//! |----|---|----|---|
//! | `affine_a1` | T*R | a(1)* | `(qp, p)` |
//! | `affine_a1_diagonal` | T*R² | a(1)* | `(p·q, p₁+p₂)` |
//! | `o3_to_so3` | T*R³ | so(3)* | `q×p` |
//! | `sl2_from_o3_invariants` | T*R³ | sl(2)* | `(q·q, p·p, q·p)` |
//! | `hopf_so3` | R⁴ = C² | so(3)* | `(½ z̄₁z₂, ¼(|z₁|²−|z₂|²))` |
//! | `on_sp2k` | T*R^{n×k} | o(n)* or sp(2k)* | `QPᵀ−PQᵀ` or `Ω XᵀX` |
//! | `gln_glk` | T*R^{n×k} | gl(n)* or gl(k)* | `QPᵀ` or `QᵀP` |
//! | `landmarks` | T*R^{dn} | landmark measures | `Σ pᵢ δ(· − qᵢ)` |

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, RangeError, Result};
use crate::geometry::{norm, Layout, Realization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrthoSymplecticSide {
    #[serde(rename = "o_n")]
    On,
    #[serde(rename = "sp_2k")]
    Sp2k,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneralLinearSide {
    #[serde(rename = "gl_n")]
    Gln,
    #[serde(rename = "gl_k")]
    Glk,
}

/// Addressable name and parameters of a catalog realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RealizationId {
    AffineA1,
    AffineA1Diagonal,
    O3ToSo3,
    Sl2FromO3Invariants,
    HopfSo3,
    OnSp2k {
        n: usize,
        k: usize,
        side: OrthoSymplecticSide,
    },
    GlnGlk {
        n: usize,
        k: usize,
        side: GeneralLinearSide,
    },
    Landmarks {
        d: usize,
        n_landmarks: usize,
        kernel_width: f64,
    },
}

/// Builds the realization named by `id`.
pub fn build(id: &RealizationId) -> Result<Box<dyn Realization>> {
    Ok(match *id {
        RealizationId::AffineA1 => Box::new(AffineA1),
        RealizationId::AffineA1Diagonal => Box::new(AffineA1Diagonal),
        RealizationId::O3ToSo3 => Box::new(O3ToSo3),
        RealizationId::Sl2FromO3Invariants => Box::new(Sl2FromO3Invariants),
        RealizationId::HopfSo3 => Box::new(HopfSo3),
        RealizationId::OnSp2k { n, k, side } => Box::new(OrthoSymplectic::new(n, k, side)?),
        RealizationId::GlnGlk { n, k, side } => Box::new(GeneralLinear::new(n, k, side)?),
        RealizationId::Landmarks {
            d,
            n_landmarks,
            kernel_width,
        } => Box::new(Landmarks::new(d, n_landmarks, kernel_width)?),
    })
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn range_tol(w: &[f64]) -> f64 {
    1e-12 * (1.0 + norm(w)).powi(2)
}

// ---------------------------------------------------------------------------
// Affine group A(1)

/// Cotangent lift of `x ↦ ax + b` on `T*R`; `J(q, p) = (qp, p)`.
///
/// `J(M)` is the origin together with the two open half-planes `w₂ ≠ 0`. The
/// orbit closures `{p ≥ 0}`, `{p ≤ 0}` and `{p = 0}` are polyhedral, so the
/// sign of `p` is the orbit data the diagnostics track; there are no
/// quadratic invariants.
#[derive(Debug, Clone, Copy, Default)]
pub struct AffineA1;

impl Realization for AffineA1 {
    fn name(&self) -> String {
        "affine_a1".into()
    }
    fn layout(&self) -> Layout {
        Layout::Blocks { pairs: 1 }
    }
    fn dual_dim(&self) -> usize {
        2
    }
    fn momentum_map(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0] * x[1], x[1]]
    }
    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[x[1], x[0], 0.0, 1.0])
    }
    fn generator(&self, a: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        let (q, p) = (x[0], x[1]);
        Some(vec![q * a[0] + a[1], -p * a[0]])
    }
    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError> {
        self.range_check(w)?;
        if w[1] != 0.0 {
            Ok(vec![w[0] / w[1], w[1]])
        } else {
            Ok(vec![0.0, 0.0])
        }
    }
    fn range_check(&self, w: &[f64]) -> Result<(), RangeError> {
        if w[1] == 0.0 && w[0] != 0.0 {
            return Err(RangeError::new(
                &self.name(),
                "w₂ = 0 requires w₁ = 0 (J(M) is the origin plus the half-planes w₂ ≠ 0)",
                w,
            ));
        }
        Ok(())
    }
    fn invariant_names(&self) -> Vec<String> {
        Vec::new()
    }
    fn quadratic_invariants(&self, _x: &[f64]) -> Vec<f64> {
        Vec::new()
    }
    fn casimir_names(&self) -> Vec<String> {
        Vec::new()
    }
    fn casimirs(&self, _w: &[f64]) -> Vec<f64> {
        Vec::new()
    }
    fn partition_compatible(&self) -> bool {
        true
    }
    fn sign_invariant_coordinates(&self) -> Vec<usize> {
        vec![1]
    }
}

/// Diagonal action of A(1) on `T*R²`; `J = (p·q, p₁+p₂)` is surjective.
/// Coordinates `(q₁, q₂, p₁, p₂)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct AffineA1Diagonal;

impl Realization for AffineA1Diagonal {
    fn name(&self) -> String {
        "affine_a1_diagonal".into()
    }
    fn layout(&self) -> Layout {
        Layout::Blocks { pairs: 2 }
    }
    fn dual_dim(&self) -> usize {
        2
    }
    fn momentum_map(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0] * x[2] + x[1] * x[3], x[2] + x[3]]
    }
    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 4, &[x[2], x[3], x[0], x[1], 0.0, 0.0, 1.0, 1.0])
    }
    fn generator(&self, a: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![
            a[0] * x[0] + a[1],
            a[0] * x[1] + a[1],
            -a[0] * x[2],
            -a[0] * x[3],
        ])
    }
    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError> {
        if w[1] != 0.0 {
            Ok(vec![w[0] / w[1], 0.0, w[1], 0.0])
        } else if w[0] != 0.0 {
            Ok(vec![w[0], 0.0, 1.0, -1.0])
        } else {
            Ok(vec![0.0; 4])
        }
    }
    fn range_check(&self, _w: &[f64]) -> Result<(), RangeError> {
        Ok(())
    }
    fn invariant_names(&self) -> Vec<String> {
        vec!["(q2-q1)p1".into(), "(q2-q1)p2".into()]
    }
    fn quadratic_invariants(&self, x: &[f64]) -> Vec<f64> {
        let d = x[1] - x[0];
        vec![d * x[2], d * x[3]]
    }
    fn casimir_names(&self) -> Vec<String> {
        Vec::new()
    }
    fn casimirs(&self, _w: &[f64]) -> Vec<f64> {
        Vec::new()
    }
    fn partition_compatible(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// The O(3) / SL(2) dual pair on T*R³

/// Angular momentum `J₁ = q×p` of the cotangent-lifted O(3) action.
#[derive(Debug, Clone, Copy, Default)]
pub struct O3ToSo3;

impl Realization for O3ToSo3 {
    fn name(&self) -> String {
        "o3_to_so3".into()
    }
    fn layout(&self) -> Layout {
        Layout::Blocks { pairs: 3 }
    }
    fn dual_dim(&self) -> usize {
        3
    }
    fn momentum_map(&self, x: &[f64]) -> Vec<f64> {
        cross(&x[..3], &x[3..]).to_vec()
    }
    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (q, p) = (&x[..3], &x[3..]);
        // ∂(q×p)/∂q = -[p]ₓ, ∂(q×p)/∂p = [q]ₓ
        #[rustfmt::skip]
        let rows = [
            0.0,   p[2], -p[1],   0.0,  -q[2],  q[1],
            -p[2], 0.0,   p[0],   q[2],  0.0,  -q[0],
            p[1], -p[0],  0.0,   -q[1],  q[0],  0.0,
        ];
        DMatrix::from_row_slice(3, 6, &rows)
    }
    fn generator(&self, a: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        let qa = cross(&x[..3], a);
        let pa = cross(&x[3..], a);
        Some(vec![-qa[0], -qa[1], -qa[2], -pa[0], -pa[1], -pa[2]])
    }
    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError> {
        let r = norm(w);
        if r == 0.0 {
            return Ok(vec![0.0; 6]);
        }
        let n = [w[0] / r, w[1] / r, w[2] / r];
        // least-aligned coordinate axis
        let axis = (0..3)
            .min_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs()))
            .unwrap();
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let e1 = cross(&n, &e);
        let l = norm(&e1);
        let e1 = [e1[0] / l, e1[1] / l, e1[2] / l];
        let e2 = cross(&n, &e1);
        let s = r.sqrt();
        Ok(vec![
            s * e1[0],
            s * e1[1],
            s * e1[2],
            s * e2[0],
            s * e2[1],
            s * e2[2],
        ])
    }
    fn range_check(&self, _w: &[f64]) -> Result<(), RangeError> {
        Ok(())
    }
    fn invariant_names(&self) -> Vec<String> {
        vec!["q.q".into(), "p.p".into(), "q.p".into()]
    }
    fn quadratic_invariants(&self, x: &[f64]) -> Vec<f64> {
        let (q, p) = (&x[..3], &x[3..]);
        vec![
            crate::geometry::dot(q, q),
            crate::geometry::dot(p, p),
            crate::geometry::dot(q, p),
        ]
    }
    fn casimir_names(&self) -> Vec<String> {
        vec!["|w|^2".into()]
    }
    fn casimirs(&self, w: &[f64]) -> Vec<f64> {
        vec![crate::geometry::dot(w, w)]
    }
    fn partition_compatible(&self) -> bool {
        // q·q and p·p are quadratic but not bilinear
        false
    }
}

/// `J₂ = (q·q, p·p, q·p)` into sl(2)*, the algebra of O(3) invariants.
///
/// The range is the solid cone `w₁ ≥ 0, w₂ ≥ 0, w₁w₂ − w₃² ≥ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sl2FromO3Invariants;

impl Sl2FromO3Invariants {
    pub fn casimir(w: &[f64]) -> f64 {
        w[0] * w[1] - w[2] * w[2]
    }
}

impl Realization for Sl2FromO3Invariants {
    fn name(&self) -> String {
        "sl2_from_o3_invariants".into()
    }
    fn layout(&self) -> Layout {
        Layout::Blocks { pairs: 3 }
    }
    fn dual_dim(&self) -> usize {
        3
    }
    fn momentum_map(&self, x: &[f64]) -> Vec<f64> {
        let (q, p) = (&x[..3], &x[3..]);
        vec![
            crate::geometry::dot(q, q),
            crate::geometry::dot(p, p),
            crate::geometry::dot(q, p),
        ]
    }
    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (q, p) = (&x[..3], &x[3..]);
        let mut j = DMatrix::zeros(3, 6);
        for i in 0..3 {
            j[(0, i)] = 2.0 * q[i];
            j[(1, 3 + i)] = 2.0 * p[i];
            j[(2, i)] = p[i];
            j[(2, 3 + i)] = q[i];
        }
        j
    }
    fn generator(&self, a: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        let (q, p) = (&x[..3], &x[3..]);
        let mut out = vec![0.0; 6];
        for i in 0..3 {
            out[i] = 2.0 * a[1] * p[i] + a[2] * q[i];
            out[3 + i] = -(2.0 * a[0] * q[i] + a[2] * p[i]);
        }
        Some(out)
    }
    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError> {
        self.range_check(w)?;
        let (w1, w2, w3) = (w[0], w[1], w[2]);
        if w1 > 0.0 {
            let s = w1.sqrt();
            let c = Self::casimir(w).max(0.0);
            Ok(vec![s, 0.0, 0.0, w3 / s, (c / w1).sqrt(), 0.0])
        } else {
            Ok(vec![0.0, 0.0, 0.0, w2.max(0.0).sqrt(), 0.0, 0.0])
        }
    }
    fn range_check(&self, w: &[f64]) -> Result<(), RangeError> {
        let tol = range_tol(w);
        if w[0] < -tol {
            return Err(RangeError::new(&self.name(), "w₁ ≥ 0 (w₁ = q·q)", w));
        }
        if w[1] < -tol {
            return Err(RangeError::new(&self.name(), "w₂ ≥ 0 (w₂ = p·p)", w));
        }
        if Self::casimir(w) < -tol {
            return Err(RangeError::new(
                &self.name(),
                "C = w₁w₂ − w₃² ≥ 0 (solid cone)",
                w,
            ));
        }
        if w[0] <= 0.0 && w[2] != 0.0 {
            return Err(RangeError::new(&self.name(), "w₁ = 0 requires w₃ = 0", w));
        }
        Ok(())
    }
    fn invariant_names(&self) -> Vec<String> {
        vec!["(q×p)1".into(), "(q×p)2".into(), "(q×p)3".into()]
    }
    fn quadratic_invariants(&self, x: &[f64]) -> Vec<f64> {
        cross(&x[..3], &x[3..]).to_vec()
    }
    fn casimir_names(&self) -> Vec<String> {
        vec!["w1*w2-w3^2".into()]
    }
    fn casimirs(&self, w: &[f64]) -> Vec<f64> {
        vec![Self::casimir(w)]
    }
    fn partition_compatible(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Hopf fibration

/// SU(2) acting on `C²`, `z_j = q_j + i p_j`, coordinates `(q₁, p₁, q₂, p₂)`.
///
/// `w₁ + i w₂ = ½ z̄₁ z₂`, `w₃ = ¼(|z₁|² − |z₂|²)`. The single invariant
/// `I = |z₁|² + |z₂|²` satisfies `‖J(z)‖ = I/4`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HopfSo3;

impl Realization for HopfSo3 {
    fn name(&self) -> String {
        "hopf_so3".into()
    }
    fn layout(&self) -> Layout {
        Layout::Interleaved { pairs: 2 }
    }
    fn dual_dim(&self) -> usize {
        3
    }
    fn momentum_map(&self, x: &[f64]) -> Vec<f64> {
        let (q1, p1, q2, p2) = (x[0], x[1], x[2], x[3]);
        vec![
            0.5 * (q1 * q2 + p1 * p2),
            0.5 * (q1 * p2 - p1 * q2),
            0.25 * (q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2),
        ]
    }
    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (q1, p1, q2, p2) = (x[0], x[1], x[2], x[3]);
        #[rustfmt::skip]
        let rows = [
            q2, p2, q1, p1,
            p2, -q2, -p1, q1,
            q1, p1, -q2, -p2,
        ];
        DMatrix::from_row_slice(3, 4, &rows) * 0.5
    }
    fn generator(&self, a: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        // ż₁ = -½(i z₂ a₁ + z₂ a₂ + i z₁ a₃)
        // ż₂ =  ½(-i z₁ a₁ + z₁ a₂ + i z₂ a₃)
        let (q1, p1, q2, p2) = (x[0], x[1], x[2], x[3]);
        let (a1, a2, a3) = (a[0], a[1], a[2]);
        let dq1 = -0.5 * (-p2 * a1 + q2 * a2 - p1 * a3);
        let dp1 = -0.5 * (q2 * a1 + p2 * a2 + q1 * a3);
        let dq2 = 0.5 * (p1 * a1 + q1 * a2 - p2 * a3);
        let dp2 = 0.5 * (-q1 * a1 + p1 * a2 + q2 * a3);
        Some(vec![dq1, dp1, dq2, dp2])
    }
    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError> {
        let r = norm(w);
        if r == 0.0 {
            return Ok(vec![0.0; 4]);
        }
        let (w1, w2, w3) = (w[0], w[1], w[2]);
        if w3 >= 0.0 {
            // z₁ = √(2(r+w₃)) real, z₂ = 2(w₁ + i w₂)/z̄₁
            let z1 = (2.0 * (r + w3)).sqrt();
            Ok(vec![z1, 0.0, 2.0 * w1 / z1, 2.0 * w2 / z1])
        } else {
            // z₂ = √(2(r−w₃)) real, z₁ = 2(w₁ − i w₂)/z̄₂
            let z2 = (2.0 * (r - w3)).sqrt();
            Ok(vec![2.0 * w1 / z2, -2.0 * w2 / z2, z2, 0.0])
        }
    }
    fn range_check(&self, _w: &[f64]) -> Result<(), RangeError> {
        Ok(())
    }
    fn invariant_names(&self) -> Vec<String> {
        vec!["|z1|^2+|z2|^2".into()]
    }
    fn quadratic_invariants(&self, x: &[f64]) -> Vec<f64> {
        vec![x.iter().map(|v| v * v).sum()]
    }
    fn casimir_names(&self) -> Vec<String> {
        vec!["|w|^2".into(), "|w|".into()]
    }
    fn casimirs(&self, w: &[f64]) -> Vec<f64> {
        let n2 = crate::geometry::dot(w, w);
        vec![n2, n2.sqrt()]
    }
    fn partition_compatible(&self) -> bool {
        false
    }
}

// ---------------------------------------------------------------------------
// Matrix dual pairs on T*R^{n×k}

/// Splits `x = (Q, P)` (each `n×k`, row-major) into matrices.
fn unpack_qp(x: &[f64], n: usize, k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = n * k;
    (
        DMatrix::from_row_slice(n, k, &x[..m]),
        DMatrix::from_row_slice(n, k, &x[m..]),
    )
}

fn pack_qp(q: &DMatrix<f64>, p: &DMatrix<f64>) -> Vec<f64> {
    let mut out = flatten(q);
    out.extend(flatten(p));
    out
}

/// Row-major flattening.
pub fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Square matrix from a row-major slice.
pub fn square(w: &[f64]) -> DMatrix<f64> {
    let n = (w.len() as f64).sqrt().round() as usize;
    DMatrix::from_row_slice(n, n, w)
}

/// `Ω = [0, I; −I, 0]` of size `2k`.
pub fn omega(k: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        o[(i, k + i)] = 1.0;
        o[(k + i, i)] = -1.0;
    }
    o
}

/// `tr Wʲ` for `j = 1..=max_power`.
fn trace_powers(w: &DMatrix<f64>, max_power: usize) -> Vec<f64> {
    let mut acc = w.clone();
    let mut out = Vec::with_capacity(max_power);
    for j in 1..=max_power {
        if j > 1 {
            acc = &acc * w;
        }
        out.push(acc.trace());
    }
    out
}

fn sorted_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let s = sorted_singular_values(m);
    let tol = 1e-10 * (1.0 + s.first().copied().unwrap_or(0.0));
    s.iter().filter(|&&v| v > tol).count()
}

/// SVD with singular triplets sorted by decreasing singular value.
fn sorted_svd(m: &DMatrix<f64>) -> Vec<(f64, DVector<f64>, DVector<f64>)> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut triplets: Vec<_> = (0..svd.singular_values.len())
        .map(|i| {
            (
                svd.singular_values[i],
                u.column(i).into_owned(),
                vt.row(i).transpose().into_owned(),
            )
        })
        .collect();
    triplets.sort_by(|a, b| b.0.total_cmp(&a.0));
    triplets
}

/// The (O(n), Sp(2k)) dual pair. `X = [Q P] ∈ R^{n×2k}`.
///
/// * o(n) side: `J₁(X) = QPᵀ − PQᵀ`, generator `Ẋ = (aᵀ − a)X`; Casimirs
///   `tr W^{2i}`, `i = 1..⌊n/2⌋`; invariants are the entries of `XᵀX`.
/// * sp(2k) side: `J₂(X) = Ω XᵀX`, generator `Ẋ = X(C + Cᵀ)Ωᵀ` with
///   `C = bᵀΩ`; Casimirs `tr W^{2i}`, `i = 1..k`; invariants are the entries
///   of `QPᵀ − PQᵀ`, which are bilinear.
#[derive(Debug, Clone)]
pub struct OrthoSymplectic {
    n: usize,
    k: usize,
    side: OrthoSymplecticSide,
}

impl OrthoSymplectic {
    pub fn new(n: usize, k: usize, side: OrthoSymplecticSide) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::config(format!(
                "on_sp2k requires n ≥ 1 and k ≥ 1 (got n = {n}, k = {k})"
            )));
        }
        Ok(Self { n, k, side })
    }

    fn x_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let (q, p) = unpack_qp(x, self.n, self.k);
        let mut xm = DMatrix::zeros(self.n, 2 * self.k);
        xm.view_mut((0, 0), (self.n, self.k)).copy_from(&q);
        xm.view_mut((0, self.k), (self.n, self.k)).copy_from(&p);
        xm
    }

    fn from_x_matrix(&self, xm: &DMatrix<f64>) -> Vec<f64> {
        let q = xm.view((0, 0), (self.n, self.k)).into_owned();
        let p = xm.view((0, self.k), (self.n, self.k)).into_owned();
        pack_qp(&q, &p)
    }

    /// Coordinate index of `X[r, l]`.
    fn x_index(&self, r: usize, l: usize) -> usize {
        if l < self.k {
            r * self.k + l
        } else {
            self.n * self.k + r * self.k + (l - self.k)
        }
    }

    fn o_n_map(&self, x: &[f64]) -> DMatrix<f64> {
        let (q, p) = unpack_qp(x, self.n, self.k);
        &q * p.transpose() - &p * q.transpose()
    }

    fn gram(&self, x: &[f64]) -> DMatrix<f64> {
        let xm = self.x_matrix(x);
        xm.transpose() * xm
    }

    /// Peels rank-2 terms `β(abᵀ − baᵀ)` off `W` using the top eigenvector
    /// of `WᵀW`: with `a` that eigenvector and `b = −Wa/β`, the pair
    /// `q = √β a`, `p = √β b` reproduces the term.
    fn lift_o_n(&self, w: &[f64]) -> Vec<f64> {
        let wm = square(w);
        let mut rest = (&wm - wm.transpose()) * 0.5;
        let n = self.n;
        let mut q = DMatrix::zeros(n, self.k);
        let mut p = DMatrix::zeros(n, self.k);
        for col in 0..self.k {
            let eig = SymmetricEigen::new(rest.transpose() * &rest);
            let top = (0..n)
                .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
                .expect("n ≥ 1");
            let beta = eig.eigenvalues[top].max(0.0).sqrt();
            if beta == 0.0 {
                break;
            }
            let a = eig.eigenvectors.column(top).into_owned();
            let b = -(&rest * &a) / beta;
            let s = beta.sqrt();
            for r in 0..n {
                q[(r, col)] = s * a[r];
                p[(r, col)] = s * b[r];
            }
            rest -= (&a * b.transpose() - &b * a.transpose()) * beta;
        }
        pack_qp(&q, &p)
    }

    fn lift_sp(&self, w: &[f64]) -> Vec<f64> {
        let s = omega(self.k).transpose() * square(w);
        let s = (&s + s.transpose()) * 0.5;
        let eig = SymmetricEigen::new(s);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut xm = DMatrix::zeros(self.n, 2 * self.k);
        for (row, &idx) in order.iter().take(self.n).enumerate() {
            let lam = eig.eigenvalues[idx].max(0.0).sqrt();
            for c in 0..2 * self.k {
                xm[(row, c)] = lam * eig.eigenvectors[(c, idx)];
            }
        }
        self.from_x_matrix(&xm)
    }
}

impl Realization for OrthoSymplectic {
    fn name(&self) -> String {
        let side = match self.side {
            OrthoSymplecticSide::On => "o_n",
            OrthoSymplecticSide::Sp2k => "sp_2k",
        };
        format!("on_sp2k(n={}, k={}, {side})", self.n, self.k)
    }

    fn layout(&self) -> Layout {
        Layout::Blocks {
            pairs: self.n * self.k,
        }
    }

    fn dual_dim(&self) -> usize {
        match self.side {
            OrthoSymplecticSide::On => self.n * self.n,
            OrthoSymplecticSide::Sp2k => 4 * self.k * self.k,
        }
    }

    fn momentum_map(&self, x: &[f64]) -> Vec<f64> {
        match self.side {
            OrthoSymplecticSide::On => flatten(&self.o_n_map(x)),
            OrthoSymplecticSide::Sp2k => flatten(&(omega(self.k) * self.gram(x))),
        }
    }

    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (n, k) = (self.n, self.k);
        let dim = 2 * n * k;
        match self.side {
            OrthoSymplecticSide::On => {
                let (q, p) = unpack_qp(x, n, k);
                let mut jac = DMatrix::zeros(n * n, dim);
                // W_ij = Σ_l Q_il P_jl − P_il Q_jl
                for i in 0..n {
                    for j in 0..n {
                        let row = i * n + j;
                        for l in 0..k {
                            jac[(row, i * k + l)] += p[(j, l)];
                            jac[(row, j * k + l)] -= p[(i, l)];
                            jac[(row, n * k + j * k + l)] += q[(i, l)];
                            jac[(row, n * k + i * k + l)] -= q[(j, l)];
                        }
                    }
                }
                jac
            }
            OrthoSymplecticSide::Sp2k => {
                let xm = self.x_matrix(x);
                let om = omega(k);
                let ox = &xm * om.transpose(); // (XΩᵀ)_rl = Σ_m Ω_lm X_rm
                let m = 2 * k;
                let mut jac = DMatrix::zeros(m * m, dim);
                // ∂W_ij/∂X_rl = Ω_il X_rj + δ_lj Σ_m Ω_im X_rm
                for i in 0..m {
                    for j in 0..m {
                        let row = i * m + j;
                        for r in 0..n {
                            for l in 0..m {
                                let mut v = om[(i, l)] * xm[(r, j)];
                                if l == j {
                                    v += ox[(r, i)];
                                }
                                if v != 0.0 {
                                    jac[(row, self.x_index(r, l))] += v;
                                }
                            }
                        }
                    }
                }
                jac
            }
        }
    }

    fn generator(&self, a: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        match self.side {
            OrthoSymplecticSide::On => {
                let am = square(a);
                let skew = am.transpose() - &am;
                let (q, p) = unpack_qp(x, self.n, self.k);
                Some(pack_qp(&(&skew * q), &(&skew * p)))
            }
            OrthoSymplecticSide::Sp2k => {
                let om = omega(self.k);
                let c = square(a).transpose() * &om;
                let xm = self.x_matrix(x);
                let xdot = xm * (&c + c.transpose()) * om.transpose();
                Some(self.from_x_matrix(&xdot))
            }
        }
    }

    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError> {
        self.range_check(w)?;
        Ok(match self.side {
            OrthoSymplecticSide::On => self.lift_o_n(w),
            OrthoSymplecticSide::Sp2k => self.lift_sp(w),
        })
    }

    fn range_check(&self, w: &[f64]) -> Result<(), RangeError> {
        if w.len() != self.dual_dim() {
            return Err(RangeError::new(&self.name(), "wrong dual dimension", w));
        }
        let tol = 1e-10 * (1.0 + norm(w));
        let wm = square(w);
        match self.side {
            OrthoSymplecticSide::On => {
                if (&wm + wm.transpose()).norm() > tol {
                    return Err(RangeError::new(&self.name(), "W must be antisymmetric", w));
                }
                if numerical_rank(&wm) > 2 * self.k {
                    return Err(RangeError::new(
                        &self.name(),
                        format!("rank W ≤ 2k = {}", 2 * self.k),
                        w,
                    ));
                }
            }
            OrthoSymplecticSide::Sp2k => {
                let s = omega(self.k).transpose() * wm;
                if (&s - s.transpose()).norm() > tol {
                    return Err(RangeError::new(
                        &self.name(),
                        "ΩᵀW = XᵀX must be symmetric",
                        w,
                    ));
                }
                let eig = SymmetricEigen::new((&s + s.transpose()) * 0.5);
                if eig.eigenvalues.iter().any(|&l| l < -tol) {
                    return Err(RangeError::new(
                        &self.name(),
                        "ΩᵀW = XᵀX must be positive semidefinite",
                        w,
                    ));
                }
                let max_rank = (2 * self.k).min(self.n);
                if numerical_rank(&s) > max_rank {
                    return Err(RangeError::new(
                        &self.name(),
                        format!("rank XᵀX ≤ min(2k, n) = {max_rank}"),
                        w,
                    ));
                }
            }
        }
        Ok(())
    }

    fn invariant_names(&self) -> Vec<String> {
        match self.side {
            OrthoSymplecticSide::On => {
                let m = 2 * self.k;
                (0..m)
                    .flat_map(|i| (i..m).map(move |j| format!("(XᵀX)[{i},{j}]")))
                    .collect()
            }
            OrthoSymplecticSide::Sp2k => {
                let n = self.n;
                (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| format!("(QPᵀ−PQᵀ)[{i},{j}]")))
                    .collect()
            }
        }
    }

    fn quadratic_invariants(&self, x: &[f64]) -> Vec<f64> {
        match self.side {
            OrthoSymplecticSide::On => {
                let g = self.gram(x);
                let m = 2 * self.k;
                (0..m)
                    .flat_map(|i| (i..m).map(move |j| (i, j)))
                    .map(|(i, j)| g[(i, j)])
                    .collect()
            }
            OrthoSymplecticSide::Sp2k => {
                let w = self.o_n_map(x);
                let n = self.n;
                (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .map(|(i, j)| w[(i, j)])
                    .collect()
            }
        }
    }

    fn casimir_names(&self) -> Vec<String> {
        let count = match self.side {
            OrthoSymplecticSide::On => self.n / 2,
            OrthoSymplecticSide::Sp2k => self.k,
        };
        (1..=count).map(|i| format!("tr W^{}", 2 * i)).collect()
    }

    fn casimirs(&self, w: &[f64]) -> Vec<f64> {
        let count = match self.side {
            OrthoSymplecticSide::On => self.n / 2,
            OrthoSymplecticSide::Sp2k => self.k,
        };
        let powers = trace_powers(&square(w), 2 * count);
        (1..=count).map(|i| powers[2 * i - 1]).collect()
    }

    fn partition_compatible(&self) -> bool {
        self.side == OrthoSymplecticSide::Sp2k
    }
}

/// The (GL(n), GL(k)) dual pair on `T*R^{n×k}`.
///
/// * gl(n) side: `J₁ = QPᵀ`, generator `(Q̇, Ṗ) = (aᵀQ, −aP)`, linearizing
///   `A·(Q, P) = (AQ, A⁻ᵀP)`; invariants are the entries of `QᵀP`.
/// * gl(k) side: `J₂ = QᵀP`, generator `(Q̇, Ṗ) = (Qb, −Pbᵀ)`; invariants
///   are the entries of `QPᵀ`.
///
/// Casimirs are `tr Wⁱ` up to the matrix size. All invariants are bilinear.
#[derive(Debug, Clone)]
pub struct GeneralLinear {
    n: usize,
    k: usize,
    side: GeneralLinearSide,
}

impl GeneralLinear {
    pub fn new(n: usize, k: usize, side: GeneralLinearSide) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::config(format!(
                "gln_glk requires n ≥ 1 and k ≥ 1 (got n = {n}, k = {k})"
            )));
        }
        Ok(Self { n, k, side })
    }

    fn size(&self) -> usize {
        match self.side {
            GeneralLinearSide::Gln => self.n,
            GeneralLinearSide::Glk => self.k,
        }
    }
}

impl Realization for GeneralLinear {
    fn name(&self) -> String {
        let side = match self.side {
            GeneralLinearSide::Gln => "gl_n",
            GeneralLinearSide::Glk => "gl_k",
        };
        format!("gln_glk(n={}, k={}, {side})", self.n, self.k)
    }

    fn layout(&self) -> Layout {
        Layout::Blocks {
            pairs: self.n * self.k,
        }
    }

    fn dual_dim(&self) -> usize {
        self.size() * self.size()
    }

    fn momentum_map(&self, x: &[f64]) -> Vec<f64> {
        let (q, p) = unpack_qp(x, self.n, self.k);
        match self.side {
            GeneralLinearSide::Gln => flatten(&(q * p.transpose())),
            GeneralLinearSide::Glk => flatten(&(q.transpose() * p)),
        }
    }

    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (n, k) = (self.n, self.k);
        let (q, p) = unpack_qp(x, n, k);
        let off = n * k;
        match self.side {
            GeneralLinearSide::Gln => {
                let mut jac = DMatrix::zeros(n * n, 2 * off);
                for i in 0..n {
                    for j in 0..n {
                        for l in 0..k {
                            jac[(i * n + j, i * k + l)] += p[(j, l)];
                            jac[(i * n + j, off + j * k + l)] += q[(i, l)];
                        }
                    }
                }
                jac
            }
            GeneralLinearSide::Glk => {
                let mut jac = DMatrix::zeros(k * k, 2 * off);
                for i in 0..k {
                    for j in 0..k {
                        for r in 0..n {
                            jac[(i * k + j, r * k + i)] += p[(r, j)];
                            jac[(i * k + j, off + r * k + j)] += q[(r, i)];
                        }
                    }
                }
                jac
            }
        }
    }

    fn generator(&self, a: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        let (q, p) = unpack_qp(x, self.n, self.k);
        let am = square(a);
        Some(match self.side {
            GeneralLinearSide::Gln => pack_qp(&(am.transpose() * q), &(-(&am * p))),
            GeneralLinearSide::Glk => pack_qp(&(q * &am), &(-(p * am.transpose()))),
        })
    }

    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError> {
        self.range_check(w)?;
        let (n, k) = (self.n, self.k);
        let mut q = DMatrix::zeros(n, k);
        let mut p = DMatrix::zeros(n, k);
        let r = n.min(k);
        for (idx, (sigma, u, v)) in sorted_svd(&square(w)).into_iter().take(r).enumerate() {
            let s = sigma.max(0.0).sqrt();
            match self.side {
                GeneralLinearSide::Gln => {
                    for row in 0..n {
                        q[(row, idx)] = s * u[row];
                        p[(row, idx)] = s * v[row];
                    }
                }
                GeneralLinearSide::Glk => {
                    for col in 0..k {
                        q[(idx, col)] = s * u[col];
                        p[(idx, col)] = s * v[col];
                    }
                }
            }
        }
        Ok(pack_qp(&q, &p))
    }

    fn range_check(&self, w: &[f64]) -> Result<(), RangeError> {
        if w.len() != self.dual_dim() {
            return Err(RangeError::new(&self.name(), "wrong dual dimension", w));
        }
        let max_rank = self.n.min(self.k);
        if numerical_rank(&square(w)) > max_rank {
            return Err(RangeError::new(
                &self.name(),
                format!("rank W ≤ min(n, k) = {max_rank}"),
                w,
            ));
        }
        Ok(())
    }

    fn invariant_names(&self) -> Vec<String> {
        let (label, m) = match self.side {
            GeneralLinearSide::Gln => ("QᵀP", self.k),
            GeneralLinearSide::Glk => ("QPᵀ", self.n),
        };
        (0..m)
            .flat_map(|i| (0..m).map(move |j| format!("({label})[{i},{j}]")))
            .collect()
    }

    fn quadratic_invariants(&self, x: &[f64]) -> Vec<f64> {
        let (q, p) = unpack_qp(x, self.n, self.k);
        match self.side {
            GeneralLinearSide::Gln => flatten(&(q.transpose() * p)),
            GeneralLinearSide::Glk => flatten(&(q * p.transpose())),
        }
    }

    fn casimir_names(&self) -> Vec<String> {
        (1..=self.size()).map(|i| format!("tr W^{i}")).collect()
    }

    fn casimirs(&self, w: &[f64]) -> Vec<f64> {
        trace_powers(&square(w), self.size())
    }

    fn partition_compatible(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Landmarks

/// Landmark discretisation of the dual of vector fields on `R^d`.
///
/// The momentum map `J(q, p) = Σ pᵢ δ(· − qᵢ)` is represented by its
/// parameters: the dual coordinates are the landmark positions and momenta
/// themselves, `w = (q, p)`, so `J` is the identity and the collective
/// Hamiltonian is stored directly (see
/// [`crate::hamiltonians::LandmarkGaussian`]). Coordinates are
/// `(q₁, …, qₙ, p₁, …, pₙ)` with each entry in `R^d`.
///
/// Invariants: total linear momentum and total angular momentum, conserved
/// whenever the kernel is translation and rotation invariant.
#[derive(Debug, Clone)]
pub struct Landmarks {
    d: usize,
    n: usize,
    kernel_width: f64,
}

impl Landmarks {
    pub fn new(d: usize, n_landmarks: usize, kernel_width: f64) -> Result<Self> {
        if !(d == 2 || d == 3) {
            return Err(Error::config(format!("landmarks require d ∈ {{2, 3}} (got {d})")));
        }
        if n_landmarks == 0 {
            return Err(Error::config("landmarks require n_landmarks ≥ 1"));
        }
        if !(kernel_width > 0.0 && kernel_width.is_finite()) {
            return Err(Error::config(format!(
                "kernel_width must be positive (got {kernel_width})"
            )));
        }
        Ok(Self {
            d,
            n: n_landmarks,
            kernel_width,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_landmarks(&self) -> usize {
        self.n
    }

    pub fn kernel_width(&self) -> f64 {
        self.kernel_width
    }
}

impl Realization for Landmarks {
    fn name(&self) -> String {
        format!(
            "landmarks(d={}, n={}, sigma={})",
            self.d, self.n, self.kernel_width
        )
    }
    fn layout(&self) -> Layout {
        Layout::Blocks {
            pairs: self.d * self.n,
        }
    }
    fn dual_dim(&self) -> usize {
        2 * self.d * self.n
    }
    fn momentum_map(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn momentum_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(x.len(), x.len())
    }
    fn generator(&self, a: &[f64], _x: &[f64]) -> Option<Vec<f64>> {
        let mut out = vec![0.0; a.len()];
        self.layout().hamiltonian_field(a, &mut out);
        Some(out)
    }
    fn fiber_lift(&self, w: &[f64]) -> Result<Vec<f64>, RangeError> {
        Ok(w.to_vec())
    }
    fn range_check(&self, _w: &[f64]) -> Result<(), RangeError> {
        Ok(())
    }
    fn invariant_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.d).map(|c| format!("P[{c}]")).collect();
        if self.d == 2 {
            names.push("L".into());
        } else {
            names.extend(["L[0]".into(), "L[1]".into(), "L[2]".into()]);
        }
        names
    }
    fn quadratic_invariants(&self, x: &[f64]) -> Vec<f64> {
        let (d, n) = (self.d, self.n);
        let (q, p) = x.split_at(d * n);
        let mut total = vec![0.0; d];
        for i in 0..n {
            for c in 0..d {
                total[c] += p[i * d + c];
            }
        }
        if d == 2 {
            let l = (0..n)
                .map(|i| q[2 * i] * p[2 * i + 1] - q[2 * i + 1] * p[2 * i])
                .sum();
            total.push(l);
        } else {
            let mut l = [0.0; 3];
            for i in 0..n {
                let c = cross(&q[3 * i..3 * i + 3], &p[3 * i..3 * i + 3]);
                for m in 0..3 {
                    l[m] += c[m];
                }
            }
            total.extend(l);
        }
        total
    }
    fn casimir_names(&self) -> Vec<String> {
        Vec::new()
    }
    fn casimirs(&self, _w: &[f64]) -> Vec<f64> {
        Vec::new()
    }
    fn partition_compatible(&self) -> bool {
        true
    }
}
