//! Octonions, the associative 3-form, `g2` as derivations and the grading
//! automorphism `τ = Ad_C`.
//!
//! Imaginary units `e1..e7` are stored 0-based. The table is the Cayley–Dickson
//! double of the quaternions `span{1,e1,e2,e3}` with `e5 = e1e4`, `e6 = e2e4`,
//! `e7 = e3e4`.

#[allow(unused_imports)]
use num_traits::Float as _;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;

use crate::forms::ThreeForm7;
use crate::linalg::{self, c, complexify, Mat7, RMat7, Vec7, ZERO};
use crate::{Error, Result, C64, MEMBERSHIP_TOL};

/// Oriented Fano lines (1-based): `e_a e_b = e_c` for each `(a, b, c)`.
pub const FANO_TRIPLES: [[usize; 3]; 7] =
    [[1, 2, 3], [1, 4, 5], [2, 4, 6], [3, 4, 7], [1, 7, 6], [2, 5, 7], [3, 6, 5]];

const fn build_table() -> [[[i8; 7]; 7]; 7] {
    let mut t = [[[0i8; 7]; 7]; 7];
    let mut l = 0;
    while l < 7 {
        let [a, b, c] = FANO_TRIPLES[l];
        let (a, b, c) = (a - 1, b - 1, c - 1);
        t[a][b][c] = 1;
        t[b][c][a] = 1;
        t[c][a][b] = 1;
        t[b][a][c] = -1;
        t[c][b][a] = -1;
        t[a][c][b] = -1;
        l += 1;
    }
    t
}

/// Sign tensor: `e_i e_j = -δ_ij + Σ_k STRUCTURE[i][j][k] e_k`.
pub const STRUCTURE: [[[i8; 7]; 7]; 7] = build_table();

/// `ε = exp(iπ/3)`.
pub fn epsilon() -> C64 {
    C64::from_polar(1.0, PI / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImOctonion(pub [f64; 7]);

impl ImOctonion {
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 7];
        v[i] = 1.0;
        Self(v)
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

/// Octonion `re + Σ im_i e_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Octonion {
    pub re: f64,
    pub im: ImOctonion,
}

impl Octonion {
    pub fn new(re: f64, im: [f64; 7]) -> Self {
        Self { re, im: ImOctonion(im) }
    }

    pub fn unit(i: usize) -> Self {
        Self { re: 0.0, im: ImOctonion::basis(i) }
    }

    pub fn real(re: f64) -> Self {
        Self { re, im: ImOctonion::default() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re, im: self.im.scale(-1.0) }
    }

    pub fn norm2(&self) -> f64 {
        self.re * self.re + self.im.norm2()
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut im = self.im.0;
        for (a, b) in im.iter_mut().zip(o.im.0.iter()) {
            *a -= b;
        }
        Self { re: self.re - o.re, im: ImOctonion(im) }
    }

    pub fn max_abs(&self) -> f64 {
        self.im.0.iter().fold(self.re.abs(), |m, x| m.max(x.abs()))
    }
}

impl From<ImOctonion> for Octonion {
    fn from(im: ImOctonion) -> Self {
        Self { re: 0.0, im }
    }
}

/// Octonion product.
pub fn oct_mul(x: &Octonion, y: &Octonion) -> Octonion {
    let (a, b) = (&x.im.0, &y.im.0);
    let mut im = [0.0; 7];
    for (k, out) in im.iter_mut().enumerate() {
        let mut acc = x.re * b[k] + y.re * a[k];
        for i in 0..7 {
            for j in 0..7 {
                let s = STRUCTURE[i][j][k];
                if s != 0 {
                    acc += s as f64 * a[i] * b[j];
                }
            }
        }
        *out = acc;
    }
    Octonion { re: x.re * y.re - x.im.dot(&y.im), im: ImOctonion(im) }
}

/// Complex-bilinear product of imaginary parts: returns `(real part, imaginary part)`.
pub fn im_mul_c(a: &Vec7, b: &Vec7) -> (C64, Vec7) {
    let mut im = Vec7::zeros();
    for i in 0..7 {
        for j in 0..7 {
            if i == j || a[i] == ZERO || b[j] == ZERO {
                continue;
            }
            for k in 0..7 {
                let s = STRUCTURE[i][j][k];
                if s != 0 {
                    im[k] += a[i] * b[j] * s as f64;
                }
            }
        }
    }
    (-linalg::bilinear(a, b), im)
}

/// `α'(x, y, z) = <x·y, z>` extended complex-trilinearly.
pub fn assoc_eval(x: &Vec7, y: &Vec7, z: &Vec7) -> C64 {
    let (_, xy) = im_mul_c(x, y);
    linalg::bilinear(&xy, z)
}

/// The associative 3-form `α'(x,y,z) = <x·y, z>`.
pub fn assoc_form3() -> ThreeForm7 {
    ThreeForm7::from_tensor(|i, j, k| c(STRUCTURE[i][j][k] as f64))
}

/// `max_{i,j} |D(e_i e_j) - (D e_i) e_j - e_i (D e_j)|`.
pub fn leibniz_residual(d: &Mat7) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..7 {
        let ei = Vec7::from_fn(|k, _| if k == i { c(1.0) } else { ZERO });
        for j in 0..7 {
            let ej = Vec7::from_fn(|k, _| if k == j { c(1.0) } else { ZERO });
            let (_, eij) = im_mul_c(&ei, &ej);
            let lhs = d * eij;
            let dei = d.column(i).into_owned();
            let dej = d.column(j).into_owned();
            let (r1, t1) = im_mul_c(&dei, &ej);
            let (r2, t2) = im_mul_c(&ei, &dej);
            let diff = lhs - t1 - t2;
            r = r.max(linalg::vnorm(&diff)).max((r1 + r2).norm());
        }
    }
    r
}

/// `max |α'(De_i,e_j,e_k) + α'(e_i,De_j,e_k) + α'(e_i,e_j,De_k)|` over index triples.
pub fn alpha_annihilation_residual(d: &Mat7) -> f64 {
    let alpha = assoc_form3();
    alpha.infinitesimal_action(d).max_abs()
}

/// `max |D + D^T|`.
pub fn so7_residual(d: &Mat7) -> f64 {
    linalg::max_abs(&(d + d.transpose()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct G2AlgebraElement {
    pub matrix: Mat7,
    pub derivation_residual: f64,
}

impl G2AlgebraElement {
    pub fn new(matrix: Mat7) -> Self {
        let derivation_residual = leibniz_residual(&matrix).max(so7_residual(&matrix));
        Self { matrix, derivation_residual }
    }

    /// Membership in `g2^C` up to `MEMBERSHIP_TOL` relative to the matrix size.
    pub fn is_member(&self) -> bool {
        self.derivation_residual <= MEMBERSHIP_TOL * linalg::max_abs(&self.matrix).max(1.0)
    }
}

/// Solves the Leibniz system inside `so(7)` and returns a basis of `g2`,
/// orthonormal for `-tr(XY)/2`.
pub fn g2_basis() -> Result<Vec<G2AlgebraElement>> {
    let (basis, _) = derivation_null_space(1e-10)?;
    Ok(basis.into_iter().map(|m| G2AlgebraElement::new(complexify(&m))).collect())
}

fn so7_generator(n: usize) -> RMat7 {
    let mut idx = 0;
    for a in 0..7 {
        for b in a + 1..7 {
            if idx == n {
                let mut m = RMat7::zeros();
                m[(a, b)] = 1.0;
                m[(b, a)] = -1.0;
                return m;
            }
            idx += 1;
        }
    }
    unreachable!("so(7) has 21 generators")
}

/// The 392 x 21 real Leibniz system on `so(7)`.
pub fn leibniz_system() -> DMatrix<f64> {
    let mut sys = DMatrix::zeros(7 * 7 * 8, 21);
    for g in 0..21 {
        let d = complexify(&so7_generator(g));
        let mut row = 0;
        for i in 0..7 {
            let ei = Vec7::from_fn(|k, _| if k == i { c(1.0) } else { ZERO });
            for j in 0..7 {
                let ej = Vec7::from_fn(|k, _| if k == j { c(1.0) } else { ZERO });
                let (_, eij) = im_mul_c(&ei, &ej);
                let lhs = d * eij;
                let (r1, t1) = im_mul_c(&d.column(i).into_owned(), &ej);
                let (r2, t2) = im_mul_c(&ei, &d.column(j).into_owned());
                let diff = lhs - t1 - t2;
                sys[(row, g)] = -(r1 + r2).re;
                row += 1;
                for k in 0..7 {
                    sys[(row, g)] = diff[k].re;
                    row += 1;
                }
            }
        }
    }
    sys
}

fn derivation_null_space(tol: f64) -> Result<(Vec<RMat7>, Vec<f64>)> {
    let sys = leibniz_system();
    let (ns, sv) = linalg::real_null_space(&sys, tol);
    if ns.len() != 14 {
        return Err(Error::NumericalRank { found: ns.len(), expected: 14, tol });
    }
    let mats = ns
        .iter()
        .map(|v| {
            let mut m = RMat7::zeros();
            for (g, x) in v.iter().enumerate() {
                m += so7_generator(g) * *x;
            }
            m
        })
        .collect();
    Ok((mats, sv))
}

fn rotation(theta: f64) -> [[f64; 2]; 2] {
    let (s, co) = theta.sin_cos();
    [[co, -s], [s, co]]
}

/// Block-diagonal `diag(1, R_a, R_b, R_c)` on `(e1), (e2,e3), (e4,e5), (e6,e7)`.
pub fn block_rotation(a: f64, b: f64, cc: f64) -> RMat7 {
    let mut m = RMat7::zeros();
    m[(0, 0)] = 1.0;
    for (blk, th) in [(1usize, a), (3, b), (5, cc)] {
        let r = rotation(th);
        for i in 0..2 {
            for j in 0..2 {
                m[(blk + i, blk + j)] = r[i][j];
            }
        }
    }
    m
}

/// `C = diag(1, R_{π/3}, R_{2π/3}, R_π)`.
pub fn tau_matrix() -> Mat7 {
    complexify(&block_rotation(PI / 3.0, 2.0 * PI / 3.0, PI))
}

/// Maximal torus element `diag(1, R_θ, R_φ, R_{θ+φ})`.
pub fn torus_element(theta: f64, phi: f64) -> Mat7 {
    complexify(&block_rotation(theta, phi, theta + phi))
}

/// Tangent direction of the maximal torus, `diag(0, θJ, φJ, (θ+φ)J)`.
pub fn torus_generator(theta: f64, phi: f64) -> Mat7 {
    let mut m = Mat7::zeros();
    for (blk, th) in [(1usize, theta), (3, phi), (5, theta + phi)] {
        m[(blk, blk + 1)] = c(-th);
        m[(blk + 1, blk)] = c(th);
    }
    m
}

/// `τ(M) = C M C^{-1}`.
pub fn tau(m: &Mat7) -> Mat7 {
    let cm = tau_matrix();
    cm * m * cm.transpose()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedComponents {
    pub parts: [Mat7; 6],
    pub epsilon: C64,
}

impl GradedComponents {
    pub fn sum(&self) -> Mat7 {
        self.parts.iter().sum()
    }

    /// `max_j |τ(M_j) - ε^j M_j|`.
    pub fn eigen_residual(&self) -> f64 {
        (0..6)
            .map(|j| linalg::max_abs(&(tau(&self.parts[j]) - self.parts[j] * self.epsilon.powi(j as i32))))
            .fold(0.0, f64::max)
    }
}

/// Projection of a matrix to `g_j` by averaging over the cyclic group of `τ`.
pub fn graded_part(m: &Mat7, j: i64) -> Mat7 {
    let eps = epsilon();
    let mut acc = Mat7::zeros();
    let mut t = *m;
    for p in 0..6 {
        acc += t * eps.powi(-((j * p as i64).rem_euclid(6)) as i32);
        t = tau(&t);
    }
    acc / c(6.0)
}

pub fn graded_decompose(m: &G2AlgebraElement) -> Result<GradedComponents> {
    if !m.is_member() {
        return Err(Error::NotInG2 { residual: m.derivation_residual });
    }
    let parts = core::array::from_fn(|j| graded_part(&m.matrix, j as i64));
    Ok(GradedComponents { parts, epsilon: epsilon() })
}

/// `g2` with its `τ`-grading, cached for sampling.
#[derive(Debug, Clone)]
pub struct G2Algebra {
    pub basis: Vec<Mat7>,
    /// Orthonormal (Hermitian) bases of `g_0 .. g_5`; the `g_0` basis is real.
    pub graded: [Vec<Mat7>; 6],
}

impl G2Algebra {
    pub fn new() -> Result<Self> {
        let (real_basis, _) = derivation_null_space(1e-10)?;
        let basis: Vec<Mat7> = real_basis.iter().map(complexify).collect();
        let graded = core::array::from_fn(|j| {
            let cols: Vec<Mat7> = basis.iter().map(|b| graded_part(b, j as i64)).collect();
            // real inputs stay real under pivoted Gram-Schmidt, so the g_0 basis is real
            let a = DMatrix::from_fn(49, cols.len(), |r, q| if j == 0 { c(cols[q][r].re) } else { cols[q][r] });
            linalg::column_basis(&a, 1e-9).iter().map(|v| Mat7::from_fn(|r, q| v[r + 7 * q])).collect()
        });
        Ok(Self { basis, graded })
    }

    pub fn graded_dims(&self) -> [usize; 6] {
        core::array::from_fn(|j| self.graded[j].len())
    }

    /// Distance of `m` from `g_{j mod 6}` relative to `max(|m|, 1)`.
    pub fn graded_membership_residual(&self, m: &Mat7, j: i64) -> f64 {
        let b = &self.graded[j.rem_euclid(6) as usize];
        let mut proj = Mat7::zeros();
        for x in b {
            let coeff: C64 = x.iter().zip(m.iter()).map(|(p, q)| p.conj() * q).sum();
            proj += x * coeff;
        }
        linalg::max_abs(&(m - proj))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OctonionFrame {
    pub columns: [ImOctonion; 7],
}

impl OctonionFrame {
    pub fn matrix(&self) -> RMat7 {
        RMat7::from_fn(|r, q| self.columns[q].0[r])
    }

    /// `max |α'(Gx,Gy,Gz) - α'(x,y,z)|` on basis triples.
    pub fn g2_residual(&self) -> f64 {
        let g = complexify(&self.matrix());
        assoc_form3().pullback(&g).sub(&assoc_form3()).max_abs()
    }
}

fn im_mul(a: &ImOctonion, b: &ImOctonion) -> ImOctonion {
    oct_mul(&(*a).into(), &(*b).into()).im
}

/// Completes `(f1, f2, f4)` to a `G2` frame.
pub fn frame_complete(f1: ImOctonion, f2: ImOctonion, f4: ImOctonion) -> Result<OctonionFrame> {
    let tol = MEMBERSHIP_TOL;
    let f3 = im_mul(&f1, &f2);
    let checks: [(&'static str, f64); 7] = [
        ("|f1|^2 - 1", f1.norm2() - 1.0),
        ("|f2|^2 - 1", f2.norm2() - 1.0),
        ("|f4|^2 - 1", f4.norm2() - 1.0),
        ("<f1,f2>", f1.dot(&f2)),
        ("<f1,f4>", f1.dot(&f4)),
        ("<f2,f4>", f2.dot(&f4)),
        ("<f1 f2,f4>", f3.dot(&f4)),
    ];
    for (what, value) in checks {
        if value.abs() > tol {
            return Err(Error::FramePrecondition { what, value });
        }
    }
    let f5 = im_mul(&f1, &f4);
    let f6 = im_mul(&f2, &f4);
    let f7 = im_mul(&f3, &f4);
    Ok(OctonionFrame { columns: [f1, f2, f3, f4, f5, f6, f7] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Quaternion product, `[re, i, j, k]`.
    fn qmul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    }

    fn qconj(a: [f64; 4]) -> [f64; 4] {
        [a[0], -a[1], -a[2], -a[3]]
    }

    /// Doubling oracle: `(a + b e4)(c + d e4) = (ac - d̄ b) + (d a + b c̄) e4`.
    fn doubling_mul(x: &Octonion, y: &Octonion) -> Octonion {
        let split = |o: &Octonion| {
            let v = o.im.0;
            ([o.re, v[0], v[1], v[2]], [v[3], v[4], v[5], v[6]])
        };
        let (a, b) = split(x);
        let (cq, d) = split(y);
        let sub = |p: [f64; 4], q: [f64; 4]| [p[0] - q[0], p[1] - q[1], p[2] - q[2], p[3] - q[3]];
        let add = |p: [f64; 4], q: [f64; 4]| [p[0] + q[0], p[1] + q[1], p[2] + q[2], p[3] + q[3]];
        let lo = sub(qmul(a, cq), qmul(qconj(d), b));
        let hi = add(qmul(d, a), qmul(b, qconj(cq)));
        Octonion::new(lo[0], [lo[1], lo[2], lo[3], hi[0], hi[1], hi[2], hi[3]])
    }

    fn basis_oct(i: usize) -> Octonion {
        if i == 0 {
            Octonion::real(1.0)
        } else {
            Octonion::unit(i - 1)
        }
    }

    #[test]
    fn table_matches_cayley_dickson_doubling() {
        for i in 0..8 {
            for j in 0..8 {
                let a = oct_mul(&basis_oct(i), &basis_oct(j));
                let b = doubling_mul(&basis_oct(i), &basis_oct(j));
                assert_eq!(a, b, "e{i} e{j}");
            }
        }
    }

    #[test]
    fn named_products() {
        assert_eq!(oct_mul(&Octonion::unit(0), &Octonion::unit(1)), Octonion::unit(2));
        assert_eq!(oct_mul(&Octonion::unit(0), &Octonion::unit(0)), Octonion::real(-1.0));
        assert_eq!(oct_mul(&Octonion::unit(1), &Octonion::unit(4)), Octonion::unit(6));
    }

    #[test]
    fn assoc_form_components() {
        let a = assoc_form3();
        assert_eq!(a.component(0, 1, 2), c(1.0));
        let mut nonzero = Vec::new();
        for i in 0..7 {
            for j in i + 1..7 {
                for k in j + 1..7 {
                    let direct = assoc_eval(
                        &Vec7::from_fn(|r, _| c((r == i) as u8 as f64)),
                        &Vec7::from_fn(|r, _| c((r == j) as u8 as f64)),
                        &Vec7::from_fn(|r, _| c((r == k) as u8 as f64)),
                    );
                    assert_eq!(direct, a.component(i, j, k));
                    if direct != ZERO {
                        nonzero.push([i + 1, j + 1, k + 1]);
                    }
                }
            }
        }
        assert_eq!(nonzero.len(), 7);
        for t in FANO_TRIPLES {
            let mut s = t;
            s.sort();
            assert!(nonzero.contains(&s));
        }
    }

    #[test]
    fn derivation_dimension_is_fourteen() {
        // Oracle: rank of the 21-unknown system via its singular values.
        let sys = leibniz_system();
        let sv = sys.singular_values();
        let rank = sv.iter().filter(|s| **s > 1e-10 * sv.max()).count();
        assert_eq!(21 - rank, 14);
        let basis = g2_basis().unwrap();
        assert_eq!(basis.len(), 14);
        for d in &basis {
            assert!(d.derivation_residual < 1e-10);
            assert!(alpha_annihilation_residual(&d.matrix) < 1e-10);
        }
        // orthonormal for -tr(XY)/2
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let ip = -(x.matrix * y.matrix).trace() / 2.0;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(want)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn tau_preserves_alpha_and_has_order_six() {
        let cm = tau_matrix();
        assert!(assoc_form3().pullback(&cm).sub(&assoc_form3()).max_abs() < 1e-14);
        let c6 = cm.pow(6);
        assert!(linalg::max_abs(&(c6 - Mat7::identity())) < 1e-14);
        let c3 = cm.pow(3);
        assert!(linalg::max_abs(&(c3 - Mat7::identity())) > 0.5);
    }

    #[test]
    fn graded_dimensions_match_ad_c_eigenspaces() {
        let alg = G2Algebra::new().unwrap();
        assert_eq!(alg.graded_dims(), [2, 3, 2, 2, 2, 3]);
        // Oracle: eigenvalue multiplicities of Ad_C on the 14-dimensional algebra.
        let coords = |m: &Mat7| -> Vec<C64> {
            alg.basis.iter().map(|b| (b.transpose() * m).trace() / 2.0).collect()
        };
        let adc = DMatrix::from_fn(14, 14, |r, q| coords(&tau(&alg.basis[q]))[r]);
        let ev = linalg::eigenvalues(&adc);
        let eps = epsilon();
        let mut counts = [0usize; 6];
        for e in ev {
            let j = (0..6).find(|&j| (e - eps.powi(j as i32)).norm() < 1e-8).unwrap();
            counts[j] += 1;
        }
        assert_eq!(counts, [2, 3, 2, 2, 2, 3]);
    }

    #[test]
    fn torus_direction_is_tau_fixed() {
        let m = G2AlgebraElement::new(torus_generator(0.3, -1.1));
        assert!(m.is_member());
        let g = graded_decompose(&m).unwrap();
        assert!(linalg::max_abs(&(g.parts[0] - m.matrix)) < 1e-14);
        for j in 1..6 {
            assert!(linalg::max_abs(&g.parts[j]) < 1e-14);
        }
        let t = torus_element(0.3, -1.1);
        assert!(assoc_form3().pullback(&t).sub(&assoc_form3()).max_abs() < 1e-14);
    }

    #[test]
    fn bracket_respects_grading() {
        let alg = G2Algebra::new().unwrap();
        for i in 0..6 {
            for j in 0..6 {
                for x in &alg.graded[i] {
                    for y in &alg.graded[j] {
                        let b = linalg::bracket(x, y);
                        let r = alg.graded_membership_residual(&b, (i + j) as i64);
                        assert!(r < 1e-12, "[g{i}, g{j}] residual {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn rho_and_tau_commute_exactly() {
        let alg = G2Algebra::new().unwrap();
        for x in alg.graded.iter().flatten() {
            let lhs = linalg::conj(&tau(x));
            let rhs = tau(&linalg::conj(x));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn quaternion_subalgebra_is_associative() {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let (a, b, cc) = (basis_oct(i), basis_oct(j), basis_oct(k));
                    let l = oct_mul(&oct_mul(&a, &b), &cc);
                    let r = oct_mul(&a, &oct_mul(&b, &cc));
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn frame_examples() {
        let e = ImOctonion::basis;
        let f = frame_complete(e(0), e(1), e(3)).unwrap();
        assert_eq!(f.matrix(), RMat7::identity());
        let f = frame_complete(e(0), e(1), e(3).scale(-1.0)).unwrap();
        // oracle: direct products e1(-e4), e2(-e4), e3(-e4)
        for (col, idx) in [(4usize, 4usize), (5, 5), (6, 6)] {
            let want = oct_mul(&Octonion::unit(col - 4), &Octonion::unit(3)).im.scale(-1.0);
            assert_eq!(f.columns[col], want);
            assert_eq!(want, e(idx).scale(-1.0));
        }
        assert!(f.g2_residual() < 1e-12);
        let bad = frame_complete(e(0), e(1), e(2));
        assert!(matches!(bad, Err(Error::FramePrecondition { what: "<f1 f2,f4>", .. })));
    }

    fn unit7() -> impl Strategy<Value = ImOctonion> {
        prop::array::uniform7(-1.0f64..1.0)
            .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
            .prop_map(|v| {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                ImOctonion(v.map(|x| x / n))
            })
    }

    fn orthogonalize(v: ImOctonion, against: &[ImOctonion]) -> Option<ImOctonion> {
        let mut w = v;
        for a in against {
            let p = w.dot(a);
            for i in 0..7 {
                w.0[i] -= p * a.0[i];
            }
        }
        let n = w.norm2().sqrt();
        (n > 1e-3).then(|| w.scale(1.0 / n))
    }

    proptest! {
        #[test]
        fn alternative_laws(a in prop::array::uniform8(-2.0f64..2.0), b in prop::array::uniform8(-2.0f64..2.0)) {
            let x = Octonion::new(a[0], [a[1], a[2], a[3], a[4], a[5], a[6], a[7]]);
            let y = Octonion::new(b[0], [b[1], b[2], b[3], b[4], b[5], b[6], b[7]]);
            let l = oct_mul(&x, &oct_mul(&x, &y));
            let r = oct_mul(&oct_mul(&x, &x), &y);
            prop_assert!(l.sub(&r).max_abs() < 1e-12);
            let l = oct_mul(&oct_mul(&y, &x), &x);
            let r = oct_mul(&y, &oct_mul(&x, &x));
            prop_assert!(l.sub(&r).max_abs() < 1e-12);
            // norm is multiplicative
            let n = oct_mul(&x, &y).norm2();
            prop_assert!((n - x.norm2() * y.norm2()).abs() < 1e-10 * (1.0 + n));
        }

        #[test]
        fn imaginary_product_real_part(a in prop::array::uniform7(-2.0f64..2.0), b in prop::array::uniform7(-2.0f64..2.0)) {
            let x = ImOctonion(a);
            let y = ImOctonion(b);
            let p = oct_mul(&x.into(), &y.into());
            prop_assert!((p.re + x.dot(&y)).abs() < 1e-12);
        }

        #[test]
        fn random_frames_preserve_alpha(f1 in unit7(), f2 in unit7(), f4 in unit7()) {
            let Some(f2) = orthogonalize(f2, &[f1]) else { return Ok(()) };
            let f3 = im_mul(&f1, &f2);
            let Some(f4) = orthogonalize(f4, &[f1, f2, f3]) else { return Ok(()) };
            let frame = frame_complete(f1, f2, f4).unwrap();
            prop_assert!(frame.g2_residual() < 1e-9);
            let g = frame.matrix();
            prop_assert!((g.transpose() * g - RMat7::identity()).abs().max() < 1e-9);
        }
    }
}
