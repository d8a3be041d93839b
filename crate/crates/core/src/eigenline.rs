//! Fiberwise structure of `A(ζ)`: the skew form `ω = g∘A`, the kernel
//! vector `v0 = c·ψ(ω³)`, eigenlines and their `ω`-pairing, the operator
//! `K` built from `α'` and `v0`, and its `±√s` eigenspaces `E±`.

#[allow(unused_imports)]
use num_traits::Float as _;

use alloc::vec::Vec;

use nalgebra::{DMatrix, SMatrix};

use crate::exterior::ExtForm;
use crate::forms::{metric_from_form, psi_dual, MetricTensor, ThreeForm7};
use crate::laurent::cluster_roots;
use crate::linalg::{self, c, Mat7, Vec7};
use crate::loop_algebra::{generic_zetas, KillingField};
use crate::octonion::{assoc_form3, tau_matrix, G2Algebra};
use crate::spectral::spectral_coefficients;
use crate::{Error, Result, C64};

/// `v0 = c·ψ(ω∧ω∧ω)`; see [`calibrate`].
pub const V0_CALIBRATION: f64 = 1.0 / 6.0;

/// Seed, `k` and `ζ` of the reference fiber that fixes [`V0_CALIBRATION`].
pub const CALIBRATION_SEED: u64 = 1;
pub const CALIBRATION_ZETA: C64 = C64::new(0.91, 0.37);

/// Relative eigenvalue gap below which a fiber counts as a branch point.
pub const BRANCH_GAP: f64 = 1e-6;

pub type Mat6 = SMatrix<C64, 6, 6>;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub mu: C64,
    /// Unit Hermitian norm.
    pub vector: Vec7,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberData {
    pub zeta: C64,
    pub matrix: Mat7,
    pub metric: Mat7,
    /// Bilinear-form matrix: `ω(x, y) = xᵀ ω y`.
    pub omega: Mat7,
    pub a1: C64,
    pub a2: C64,
    pub v0: Option<Vec7>,
    /// `a2(ζ)` is numerically zero; `v0` is then isotropic.
    pub kernel_degenerate: bool,
    pub eigenpairs: Vec<Eigenpair>,
    /// `P_ab = ω(e_a, e_b)`.
    pub pairing: Option<Mat6>,
}

fn scale7(m: &Mat7) -> f64 {
    linalg::frob(m).max(f64::MIN_POSITIVE)
}

fn alpha() -> ThreeForm7 {
    assoc_form3()
}

fn metric() -> Result<MetricTensor> {
    metric_from_form(&alpha())
}

/// `ω = Aᵀ g` at `ζ`, with `A` optionally conjugated by `gauge`.
pub fn omega_fiber(a: &KillingField, zeta: C64, gauge: Option<&Mat7>) -> Result<FiberData> {
    let mut m = a.evaluate(zeta)?;
    if let Some(p) = gauge {
        let inv = p.try_inverse().ok_or(Error::DegenerateInput("gauge is singular"))?;
        m = p * m * inv;
    }
    let g = metric()?.matrix;
    let omega = m.transpose() * g;
    let p = linalg::charpoly7(&m);
    Ok(FiberData {
        zeta,
        matrix: m,
        metric: g,
        omega,
        a1: -p[2],
        a2: -p[6],
        v0: None,
        kernel_degenerate: false,
        eigenpairs: Vec::new(),
        pairing: None,
    })
}

impl FiberData {
    /// `|ω + ωᵀ| / |ω|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        linalg::frob(&(self.omega + self.omega.transpose())) / scale7(&self.omega)
    }

    /// `max |ω(Av, w) + ω(v, Aw)|` over random unit `v`, `w`, relative to `|A||ω|`.
    pub fn symplectic_residual(&self, salt: u64) -> f64 {
        let pts = generic_zetas(14 * 4, salt);
        let mut worst = 0.0f64;
        for ch in pts.chunks_exact(14) {
            let v = Vec7::from_fn(|i, _| ch[i]);
            let w = Vec7::from_fn(|i, _| ch[i + 7]);
            let lhs = (self.matrix * v).transpose() * self.omega * w + v.transpose() * self.omega * (self.matrix * w);
            let sc = scale7(&self.matrix) * scale7(&self.omega) * linalg::vnorm(&v) * linalg::vnorm(&w);
            worst = worst.max(lhs[(0, 0)].norm() / sc);
        }
        worst
    }

    /// Numerical rank of `ω` (singular values above `1e-9·σ_max`).
    pub fn omega_rank(&self) -> usize {
        let sv = linalg::singular_values(&linalg::to_dmatrix(&self.omega));
        let top = sv.first().copied().unwrap_or(0.0);
        sv.iter().filter(|s| **s > 1e-9 * top).count()
    }

    fn a_scale6(&self) -> f64 {
        scale7(&self.matrix).powi(6)
    }
}

fn two_form(omega: &Mat7) -> ExtForm {
    let mut f = ExtForm::zero(7);
    for i in 0..7 {
        for j in i + 1..7 {
            f.set_coeff((1 << i) | (1 << j), omega[(i, j)]);
        }
    }
    f
}

/// `ψ(ω∧ω∧ω)` without the calibration constant.
pub fn raw_v0(omega: &Mat7) -> Vec7 {
    let w = two_form(omega);
    psi_dual(&w.wedge(&w).wedge(&w))
}

/// The constant `c` with `g(v0, v0) = -a2` at the reference fiber of the
/// `k = 0` self-test field.
pub fn calibrate(alg: &G2Algebra) -> Result<f64> {
    let a = alg.random_field(0, CALIBRATION_SEED);
    let f = omega_fiber(&a, CALIBRATION_ZETA, None)?;
    let raw = raw_v0(&f.omega);
    let q = (raw.transpose() * f.metric * raw)[(0, 0)];
    if q.norm() == 0.0 {
        return Err(Error::DegenerateInput("reference fiber has isotropic kernel"));
    }
    Ok(linalg::sqrt_principal(-f.a2 / q).norm())
}

/// Sets `v0 = c·ψ(ω³)`.
pub fn kernel_v0(mut f: FiberData) -> FiberData {
    let v = raw_v0(&f.omega) * c(V0_CALIBRATION);
    f.kernel_degenerate = f.a2.norm() <= 1e-10 * f.a_scale6();
    f.v0 = Some(v);
    f
}

impl FiberData {
    fn v0_or_raw(&self) -> Vec7 {
        self.v0.unwrap_or_else(|| raw_v0(&self.omega) * c(V0_CALIBRATION))
    }

    /// `|A v0| / (|A| |v0|)`.
    pub fn kernel_residual(&self) -> f64 {
        let v = self.v0_or_raw();
        let n = linalg::vnorm(&v);
        if n == 0.0 {
            return 0.0;
        }
        linalg::vnorm(&(self.matrix * v)) / (n * scale7(&self.matrix))
    }

    pub fn v0_norm2(&self) -> C64 {
        let v = self.v0_or_raw();
        (v.transpose() * self.metric * v)[(0, 0)]
    }

    /// `|g(v0, v0) + a2| / |a2|`.
    pub fn v0_norm_residual(&self) -> f64 {
        (self.v0_norm2() + self.a2).norm() / self.a2.norm().max(f64::MIN_POSITIVE)
    }
}

/// Eigenvalues of `A(ζ)` with the near-zero one first and the smallest
/// relative gap between the others.
fn spectrum(m: &Mat7) -> (Vec<C64>, f64) {
    let mut ev = linalg::eigenvalues7(m);
    ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let sc = ev.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
    let mut gap = f64::INFINITY;
    for i in 0..7 {
        for j in i + 1..7 {
            gap = gap.min((ev[i] - ev[j]).norm() / sc);
        }
    }
    (ev, gap)
}

fn unit_null_vector(m: &Mat7, mu: C64) -> Vec7 {
    let (v, _) = linalg::null_vector(&linalg::to_dmatrix(&(m - Mat7::identity() * mu)));
    let v = linalg::dvec_to_vec7(&v);
    v / c(linalg::vnorm(&v))
}

fn eigenpairs_with_gap(f: &FiberData, min_gap: f64) -> Result<Vec<Eigenpair>> {
    let (ev, gap) = spectrum(&f.matrix);
    if gap < min_gap {
        return Err(Error::BranchPointProximity { gap });
    }
    Ok(ev[1..].iter().map(|mu| Eigenpair { mu: *mu, vector: unit_null_vector(&f.matrix, *mu) }).collect())
}

/// Eigenpairs for the six nonzero eigenvalues and the pairing matrix.
pub fn eigenline_fiber(mut f: FiberData) -> Result<FiberData> {
    if f.a2.norm() <= 1e-10 * f.a_scale6() {
        return Err(Error::BranchPointProximity { gap: 0.0 });
    }
    f.eigenpairs = eigenpairs_with_gap(&f, BRANCH_GAP)?;
    let mut p = Mat6::zeros();
    for (a, ea) in f.eigenpairs.iter().enumerate() {
        for (b, eb) in f.eigenpairs.iter().enumerate() {
            p[(a, b)] = (ea.vector.transpose() * f.omega * eb.vector)[(0, 0)];
        }
    }
    f.pairing = Some(p);
    Ok(f)
}

/// Index of the eigenvalue closest to `-μ_a`.
fn partner(f: &FiberData, a: usize) -> usize {
    let mu = f.eigenpairs[a].mu;
    (0..f.eigenpairs.len())
        .min_by(|&x, &y| (f.eigenpairs[x].mu + mu).norm().total_cmp(&(f.eigenpairs[y].mu + mu).norm()))
        .unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingReport {
    /// Largest `|P_ab|` off negated partners, relative to `|ω|`.
    pub off_support: f64,
    /// Smallest `|P_ab|` on negated partners, relative to `|ω|`.
    pub on_support: f64,
    /// `max_a min_b |μ_a + μ_b|`, relative.
    pub negation_residual: f64,
    /// `min over signs |±μ1 ± μ2 ± μ3|`, relative.
    pub triple_residual: f64,
    /// `|Π μ_a + a2| / |a2|`.
    pub determinant_residual: f64,
}

pub fn pairing_report(f: &FiberData) -> Result<PairingReport> {
    let p = f.pairing.as_ref().ok_or(Error::DegenerateInput("pairing not computed"))?;
    let sw = scale7(&f.omega);
    let mus: Vec<C64> = f.eigenpairs.iter().map(|e| e.mu).collect();
    let sm = mus.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
    let (mut off, mut on, mut neg) = (0.0f64, f64::INFINITY, 0.0f64);
    for a in 0..6 {
        let b = partner(f, a);
        neg = neg.max((mus[a] + mus[b]).norm() / sm);
        for q in 0..6 {
            let v = p[(a, q)].norm() / sw;
            if q == b {
                on = on.min(v);
            } else {
                off = off.max(v);
            }
        }
    }
    // one representative per ± pair
    let mut reps: Vec<C64> = Vec::new();
    for (a, mu) in mus.iter().enumerate() {
        if !reps.iter().any(|r| (r + mu).norm() <= (r - mu).norm()) || partner(f, a) == a {
            reps.push(*mu);
        }
    }
    let mut triple = f64::INFINITY;
    if reps.len() == 3 {
        for s in 0..8u8 {
            let sg = |i: u8| if s >> i & 1 == 1 { -1.0 } else { 1.0 };
            triple = triple.min((reps[0] * sg(0) + reps[1] * sg(1) + reps[2] * sg(2)).norm() / sm);
        }
    }
    let prod: C64 = mus.iter().product();
    let det = (prod + f.a2).norm() / f.a2.norm().max(f64::MIN_POSITIVE);
    Ok(PairingReport { off_support: off, on_support: on, negation_residual: neg, triple_residual: triple, determinant_residual: det })
}

/// `K v = ψ((v⌟α') ∧ α' ∧ g v0)` on `C^7`.
pub fn k_ambient(v0: &Vec7, metric: &Mat7) -> Mat7 {
    let al = alpha();
    let flat = ExtForm::one_form((metric * v0).as_slice());
    let tail = al.ext().wedge(&flat);
    let mut k = Mat7::zeros();
    for i in 0..7 {
        let e = Vec7::from_fn(|r, _| c((r == i) as u8 as f64));
        let u = psi_dual(&al.interior(&e).wedge(&tail));
        k.set_column(i, &u);
    }
    k
}

/// `s = tr((Π K Π)²)/6` with `Π` the `g`-projection onto `v0^⊥`.
pub fn s_value(f: &FiberData) -> Result<C64> {
    let v0 = f.v0_or_raw();
    let n2 = f.v0_norm2();
    if n2.norm() <= 1e-12 * linalg::vnorm(&v0).powi(2) {
        return Err(Error::DegenerateInput("v0 is isotropic"));
    }
    let k = k_ambient(&v0, &f.metric);
    let pi = Mat7::identity() - v0 * (v0.transpose() * f.metric) / n2;
    let kp = pi * k * pi;
    Ok((kp * kp).trace() / 6.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub k_matrix: Mat7,
    /// `|[K, A]| / (|K| |A|)`.
    pub commutator: f64,
    pub s: C64,
    pub sqrt_s: C64,
    /// `K e_a = κ_a e_a`, in eigenpair order.
    pub k_eigenvalues: Vec<C64>,
    /// Largest `|K e_a - κ_a e_a| / |K|`.
    pub membership_residual: f64,
    /// `true` for eigenlines in `E⁺`.
    pub plus: Vec<bool>,
    /// Largest `|κ_a² - s| / |s|`.
    pub side_residual: f64,
    /// Largest intra-side pairing, relative to `|ω|`.
    pub lagrangian_residual: f64,
    /// `|Σ μ|` over `E⁺`, relative.
    pub plus_sum_residual: f64,
    /// `|α'(e1, e2, e3)|` over unit eigenvectors in `E⁺`.
    pub alpha_plus: f64,
}

impl AlphaReport {
    pub fn counts(&self) -> (usize, usize) {
        let p = self.plus.iter().filter(|x| **x).count();
        (p, self.plus.len() - p)
    }
}

fn split_sides(k: &Mat7, pairs: &[Eigenpair], sqrt_s: C64) -> (Vec<C64>, Vec<bool>, f64) {
    let sk = scale7(k);
    let mut kappas = Vec::with_capacity(pairs.len());
    let mut plus = Vec::with_capacity(pairs.len());
    let mut memb = 0.0f64;
    for e in pairs {
        let ke = k * e.vector;
        let kappa = (e.vector.adjoint() * ke)[(0, 0)];
        memb = memb.max(linalg::vnorm(&(ke - e.vector * kappa)) / sk);
        plus.push((kappa - sqrt_s).norm() < (kappa + sqrt_s).norm());
        kappas.push(kappa);
    }
    (kappas, plus, memb)
}

fn alpha_on(vs: &[&Vec7]) -> f64 {
    if vs.len() != 3 {
        return f64::NAN;
    }
    alpha().eval(vs[0], vs[1], vs[2]).norm()
}

pub fn alpha_restricted_checks(f: &FiberData) -> Result<AlphaReport> {
    if f.eigenpairs.len() != 6 {
        return Err(Error::DegenerateInput("eigenpairs not computed"));
    }
    let v0 = f.v0_or_raw();
    let k = k_ambient(&v0, &f.metric);
    let sa = scale7(&f.matrix);
    let commutator = linalg::frob(&(k * f.matrix - f.matrix * k)) / (scale7(&k) * sa);
    let s = s_value(f)?;
    if s.norm() <= 1e-10 * scale7(&k).powi(2) {
        return Err(Error::SVanishes { s: s.norm() });
    }
    let sqrt_s = linalg::sqrt_principal(s);
    let (kappas, plus, membership) = split_sides(&k, &f.eigenpairs, sqrt_s);
    let side = kappas.iter().map(|kp| (kp * kp - s).norm() / s.norm()).fold(0.0, f64::max);
    let sw = scale7(&f.omega);
    let mut lag = 0.0f64;
    for a in 0..6 {
        for b in 0..6 {
            if a != b && plus[a] == plus[b] {
                let p = (f.eigenpairs[a].vector.transpose() * f.omega * f.eigenpairs[b].vector)[(0, 0)];
                lag = lag.max(p.norm() / sw);
            }
        }
    }
    let sm = f.eigenpairs.iter().fold(0.0f64, |a, e| a.max(e.mu.norm()));
    let plus_sum: C64 = f.eigenpairs.iter().zip(&plus).filter(|(_, p)| **p).map(|(e, _)| e.mu).sum();
    let pv: Vec<&Vec7> = f.eigenpairs.iter().zip(&plus).filter(|(_, p)| **p).map(|(e, _)| &e.vector).collect();
    Ok(AlphaReport {
        k_matrix: k,
        commutator,
        s,
        sqrt_s,
        k_eigenvalues: kappas,
        membership_residual: membership,
        side_residual: side,
        lagrangian_residual: lag,
        plus_sum_residual: plus_sum.norm() / sm,
        alpha_plus: alpha_on(&pv),
        plus,
    })
}

/// All fiberwise data at `ζ`.
pub fn fiber(a: &KillingField, zeta: C64) -> Result<FiberData> {
    eigenline_fiber(kernel_v0(omega_fiber(a, zeta, None)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SDivisibility {
    /// Mean of `s(ζ)/a2(ζ)`.
    pub ratio: C64,
    /// `max |r - mean| / |mean|`.
    pub spread: f64,
    pub samples: usize,
}

pub const RATIO_TOL: f64 = 1e-6;

/// `s(α)/a2` at `n ≥ 12` generic samples.
pub fn s_divisibility(a: &KillingField, n: usize) -> Result<SDivisibility> {
    if a.scale() == 0.0 {
        return Err(Error::DegenerateInput("zero field"));
    }
    let n = n.max(12);
    let mut ratios = Vec::with_capacity(n);
    for z in generic_zetas(n, 0x5d1) {
        let f = kernel_v0(omega_fiber(a, z, None)?);
        if f.kernel_degenerate {
            continue;
        }
        ratios.push(s_value(&f)? / f.a2);
    }
    if ratios.len() < 12 {
        return Err(Error::InsufficientSamples { required: 12, got: ratios.len() });
    }
    let mean = ratios.iter().sum::<C64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max) / mean.norm().max(f64::MIN_POSITIVE);
    if spread > RATIO_TOL {
        return Err(Error::NonConstantRatio { spread });
    }
    Ok(SDivisibility { ratio: mean, spread, samples: ratios.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingFit {
    pub zeta0: C64,
    /// `(|ζ - ζ0|, |√a2|, |α|E⁺|, |s|)` per sample.
    pub samples: Vec<(f64, f64, f64, f64)>,
    /// Least-squares slope of `log|α|E⁺|` against `log|√a2|`.
    pub order_sqrt_a2: f64,
    /// Slope against `log|ζ - ζ0|`.
    pub order_zeta: f64,
    /// Slope of `log|s|` against `log|ζ - ζ0|`.
    pub s_order_zeta: f64,
    /// Largest deviation of the samples from the fitted line.
    pub fit_residual: f64,
}

fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let res = pts.iter().map(|p| (p.1 - (my + slope * (p.0 - mx))).abs()).fold(0.0, f64::max);
    (slope, res)
}

/// Order of vanishing of `α|E⁺` along a radial path into `ζ0 = λ0^{1/6}`.
pub fn vanishing_order_at_d(a: &KillingField, lambda0: C64) -> Result<VanishingFit> {
    let sc = spectral_coefficients(a)?;
    let db2 = sc.b2.derivative().eval(lambda0)?;
    let b2_scale = sc.b2.max_abs() * (sc.b2.coeffs.len() as f64);
    if db2.norm() <= 1e-8 * b2_scale {
        return Err(Error::DegenerateInput("lambda0 is not a simple root of b2"));
    }
    let zeta0 = C64::from_polar(lambda0.norm().powf(1.0 / 6.0), lambda0.arg() / 6.0);
    let dir = C64::from_polar(1.0, 0.7);
    let mut samples = Vec::new();
    let mut prev_root: Option<C64> = None;
    for i in 0..9 {
        let r = 10f64.powf(-4.5 - 0.25 * i as f64) * zeta0.norm();
        let z = zeta0 + dir * r;
        let f = kernel_v0(omega_fiber(a, z, None)?);
        let pairs = eigenpairs_with_gap(&f, 0.0)?;
        let s = s_value(&f)?;
        let k = k_ambient(&f.v0_or_raw(), &f.metric);
        // follow one branch of √s along the path
        let mut root = linalg::sqrt_principal(s);
        if let Some(p) = prev_root {
            if (root / root.norm() - p).norm() > (root / root.norm() + p).norm() {
                root = -root;
            }
        }
        prev_root = Some(root / root.norm());
        let (_, plus, _) = split_sides(&k, &pairs, root);
        let pv: Vec<&Vec7> = pairs.iter().zip(&plus).filter(|(_, p)| **p).map(|(e, _)| &e.vector).collect();
        if pv.len() != 3 {
            return Err(Error::DegenerateInput("E+ does not contain three eigenlines near D"));
        }
        samples.push((r, linalg::sqrt_principal(f.a2).norm(), alpha_on(&pv), s.norm()));
    }
    let (order_sqrt_a2, res) = fit_line(&samples.iter().map(|s| (s.1.ln(), s.2.ln())).collect::<Vec<_>>());
    let (order_zeta, _) = fit_line(&samples.iter().map(|s| (s.0.ln(), s.2.ln())).collect::<Vec<_>>());
    let (s_order_zeta, _) = fit_line(&samples.iter().map(|s| (s.0.ln(), s.3.ln())).collect::<Vec<_>>());
    Ok(VanishingFit { zeta0, samples, order_sqrt_a2, order_zeta, s_order_zeta, fit_residual: res })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorFiber {
    /// `|a2(ζ0)|` relative to `|A|⁶`.
    pub a2_residual: f64,
    /// `|K²| / |K|²` on `v0^⊥`.
    pub k_square: f64,
    /// Numerical rank of `K` on `v0^⊥`.
    pub k_rank: usize,
    /// `|α'|` restricted to `v0^⊥` (max component in an orthonormal basis).
    pub alpha_norm: f64,
    /// `|v0|` relative to `|A|³`; `v0` is isotropic but not zero.
    pub v0_norm: f64,
}

/// `K` at a point of the divisor `a2 = 0`, where `v0` is isotropic.
pub fn divisor_fiber(a: &KillingField, zeta0: C64) -> Result<DivisorFiber> {
    let f = kernel_v0(omega_fiber(a, zeta0, None)?);
    let v0 = f.v0_or_raw();
    let k = k_ambient(&v0, &f.metric);
    let flat = (f.metric * v0).transpose();
    let w: Vec<Vec7> = linalg::null_space(&DMatrix::from_iterator(1, 7, flat.iter().copied()), 1e-10)
        .iter()
        .map(linalg::dvec_to_vec7)
        .collect();
    if w.len() != 6 {
        return Err(Error::DegenerateInput("v0 vanishes on the divisor"));
    }
    let wm = DMatrix::from_fn(7, 6, |r, q| w[q][r]);
    let kw = linalg::to_dmatrix(&k) * &wm;
    let (coords, _) = linalg::lstsq(&wm, &kw);
    let k6 = coords;
    let sk = k6.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
    let k_square = (&k6 * &k6).iter().fold(0.0f64, |a, z| a.max(z.norm())) / (sk * sk);
    let sv = linalg::singular_values(&k6);
    let k_rank = sv.iter().filter(|s| **s > 1e-7 * sv[0]).count();
    let al = alpha();
    let mut an = 0.0f64;
    for i in 0..6 {
        for j in i + 1..6 {
            for l in j + 1..6 {
                an = an.max(al.eval(&w[i], &w[j], &w[l]).norm());
            }
        }
    }
    let sa = scale7(&f.matrix);
    Ok(DivisorFiber {
        a2_residual: f.a2.norm() / sa.powi(6),
        k_square,
        k_rank,
        alpha_norm: an,
        v0_norm: linalg::vnorm(&v0) / sa.powi(3),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenlineSymmetry {
    /// Line distance between `C e(ζ)` and `e(εζ)` for the same `μ`.
    pub tau: f64,
    /// Line distance between `conj(e(ζ))` and `e(1/ζ̄)` for `μ̄`.
    pub rho: f64,
}

fn line_distance(x: &Vec7, y: &Vec7) -> f64 {
    let xx = x / c(linalg::vnorm(x));
    let ip = (xx.adjoint() * y)[(0, 0)];
    linalg::vnorm(&(y - xx * ip)) / linalg::vnorm(y)
}

fn match_mu(pairs: &[Eigenpair], mu: C64) -> &Eigenpair {
    pairs.iter().min_by(|a, b| (a.mu - mu).norm().total_cmp(&(b.mu - mu).norm())).unwrap()
}

pub fn eigenline_symmetry(a: &KillingField, zeta: C64) -> Result<EigenlineSymmetry> {
    let eps = crate::octonion::epsilon();
    let base = fiber(a, zeta)?;
    let rot = fiber(a, eps * zeta)?;
    let refl = fiber(a, C64::new(1.0, 0.0) / zeta.conj())?;
    let cm = tau_matrix();
    let (mut t, mut r) = (0.0f64, 0.0f64);
    for e in &base.eigenpairs {
        t = t.max(line_distance(&(cm * e.vector), &match_mu(&rot.eigenpairs, e.mu).vector));
        r = r.max(line_distance(&e.vector.map(|z| z.conj()), &match_mu(&refl.eigenpairs, e.mu.conj()).vector));
    }
    Ok(EigenlineSymmetry { tau: t, rho: r })
}

/// Roots `λ0` of `b2` that are simple and well separated.
pub fn simple_b2_roots(a: &KillingField) -> Result<Vec<C64>> {
    let s = spectral_coefficients(a)?;
    let t = s.b2.trim(1e-13 * s.b2.max_abs());
    let roots: Vec<C64> =
        crate::laurent::poly_roots(&t.shifted_poly()).into_iter().filter(|r| r.norm() > 0.0).collect();
    Ok(cluster_roots(&roots, 1e-6, 0.0).into_iter().filter(|c| c.multiplicity == 1).map(|c| c.center).collect())
}

/// Every fiberwise residual at one `ζ`, for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberChecks {
    pub zeta: C64,
    pub antisymmetry: f64,
    pub symplectic: f64,
    pub omega_rank: usize,
    pub kernel: f64,
    pub v0_norm: f64,
    pub pairing: PairingReport,
    pub alpha: AlphaReport,
}

pub fn fiber_checks(a: &KillingField, zeta: C64) -> Result<FiberChecks> {
    let f = fiber(a, zeta)?;
    Ok(FiberChecks {
        zeta,
        antisymmetry: f.antisymmetry_residual(),
        symplectic: f.symplectic_residual(zeta.re.to_bits() ^ zeta.im.to_bits()),
        omega_rank: f.omega_rank(),
        kernel: f.kernel_residual(),
        v0_norm: f.v0_norm_residual(),
        pairing: pairing_report(&f)?,
        alpha: alpha_restricted_checks(&f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(k: usize, seed: u64) -> KillingField {
        G2Algebra::new().unwrap().random_field(k, seed)
    }

    #[test]
    fn calibration_is_one_sixth() {
        let alg = G2Algebra::new().unwrap();
        let c0 = calibrate(&alg).unwrap();
        assert!((c0 - V0_CALIBRATION).abs() < 1e-9, "{c0}");
        // constant across fields, fibers and k
        for (k, seed) in [(0, 9), (1, 2)] {
            let a = alg.random_field(k, seed);
            for z in generic_zetas(3, seed) {
                let f = kernel_v0(omega_fiber(&a, z, None).unwrap());
                assert!(f.v0_norm_residual() < 1e-7, "k={k}");
            }
        }
    }

    #[test]
    fn omega_is_infinitesimally_symplectic() {
        let a = setup(0, 3);
        let f = omega_fiber(&a, C64::new(0.4, 1.2), None).unwrap();
        assert!(f.antisymmetry_residual() < 1e-10);
        assert!(f.symplectic_residual(1) < 1e-9);
        assert_eq!(f.omega_rank(), 6);
        // a conjugating gauge in G2 leaves the skew form skew
        let g = tau_matrix();
        let fg = omega_fiber(&a, C64::new(0.4, 1.2), Some(&g)).unwrap();
        assert!(fg.antisymmetry_residual() < 1e-10);
    }

    #[test]
    fn v0_and_pairing() {
        let a = setup(0, 4);
        let f = fiber(&a, C64::new(-0.3, 0.8)).unwrap();
        assert!(f.kernel_residual() < 1e-8);
        // oracle: -(μ1μ2μ3)² from the eigenvalue product
        let p = pairing_report(&f).unwrap();
        assert!(p.determinant_residual < 1e-8);
        assert!(f.v0_norm_residual() < 1e-7);
        assert!(p.off_support < 1e-8, "{p:?}");
        assert!(p.on_support > 1e-4);
        assert!(p.negation_residual < 1e-9 && p.triple_residual < 1e-9, "{p:?}");
    }

    #[test]
    fn k_commutes_and_splits() {
        let a = setup(1, 6);
        let f = fiber(&a, C64::new(0.7, 0.6)).unwrap();
        let r = alpha_restricted_checks(&f).unwrap();
        assert!(r.commutator < 1e-8);
        assert!(r.membership_residual < 1e-7);
        assert_eq!(r.counts(), (3, 3));
        assert!(r.lagrangian_residual < 1e-8);
        assert!(r.plus_sum_residual < 1e-8);
        assert!(r.side_residual < 1e-7);
        assert!(r.alpha_plus > 1e-6);
    }

    #[test]
    fn s_is_a_multiple_of_a2() {
        let a = setup(0, 2);
        let d = s_divisibility(&a, 12).unwrap();
        assert!(d.spread < 1e-6);
        assert!((d.ratio - c(4.0)).norm() < 1e-6, "{:?}", d.ratio);
        // both sextic in A: invariant under scaling
        let d2 = s_divisibility(&a.scaled(1.7), 12).unwrap();
        assert!((d2.ratio - d.ratio).norm() < 1e-6);
        assert!(matches!(s_divisibility(&KillingField::zero(0), 12), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn vanishing_at_the_divisor() {
        let a = setup(0, 1);
        let roots = simple_b2_roots(&a).unwrap();
        assert_eq!(roots.len(), 2);
        let fit = vanishing_order_at_d(&a, roots[0]).unwrap();
        assert!((fit.order_sqrt_a2 - 2.0).abs() < 0.1, "{fit:?}");
        assert!((fit.order_zeta - 1.0).abs() < 0.05);
        assert!((fit.s_order_zeta - 1.0).abs() < 0.05);
        let zeta0 = fit.zeta0;
        let df = divisor_fiber(&a, zeta0).unwrap();
        assert!(df.a2_residual < 1e-10);
        assert!(df.k_square < 1e-6, "{df:?}");
        assert_eq!(df.k_rank, 3);
        assert!(df.alpha_norm > 1e-3);
        assert!(df.v0_norm > 1e-6);
    }

    #[test]
    fn eigenlines_follow_tau_and_rho() {
        let a = setup(0, 7);
        let s = eigenline_symmetry(&a, C64::new(0.8, 0.45)).unwrap();
        assert!(s.tau < 1e-8 && s.rho < 1e-8, "{s:?}");
    }
}
