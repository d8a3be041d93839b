//! The twisted loop algebra: polynomial Killing fields
//! `A(ζ) = Σ_{|j| ≤ d} A_j ζ^j` with `A_j ∈ g_{j mod 6}`, `A_{-j} = conj(A_j)`
//! and `d = 6k + 1`, plus the `C_ζ` gauge that makes them functions of `λ = ζ⁶`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix2};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, c, Mat7, I, ONE, ZERO};
use crate::octonion::{self, epsilon, G2Algebra};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct KillingField {
    k: usize,
    coeffs: Vec<Mat7>,
}

impl KillingField {
    /// Wraps raw coefficients `A_{-d} .. A_d` without checking the algebraic invariants.
    pub fn new(k: usize, coeffs: Vec<Mat7>) -> Result<Self> {
        let d = 6 * k + 1;
        if coeffs.len() != 2 * d + 1 {
            return Err(Error::InvalidField(format!("expected {} coefficients for k = {k}, got {}", 2 * d + 1, coeffs.len())));
        }
        Ok(Self { k, coeffs })
    }

    pub fn zero(k: usize) -> Self {
        Self { k, coeffs: alloc::vec![Mat7::zeros(); 2 * (6 * k + 1) + 1] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> i64 {
        6 * self.k as i64 + 1
    }

    pub fn coeff(&self, j: i64) -> &Mat7 {
        &self.coeffs[(j + self.d()) as usize]
    }

    pub fn coeff_mut(&mut self, j: i64) -> &mut Mat7 {
        let d = self.d();
        &mut self.coeffs[(j + d) as usize]
    }

    pub fn coeffs(&self) -> &[Mat7] {
        &self.coeffs
    }

    pub fn exponents(&self) -> core::ops::RangeInclusive<i64> {
        -self.d()..=self.d()
    }

    /// Largest entry modulus over all coefficients.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { k: self.k, coeffs: self.coeffs.iter().map(|m| m * c(t)).collect() }
    }

    /// `self + h · other`.
    pub fn add_scaled(&self, other: &Self, h: f64) -> Self {
        Self { k: self.k, coeffs: self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| a + b * c(h)).collect() }
    }

    /// Real coordinates (re, im interleaved, column-major per coefficient).
    pub fn to_real(&self) -> Vec<f64> {
        self.coeffs.iter().flat_map(|m| m.iter().flat_map(|z| [z.re, z.im])).collect()
    }

    pub fn from_real(k: usize, v: &[f64]) -> Self {
        let coeffs = v
            .chunks_exact(98)
            .map(|ch| Mat7::from_iterator(ch.chunks_exact(2).map(|p| C64::new(p[0], p[1]))))
            .collect();
        Self { k, coeffs }
    }

    /// `A(ζ)` by two-sided Horner evaluation.
    pub fn evaluate(&self, zeta: C64) -> Result<Mat7> {
        if zeta == ZERO {
            return Err(Error::Pole);
        }
        let d = self.d();
        let mut pos = Mat7::zeros();
        for j in (0..=d).rev() {
            pos = pos * zeta + self.coeff(j);
        }
        let inv = ONE / zeta;
        let mut neg = Mat7::zeros();
        for j in (1..=d).rev() {
            neg = (neg + self.coeff(-j)) * inv;
        }
        Ok(pos + neg)
    }

    /// `max_j |A_{-j} - conj(A_j)|` relative to the field scale, with the worst `j`.
    pub fn reality_residual(&self) -> (f64, i64) {
        let s = self.scale();
        if s == 0.0 {
            return (0.0, 0);
        }
        (0..=self.d())
            .map(|j| (linalg::max_abs(&(self.coeff(-j) - linalg::conj(self.coeff(j)))) / s, j))
            .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
    }

    /// `max_j dist(A_j, g_{j mod 6})` relative to the field scale, with the worst `j`.
    pub fn grading_residual(&self, alg: &G2Algebra) -> (f64, i64) {
        let s = self.scale();
        if s == 0.0 {
            return (0.0, 0);
        }
        self.exponents()
            .map(|j| (alg.graded_membership_residual(self.coeff(j), j) / s, j))
            .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
    }

    /// Checks grading and reality within `tol` (relative).
    pub fn validate(&self, alg: &G2Algebra, tol: f64) -> Result<()> {
        let (g, j) = self.grading_residual(alg);
        if g > tol {
            return Err(Error::InvalidField(format!("A_{j} is not in g_{} (residual {g:.3e})", j.rem_euclid(6))));
        }
        let (r, j) = self.reality_residual();
        if r > tol {
            return Err(Error::InvalidField(format!("reality violated at j = {j}: A_-{j} != conj(A_{j}) (residual {r:.3e})")));
        }
        Ok(())
    }
}

impl G2Algebra {
    /// Random element of `Λ_d`: standard normal coordinates in the `g_j` bases.
    pub fn random_field(&self, k: usize, seed: u64) -> KillingField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut field = KillingField::zero(k);
        let d = field.d();
        for j in 0..=d {
            let basis = &self.graded[j.rem_euclid(6) as usize];
            let mut m = Mat7::zeros();
            for b in basis {
                let x: f64 = StandardNormal.sample(&mut rng);
                let coef = if j == 0 {
                    c(x)
                } else {
                    let y: f64 = StandardNormal.sample(&mut rng);
                    C64::new(x, y)
                };
                m += b * coef;
            }
            if j == 0 {
                m = m.map(|z| c(z.re));
            }
            *field.coeff_mut(j) = m;
            if j > 0 {
                *field.coeff_mut(-j) = linalg::conj(&m);
            }
        }
        field
    }
}

/// Random Killing field for `(k, seed)`; deterministic per seed.
pub fn random_killing_field(k: usize, seed: u64) -> Result<KillingField> {
    Ok(G2Algebra::new()?.random_field(k, seed))
}

pub fn evaluate_at(a: &KillingField, zeta: C64) -> Result<Mat7> {
    a.evaluate(zeta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// `max |conj(A(ζ)) - A(1/ζ̄)|`, relative to `max |A(ζ)|`.
    pub rho: f64,
    /// `max |C A(ζ) C⁻¹ - A(εζ)|`, relative to `max |A(ζ)|`.
    pub tau: f64,
}

pub fn symmetry_residuals(a: &KillingField, zetas: &[C64]) -> Result<SymmetryReport> {
    let eps = epsilon();
    let (mut rho, mut tau, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for &z in zetas {
        let az = a.evaluate(z)?;
        scale = scale.max(linalg::max_abs(&az));
        let refl = a.evaluate(ONE / z.conj())?;
        rho = rho.max(linalg::max_abs(&(linalg::conj(&az) - refl)));
        tau = tau.max(linalg::max_abs(&(octonion::tau(&az) - a.evaluate(eps * z)?)));
    }
    if scale == 0.0 {
        return Ok(SymmetryReport { rho: 0.0, tau: 0.0 });
    }
    Ok(SymmetryReport { rho: rho / scale, tau: tau / scale })
}

/// Deterministic generic sample points off the unit circle.
pub fn generic_zetas(n: usize, salt: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ salt);
    (0..n)
        .map(|_| {
            let u: f64 = rand_distr::Uniform::new(0.7f64, 1.4).unwrap().sample(&mut rng);
            let t: f64 = rand_distr::Uniform::new(0.0f64, core::f64::consts::TAU).unwrap().sample(&mut rng);
            C64::from_polar(u, t)
        })
        .collect()
}

/// Which `S_ζ` to use in the gauge `C_ζ = diag(1, S_ζ, S_{ζ²}, S_{ζ³})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SConvention {
    /// `S_{e^{iθ}} = R_θ`; multiplicative in `ζ`.
    #[default]
    Rotation,
    /// The variant with `-(ζ+ζ⁻¹)/2` in the lower right corner.
    Printed,
}

pub fn s_matrix(zeta: C64, conv: SConvention) -> Matrix2<C64> {
    let inv = ONE / zeta;
    let a = (zeta + inv) / 2.0;
    let b = (zeta - inv) / (I * 2.0);
    let d = match conv {
        SConvention::Rotation => a,
        SConvention::Printed => -a,
    };
    Matrix2::new(a, -b, b, d)
}

pub fn c_zeta(zeta: C64, conv: SConvention) -> Mat7 {
    let mut m = Mat7::zeros();
    m[(0, 0)] = ONE;
    for (p, blk) in [(1i32, 1usize), (2, 3), (3, 5)] {
        let s = s_matrix(zeta.powi(p), conv);
        for i in 0..2 {
            for j in 0..2 {
                m[(blk + i, blk + j)] = s[(i, j)];
            }
        }
    }
    m
}

/// `Ã(ζ) = C_ζ⁻¹ A(ζ) C_ζ`.
pub fn gauged_at(a: &KillingField, zeta: C64, conv: SConvention) -> Result<Mat7> {
    let cz = c_zeta(zeta, conv);
    let inv = cz.try_inverse().ok_or(Error::DegenerateInput("C_zeta is singular"))?;
    Ok(inv * a.evaluate(zeta)? * cz)
}

/// The gauged field as a Laurent polynomial in `λ = ζ⁶`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeReducedField {
    pub k: usize,
    /// `B_m` for `-(k+1) <= m <= k+1`.
    pub coeffs: Vec<Mat7>,
    /// `max |Ã(εζ) - Ã(ζ)|` over samples, relative.
    pub tau_residual: f64,
    /// Relative misfit of the least-squares λ-fit over the samples.
    pub fit_residual: f64,
    /// Largest fitted coefficient just outside `±(k+1)`, relative.
    pub window_residual: f64,
    /// `max |B_{-m} - conj(B_m)|`, relative.
    pub reality_residual: f64,
}

impl GaugeReducedField {
    pub fn window(&self) -> i64 {
        self.k as i64 + 1
    }

    pub fn coeff(&self, m: i64) -> &Mat7 {
        &self.coeffs[(m + self.window()) as usize]
    }

    pub fn evaluate(&self, lambda: C64) -> Result<Mat7> {
        if lambda == ZERO {
            return Err(Error::Pole);
        }
        let w = self.window();
        Ok((-w..=w).map(|m| self.coeff(m) * lambda.powi(m as i32)).sum())
    }
}

/// Tolerance on the relative `τ`-invariance residual of the gauged field.
pub const GAUGE_TOL: f64 = 1e-8;

pub fn gauge_reduce_lambda(a: &KillingField) -> Result<GaugeReducedField> {
    gauge_reduce_lambda_with(a, SConvention::Rotation)
}

pub fn gauge_reduce_lambda_with(a: &KillingField, conv: SConvention) -> Result<GaugeReducedField> {
    let eps = epsilon();
    let (mut tau_res, mut scale) = (0.0f64, 0.0f64);
    for z in generic_zetas(12, 11) {
        let g = gauged_at(a, z, conv)?;
        scale = scale.max(linalg::max_abs(&g));
        tau_res = tau_res.max(linalg::max_abs(&(gauged_at(a, eps * z, conv)? - g)));
    }
    let tau_residual = if scale == 0.0 { 0.0 } else { tau_res / scale };
    if tau_residual > GAUGE_TOL {
        return Err(Error::GaugeFailure { residual: tau_residual, tol: GAUGE_TOL });
    }

    let k = a.k();
    let fit_w = k as i64 + 2;
    let nsamp = 4 * (k + 2);
    let offset = 0.173;
    let zetas: Vec<C64> = (0..nsamp)
        .map(|n| C64::from_polar(1.0, (core::f64::consts::TAU * n as f64 / nsamp as f64 + offset) / 6.0))
        .collect();
    let ncoef = (2 * fit_w + 1) as usize;
    let vander = DMatrix::from_fn(nsamp, ncoef, |r, q| zetas[r].powi(6).powi(q as i32 - fit_w as i32));
    let mut rhs = DMatrix::zeros(nsamp, 49);
    let mut samples = Vec::with_capacity(nsamp);
    for (r, z) in zetas.iter().enumerate() {
        let g = gauged_at(a, *z, conv)?;
        for (q, v) in g.iter().enumerate() {
            rhs[(r, q)] = *v;
        }
        samples.push(g);
    }
    let (sol, cond) = linalg::lstsq(&vander, &rhs);
    if cond > 1e8 {
        return Err(Error::IllConditioned { condition: cond });
    }
    let fitted = &vander * &sol - &rhs;
    let sample_scale = samples.iter().map(linalg::max_abs).fold(0.0, f64::max);
    let rel = |x: f64| if sample_scale == 0.0 { 0.0 } else { x / sample_scale };
    let fit_residual = rel(fitted.iter().fold(0.0, |m, z| m.max(z.norm())));
    let coef_mat = |m: i64| Mat7::from_fn(|r, q| sol[((m + fit_w) as usize, r + 7 * q)]);
    let window_residual = rel(linalg::max_abs(&coef_mat(fit_w)).max(linalg::max_abs(&coef_mat(-fit_w))));
    let w = k as i64 + 1;
    let coeffs: Vec<Mat7> = (-w..=w).map(coef_mat).collect();
    let reality_residual =
        rel((0..=w).map(|m| linalg::max_abs(&(coef_mat(-m) - linalg::conj(&coef_mat(m))))).fold(0.0, f64::max));
    Ok(GaugeReducedField { k, coeffs, tau_residual, fit_residual, window_residual, reality_residual })
}
