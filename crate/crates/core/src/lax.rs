//! The Lax flow `dA/dt = [A, Φ]` along a real direction `z = t·v`, with
//! `Φ(ζ) = v (A_{d-1} + A_d ζ) + v̄ (A_{1-d} + A_{-d} ζ⁻¹)`.

#[allow(unused_imports)]
use num_traits::Float as _;

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::linalg::{self, bracket, Mat7};
use crate::loop_algebra::KillingField;
use crate::ode::{dopri5, OdeOptions, OdeStats};
use crate::spectral::spectral_coefficients;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LaxVariant {
    #[default]
    Standard,
    /// Negative control: the shift terms `[A_{j∓1}, Φ_{±1}]` enter with the
    /// wrong sign for `j ≠ 0`. A uniform flip would still be a Lax pair.
    SignFlipped,
}

/// Coefficients of `[A, Φ]`; the `ζ^{±(d+1)}` terms are `[A_{±d}, A_{±d}] = 0`
/// and are never formed.
pub fn lax_rhs(a: &KillingField, v: C64) -> KillingField {
    lax_rhs_with(a, v, LaxVariant::Standard)
}

pub fn lax_rhs_with(a: &KillingField, v: C64, variant: LaxVariant) -> KillingField {
    let d = a.d();
    let vb = v.conj();
    let phi0: Mat7 = a.coeff(d - 1) * v + a.coeff(1 - d) * vb;
    let phi_plus: Mat7 = a.coeff(d) * v;
    let phi_minus: Mat7 = a.coeff(-d) * vb;
    let mut out = KillingField::zero(a.k());
    for j in a.exponents() {
        let sign = match variant {
            LaxVariant::SignFlipped if j != 0 => linalg::c(-1.0),
            _ => linalg::c(1.0),
        };
        let mut m = bracket(a.coeff(j), &phi0);
        if j > -d {
            m += bracket(a.coeff(j - 1), &phi_plus) * sign;
        }
        if j < d {
            m += bracket(a.coeff(j + 1), &phi_minus) * sign;
        }
        *out.coeff_mut(j) = m;
    }
    out
}

/// The `ζ^{d+1}` coefficient of the full Laurent product `[A, Φ]`, formed
/// explicitly; zero up to rounding.
pub fn top_overflow(a: &KillingField, v: C64) -> Mat7 {
    let d = a.d();
    bracket(a.coeff(d), &(a.coeff(d) * v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub direction: C64,
    pub field: KillingField,
    /// Running maximum of the relative `(b1, b2)` change since `t = 0`.
    pub drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub tol: f64,
    /// Number of equal output intervals on `[0, t_end]`.
    pub intervals: usize,
    pub variant: LaxVariant,
}

impl FlowOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, intervals: 10, variant: LaxVariant::Standard }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub states: Vec<FlowState>,
    pub stats: OdeStats,
}

/// Relative change of the spectral coefficients of `b` against `a0`.
fn coefficient_drift(b0: &(crate::laurent::Laurent, crate::laurent::Laurent), a: &KillingField) -> Result<f64> {
    let s = spectral_coefficients(a)?;
    let rel = |x: &crate::laurent::Laurent, y: &crate::laurent::Laurent| {
        let sc = x.max_abs();
        let diff = x.sub(y).max_abs();
        if sc == 0.0 {
            diff
        } else {
            diff / sc
        }
    };
    Ok(rel(&b0.0, &s.b1).max(rel(&b0.1, &s.b2)))
}

pub fn integrate_flow(a0: &KillingField, v: C64, t_end: f64, tol: f64) -> Result<Vec<FlowState>> {
    Ok(integrate_flow_with(a0, v, t_end, &FlowOptions::new(tol))?.states)
}

pub fn integrate_flow_with(a0: &KillingField, v: C64, t_end: f64, opts: &FlowOptions) -> Result<Flow> {
    if !t_end.is_finite() {
        return Err(Error::DegenerateInput("t_end must be finite"));
    }
    let k = a0.k();
    let n = opts.intervals.max(1);
    let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let a = KillingField::from_real(k, y);
        dy.copy_from_slice(&lax_rhs_with(&a, v, opts.variant).to_real());
    };
    let b0 = {
        let s = spectral_coefficients(a0)?;
        (s.b1, s.b2)
    };
    let (traj, stats) = match dopri5(rhs, 0.0, &a0.to_real(), &times, &OdeOptions::with_tol(opts.tol)) {
        Ok(r) => r,
        Err(u) => {
            return Err(Error::StepUnderflow { t: u.t, h: u.h, last_good: Box::new(KillingField::from_real(k, &u.last_good)) })
        }
    };
    let mut states = Vec::with_capacity(traj.len());
    let mut drift = 0.0f64;
    for (t, y) in traj {
        let field = KillingField::from_real(k, &y);
        drift = drift.max(coefficient_drift(&b0, &field)?);
        states.push(FlowState { t, direction: v, field, drift });
    }
    Ok(Flow { states, stats })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    /// Relative `(b1, b2)` change at each state against the first.
    pub per_state: Vec<f64>,
    pub max_drift: f64,
    /// Relative change of `tr(A(ζ)^{2m})`, `m = 1, 2, 3`, at a fixed `ζ`.
    pub trace_drift: f64,
    /// Largest reality residual along the trajectory.
    pub reality_residual: f64,
}

pub const TRACE_ZETA: C64 = C64::new(0.83, 0.57);

fn traces(a: &KillingField) -> Result<[C64; 3]> {
    let m = a.evaluate(TRACE_ZETA)?;
    let m2 = m * m;
    let m4 = m2 * m2;
    Ok([m2.trace(), m4.trace(), (m4 * m2).trace()])
}

pub fn isospectral_drift(states: &[FlowState]) -> Result<DriftReport> {
    if states.len() < 2 {
        return Err(Error::DegenerateInput("drift needs at least two states"));
    }
    let first = &states[0].field;
    let s0 = spectral_coefficients(first)?;
    let b0 = (s0.b1, s0.b2);
    let tr0 = traces(first)?;
    let mut per_state = Vec::with_capacity(states.len());
    let (mut trace_drift, mut reality) = (0.0f64, 0.0f64);
    for st in states {
        per_state.push(coefficient_drift(&b0, &st.field)?);
        let tr = traces(&st.field)?;
        for (a, b) in tr0.iter().zip(tr.iter()) {
            let sc = a.norm();
            let diff = (a - b).norm();
            trace_drift = trace_drift.max(if sc == 0.0 { diff } else { diff / sc });
        }
        reality = reality.max(st.field.reality_residual().0);
    }
    let max_drift = per_state.iter().copied().fold(0.0, f64::max);
    Ok(DriftReport { per_state, max_drift, trace_drift, reality_residual: reality })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::octonion::G2Algebra;

    fn unit(theta: f64) -> C64 {
        C64::from_polar(1.0, theta)
    }

    #[test]
    fn zero_field_is_fixed() {
        let z = KillingField::zero(0);
        assert_eq!(lax_rhs(&z, unit(0.3)), z);
        let states = integrate_flow(&z, unit(0.3), 1.0, 1e-10).unwrap();
        assert!(states.iter().all(|s| s.field == z && s.drift == 0.0));
        assert_eq!(isospectral_drift(&states).unwrap().max_drift, 0.0);
    }

    #[test]
    fn rhs_matches_laurent_product_and_grading() {
        let alg = G2Algebra::new().unwrap();
        let a = alg.random_field(1, 3);
        let v = unit(0.7);
        assert!(linalg::max_abs(&top_overflow(&a, v)) < 1e-14 * a.scale() * a.scale());
        let r = lax_rhs(&a, v);
        // oracle: [A(ζ), Φ(ζ)] evaluated directly
        let d = a.d();
        let z = C64::new(0.9, 0.4);
        let az = a.evaluate(z).unwrap();
        let phi = (a.coeff(d - 1) + a.coeff(d) * z) * v + (a.coeff(1 - d) + a.coeff(-d) / z) * v.conj();
        let want = bracket(&az, &phi);
        assert!(linalg::max_abs(&(r.evaluate(z).unwrap() - want)) < 1e-10 * linalg::max_abs(&want));
        let sc = a.scale() * a.scale();
        assert!(r.grading_residual(&alg).0 * r.scale() < 1e-12 * sc);
        assert!(r.reality_residual().0 * r.scale() < 1e-12 * sc);
    }

    #[test]
    fn k0_flow_is_isospectral_and_time_symmetric() {
        let alg = G2Algebra::new().unwrap();
        let a = alg.random_field(0, 5);
        let v = unit(1.1);
        let fw = integrate_flow(&a, v, 1.0, 1e-10).unwrap();
        let rep = isospectral_drift(&fw).unwrap();
        assert!(rep.max_drift < 1e-6, "{}", rep.max_drift);
        assert!(rep.trace_drift < 1e-6);
        let last = &fw.last().unwrap().field;
        assert!(last.grading_residual(&alg).0 < 1e-7);
        assert!(last.reality_residual().0 < 1e-7);
        let bw = integrate_flow(&a, -v, -1.0, 1e-10).unwrap();
        for (x, y) in fw.iter().zip(bw.iter()) {
            let diff = x.field.add_scaled(&y.field, -1.0).scale();
            assert!(diff < 1e-8 * a.scale(), "t={} diff={diff}", x.t);
        }
        assert!(fw.windows(2).all(|w| w[1].drift >= w[0].drift));
    }

    #[test]
    fn sign_flip_breaks_isospectrality() {
        let alg = G2Algebra::new().unwrap();
        let a = alg.random_field(0, 5);
        let mut o = FlowOptions::new(1e-10);
        o.variant = LaxVariant::SignFlipped;
        let f = integrate_flow_with(&a, unit(1.1), 1.0, &o).unwrap();
        assert!(f.states.last().unwrap().drift > 1e-2, "{}", f.states.last().unwrap().drift);
    }

    #[test]
    fn tighter_tolerance_reduces_drift() {
        let alg = G2Algebra::new().unwrap();
        let a = alg.random_field(0, 8);
        let coarse = integrate_flow(&a, c(1.0), 1.0, 1e-6).unwrap().last().unwrap().drift;
        let fine = integrate_flow(&a, c(1.0), 1.0, 1e-11).unwrap().last().unwrap().drift;
        assert!(fine <= coarse.max(1e-12), "coarse {coarse} fine {fine}");
    }
}
