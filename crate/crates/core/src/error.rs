use alloc::boxed::Box;
use alloc::string::String;

use thiserror::Error;

use crate::loop_algebra::KillingField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("derivation system has nullity {found}, expected {expected}; tolerance {tol:e} must be revisited")]
    NumericalRank { found: usize, expected: usize, tol: f64 },

    #[error("frame precondition violated: {what} = {value:e}")]
    FramePrecondition { what: &'static str, value: f64 },

    #[error("matrix is not in g2 (residual {residual:e})")]
    NotInG2 { residual: f64 },

    #[error("3-form is outside the open orbit (kappa = 0)")]
    DegenerateOrbit,

    #[error("K-operator eigenvalue s is numerically zero ({s:e}); E+/E- split is degenerate")]
    SplitDegenerate { s: f64 },

    #[error("Laurent polynomial evaluated at zeta = 0")]
    Pole,

    #[error("gauge reduction failed: tau-dependence residual {residual:e} exceeds {tol:e}")]
    GaugeFailure { residual: f64, tol: f64 },

    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("interpolation is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("not a g2 field: {what} residual {residual:e}")]
    NotG2Field { what: &'static str, residual: f64 },

    #[error("tau-symmetry violated: coefficient of zeta^{exponent} has relative size {residual:e}")]
    TauSymmetryViolation { exponent: i64, residual: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("point is off the curve (residual {residual:e})")]
    OffCurve { residual: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64, last_good: Box<KillingField> },

    #[error("eigenvalues cluster (gap {gap:e}); sample is too close to a branch point")]
    BranchPointProximity { gap: f64 },

    #[error("s(alpha) vanishes at the sample (|s| = {s:e}); choose another zeta")]
    SVanishes { s: f64 },

    #[error("s(alpha)/a2 is not constant (relative spread {spread:e})")]
    NonConstantRatio { spread: f64 },

    #[error("{name}: counted {counted} but closed form gives {expected}")]
    FormulaMismatch { name: &'static str, counted: i64, expected: i64 },

    #[error("invalid Killing field: {0}")]
    InvalidField(String),
}
