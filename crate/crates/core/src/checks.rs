//! Acceptance checks, shared by the test suite and the `verify` command.
//!
//! Each [`Check`] carries a criterion number (1..=9), a short name, an anchor
//! slug from [`ANCHORS`], the measured value and the pinned bound.

#[allow(unused_imports)]
use num_traits::Float as _;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eigenline::{fiber_checks, s_divisibility, simple_b2_roots, vanishing_order_at_d};
use crate::forms::{
    k_alpha, nilpotent_normal_form6, plus_minus_split, select_normal_form, split_normal_form6, standard_symplectic6,
    Mat6, ThreeForm6, Vec6,
};
use crate::lax::{integrate_flow_with, isospectral_drift, FlowOptions, LaxVariant};
use crate::laurent::Laurent;
use crate::linalg::{self, c, Mat7};
use crate::loop_algebra::{gauge_reduce_lambda, generic_zetas, symmetry_residuals, KillingField};
use crate::octonion::{frame_complete, g2_basis, tau, tau_matrix, G2Algebra, ImOctonion};
use crate::spectral::{
    char_coefficients, cover_maps, discriminant_profile, genus_report, min_samples,
    moduli_real_dimension, smoothness_check, spectral_coefficients, SpectralCoefficients,
};
use crate::{Error, C64};

/// Anchor slugs and what each one pins down.
pub const ANCHORS: &[(&str, &str)] = &[
    ("g2-frame-columns", "orthonormal frame completion preserves the associative form"),
    ("order-six-automorphism", "tau = Ad_C has order six and commutes with conjugation"),
    ("derivation-algebra", "derivations of the octonions form a 14-dimensional algebra"),
    ("normal-form-metric", "the normal-form 3-form induces the Euclidean metric"),
    ("k-alpha-eigenspaces", "K_alpha squares to s and splits C^6 into Lagrangian eigenspaces"),
    ("charpoly-shape", "det(mu - A) = mu(mu^6 - a1 mu^4 + a1^2/4 mu^2 - a2)"),
    ("lambda-reduction", "a_j only involve powers of zeta^6"),
    ("gauge-lambda", "the gauged field depends on lambda = zeta^6 only"),
    ("genus-count", "branch counting gives |R| = 20(3k+1), g = 5(6k+1)"),
    ("moduli-dimension", "real dimension of the (b1, b2) space is 16k+4"),
    ("smoothness", "generic spectral curves are smooth"),
    ("collision-patterns", "eigenvalue mergers over the two kinds of branch points"),
    ("quotient-genus", "genera of the quotient curves C1 and C2"),
    ("tur-dimension", "the Prym-type torus has dimension 12k+3"),
    ("eigenline-degree", "degree of the eigenline bundle and the lifted curve count"),
    ("lax-pair", "coefficient-level Lax flow preserves the spectral data"),
    ("skew-form", "omega = A^T g is skew and A-invariant"),
    ("kernel-vector", "v0 spans ker A with g(v0, v0) = -a2"),
    ("k-commutes", "K_alpha commutes with A on E and splits it 3 + 3"),
    ("s-divisibility", "s(alpha) / a2 is constant"),
    ("double-vanishing", "alpha restricted to E+ vanishes to order two over b2 = 0"),
    ("cover-diagram", "the covers Sigma -> C1, C2 -> P1 commute"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A known disagreement between a counted value and a printed closed
    /// form, reported rather than hidden.
    Flagged,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Flagged => "flagged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    AtMost,
    AtLeast,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub name: &'static str,
    pub anchor: &'static str,
    pub status: CheckStatus,
    pub comparison: Comparison,
    pub value: f64,
    pub bound: f64,
    /// Minimum pass fraction when aggregated over seeds; `None` means all.
    pub quorum: Option<f64>,
    pub detail: String,
}

impl Check {
    fn new(criterion: u8, name: &'static str, anchor: &'static str, cmp: Comparison, value: f64, bound: f64) -> Self {
        let ok = match cmp {
            Comparison::AtMost => value <= bound,
            Comparison::AtLeast => value >= bound,
            Comparison::Exact => value == bound,
        };
        Self {
            criterion,
            name,
            anchor,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            comparison: cmp,
            value,
            bound,
            quorum: None,
            detail: String::new(),
        }
    }

    pub fn at_most(criterion: u8, name: &'static str, anchor: &'static str, value: f64, tol: f64) -> Self {
        Self::new(criterion, name, anchor, Comparison::AtMost, value, tol)
    }

    pub fn at_least(criterion: u8, name: &'static str, anchor: &'static str, value: f64, floor: f64) -> Self {
        Self::new(criterion, name, anchor, Comparison::AtLeast, value, floor)
    }

    pub fn exact(criterion: u8, name: &'static str, anchor: &'static str, counted: i64, expected: i64) -> Self {
        Self::new(criterion, name, anchor, Comparison::Exact, counted as f64, expected as f64)
    }

    pub fn truth(criterion: u8, name: &'static str, anchor: &'static str, ok: bool) -> Self {
        Self::exact(criterion, name, anchor, ok as i64, 1)
    }

    /// A computation that could not be carried out.
    pub fn error(criterion: u8, name: &'static str, anchor: &'static str, e: &Error) -> Self {
        let mut ch = Self::new(criterion, name, anchor, Comparison::Exact, f64::NAN, 0.0);
        ch.detail = e.to_string();
        ch
    }

    pub fn with_detail(mut self, detail: String) -> Self {
        self.detail = detail;
        self
    }

    pub fn with_quorum(mut self, q: f64) -> Self {
        self.quorum = Some(q);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

fn push_or<T>(out: &mut Vec<Check>, r: crate::Result<T>, crit: u8, name: &'static str, anchor: &'static str) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            out.push(Check::error(crit, name, anchor, &e));
            None
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, against: &[ImOctonion]) -> ImOctonion {
    loop {
        let mut v = ImOctonion(core::array::from_fn(|_| StandardNormal.sample(rng)));
        for _ in 0..2 {
            for u in against {
                let p = v.dot(u) / u.norm2();
                for i in 0..7 {
                    v.0[i] -= p * u.0[i];
                }
            }
        }
        let n = v.norm2().sqrt();
        if n > 1e-3 {
            return v.scale(1.0 / n);
        }
    }
}

fn im_product(a: &ImOctonion, b: &ImOctonion) -> ImOctonion {
    let x = crate::octonion::Octonion::new(0.0, a.0);
    let y = crate::octonion::Octonion::new(0.0, b.0);
    crate::octonion::oct_mul(&x, &y).im
}

/// A random admissible `(f1, f2, f4)`.
pub fn random_frame_input(seed: u64) -> (ImOctonion, ImOctonion, ImOctonion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf4a3e ^ seed);
    let f1 = random_unit(&mut rng, &[]);
    let f2 = random_unit(&mut rng, &[f1]);
    let f3 = im_product(&f1, &f2);
    let f4 = random_unit(&mut rng, &[f1, f2, f3]);
    (f1, f2, f4)
}

/// A random `GL(6, C)` element.
fn random_gl6(seed: u64) -> Mat6 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3f06 ^ seed);
    Mat6::identity() + Mat6::from_fn(|_, _| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)) * 0.5)
}

/// Largest `|w(x, y)|` over pairs in `vs`, relative to `|w| |x| |y|`.
fn lagrangian_residual(vs: &[Vec6], w: &Mat6) -> f64 {
    let sw = w.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let mut worst = 0.0f64;
    for x in vs {
        for y in vs {
            let n = x.norm() * y.norm() * sw;
            worst = worst.max((x.transpose() * w * y)[(0, 0)].norm() / n);
        }
    }
    worst
}

/// Criteria 1 and 2 plus the seed-independent parts of 5.
pub fn global_suite(alg: &G2Algebra, frames: usize) -> Vec<Check> {
    let mut out = Vec::new();

    // 1: algebra kernel
    if let Some(b) = push_or(&mut out, g2_basis(), 1, "der_dim", "derivation-algebra") {
        out.push(Check::exact(1, "der_dim", "derivation-algebra", b.len() as i64, 14));
    }
    let dims = alg.graded_dims();
    out.push(
        Check::truth(1, "graded_dims", "order-six-automorphism", dims == [2, 3, 2, 2, 2, 3])
            .with_detail(format!("{dims:?}")),
    );
    let cm = tau_matrix();
    let c6 = cm * cm * cm * cm * cm * cm;
    out.push(Check::at_most(1, "tau_order_six", "order-six-automorphism", linalg::max_abs(&(c6 - Mat7::identity())), 1e-12));
    let mut tau_fix = 0.0f64;
    for m in &alg.basis {
        tau_fix = tau_fix.max(linalg::max_abs(&(tau(&tau(&tau(&tau(&tau(&tau(m)))))) - m)));
    }
    out.push(Check::at_most(1, "tau6_on_g2", "order-six-automorphism", tau_fix, 1e-12));
    let mut comm = 0.0f64;
    for j in 0..6 {
        for m in &alg.graded[j] {
            comm = comm.max(linalg::max_abs(&(linalg::conj(&tau(m)) - tau(&linalg::conj(m)))));
        }
    }
    out.push(Check::at_most(1, "rho_tau_commute", "order-six-automorphism", comm, 1e-12));
    let mut frame_res = 0.0f64;
    let mut frame_err = None;
    for s in 0..frames as u64 {
        let (f1, f2, f4) = random_frame_input(s);
        match frame_complete(f1, f2, f4) {
            Ok(fr) => frame_res = frame_res.max(fr.g2_residual()),
            Err(e) => frame_err = Some(e),
        }
    }
    out.push(match frame_err {
        Some(e) => Check::error(1, "frame_alpha", "g2-frame-columns", &e),
        None => Check::at_most(1, "frame_alpha", "g2-frame-columns", frame_res, 1e-9),
    });

    // 2: invariant theory
    if let Some(sel) = push_or(&mut out, select_normal_form(), 2, "normal_form_metric", "normal-form-metric") {
        out.push(
            Check::at_most(
                2,
                "normal_form_metric",
                "normal-form-metric",
                sel.literal_residual.min(sel.variant_residual),
                1e-9,
            )
            .with_detail(format!("{:?}", sel.choice)),
        );
    }
    let mut sq = 0.0f64;
    let mut lag = 0.0f64;
    let mut split_err = None;
    // the split normal form and its GL(6) translates, with the translated
    // symplectic form
    let w0 = standard_symplectic6();
    let mut forms: Vec<(ThreeForm6, Mat6)> = Vec::from([(split_normal_form6(), w0)]);
    for seed in 0..frames as u64 {
        let g = random_gl6(seed);
        forms.push((split_normal_form6().pullback(&g), g.transpose() * w0 * g));
    }
    for (f, w) in &forms {
        let k = k_alpha(f);
        let sc = k.matrix.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
        sq = sq.max(k.square_residual() / (sc * sc));
        match plus_minus_split(&k) {
            Ok(sp) => {
                if sp.plus.len() != 3 || sp.minus.len() != 3 {
                    split_err = Some(Error::DegenerateInput("K eigenspaces are not 3 + 3"));
                }
                lag = lag.max(lagrangian_residual(&sp.plus, w)).max(lagrangian_residual(&sp.minus, w));
            }
            Err(e) => split_err = Some(e),
        }
    }
    out.push(Check::at_most(2, "k_square", "k-alpha-eigenspaces", sq, 1e-8));
    out.push(match split_err {
        Some(e) => Check::error(2, "e_pm_lagrangian", "k-alpha-eigenspaces", &e),
        None => Check::at_most(2, "e_pm_lagrangian", "k-alpha-eigenspaces", lag, 1e-9),
    });
    let nil = k_alpha(&nilpotent_normal_form6());
    let nil_sq = (nil.matrix * nil.matrix).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let nil_size = nil.matrix.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    out.push(Check::at_most(2, "degenerate_s", "k-alpha-eigenspaces", nil.s_value.norm(), 1e-12));
    out.push(
        Check::truth(2, "degenerate_nilpotent", "k-alpha-eigenspaces", nil_sq < 1e-12 && nil_size > 0.5)
            .with_detail(format!("|K^2| = {nil_sq:e}, |K| = {nil_size:e}")),
    );

    // 5: seed-independent parts
    for k in 0..=3usize {
        out.push(
            Check::exact(5, "moduli_dim", "moduli-dimension", moduli_real_dimension(k) as i64, 16 * k as i64 + 4)
                .with_detail(format!("k = {k}")),
        );
    }
    let control = singular_control();
    match smoothness_check(&control) {
        Ok(sm) => out.push(
            Check::truth(5, "singular_control", "smoothness", !sm.smooth).with_detail(format!("witness {:?}", sm.witness)),
        ),
        Err(e) => out.push(Check::error(5, "singular_control", "smoothness", &e)),
    }
    out
}

/// `b1 = 0.7`, `b2 = 0.3 (λ - 2 + λ⁻¹)`: `b2` has a double root at `λ = 1`,
/// so the curve is singular over it.
pub fn singular_control() -> SpectralCoefficients {
    SpectralCoefficients::new(0, Laurent::new(0, Vec::from([c(0.7)])), Laurent::new(-1, Vec::from([c(0.3), c(-0.6), c(0.3)])))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    /// Generic `ζ` per seed for the fiberwise checks.
    pub fiber_samples: usize,
    pub flow_tol: f64,
    pub t_end: f64,
    /// Run the sign-flipped negative control.
    pub negative_control: bool,
    /// Interpolation samples for `det(μ - A)`; `None` uses the minimum.
    pub char_samples: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { fiber_samples: 12, flow_tol: 1e-10, t_end: 1.0, negative_control: true, char_samples: None }
    }
}

/// Flow direction used for a seed; unit modulus.
pub fn flow_direction(seed: u64) -> C64 {
    C64::from_polar(1.0, 0.4 + 0.7 * (seed % 9) as f64)
}

/// Criteria 3 to 9 for one random field.
pub fn seed_suite(alg: &G2Algebra, k: usize, seed: u64, opts: &SuiteOptions) -> Vec<Check> {
    field_suite(alg, &alg.random_field(k, seed), seed, opts)
}

/// Criteria 3 to 9 for one field; `seed` salts the sample points and picks
/// the flow direction.
pub fn field_suite(alg: &G2Algebra, a: &KillingField, seed: u64, opts: &SuiteOptions) -> Vec<Check> {
    let mut out = curve_checks(a, seed, opts);
    out.extend(flow_checks(alg, a, flow_direction(seed), seed, opts));
    out.extend(fiber_checks_at(a, &generic_zetas(opts.fiber_samples, seed ^ 0xf1be)));
    out.extend(divisor_checks(a, opts.fiber_samples));
    out
}

/// Criteria 3 to 6 and 9: coefficients, counts and covers.
pub fn curve_checks(a: &KillingField, seed: u64, opts: &SuiteOptions) -> Vec<Check> {
    let mut out = Vec::new();
    let k = a.k();
    let ki = k as i64;
    let d = 6 * ki + 1;

    // 3: characteristic polynomial shape
    let n = opts.char_samples.unwrap_or_else(|| min_samples(k));
    if let Some(cc) = push_or(&mut out, char_coefficients(a, n), 3, "charpoly", "charpoly-shape") {
        out.push(Check::at_most(3, "even_mu_coefficients", "charpoly-shape", cc.shape_residual, 1e-9));
        out.push(Check::at_most(3, "mu2_relation", "charpoly-shape", cc.relation_residual, 1e-8));
    }

    // 4: symmetry reduction
    if let Some(sym) = push_or(&mut out, symmetry_residuals(a, &generic_zetas(8, seed)), 4, "field_symmetry", "lambda-reduction") {
        out.push(Check::at_most(4, "field_rho_tau", "lambda-reduction", sym.rho.max(sym.tau), 1e-9));
    }
    let spec = push_or(&mut out, spectral_coefficients(a), 4, "lambda_support", "lambda-reduction");
    if let Some(s) = &spec {
        out.push(Check::at_most(4, "lambda_support", "lambda-reduction", s.dropped_residual, crate::spectral::SUPPORT_TOL));
        out.push(Check::at_most(4, "b_reality", "lambda-reduction", s.reality_residual(), 1e-9));
        let windows = s.b1.low == -2 * ki && s.b1.high() == 2 * ki && s.b2.low == -d && s.b2.high() == d;
        out.push(Check::truth(4, "b_windows", "lambda-reduction", windows));
    }
    if let Some(g) = push_or(&mut out, gauge_reduce_lambda(a), 4, "gauge_tau", "gauge-lambda") {
        out.push(Check::at_most(4, "gauge_tau", "gauge-lambda", g.tau_residual, 1e-9));
        out.push(Check::exact(4, "gauge_window", "gauge-lambda", g.coeffs.len() as i64, 2 * (ki + 1) + 1));
        out.push(Check::at_most(4, "gauge_window_residual", "gauge-lambda", g.window_residual.max(g.fit_residual), 1e-9));
    }

    let Some(s) = spec else {
        return out;
    };

    // 5 and 6: counts
    if let Some(p) = push_or(&mut out, discriminant_profile(&s), 5, "profile", "genus-count") {
        let r = genus_report(&s, &p);
        let counted = |name: &str| r.check(name).map(|x| (x.counted, x.closed_form)).unwrap_or((i64::MIN, 0));
        let (ram, ram_cf) = counted("ram_deg");
        out.push(Check::exact(5, "ram_deg", "genus-count", ram, ram_cf));
        let (gs, gs_cf) = counted("g_sigma");
        out.push(Check::exact(5, "g_sigma", "genus-count", gs, gs_cf));
        out.push(Check::exact(5, "type_a_points", "collision-patterns", p.type_a_count() as i64, 2 * d));
        out.push(Check::exact(5, "type_b_points", "collision-patterns", p.type_b_count() as i64, 2 * d));
        out.push(Check::at_most(5, "collision_pattern", "collision-patterns", p.pattern_residual, 1e-6));
        out.push(Check::truth(5, "generic_branching", "genus-count", p.simple));

        let (g1, g1_cf) = counted("g_c1");
        out.push(Check::exact(6, "g_c1", "quotient-genus", g1, g1_cf));
        let (g2, g2_cf) = counted("g_c2");
        out.push(Check::exact(6, "g_c2", "quotient-genus", g2, g2_cf));
        let (td, td_cf) = counted("tur_dim");
        out.push(Check::exact(6, "tur_dim", "tur-dimension", td, td_cf));
        let (e1, e2) = counted("eigenline_degree_routes");
        out.push(Check::exact(6, "eigenline_degree_routes", "eigenline-degree", e1, e2));
        for name in ["eigenline_degree", "ram_deg_hat", "g_sigma_hat"] {
            let (cnt, cf) = counted(name);
            out.push(
                Check::exact(6, name, "eigenline-degree", cnt, cf)
                    .with_detail(format!("counted {cnt}, closed form {cf}")),
            );
        }
        let (gh, gh_cf) = counted("g_c2_hat");
        let mut flag = Check::exact(6, "g_c2_hat", "eigenline-degree", gh, 36 * ki + 5);
        if flag.passed() && gh != gh_cf {
            flag.status = CheckStatus::Flagged;
        }
        out.push(flag.with_detail(format!("counted {gh}, printed {gh_cf}")));
    }
    match smoothness_check(&s) {
        Ok(sm) => out.push(
            Check::truth(5, "smooth", "smoothness", sm.smooth && sm.boundary_unibranch)
                .with_quorum(0.95)
                .with_detail(format!("min gradient {:e}", sm.min_candidate_gradient)),
        ),
        Err(e) => out.push(Check::error(5, "smooth", "smoothness", &e).with_quorum(0.95)),
    }
    out.extend(cover_checks(&s, &generic_zetas(3, seed ^ 0xc0de)));
    out
}

/// Criterion 7 along the real direction `t·v`.
pub fn flow_checks(alg: &G2Algebra, a: &KillingField, v: C64, seed: u64, opts: &SuiteOptions) -> Vec<Check> {
    let mut out = Vec::new();
    let mut fo = FlowOptions::new(opts.flow_tol);
    match integrate_flow_with(a, v, opts.t_end, &fo).and_then(|f| isospectral_drift(&f.states).map(|r| (f, r))) {
        Ok((flow, rep)) => {
            out.push(Check::at_most(7, "flow_drift", "lax-pair", rep.max_drift, 1e-6));
            let mut sym = rep.reality_residual;
            let mut grading = 0.0f64;
            for st in &flow.states {
                grading = grading.max(st.field.grading_residual(alg).0);
                if let Ok(r) = symmetry_residuals(&st.field, &generic_zetas(4, seed ^ 0x77)) {
                    sym = sym.max(r.rho).max(r.tau);
                }
            }
            out.push(Check::at_most(7, "flow_symmetry", "lax-pair", sym.max(grading), 1e-7));
        }
        Err(e) => out.push(Check::error(7, "flow_drift", "lax-pair", &e)),
    }
    if opts.negative_control {
        fo.variant = LaxVariant::SignFlipped;
        // a finite-time blow-up is measured halfway to it
        let drift = match integrate_flow_with(a, v, opts.t_end, &fo) {
            Ok(f) => Ok(f.states.last().map(|s| s.drift).unwrap_or(0.0)),
            Err(Error::StepUnderflow { t, .. }) => integrate_flow_with(a, v, 0.5 * t, &fo)
                .map(|f| f.states.last().map(|s| s.drift).unwrap_or(0.0)),
            Err(e) => Err(e),
        };
        out.push(match drift {
            Ok(dr) => Check::at_least(7, "sign_flip_drift", "lax-pair", dr, 1e-2),
            Err(e) => Check::error(7, "sign_flip_drift", "lax-pair", &e),
        });
    }
    out
}

/// Pointwise part of criterion 8, worst case over `zetas`.
pub fn fiber_checks_at(a: &KillingField, zetas: &[C64]) -> Vec<Check> {
    let mut out = Vec::new();
    let mut worst = [0.0f64; 7];
    let mut on_support = f64::INFINITY;
    let mut split_ok = true;
    let mut fiber_err = None;
    for &z in zetas {
        match fiber_checks(a, z) {
            Ok(fc) => {
                let vals = [
                    fc.antisymmetry,
                    fc.symplectic,
                    fc.kernel,
                    fc.v0_norm,
                    fc.pairing.off_support,
                    fc.alpha.commutator,
                    fc.pairing.negation_residual,
                ];
                for (w, v) in worst.iter_mut().zip(vals) {
                    *w = w.max(v);
                }
                on_support = on_support.min(fc.pairing.on_support);
                split_ok &= fc.alpha.counts() == (3, 3) && fc.omega_rank == 6;
            }
            Err(e) => fiber_err = Some(e),
        }
    }
    if let Some(e) = fiber_err {
        out.push(Check::error(8, "fiber", "skew-form", &e));
    } else {
        out.push(Check::at_most(8, "omega_antisymmetric", "skew-form", worst[0], 1e-9));
        out.push(Check::at_most(8, "omega_invariant", "skew-form", worst[1], 1e-9));
        out.push(Check::at_most(8, "kernel_v0", "kernel-vector", worst[2], 1e-7));
        out.push(Check::at_most(8, "v0_norm", "kernel-vector", worst[3], 1e-7));
        out.push(Check::at_most(8, "pairing_off_support", "skew-form", worst[4], 1e-8));
        out.push(Check::at_least(8, "pairing_on_support", "skew-form", on_support, 1e-6));
        out.push(Check::at_most(8, "k_commutator", "k-commutes", worst[5], 1e-8));
        out.push(Check::truth(8, "three_plus_three", "k-commutes", split_ok));
    }
    out
}

/// `s/a2` over `n` generic samples and the vanishing order at every simple
/// root of `b2`.
pub fn divisor_checks(a: &KillingField, n: usize) -> Vec<Check> {
    let mut out = Vec::new();
    match s_divisibility(a, n) {
        Ok(sd) => out.push(
            Check::at_most(8, "s_over_a2_spread", "s-divisibility", sd.spread, 1e-6)
                .with_detail(format!("ratio {:.6}", sd.ratio)),
        ),
        Err(Error::NonConstantRatio { spread }) => out.push(Check::at_most(8, "s_over_a2_spread", "s-divisibility", spread, 1e-6)),
        Err(e) => out.push(Check::error(8, "s_over_a2_spread", "s-divisibility", &e)),
    }
    // every simple root of b2
    let fit = simple_b2_roots(a).and_then(|roots| {
        if roots.is_empty() {
            return Err(Error::DegenerateInput("b2 has no simple root"));
        }
        let mut worst = 0.0f64;
        for l0 in roots {
            worst = worst.max((vanishing_order_at_d(a, l0)?.order_sqrt_a2 - 2.0).abs());
        }
        Ok(worst)
    });
    match fit {
        Ok(dev) => out.push(Check::at_most(8, "vanishing_order", "double-vanishing", dev, 0.1)),
        Err(e) => out.push(Check::error(8, "vanishing_order", "double-vanishing", &e)),
    }
    out
}

/// Criterion 9 over all six sheets above each `λ`.
pub fn cover_checks(s: &SpectralCoefficients, lambdas: &[C64]) -> Vec<Check> {
    let mut out = Vec::new();
    let mut commute = 0.0f64;
    let mut on_curve = 0.0f64;
    let mut involution = true;
    let mut cover_err = None;
    for &l in lambdas {
        let etas = match s.eta_roots(l) {
            Ok(e) => e,
            Err(e) => {
                cover_err = Some(e);
                continue;
            }
        };
        for eta in etas {
            match cover_maps(s, eta, l).and_then(|m| cover_maps(s, m.sigma.0, m.sigma.1).map(|b| (m, b))) {
                Ok((m, back)) => {
                    commute = commute.max((m.p1_pi1 - m.p2_pi2).norm());
                    on_curve = on_curve.max(m.c1_residual).max(m.c2_residual);
                    involution &= back.sigma == (eta, l);
                }
                Err(e) => cover_err = Some(e),
            }
        }
    }
    if let Some(e) = cover_err {
        out.push(Check::error(9, "cover", "cover-diagram", &e));
    } else {
        out.push(Check::new(9, "p1_pi1_eq_p2_pi2", "cover-diagram", Comparison::Exact, commute, 0.0));
        out.push(Check::at_most(9, "images_on_curves", "cover-diagram", on_curve, 1e-8));
        out.push(Check::truth(9, "sigma_involution", "cover-diagram", involution));
    }
    out
}

/// Verdict for one criterion over all checks that carry it.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSummary {
    pub criterion: u8,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub flagged: Vec<String>,
}

/// Groups checks by criterion; quorum checks pass on their pass fraction,
/// the rest must all pass. `Flagged` counts as passing but is listed.
pub fn aggregate(checks: &[Check]) -> Vec<CriterionSummary> {
    let mut out = Vec::new();
    for crit in 1..=9u8 {
        let mine: Vec<&Check> = checks.iter().filter(|c| c.criterion == crit).collect();
        let mut failures = Vec::new();
        let mut flagged = Vec::new();
        let mut names: Vec<&'static str> = mine.iter().map(|c| c.name).collect();
        names.sort_unstable();
        names.dedup();
        for name in names {
            let group: Vec<&&Check> = mine.iter().filter(|c| c.name == name).collect();
            let ok = group.iter().filter(|c| c.status != CheckStatus::Fail).count();
            let quorum = group.iter().find_map(|c| c.quorum);
            let pass = match quorum {
                Some(q) => ok as f64 >= q * group.len() as f64,
                None => ok == group.len(),
            };
            if !pass {
                let worst = group.iter().find(|c| c.status == CheckStatus::Fail).unwrap();
                failures.push(format!(
                    "{name}: {}/{} ok; e.g. value {} vs bound {} {}",
                    ok,
                    group.len(),
                    worst.value,
                    worst.bound,
                    worst.detail
                ));
            }
            if let Some(f) = group.iter().find(|c| c.status == CheckStatus::Flagged) {
                flagged.push(format!("{name}: {}", f.detail));
            }
        }
        out.push(CriterionSummary { criterion: crit, passed: !mine.is_empty() && failures.is_empty(), checks: mine.len(), failures, flagged });
    }
    out
}
