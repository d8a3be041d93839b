//! The six subcommands. Each builds a [`ReportDocument`] (or a field file)
//! and leaves exit-code policy to `main`.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use g2spectral::checks::{
    cover_checks, curve_checks, divisor_checks, fiber_checks_at, flow_checks, flow_direction, global_suite,
    seed_suite, Check, SuiteOptions,
};
use g2spectral::eigenline::fiber_checks;
use g2spectral::lax::{integrate_flow_with, isospectral_drift, FlowOptions};
use g2spectral::loop_algebra::{generic_zetas, symmetry_residuals, KillingField};
use g2spectral::octonion::G2Algebra;
use g2spectral::spectral::{
    char_coefficients, discriminant_profile, genus_report, min_samples, moduli_real_dimension, to_lambda,
    BranchPoint,
};
use g2spectral::C64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::field_file::{field_digest, FieldError, FieldFile, Metadata};
use crate::report::{c2_hat_flag, complex, genus_json, laurent, sci, ReportDocument, ReportError};

pub const CREATOR: &str = concat!("g2spectral ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Field { path: String, source: FieldError },
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{0}")]
    Numeric(#[from] g2spectral::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CommandError {
    /// 1 for numerical failures, 3 for file and IO failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Numeric(_) => 1,
            CommandError::Report(ReportError::Empty | ReportError::UnknownAnchor { .. }) => 1,
            _ => 3,
        }
    }
}

pub type CmdResult<T> = Result<T, CommandError>;

pub fn algebra() -> CmdResult<G2Algebra> {
    Ok(G2Algebra::new()?)
}

pub fn read_field(alg: &G2Algebra, path: &Path) -> CmdResult<KillingField> {
    let text = std::fs::read_to_string(path).map_err(|source| CommandError::Io { path: path.display().to_string(), source })?;
    let field = |source| CommandError::Field { path: path.display().to_string(), source };
    FieldFile::parse(&text).and_then(|f| f.to_field(alg)).map_err(field)
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_text(path: Option<&Path>, text: &str) -> CmdResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CommandError::Io { path: p.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CommandError::Io { path: "<stdout>".into(), source }),
    }
}

pub fn emit(doc: &ReportDocument, path: Option<&Path>) -> CmdResult<()> {
    let text = doc.render()?;
    write_text(path, &text)
}

pub fn gen(alg: &G2Algebra, k: usize, seed: u64, timestamp: Option<u64>) -> FieldFile {
    let a = alg.random_field(k, seed);
    FieldFile::from_field(&a, Metadata { seed: Some(seed), creator: Some(CREATOR.into()), timestamp })
}

pub fn inspect(alg: &G2Algebra, a: &KillingField) -> CmdResult<ReportDocument> {
    let mut doc = ReportDocument::new("inspect", field_digest(a));
    let (reality, rj) = a.reality_residual();
    let (grading, gj) = a.grading_residual(alg);
    let zetas = generic_zetas(8, 0);
    let sym = symmetry_residuals(a, &zetas)?;
    doc.push(Check::at_most(4, "coefficient_reality", "lambda-reduction", reality, 1e-9).with_detail(format!("worst j = {rj}")), "");
    doc.push(Check::at_most(1, "coefficient_grading", "order-six-automorphism", grading, 1e-9).with_detail(format!("worst j = {gj}")), "");
    doc.push(Check::at_most(4, "field_rho", "lambda-reduction", sym.rho, 1e-9), "");
    doc.push(Check::at_most(4, "field_tau", "order-six-automorphism", sym.tau, 1e-9), "");
    doc.insert("k", json!(a.k()));
    doc.insert("degree", json!(a.d()));
    doc.insert("scale", json!(sci(a.scale())));
    doc.insert("sample_zetas", json!(zetas.iter().map(|z| complex(*z)).collect::<Vec<_>>()));
    doc.runtime = json!({ "samples": zetas.len() });
    Ok(doc)
}

fn branch_points_json(points: &[BranchPoint]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| {
                json!({
                    "lambda": complex(p.lambda),
                    "multiplicity": p.multiplicity,
                    "pattern": format!("{:?}", p.fiber.pattern),
                    "distinct_eta": p.fiber.distinct_eta,
                })
            })
            .collect(),
    )
}

pub fn spectral(a: &KillingField, samples: Option<usize>) -> CmdResult<ReportDocument> {
    let k = a.k();
    let n = samples.unwrap_or_else(|| min_samples(k));
    let cc = char_coefficients(a, n)?;
    let s = to_lambda(&cc)?;
    let p = discriminant_profile(&s)?;
    let r = genus_report(&s, &p);
    let opts = SuiteOptions { char_samples: Some(n), ..SuiteOptions::default() };

    let mut doc = ReportDocument::new("spectral", field_digest(a));
    doc.extend(curve_checks(a, 0, &opts), &format!("k={k}"));
    doc.insert("k", json!(k));
    doc.insert("a1", laurent(&cc.a1));
    doc.insert("a2", laurent(&cc.a2));
    doc.insert("b1", laurent(&s.b1));
    doc.insert("b2", laurent(&s.b2));
    doc.insert("moduli_dim", json!(moduli_real_dimension(k)));
    doc.insert("genus_report", genus_json(&r));
    doc.insert("flags", json!([c2_hat_flag(k, r.g_c2_hat)]));
    doc.insert(
        "profile",
        json!({
            "type_a": branch_points_json(&p.type_a),
            "type_b": branch_points_json(&p.type_b),
            "ram_deg": p.ram_deg,
            "ram_deg_c1": p.ram_deg_c1,
            "boundary_zero": p.boundary_zero.contribution,
            "boundary_infinity": p.boundary_infinity.contribution,
            "simple": p.simple,
        }),
    );
    doc.runtime = json!({ "interpolation_samples": n, "condition": sci(cc.condition) });
    Ok(doc)
}

pub struct FlowArtifacts {
    pub doc: ReportDocument,
    pub csv: String,
}

pub fn flow(alg: &G2Algebra, a: &KillingField, t_end: f64, tol: f64, seed: u64) -> CmdResult<FlowArtifacts> {
    let v = flow_direction(seed);
    let mut fo = FlowOptions::new(tol);
    fo.intervals = 20;
    let f = integrate_flow_with(a, v, t_end, &fo)?;
    let rep = isospectral_drift(&f.states)?;

    let opts = SuiteOptions { flow_tol: tol, t_end, ..SuiteOptions::default() };
    let mut doc = ReportDocument::new("flow", field_digest(a));
    doc.extend(flow_checks(alg, a, v, seed, &opts), &format!("seed={seed}"));

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "drift", "reality_residual", "grading_residual"])?;
    let mut series = Vec::new();
    for (st, d) in f.states.iter().zip(&rep.per_state) {
        let reality = st.field.reality_residual().0;
        let grading = st.field.grading_residual(alg).0;
        w.write_record([format!("{}", st.t), sci(*d), sci(reality), sci(grading)])?;
        series.push(json!({ "t": st.t, "drift": sci(*d), "reality_residual": sci(reality), "grading_residual": sci(grading) }));
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| CommandError::Io { path: "<csv>".into(), source: e.into_error() })?).expect("csv is utf-8");

    doc.insert("direction", json!(complex(v)));
    doc.insert("t_end", json!(t_end));
    doc.insert("max_drift", json!(sci(rep.max_drift)));
    doc.insert("trace_drift", json!(sci(rep.trace_drift)));
    doc.insert("series", Value::Array(series));
    doc.runtime = json!({
        "tolerance": sci(tol),
        "accepted_steps": f.stats.accepted,
        "rejected_steps": f.stats.rejected,
        "evaluations": f.stats.evaluations,
    });
    Ok(FlowArtifacts { doc, csv })
}

pub fn fiber(a: &KillingField, zetas: &[C64]) -> CmdResult<ReportDocument> {
    let mut doc = ReportDocument::new("fiber", field_digest(a));
    let mut per_zeta = Vec::new();
    for &z in zetas {
        let ctx = format!("zeta=[{}, {}]", z.re, z.im);
        doc.extend(fiber_checks_at(a, &[z]), &ctx);
        per_zeta.push(match fiber_checks(a, z) {
            Ok(fc) => json!({
                "zeta": complex(z),
                "omega_rank": fc.omega_rank,
                "antisymmetry": sci(fc.antisymmetry),
                "symplectic": sci(fc.symplectic),
                "kernel": sci(fc.kernel),
                "v0_norm": sci(fc.v0_norm),
                "s": complex(fc.alpha.s),
                "k_commutator": sci(fc.alpha.commutator),
                "split": [fc.alpha.counts().0, fc.alpha.counts().1],
                "pairing_off_support": sci(fc.pairing.off_support),
                "pairing_on_support": sci(fc.pairing.on_support),
            }),
            Err(e) => json!({ "zeta": complex(z), "error": e.to_string() }),
        });
    }
    let s = g2spectral::spectral::spectral_coefficients(a)?;
    let lambdas: Vec<C64> = zetas.iter().map(|z| z.powi(6)).collect();
    doc.extend(cover_checks(&s, &lambdas), "");
    doc.extend(divisor_checks(a, zetas.len().max(3)), "");
    doc.insert("fibers", Value::Array(per_zeta));
    doc.runtime = json!({ "zetas": zetas.len() });
    Ok(doc)
}

pub struct VerifyPlan {
    pub ks: Vec<usize>,
    pub seeds: Vec<u64>,
    pub opts: SuiteOptions,
    pub frames: usize,
}

pub fn verify(alg: &G2Algebra, plan: &VerifyPlan) -> ReportDocument {
    let jobs: Vec<(usize, u64)> = plan.ks.iter().flat_map(|&k| plan.seeds.iter().map(move |&s| (k, s))).collect();
    let results: Vec<Vec<Check>> = jobs.par_iter().map(|&(k, s)| seed_suite(alg, k, s, &plan.opts)).collect();

    let mut doc = ReportDocument::new("verify", verify_digest(plan));
    doc.extend(global_suite(alg, plan.frames), "global");
    let mut genus = Vec::new();
    for (&(k, s), cs) in jobs.iter().zip(results) {
        for c in &cs {
            if c.name == "g_sigma" {
                genus.push(json!({ "k": k, "seed": s, "g_sigma": c.value, "closed_form": c.bound }));
            }
        }
        doc.extend(cs, &format!("k={k} seed={s}"));
    }
    doc.insert("ks", json!(plan.ks));
    doc.insert("seeds", json!(plan.seeds));
    doc.insert("genus", Value::Array(genus));
    doc.insert(
        "flags",
        Value::Array(plan.ks.iter().map(|&k| c2_hat_flag(k, 36 * k as i64 + 5)).collect()),
    );
    doc.runtime = json!({
        "jobs": jobs.len(),
        "frames": plan.frames,
        "flow_tolerance": sci(plan.opts.flow_tol),
        "fiber_samples": plan.opts.fiber_samples,
    });
    doc
}

/// Inputs of a verify run are generated, so the digest covers the plan.
fn verify_digest(plan: &VerifyPlan) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for k in &plan.ks {
        h.update((*k as u64).to_le_bytes());
    }
    h.update([0xff]);
    for s in &plan.seeds {
        h.update(s.to_le_bytes());
    }
    h.update(plan.opts.flow_tol.to_bits().to_le_bytes());
    h.update((plan.opts.fiber_samples as u64).to_le_bytes());
    h.update((plan.frames as u64).to_le_bytes());
    format!("sha256:{:x}", h.finalize())
}

/// `path` with its extension replaced by `csv`.
pub fn csv_path(path: &Path) -> PathBuf {
    path.with_extension("csv")
}
