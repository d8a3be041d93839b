//! Report documents: deterministic JSON with sorted keys, complex numbers as
//! `[re, im]` and residuals as 6-significant-digit scientific strings.

use g2spectral::checks::{aggregate, Check, CheckStatus, Comparison, CriterionSummary, ANCHORS};
use g2spectral::laurent::Laurent;
use g2spectral::spectral::GenusReport;
use g2spectral::C64;
use serde::Serialize;
use serde_json::{json, Value};

pub const REPORT_SCHEMA: u32 = 1;

/// `1.23457e-10`; non-finite values as `NaN`, `inf`, `-inf`.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5e}")
    } else {
        format!("{x}")
    }
}

pub fn complex(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn laurent(p: &Laurent) -> Value {
    json!({ "low": p.low, "coefficients": p.coeffs.iter().map(|z| complex(*z)).collect::<Vec<_>>() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub paper_anchor: String,
    pub criterion: u8,
    pub status: String,
    pub comparison: String,
    pub residual: String,
    pub tolerance: String,
    /// Where the check ran, e.g. `k=1 seed=4`.
    pub context: String,
    pub detail: String,
}

impl Entry {
    pub fn from_check(c: &Check, context: &str) -> Self {
        Self {
            name: c.name.to_string(),
            paper_anchor: c.anchor.to_string(),
            criterion: c.criterion,
            status: c.status.as_str().to_string(),
            comparison: match c.comparison {
                Comparison::AtMost => "at_most",
                Comparison::AtLeast => "at_least",
                Comparison::Exact => "exact",
            }
            .to_string(),
            residual: sci(c.value),
            tolerance: sci(c.bound),
            context: context.to_string(),
            detail: c.detail.clone(),
        }
    }
}

pub fn genus_json(r: &GenusReport) -> Value {
    let checks: Vec<Value> = r
        .cross_checks
        .iter()
        .map(|c| json!({ "name": c.name, "counted": c.counted, "closed_form": c.closed_form, "agrees": c.agrees() }))
        .collect();
    json!({
        "k": r.k,
        "ram_deg": r.ram_deg,
        "g_sigma": r.g_sigma,
        "ram_deg_c1": r.ram_deg_c1,
        "g_c1": r.g_c1,
        "ram_deg_c2": r.ram_deg_c2,
        "g_c2": r.g_c2,
        "g_c2_laurent": r.g_c2_laurent,
        "ram_deg_hat": r.ram_deg_hat,
        "g_sigma_hat": r.g_sigma_hat,
        "g_c2_hat": r.g_c2_hat,
        "moduli_dim": r.moduli_dim,
        "tur_dim": r.tur_dim,
        "eigenline_degree": r.eigenline_degree,
        "eigenline_degree_alt": r.eigenline_degree_alt,
        "generic": r.generic,
        "cross_checks": checks,
    })
}

/// The `g_c2_hat` disagreement, carried by every report that has counts.
pub fn c2_hat_flag(k: usize, counted: i64) -> Value {
    let printed = 36 * k as i64 + 10;
    json!({
        "name": "g_c2_hat",
        "paper_anchor": "eigenline-degree",
        "counted": counted,
        "printed": printed,
        "derived": 36 * k as i64 + 5,
        "note": "z^2 = a2(zeta) on O(12(6k+1)) is branched only at the 12(6k+1) simple zeros of a2",
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub command: String,
    pub input_digest: String,
    pub entries: Vec<Entry>,
    /// Checks as produced by the core, used for the per-criterion verdicts.
    pub checks: Vec<Check>,
    /// Command-specific payload, merged at the top level.
    pub payload: serde_json::Map<String, Value>,
    pub runtime: Value,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("report has no check entries")]
    Empty,
    #[error("entry {name} names unknown anchor {anchor:?}")]
    UnknownAnchor { name: String, anchor: String },
}

impl ReportDocument {
    pub fn new(command: &str, input_digest: String) -> Self {
        Self {
            command: command.to_string(),
            input_digest,
            entries: Vec::new(),
            checks: Vec::new(),
            payload: serde_json::Map::new(),
            runtime: json!({}),
        }
    }

    pub fn push(&mut self, c: Check, context: &str) {
        self.entries.push(Entry::from_check(&c, context));
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: Vec<Check>, context: &str) {
        for c in cs {
            self.push(c, context);
        }
    }

    pub fn insert(&mut self, key: &str, v: Value) {
        self.payload.insert(key.to_string(), v);
    }

    /// Verdicts for the criteria that have at least one check.
    pub fn criteria(&self) -> Vec<CriterionSummary> {
        aggregate(&self.checks).into_iter().filter(|s| s.checks > 0).collect()
    }

    pub fn passed(&self) -> bool {
        !self.entries.is_empty() && self.criteria().iter().all(|s| s.passed)
    }

    pub fn to_value(&self) -> Result<Value, ReportError> {
        if self.entries.is_empty() {
            return Err(ReportError::Empty);
        }
        for e in &self.entries {
            if !ANCHORS.iter().any(|(slug, _)| *slug == e.paper_anchor) {
                return Err(ReportError::UnknownAnchor { name: e.name.clone(), anchor: e.paper_anchor.clone() });
            }
        }
        let criteria: Vec<Value> = self
            .criteria()
            .iter()
            .map(|s| {
                json!({
                    "criterion": s.criterion,
                    "status": if s.passed { "pass" } else { "fail" },
                    "checks": s.checks,
                    "failures": s.failures,
                    "flagged": s.flagged,
                })
            })
            .collect();
        let flagged = self.entries.iter().filter(|e| e.status == CheckStatus::Flagged.as_str()).count();
        let mut top = serde_json::Map::new();
        top.insert("schema_version".into(), json!(REPORT_SCHEMA));
        top.insert("command".into(), json!(self.command));
        top.insert("input_digest".into(), json!(self.input_digest));
        top.insert("overall_status".into(), json!(if self.passed() { "pass" } else { "fail" }));
        top.insert("entries".into(), serde_json::to_value(&self.entries).expect("entries serialize"));
        top.insert("criteria".into(), Value::Array(criteria));
        top.insert("flagged_entries".into(), json!(flagged));
        top.insert("runtime".into(), self.runtime.clone());
        for (k, v) in &self.payload {
            top.insert(k.clone(), v.clone());
        }
        // serde_json's default map is ordered by key
        Ok(Value::Object(top))
    }

    pub fn render(&self) -> Result<String, ReportError> {
        let mut s = serde_json::to_string_pretty(&self.to_value()?).expect("report serializes");
        s.push('\n');
        Ok(s)
    }
}
