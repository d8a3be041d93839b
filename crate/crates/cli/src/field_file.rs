//! JSON file format for Killing fields.
//!
//! ```json
//! {"schema_version": 1, "k": 0,
//!  "coefficients": {"-1": [[[re, im], ...7], ...7], "0": ..., "1": ...},
//!  "metadata": {"seed": 7, "creator": "...", "timestamp": 1700000000}}
//! ```
//!
//! Matrices are row-major; entry `[r][c]` is `A_j[(r, c)]`.

use std::collections::BTreeMap;

use g2spectral::linalg::Mat7;
use g2spectral::loop_algebra::KillingField;
use g2spectral::octonion::G2Algebra;
use g2spectral::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Relative reality and grading tolerance applied when reading a file.
pub const FIELD_TOL: f64 = 1e-9;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub schema_version: u32,
    pub k: usize,
    pub coefficients: BTreeMap<String, MatrixJson>,
    #[serde(default)]
    pub metadata: Metadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub creator: Option<String>,
    /// Seconds since the Unix epoch.
    #[serde(default)]
    pub timestamp: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("malformed field file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("coefficient key {0:?} is not an integer")]
    Key(String),
    #[error("coefficient A_{j} is outside the range -{d}..={d}")]
    Range { j: i64, d: i64 },
    #[error("coefficient A_{j} is missing")]
    Missing { j: i64 },
    #[error("coefficient A_{j} has shape {rows}x{cols}, expected 7x7")]
    Shape { j: i64, rows: usize, cols: usize },
    #[error("coefficient A_{j} has a non-finite entry")]
    NonFinite { j: i64 },
    #[error("reality violated at j = {j}: A_-{j} != conj(A_{j}) (relative residual {residual:.6e})")]
    Reality { j: i64, residual: f64 },
    #[error("A_{j} is not in g_{} (relative residual {residual:.6e})", j.rem_euclid(6))]
    Grading { j: i64, residual: f64 },
}

fn matrix_to_json(m: &Mat7) -> MatrixJson {
    (0..7).map(|r| (0..7).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

impl FieldFile {
    pub fn from_field(a: &KillingField, metadata: Metadata) -> Self {
        let coefficients = a.exponents().map(|j| (j.to_string(), matrix_to_json(a.coeff(j)))).collect();
        Self { schema_version: SCHEMA_VERSION, k: a.k(), coefficients, metadata }
    }

    /// Shape and range checks only; no algebraic validation.
    pub fn to_field_unchecked(&self) -> Result<KillingField, FieldError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(FieldError::Schema(self.schema_version));
        }
        let d = 6 * self.k as i64 + 1;
        let mut field = KillingField::zero(self.k);
        let mut seen = vec![false; (2 * d + 1) as usize];
        for (key, rows) in &self.coefficients {
            let j: i64 = key.trim().parse().map_err(|_| FieldError::Key(key.clone()))?;
            if j.abs() > d {
                return Err(FieldError::Range { j, d });
            }
            let cols = rows.first().map_or(0, |r| r.len());
            if rows.len() != 7 || rows.iter().any(|r| r.len() != 7) {
                return Err(FieldError::Shape { j, rows: rows.len(), cols });
            }
            let m = field.coeff_mut(j);
            for (r, row) in rows.iter().enumerate() {
                for (c, z) in row.iter().enumerate() {
                    if !z[0].is_finite() || !z[1].is_finite() {
                        return Err(FieldError::NonFinite { j });
                    }
                    m[(r, c)] = C64::new(z[0], z[1]);
                }
            }
            seen[(j + d) as usize] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(FieldError::Missing { j: i as i64 - d });
        }
        Ok(field)
    }

    /// Reality first, then grading, each against [`FIELD_TOL`].
    pub fn to_field(&self, alg: &G2Algebra) -> Result<KillingField, FieldError> {
        let a = self.to_field_unchecked()?;
        let (r, j) = a.reality_residual();
        if r > FIELD_TOL {
            return Err(FieldError::Reality { j, residual: r });
        }
        let (g, j) = a.grading_residual(alg);
        if g > FIELD_TOL {
            return Err(FieldError::Grading { j, residual: g });
        }
        Ok(a)
    }

    pub fn parse(text: &str) -> Result<Self, FieldError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("field file serializes");
        s.push('\n');
        s
    }
}

/// SHA-256 over `k` and the coefficient bits, independent of metadata and
/// formatting.
pub fn field_digest(a: &KillingField) -> String {
    let mut h = Sha256::new();
    h.update((a.k() as u64).to_le_bytes());
    for x in a.to_real() {
        h.update(x.to_bits().to_le_bytes());
    }
    format!("sha256:{:x}", h.finalize())
}
