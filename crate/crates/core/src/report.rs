//! Machine-readable reports for certificates.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::certify::{Certificate, Diagnostics, Evidence, StressSource};
use crate::framework::Framework;
use crate::stress::verify_stress;
use crate::tolerance::{Budget, Tolerances};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub path: String,
    pub n: usize,
    pub r: usize,
    pub edges: usize,
    pub missing_pairs: usize,
}

/// Top-level JSON report of `check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub input: InputSummary,
    pub verdict: String,
    pub theorem_path: String,
    pub evidence: Value,
    pub residuals: BTreeMap<String, f64>,
    pub seed: u64,
    pub budgets: Budget,
    /// Wall-clock timings; `null` unless requested, so that reports are reproducible.
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

pub fn matrix_json(m: &DMatrix<f64>) -> Value {
    Value::Array(m.row_iter().map(|row| json!(row.iter().map(|&x| finite(x)).collect::<Vec<_>>())).collect())
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn pairs_json(pairs: &[(usize, usize)]) -> Value {
    json!(pairs.iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>())
}

fn diagnostics_json(d: &Diagnostics) -> Value {
    json!({
        "min_degree": d.min_degree,
        "lateration": d.lateration.map(|s| s.as_str()),
        "stress_space_dim": d.stress_space_dim,
        "best_lambda_min": d.best_lambda_min.map(finite),
        "farkas_found": d.farkas_found,
        "general_position": d.general_position,
        "flex_found": d.flex_found,
        "falsifier_samples": d.falsifier_samples,
        "notes": d.notes,
    })
}

/// Evidence blob and scalar residuals for a certificate.
pub fn evidence_json(framework: &Framework<f64>, cert: &Certificate<f64>, tol: &Tolerances) -> (Value, BTreeMap<String, f64>) {
    let mut residuals = BTreeMap::new();
    let mut blob = match &cert.evidence {
        Evidence::CompleteGraph => json!({ "kind": "complete-graph" }),
        Evidence::Stress { certificate, source, general_position, flex_free } => {
            let report = verify_stress(framework, &certificate.stress, tol);
            residuals.insert("equilibrium".into(), report.equilibrium_residual);
            residuals.insert("max_missing_entry".into(), report.max_missing_entry);
            residuals.insert("lambda_min_psi".into(), certificate.lambda_min);
            json!({
                "kind": "stress",
                "source": match source { StressSource::Purification => "purification", StressSource::Search => "search" },
                "gale": matrix_json(certificate.gale.matrix()),
                "psi": matrix_json(&certificate.psi),
                "stress": matrix_json(&certificate.stress),
                "stress_rank": report.rank,
                "stress_eigenvalues": report.eigenvalues.iter().map(|&x| finite(x)).collect::<Vec<_>>(),
                "general_position": general_position,
                "flex_free": flex_free,
            })
        }
        Evidence::Flex { phi, witness } => {
            residuals.insert("equivalence".into(), witness.equivalence_residual);
            residuals.insert("distance_change".into(), witness.distance_change);
            json!({
                "kind": "affine-flex",
                "phi": matrix_json(phi.matrix()),
                "a": matrix_json(&witness.a),
                "q": matrix_json(witness.q.matrix()),
            })
        }
        Evidence::Equivalent(w) => {
            residuals.insert("equivalence".into(), w.equivalence_residual);
            residuals.insert("distance_change".into(), w.distance_change);
            json!({
                "kind": "equivalent-framework",
                "missing_pairs": pairs_json(&framework.missing_edges()),
                "direction": w.direction.iter().map(|&x| finite(x)).collect::<Vec<_>>(),
                "t": w.t,
                "t_max": w.t_max,
                "dim": w.dim,
                "q": matrix_json(w.q.matrix()),
            })
        }
        Evidence::Farkas { certificate, .. } => {
            let lo = certificate.eigenvalues.first().copied().unwrap_or(0.0);
            let hi = certificate.eigenvalues.last().copied().unwrap_or(0.0);
            residuals.insert("farkas_lambda_min".into(), lo);
            residuals.insert("farkas_lambda_max".into(), hi);
            json!({
                "kind": "farkas",
                "missing_pairs": pairs_json(&certificate.missing),
                "x": certificate.x,
                "a": matrix_json(&certificate.a),
                "eigenvalues": certificate.eigenvalues,
                "face_dim": certificate.face_dim,
            })
        }
        Evidence::None => json!({ "kind": "none" }),
    };
    let reverified = cert.reverify(framework, tol).is_ok();
    blob["reverified"] = json!(reverified);
    blob["diagnostics"] = diagnostics_json(&cert.diagnostics);
    residuals.retain(|_, v| v.is_finite());
    (blob, residuals)
}

pub fn build_report(
    path: &str,
    framework: &Framework<f64>,
    cert: &Certificate<f64>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
    timings_ms: Option<BTreeMap<String, f64>>,
) -> Report {
    let (evidence, residuals) = evidence_json(framework, cert, tol);
    Report {
        version: REPORT_VERSION.to_string(),
        input: InputSummary {
            path: path.to_string(),
            n: framework.n(),
            r: framework.dim(),
            edges: framework.graph().edges().len(),
            missing_pairs: framework.missing_edges().len(),
        },
        verdict: cert.verdict.as_str().to_string(),
        theorem_path: cert.path.as_str().to_string(),
        evidence,
        residuals,
        seed,
        budgets: *budget,
        timings_ms,
    }
}
