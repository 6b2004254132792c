//! Expectation-file ingestion, run configuration and verdict rendering.
//!
//! Input is JSON with explicit dimensions:
//!
//! ```json
//! {"schema": 1, "dims": [2, 2],
//!  "records": [{"label": [1, 1], "value": 0.45, "error": 0.0},
//!              {"label": 10, "value": -0.45}]}
//! ```
//!
//! A label is either a pair `[i, j]` of factor-generator indices (flat index
//! `i·N² + j`) or the flat basis index itself. Values are expectations of the
//! unit-norm basis elements, so for qubits `[1, 1]` means `⟨σ1⊗σ1⟩/2`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::basis::{CoeffVector, ObservableBasis};
use crate::optimizer::OptConfig;
use crate::separation::{wsep, Engine, PolarSearch, SeparationVerdict, SolverConfig, TargetPoint, WsepReport};

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable holding the default number of seesaw starts.
pub const SEEDS_ENV: &str = "WITSEP_SEEDS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Pair([usize; 2]),
    Flat(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectationRecord {
    pub label: Label,
    pub value: f64,
    #[serde(default)]
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    #[serde(default)]
    pub schema: Option<u32>,
    pub dims: [usize; 2],
    pub records: Vec<ExpectationRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("invalid dims {0:?}: both factors need dimension ≥ 2")]
    Dims([usize; 2]),
    #[error("no records: the index set T must be nonempty")]
    Empty,
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("record {label}: |value| = {value} exceeds 1 + error bar")]
    Bound { label: String, value: f64 },
    #[error("record {label}: error bar {error} must be finite and nonnegative")]
    ErrorBar { label: String, error: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] crate::Error),
}

impl IngestError {
    /// Process exit status; 0–2 are reserved for verdicts.
    pub fn exit_code(&self) -> i32 {
        match self {
            IngestError::Io(_) => 3,
            IngestError::Malformed(_) => 4,
            IngestError::Schema(_) => 5,
            IngestError::Dims(_) => 6,
            IngestError::Empty => 7,
            IngestError::UnknownLabel(_) => 8,
            IngestError::DuplicateLabel(_) => 9,
            IngestError::Bound { .. } => 10,
            IngestError::ErrorBar { .. } => 11,
            IngestError::Config(_) => 12,
            IngestError::Solver(_) => 13,
        }
    }
}

fn label_text(l: &Label) -> String {
    match l {
        Label::Pair([i, j]) => format!("[{i}, {j}]"),
        Label::Flat(i) => i.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub delta: f64,
    pub seeds: usize,
    pub tolerance: f64,
    pub max_iters: usize,
    pub engine: Engine,
    pub seed: u64,
    pub verification_samples: usize,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let opt = OptConfig::default();
        Self {
            delta: 0.01,
            seeds: opt.starts,
            tolerance: opt.tolerance,
            max_iters: opt.max_iters,
            engine: Engine::Ellipsoid,
            seed: opt.seed,
            verification_samples: 1000,
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(IngestError::Config(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        self.solver_config()
            .opt
            .validate()
            .map_err(|e| IngestError::Config(e.to_string()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            opt: OptConfig {
                starts: self.seeds,
                max_iters: self.max_iters,
                tolerance: self.tolerance,
                seed: self.seed,
                parallel: self.parallel,
            },
            engine: self.engine,
            polar_search: PolarSearch::default(),
            verification_samples: self.verification_samples,
        }
    }
}

pub fn parse_input(text: &str) -> Result<InputFile, IngestError> {
    let file: InputFile = serde_json::from_str(text)?;
    if let Some(v) = file.schema {
        if v != SCHEMA_VERSION {
            return Err(IngestError::Schema(v));
        }
    }
    if file.dims.iter().any(|&d| d < 2) {
        return Err(IngestError::Dims(file.dims));
    }
    Ok(file)
}

impl InputFile {
    /// Map labels to basis indices and build the target point with
    /// `Δ = ‖error bars‖₂`.
    pub fn to_target(&self, basis: &ObservableBasis, delta: f64) -> Result<TargetPoint, IngestError> {
        if self.records.is_empty() {
            return Err(IngestError::Empty);
        }
        let (m, n) = basis.dims();
        let mut by_index = BTreeMap::new();
        let mut err2 = 0.0;
        for r in &self.records {
            let text = label_text(&r.label);
            let index = match r.label {
                Label::Pair([i, j]) if i < m * m && j < n * n => i * n * n + j,
                Label::Flat(i) => i,
                _ => return Err(IngestError::UnknownLabel(text)),
            };
            if index == 0 || index >= basis.len() {
                return Err(IngestError::UnknownLabel(text));
            }
            if !(r.error >= 0.0) || !r.error.is_finite() {
                return Err(IngestError::ErrorBar {
                    label: text,
                    error: r.error,
                });
            }
            if !r.value.is_finite() || r.value.abs() > 1.0 + r.error {
                return Err(IngestError::Bound {
                    label: text,
                    value: r.value,
                });
            }
            if by_index.insert(index, r.value).is_some() {
                return Err(IngestError::DuplicateLabel(text));
            }
            err2 += r.error * r.error;
        }
        let coords = CoeffVector::new(by_index.keys().copied().collect(), by_index.values().copied().collect())?;
        Ok(TargetPoint::new(coords, delta, err2.sqrt())?)
    }
}

/// Read and validate an input file; returns the basis for its dimensions and
/// the target point.
pub fn ingest(path: &Path, cfg: &RunConfig) -> Result<(ObservableBasis, TargetPoint), IngestError> {
    let text = std::fs::read_to_string(path)?;
    ingest_str(&text, cfg)
}

pub fn ingest_str(text: &str, cfg: &RunConfig) -> Result<(ObservableBasis, TargetPoint), IngestError> {
    let file = parse_input(text)?;
    let basis = ObservableBasis::build(file.dims[0], file.dims[1])?;
    let point = file.to_target(&basis, cfg.delta)?;
    Ok((basis, point))
}

pub fn run_wsep(cfg: &RunConfig, basis: &ObservableBasis, point: &TargetPoint) -> Result<WsepReport, IngestError> {
    cfg.validate()?;
    Ok(wsep(point, basis, &cfg.solver_config())?)
}

/// 0 = witness, 1 = member, 2 = unverified.
pub fn verdict_exit_code(v: &SeparationVerdict) -> i32 {
    match v {
        SeparationVerdict::Witness { .. } => 0,
        SeparationVerdict::Member { .. } => 1,
        SeparationVerdict::Unverified { .. } => 2,
    }
}

/// Verdict JSON. Keys are sorted, and timing is only included on request so
/// that repeated runs produce identical bytes.
pub fn verdict_json(report: &WsepReport, basis: &ObservableBasis, include_timing: bool) -> Value {
    let mut out = json!({
        "schema": SCHEMA_VERSION,
        "outcome": report.verdict.outcome(),
        "boundary": report.boundary,
        "iterations": report.stats.iterations,
        "oracle_calls": report.stats.oracle_calls,
        "iteration_cap": report.stats.iteration_cap,
        "max_volume_ratio": report.stats.max_volume_ratio,
    });
    let obj = out.as_object_mut().expect("object literal");
    match &report.verdict {
        SeparationVerdict::Witness {
            c,
            threshold,
            tightened,
            margin,
        } => {
            let terms: Vec<Value> = c
                .indices()
                .iter()
                .zip(c.values())
                .map(|(&i, &v)| json!({"index": i, "label": basis.label(i), "coefficient": v}))
                .collect();
            obj.insert(
                "witness".into(),
                json!({
                    "terms": terms,
                    "rendered": basis.render(c),
                    "threshold": threshold,
                    "a_star": tightened.a_star,
                    "b_star": tightened.b_star,
                    "handedness": tightened.handedness,
                    "margin": margin,
                    "verification_budget": tightened.verification_budget,
                }),
            );
        }
        SeparationVerdict::Member { delta_effective } => {
            obj.insert("delta_effective".into(), json!(delta_effective));
        }
        SeparationVerdict::Unverified { reason } => {
            obj.insert("reason".into(), json!(reason));
        }
    }
    if include_timing {
        obj.insert("wall_time".into(), json!(report.wall_time.as_secs_f64()));
    }
    out
}

/// Short human-readable summary of a verdict.
pub fn verdict_text(report: &WsepReport, basis: &ObservableBasis) -> String {
    let mut s = match &report.verdict {
        SeparationVerdict::Witness {
            c,
            threshold,
            tightened,
            margin,
        } => format!(
            "entangled: witness found\n  W = {}\n  separable states satisfy ⟨W⟩ ≤ {threshold:.9}\n  sandwich [{}, {}], margin {margin:.3e}\n",
            basis.render(c),
            fmt_opt(tightened.a_star),
            fmt_opt(tightened.b_star),
        ),
        SeparationVerdict::Member { delta_effective } => format!(
            "no witness in the measured span: point is within {delta_effective} of the separable projection\n"
        ),
        SeparationVerdict::Unverified { reason } => format!("unverified: {reason}\n"),
    };
    if report.boundary {
        s.push_str("  (near the boundary: verdict may flip within 2δ)\n");
    }
    s.push_str(&format!(
        "  {} iterations, {} oracle calls (cap {})\n",
        report.stats.iterations, report.stats.oracle_calls, report.stats.iteration_cap
    ));
    s
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "?".into(), |x| format!("{x:.9}"))
}
