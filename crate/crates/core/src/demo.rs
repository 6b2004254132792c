//! Canned scenarios: the Bell-operator sandwich, a Werner sweep under full and
//! partial information, and the Tiles bound-entangled state.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::basis::ObservableBasis;
use crate::error::{Error, Result};
use crate::ingest::SCHEMA_VERSION;
use crate::separation::{wsep, SolverConfig, TargetPoint};
use crate::states::{a_phi, a_psi, bell_state, expectation, pauli_product, ppt_check, werner, BellState};
use crate::upb::{bound_entangled_state, tiles_vectors};
use crate::witness::{bell_inequality_check, classify, detect, witness_from_upb, Detection, UpbConstruction};

pub const DEMOS: [&str; 3] = ["bell-sandwich", "werner-sweep", "tiles-upb"];

#[derive(Clone, Debug)]
pub struct DemoReport {
    pub text: String,
    pub json: Value,
}

pub fn run_demo(name: &str, cfg: &SolverConfig) -> Result<DemoReport> {
    match name {
        "bell-sandwich" => bell_sandwich(cfg),
        "werner-sweep" => werner_sweep(cfg, 0.01),
        "tiles-upb" => tiles_upb(cfg),
        other => Err(Error::UnknownDemo(other.to_string())),
    }
}

fn bell_sandwich(cfg: &SolverConfig) -> Result<DemoReport> {
    let mut text = String::new();
    let mut ops = Vec::new();
    for (name, op) in [("A_psi", a_psi()), ("A_phi", a_phi())] {
        let w = classify(&op, &cfg.opt)?;
        let (a, b) = (w.a_star.unwrap_or(f64::NAN), w.b_star.unwrap_or(f64::NAN));
        let _ = writeln!(text, "{name}: a* = {a:+.6}  b* = {b:+.6}  ({:?})", w.handedness);
        ops.push(json!({"operator": name, "a_star": a, "b_star": b, "handedness": w.handedness}));
    }
    let x1 = pauli_product(1, 1)?;
    let x2 = pauli_product(2, 2)?;
    let _ = writeln!(text, "\nstate  e11     e22     sum     diff    detected as");
    let mut rows = Vec::new();
    for s in BellState::ALL {
        let rho = bell_state(s);
        let e11 = expectation(&x1, &rho)?;
        let e22 = expectation(&x2, &rho)?;
        let check = bell_inequality_check(e11, e22);
        let implicated = check.implicated.map_or("-", |b| b.name());
        let _ = writeln!(
            text,
            "{:<6} {e11:+.3}  {e22:+.3}  {:+.3}  {:+.3}  {implicated}",
            s.name(),
            e11 + e22,
            e11 - e22
        );
        rows.push(json!({"state": s, "e11": e11, "e22": e22, "implicated": check.implicated}));
    }
    Ok(DemoReport {
        text,
        json: json!({"schema": SCHEMA_VERSION, "demo": "bell-sandwich", "operators": ops, "table": rows}),
    })
}

/// Sweep `werner(p)` over `p = 0, 0.1, …, 1` with `T = {σ1σ1, σ2σ2}` and with
/// all coordinates.
pub fn werner_sweep(cfg: &SolverConfig, delta: f64) -> Result<DemoReport> {
    let basis = ObservableBasis::build(2, 2)?;
    let partial = vec![basis.flat_index(1, 1)?, basis.flat_index(2, 2)?];
    let full = basis.full_indices();
    let mut text = String::from("  p    ppt    partial T   full T\n");
    let mut rows = Vec::new();
    let (mut onset_partial, mut onset_full) = (None, None);
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let rho = werner(p, BellState::PsiPlus)?;
        let ppt = ppt_check(&rho)?.is_ppt;
        let mut outcomes = Vec::new();
        for t in [&partial, &full] {
            let target = TargetPoint::new(basis.vectorize_on(rho.op(), t)?, delta, 0.0)?;
            outcomes.push(wsep(&target, &basis, cfg)?.verdict.outcome());
        }
        if outcomes[0] == "witness" && onset_partial.is_none() {
            onset_partial = Some(p);
        }
        if outcomes[1] == "witness" && onset_full.is_none() {
            onset_full = Some(p);
        }
        let _ = writeln!(text, "{p:4.1}  {:<5}  {:<10}  {}", ppt, outcomes[0], outcomes[1]);
        rows.push(json!({"p": p, "ppt": ppt, "partial": outcomes[0], "full": outcomes[1]}));
    }
    let show = |o: Option<f64>| o.map_or("none".to_string(), |p| format!("{p:.1}"));
    let _ = writeln!(
        text,
        "\ndetection onset: partial T at p = {}, full T at p = {}",
        show(onset_partial),
        show(onset_full)
    );
    Ok(DemoReport {
        text,
        json: json!({
            "schema": SCHEMA_VERSION,
            "demo": "werner-sweep",
            "delta": delta,
            "rows": rows,
            "onset_partial": onset_partial,
            "onset_full": onset_full,
        }),
    })
}

fn tiles_upb(cfg: &SolverConfig) -> Result<DemoReport> {
    let upb = tiles_vectors();
    let built = witness_from_upb(&upb, 3, 3, &UpbConstruction::Complement, &cfg.opt.escalated())?;
    let w = &built.witness;
    let rho = bound_entangled_state(&upb, 3, 3)?;
    let value = expectation(&w.op, &rho)?;
    let ppt = ppt_check(&rho)?;
    let detected = detect(value, w, 0.0) == Detection::EntangledLeft;
    let a = w.a_star.unwrap_or(f64::NAN);
    let mut text = String::new();
    let _ = writeln!(
        text,
        "Tiles UPB on 3x3, complement dimension {}",
        built.complement.len()
    );
    let _ = writeln!(text, "A' = -P_complement: a* = {a:.6} ({:?})", w.handedness);
    let _ = writeln!(text, "tr(A' rho_BE) = {value:.6}");
    let _ = writeln!(text, "PPT min eigenvalue of rho_BE^T_B = {:.3e}", ppt.min_eigenvalue);
    let _ = writeln!(
        text,
        "witness {}; PPT {}",
        if detected { "detects" } else { "does not detect" },
        if ppt.is_ppt { "passes" } else { "fails" }
    );
    Ok(DemoReport {
        text,
        json: json!({
            "schema": SCHEMA_VERSION,
            "demo": "tiles-upb",
            "a_star": a,
            "value": value,
            "detected": detected,
            "ppt": ppt.is_ppt,
            "ppt_min_eigenvalue": ppt.min_eigenvalue,
            "unextendibility_overlap": built.unextendibility_overlap,
        }),
    })
}
