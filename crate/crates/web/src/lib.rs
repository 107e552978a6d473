//! Browser bindings: a Dalitz-plane map, the state of one event and a
//! Bell-inequality optimization. Every call returns a JSON string.

use opsent::amplitude::{closed_form_coefficients, state_tensor, SpinProjection, StateTensor};
use opsent::correlations::{embed_3d, Qubit2d, Spin1};
use opsent::entanglement::{classify, to_linear_basis, Tolerances};
use opsent::kinematics::{build_event, DalitzPoint, Orientation};
use opsent::search::{optimize_settings, scan_dalitz, BellObjective, Observable, ScanSpec, SettingsSearch};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn spin(sz: i8) -> Result<SpinProjection, String> {
    SpinProjection::try_from(sz).map_err(|e| e.to_string())
}

/// Observable over the Dalitz triangle, one entry per grid point:
/// `{"n", "observable", "points": [[x1, x2, value, class], ...]}`.
pub fn dalitz_map_json(
    n: usize,
    sz: i8,
    observable: &str,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<String, String> {
    let observable = match observable {
        "tangle" => Observable::Tangle,
        "hdet" => Observable::Hdet,
        "class" => Observable::Class,
        "weight" => Observable::Weight,
        other => return Err(format!("unknown observable {other:?}")),
    };
    let table = scan_dalitz(&ScanSpec {
        n,
        spin: spin(sz)?,
        orientation: Orientation::new(alpha, beta, gamma),
        observable,
        tolerances: Tolerances::default(),
    })
    .map_err(|e| e.to_string())?;
    let points: Vec<_> = table
        .rows
        .iter()
        .map(|r| json!([r.dalitz.x1(), r.dalitz.x2(), r.value, r.report.class.to_string()]))
        .collect();
    Ok(json!({ "n": n, "observable": table.observable, "points": points }).to_string())
}

/// Normalized circular and linear amplitudes, entanglement report and
/// closed-form residual of one event.
pub fn event_state_json(x1: f64, x2: f64, alpha: f64, beta: f64, gamma: f64, sz: i8) -> Result<String, String> {
    let s = spin(sz)?;
    let t = build_event(
        DalitzPoint::new(x1, x2).map_err(|e| e.to_string())?,
        Orientation::new(alpha, beta, gamma),
    )
    .map_err(|e| e.to_string())?;
    let state = state_tensor(&t, s)
        .and_then(|v| v.normalized())
        .map_err(|e| e.to_string())?;
    let linear = to_linear_basis(&state).map_err(|e| e.to_string())?;
    let report = classify(&state, &Tolerances::default()).map_err(|e| e.to_string())?;
    let closed = closed_form_coefficients(&t, s).map_err(|e| e.to_string())?;
    Ok(json!({
        "event": t,
        "circular": state,
        "linear": linear,
        "report": report,
        "closed_form_residual": closed.residual,
    })
    .to_string())
}

/// Maximizes Mermin or Svetlichny for a named state (`ghz`, `w`,
/// `product`) or, when `name` is `event`, for the decay state at the
/// given kinematics in the qubit or spin-1 formalism.
#[allow(clippy::too_many_arguments)]
pub fn optimize_bell_json(
    name: &str,
    objective: &str,
    spin1: bool,
    x1: f64,
    x2: f64,
    sz: i8,
    restarts: usize,
    seed: u64,
) -> Result<String, String> {
    let objective: BellObjective = objective.parse().map_err(|e: opsent::Error| e.to_string())?;
    let search = SettingsSearch::new(objective, restarts, seed);
    let named = |s: StateTensor| {
        optimize_settings(
            &Qubit2d {
                state: &s,
                local_bases: None,
            },
            &search,
        )
    };
    let out = match name {
        "ghz" => named(StateTensor::ghz()),
        "w" => named(StateTensor::w()),
        "product" => named(StateTensor::basis_ket(opsent::amplitude::Basis::Linear, 0)),
        "event" => {
            let t = build_event(
                DalitzPoint::new(x1, x2).map_err(|e| e.to_string())?,
                Orientation::identity(),
            )
            .map_err(|e| e.to_string())?;
            let state = state_tensor(&t, spin(sz)?)
                .and_then(|v| v.normalized())
                .map_err(|e| e.to_string())?;
            if spin1 {
                let e = embed_3d(&state, &t)
                    .and_then(|e| e.normalized())
                    .map_err(|e| e.to_string())?;
                optimize_settings(&Spin1(&e), &search)
            } else {
                named(state)
            }
        }
        other => return Err(format!("unknown state {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn dalitz_map(n: usize, sz: i8, observable: &str, alpha: f64, beta: f64, gamma: f64) -> Result<String, JsError> {
    dalitz_map_json(n, sz, observable, alpha, beta, gamma).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn event_state(x1: f64, x2: f64, alpha: f64, beta: f64, gamma: f64, sz: i8) -> Result<String, JsError> {
    event_state_json(x1, x2, alpha, beta, gamma, sz).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn optimize_bell(
    name: &str,
    objective: &str,
    spin1: bool,
    x1: f64,
    x2: f64,
    sz: i8,
    restarts: usize,
    seed: u64,
) -> Result<String, JsError> {
    optimize_bell_json(name, objective, spin1, x1, x2, sz, restarts, seed).map_err(|e| JsError::new(&e))
}
