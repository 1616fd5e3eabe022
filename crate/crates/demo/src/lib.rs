//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Every export returns plain numbers or JSON text so the page needs no
//! generated type bindings, and the same functions run natively in tests.

use monogamy::catalog::{lookup, random_qubits, STANDARD_LABELS};
use monogamy::convex_roof::OracleConfig;
use monogamy::engine::{Evaluator, Split};
use monogamy::figures::{figure, AlphaGrid};
use monogamy::listing::measure_listing;
use monogamy::measures::{MeasureDescriptor, Status};
use monogamy::rng::derive_seed;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest random ensemble the page may request in one call.
pub const MAX_COUNT: u32 = 500;

fn oracle(trials: u32, seed: u64) -> OracleConfig {
    OracleConfig {
        trials: trials.max(1) as usize,
        seed,
        ..OracleConfig::default()
    }
}

fn check_alpha(alpha: f64) -> Result<(), String> {
    let beta = MeasureDescriptor::CONCURRENCE.beta;
    if !(alpha >= beta && alpha.is_finite()) {
        return Err(format!("alpha must be a finite number ≥ {beta}"));
    }
    Ok(())
}

/// Labels accepted by [`state_table`].
#[wasm_bindgen]
pub fn catalog_labels() -> Vec<String> {
    STANDARD_LABELS.iter().map(|s| s.to_string()).collect()
}

/// Flattened rows `α, y₁, y₂, y₃` of figure `id` over `start..=stop`.
#[wasm_bindgen]
pub fn figure_curves(id: u32, start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    check_alpha(start)?;
    let grid = AlphaGrid::new(start, stop, step).map_err(|e| e.to_string())?;
    if grid.values().len() > 2000 {
        return Err("grid too fine (more than 2000 points)".into());
    }
    let rows = figure(id, &grid.values(), &OracleConfig::default()).map_err(|e| e.to_string())?;
    Ok(rows.into_iter().flatten().collect())
}

/// Measure listing and every bound row of a catalog state at one α, as JSON
/// `{state, alpha, listing: [{label, value, status}], bounds: [...], notes}`.
#[wasm_bindgen]
pub fn state_table(label: &str, alpha: f64, trials: u32) -> Result<String, String> {
    check_alpha(alpha)?;
    let entry = lookup(label).ok_or_else(|| format!("unknown state `{label}`"))?;
    let eval = Evaluator::new(entry.state, MeasureDescriptor::CONCURRENCE, oracle(trials, 0));
    let listing = measure_listing(&eval, &entry.party_names).map_err(|e| e.to_string())?;
    let report = eval.report(&entry.label, &[alpha], Split::Auto);
    let row = &report.rows[0];
    let listing: Vec<_> = listing
        .iter()
        .map(|l| json!({"label": l.label, "value": l.value.value, "status": l.value.status}))
        .collect();
    Ok(json!({
        "state": entry.label,
        "description": entry.description,
        "alpha": alpha,
        "listing": listing,
        "bounds": row.bounds,
        "notes": row.notes,
    })
    .to_string())
}

/// Checks every bound on `count` Haar-random `qubits`-qubit states at one α.
/// Returns JSON `{states, rows, exact, estimates, violations, warnings,
/// min_exact_gap, failures: [{state, id, gap}]}`.
#[wasm_bindgen]
pub fn random_check(qubits: u32, count: u32, seed: u32, alpha: f64, trials: u32) -> Result<String, String> {
    check_alpha(alpha)?;
    if !(3..=6).contains(&qubits) {
        return Err("qubits must be between 3 and 6".into());
    }
    if count == 0 || count > MAX_COUNT {
        return Err(format!("count must be between 1 and {MAX_COUNT}"));
    }
    let (n, master) = (qubits as usize, seed as u64);
    let (mut rows, mut exact, mut violations, mut warnings) = (0, 0, 0, 0);
    let mut min_exact_gap = f64::INFINITY;
    let mut failures = Vec::new();
    for i in 0..count as u64 {
        let state = random_qubits(n, derive_seed(master, &[n as u64, i])).map_err(|e| e.to_string())?;
        let eval = Evaluator::new(
            state,
            MeasureDescriptor::CONCURRENCE,
            oracle(trials, derive_seed(master, &[i])),
        );
        let label = format!("random{n}q-{i}");
        let report = eval.report(&label, &[alpha], Split::Auto);
        for b in &report.rows[0].bounds {
            rows += 1;
            if b.status == Status::Exact {
                exact += 1;
                min_exact_gap = min_exact_gap.min(b.gap);
            }
        }
        for (_, b) in report.violations() {
            violations += 1;
            failures.push(json!({"state": label, "id": b.id, "gap": b.gap, "certified": true}));
        }
        for (_, b) in report.warnings() {
            warnings += 1;
            failures.push(json!({"state": label, "id": b.id, "gap": b.gap, "certified": false}));
        }
    }
    Ok(json!({
        "states": count,
        "rows": rows,
        "exact": exact,
        "estimates": rows - exact,
        "violations": violations,
        "warnings": warnings,
        "min_exact_gap": if exact > 0 { Some(min_exact_gap) } else { None },
        "failures": failures,
    })
    .to_string())
}
