//! Browser bindings for interactive exploration of capacity bounds.
//!
//! Three operations are exposed, each returning a JSON string the static
//! page renders directly: a lower-bound run for a chosen preset and
//! parameter set, a strip-capacity curve, and a finite-count grid.
//! Parameters are clamped to ranges that stay responsive in a browser tab.

use capbound::bounds::{lower_bound, strip_upper_bound, LowerParams};
use capbound::error::CapError;
use capbound::oracle::count_arrays_2d;
use capbound::phi::MaxEntropicParams;
use capbound::presets::{constraint_2d, PRESET_2D_TOKENS};
use wasm_bindgen::prelude::*;

fn err_json(e: &CapError) -> String {
    serde_json::json!({ "error": e.to_string() }).to_string()
}

/// Preset tokens the demo understands.
#[wasm_bindgen]
pub fn presets() -> String {
    serde_json::to_string(PRESET_2D_TOKENS).unwrap()
}

/// Lower bound for a preset with the chosen phi heuristic.
/// `phi_mode` is "maxent" or "ones". Work is clamped: q <= 3, widths <= 8.
#[wasm_bindgen]
pub fn demo_lower_bound(
    token: &str,
    delta: usize,
    mu: usize,
    alpha: usize,
    p: usize,
    q: usize,
    phi_mode: &str,
) -> String {
    let run = || -> Result<String, CapError> {
        if q > 3 || p > 3 || mu > 2 || alpha > 3 || delta > 4 {
            return Err(CapError::InvalidParams(
                "demo limits: q,p <= 3, mu <= 2, alpha <= 3, delta <= 4".into(),
            ));
        }
        let c = constraint_2d(token)?;
        let lp = LowerParams {
            mu,
            alpha,
            p,
            q,
            delta: (phi_mode == "maxent").then_some(delta),
        };
        let phi = match phi_mode {
            "maxent" => c.max_entropic(MaxEntropicParams { delta, mu, alpha })?,
            "ones" => c.ones_phi(mu, alpha)?,
            other => {
                return Err(CapError::InvalidParams(format!(
                    "phi mode {other}; demo supports maxent | ones"
                )))
            }
        };
        let report = lower_bound(&c, lp, &phi, 1e-10)?;
        Ok(report.to_json())
    };
    match run() {
        Ok(s) => s,
        Err(e) => err_json(&e),
    }
}

/// Strip capacities cap(V_n)/n for n = 1..=max_n, each an upper bound on
/// the capacity; the sequence visualizes the squeeze from above.
#[wasm_bindgen]
pub fn demo_strip_curve(token: &str, max_n: usize) -> String {
    let run = || -> Result<String, CapError> {
        let max_n = max_n.clamp(1, 8);
        let c = constraint_2d(token)?;
        let mut points = Vec::new();
        for n in 1..=max_n {
            let r = strip_upper_bound(&c, n, 1e-10)?;
            points.push(serde_json::json!({ "n": n, "upper": r.bound }));
        }
        Ok(serde_json::json!({ "constraint": token, "points": points }).to_string())
    };
    match run() {
        Ok(s) => s,
        Err(e) => err_json(&e),
    }
}

/// Exact |S_{m x n}| counts with per-cell log2 rates, for m, n up to a
/// clamped size.
#[wasm_bindgen]
pub fn demo_count_grid(token: &str, max_m: usize, max_n: usize) -> String {
    let run = || -> Result<String, CapError> {
        let (max_m, max_n) = (max_m.clamp(1, 6), max_n.clamp(1, 6));
        let c = constraint_2d(token)?;
        let mut cells = Vec::new();
        for m in 1..=max_m {
            for n in 1..=max_n {
                let count = count_arrays_2d(&c.original, m, n)?;
                cells.push(serde_json::json!({
                    "m": m,
                    "n": n,
                    "count": count.count.to_string(),
                    "rate": count.log2_per_cell(),
                }));
            }
        }
        Ok(serde_json::json!({ "constraint": token, "cells": cells }).to_string())
    };
    match run() {
        Ok(s) => s,
        Err(e) => err_json(&e),
    }
}
