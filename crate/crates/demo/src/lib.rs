//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export has a plain Rust twin returning `Result<String, String>` so
//! it can be tested natively; the bindings only convert the error.

use serde_json::json;
use wasm_bindgen::prelude::*;

use qfock::analysis::{displacement_weight, schatten_partial_sums, schatten_term_ratio, schatten_threshold, tail_weight};
use qfock::combinatorics::PartialPartition;
use qfock::render::{caption, render_partition, RenderFormat};

/// Largest ground set the diagram view accepts.
pub const MAX_POINTS: usize = 24;

fn parse_pairs(pairs: &str) -> Result<Vec<(usize, usize)>, String> {
    pairs
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, b) = t.split_once('-').ok_or_else(|| format!("pair `{t}` should look like `2-5`"))?;
            let a = a.parse::<usize>().map_err(|_| format!("bad pair `{t}`"))?;
            let b = b.parse::<usize>().map_err(|_| format!("bad pair `{t}`"))?;
            Ok((a, b))
        })
        .collect()
}

/// `{"svg": ..., "caption": ..., "iota": ..., "iota_prime": ...}`.
pub fn partition_diagram(n: usize, k: usize, pairs: &str) -> Result<String, String> {
    if n == 0 || n > MAX_POINTS {
        return Err(format!("n must be between 1 and {MAX_POINTS}"));
    }
    let rho = PartialPartition::new(n, k, parse_pairs(pairs)?).map_err(|e| e.to_string())?;
    Ok(json!({
        "svg": render_partition(&rho, RenderFormat::Svg),
        "caption": caption(&rho, false),
        "iota": rho.crossings(),
        "iota_prime": rho.iota_prime().ok(),
    })
    .to_string())
}

/// Partial sums `Σ_{n ≤ N} |q|^{pn} d^n`, the term ratio and the threshold.
pub fn schatten_sums(q: f64, d: usize, p: f64, n_max: usize) -> Result<String, String> {
    let threshold = schatten_threshold(q, d).map_err(|e| e.to_string())?;
    if !(p >= 1.0) || n_max > 500 {
        return Err("need p >= 1 and N <= 500".into());
    }
    Ok(json!({
        "threshold": threshold,
        "ratio": schatten_term_ratio(q, d, p),
        "sums": schatten_partial_sums(q, d, p, n_max),
    })
    .to_string())
}

/// Ratios `‖(α_{t^k} - id)x‖ / ‖E^⊥_{k-1} α_t x‖` for unit `x` of degree
/// `kcut..=n_max` over `steps` values of `t` in `(0, 2^-kcut)`.
pub fn deformation_ratios(kcut: usize, n_max: usize, steps: usize) -> Result<String, String> {
    if kcut == 0 || n_max < kcut || n_max > 40 || steps == 0 || steps > 400 {
        return Err("need 1 <= kcut <= n_max <= 40 and 1 <= steps <= 400".into());
    }
    let bound = 0.5f64.powi(kcut as i32);
    let ts: Vec<f64> = (1..=steps).map(|i| bound * i as f64 / (steps + 1) as f64).collect();
    let series: Vec<_> = (kcut..=n_max)
        .map(|n| {
            let ratios: Vec<f64> = ts
                .iter()
                .map(|&t| (displacement_weight(n, t.powi(kcut as i32)) / tail_weight(n, kcut, t)).sqrt())
                .collect();
            json!({"n": n, "ratios": ratios})
        })
        .collect();
    Ok(json!({"t": ts, "series": series}).to_string())
}

#[wasm_bindgen(js_name = partitionDiagram)]
pub fn partition_diagram_js(n: usize, k: usize, pairs: &str) -> Result<String, JsError> {
    partition_diagram(n, k, pairs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = schattenSums)]
pub fn schatten_sums_js(q: f64, d: usize, p: f64, n_max: usize) -> Result<String, JsError> {
    schatten_sums(q, d, p, n_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = deformationRatios)]
pub fn deformation_ratios_js(kcut: usize, n_max: usize, steps: usize) -> Result<String, JsError> {
    deformation_ratios(kcut, n_max, steps).map_err(|e| JsError::new(&e))
}
