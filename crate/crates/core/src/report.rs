//! Machine-readable bound reports.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    /// strip width the eigenvalue belongs to
    pub n: usize,
    pub lambda: f64,
    pub lo: f64,
    pub hi: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ReportParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    pub widths: Vec<usize>,
}

/// A computed bound with its method, parameters and eigenvalue
/// certificates. `bound` is always the sound side of the certificate
/// interval: rounded-down for lower bounds, rounded-up for upper bounds.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub constraint: String,
    pub method: String,
    pub params: ReportParams,
    pub bound: f64,
    pub certificates: Vec<Certificate>,
    pub runtime_ms: u128,
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Decimal string with directed rounding: down for lower bounds, up for
/// upper bounds, as the results tables do.
pub fn round_directed(x: f64, decimals: u32, down: bool) -> String {
    let scale = 10f64.powi(decimals as i32);
    let scaled = x * scale;
    let v = if down { scaled.floor() } else { scaled.ceil() } as i128;
    let sign = if v < 0 { "-" } else { "" };
    let a = v.unsigned_abs();
    let ip = a / 10u128.pow(decimals);
    let fp = a % 10u128.pow(decimals);
    format!("{sign}{ip}.{fp:0w$}", w = decimals as usize)
}
