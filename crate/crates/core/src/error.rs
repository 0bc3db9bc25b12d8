use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum CapError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("size guard exceeded: {what} would need {required} (limit {limit})")]
    SizeGuard {
        what: String,
        required: u128,
        limit: u64,
    },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix has no Perron vector (spectral radius is zero)")]
    NoPerronVector,

    #[error("phi annihilates strip: lambda(A_{{2q,phi}}) = 0, bound undefined")]
    PhiAnnihilatesStrip,

    #[error("symmetry gate failed: {0}")]
    SymmetryGate(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CapError>;

/// Edge-count limit used by graph constructions that can blow up
/// combinatorially. Overridable through `CAPBOUND_MAX_EDGES`.
pub fn edge_limit() -> u64 {
    static LIMIT: std::sync::OnceLock<u64> = std::sync::OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("CAPBOUND_MAX_EDGES")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(5_000_000)
    })
}

pub(crate) fn guard(what: &str, required: u128) -> Result<()> {
    let limit = edge_limit();
    if required > limit as u128 {
        Err(CapError::SizeGuard {
            what: what.to_string(),
            required,
            limit,
        })
    } else {
        Ok(())
    }
}
