use thiserror::Error;

#[derive(Debug, Error)]
pub enum MacroError {
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("mass {mass} cannot be removed at t = {t}: the right quantile is not positive (block length too large for this rate)")]
    QuantileFailure { mass: f64, t: f64 },
    #[error("slope {slope} at r = {r} is outside [-1, 1]")]
    Lipschitz { r: f64, slope: f64 },
    #[error("value {value} at cell {cell} is not a density")]
    OutOfRange { cell: i64, value: f64 },
    #[error("barriers out of order by {excess} between block lengths {coarse} and {fine}")]
    Nesting { coarse: f64, fine: f64, excess: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
