use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("parity violation: x + height must be even (got x={x}, height={height})")]
    Parity { x: i64, height: i64 },

    #[error("vertex ({v1}, {v2}) is not admissible: need v2 >= 0 and v1 + v2 even")]
    BadVertex { v1: i64, v2: i64 },

    #[error("consecutive heights at {x} differ by {diff}, expected +-1")]
    Slope { x: i64, diff: i64 },

    #[error("cannot parse {what}: {msg}")]
    Parse { what: &'static str, msg: String },

    #[error("vertex path must have strictly increasing times (got {prev} then {next})")]
    PathTime { prev: f64, next: f64 },

    #[error("vertex path must be nondecreasing in cone order")]
    PathOrder,
}
