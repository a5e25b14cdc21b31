use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("span of the matrix is empty: no nonzero combination exists")]
    EmptySpan,

    #[error("enumeration of {requested} combinations exceeds the cap of {cap}")]
    EnumerationCap { requested: u128, cap: u128 },

    #[error("no operator of weight <= {w_max} found")]
    WeightCapExceeded { w_max: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{qubits} qubits exceeds the dense cap of {cap}; use the matrix-free PauliSum::apply path")]
    DenseCap { qubits: usize, cap: usize },

    #[error("calibration for {element} is {alpha:.3e}, below the floor {floor:.1e}")]
    VanishingAlpha { element: String, alpha: f64, floor: f64 },

    #[error("missing calibration entry for {0}")]
    MissingCalibration(String),

    #[error("{0} is not an element of the gauge group")]
    NotInGauge(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("generator {0} is neither purely X-type nor purely Z-type")]
    MixedGenerator(String),

    #[error("code is not CSS with two-local generators")]
    NotCssTwoLocal,

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
