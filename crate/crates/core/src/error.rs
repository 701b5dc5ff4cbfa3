use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("residue {0:e} at exponent -1 exceeds the integration gate")]
    Residue(f64),
    #[error("approximation tolerance {tol:e} unreachable within window {window} (best {best:e})")]
    Approximation { tol: f64, window: usize, best: f64 },
    #[error("lift failed: {0}")]
    Lift(String),
    #[error("refit failed: residual {0:e}")]
    Fit(f64),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("nondegeneracy violated: min |theta| = {0:e}")]
    Nondegeneracy(f64),
    #[error("period mismatch {0:e} between integration paths")]
    Period(f64),
    #[error("no continuous lift of the boundary disc family: {0}")]
    NoLift(String),
    #[error("every candidate constant gave a vanishing spinor (min norm {0:e})")]
    GeneralPosition(f64),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("oscillation bound {0} not resolvable on the grid")]
    Oscillation(f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("distance gain {gain:e} below floor {floor:e}")]
    GainShortfall { gain: f64, floor: f64 },
    #[error("curvature error: offset {0} not below the curvature radius")]
    Curvature(f64),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("config error in field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
