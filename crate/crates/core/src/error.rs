use thiserror::Error;

/// Errors raised by the thermodynamic, jump, model and solver layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{quantity} = {value} is outside the admissible range")]
    OutOfRange { quantity: &'static str, value: f64 },

    #[error("invalid equation of state: {0}")]
    InvalidEos(String),

    #[error("degenerate jump: the two states are (nearly) coincident")]
    DegenerateJump,

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("{what} did not converge after {iterations} iterations (last ratio {last_ratio:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last_ratio: f64,
        history: Vec<f64>,
    },

    #[error("inconsistent cusp data: {0}")]
    InconsistentCusp(String),

    #[error("model evaluated outside its validity box at (t, w) = ({t:.3e}, {w:.3e})")]
    OutOfBox { t: f64, w: f64 },

    #[error("incoming characteristic left the validity box at (t, w) = ({t:.3e}, {w:.3e})")]
    LeftBox { t: f64, w: f64 },

    #[error("singular gamma at v = {v:.3e}: c_plus - V = {margin:.3e}")]
    SingularGamma { v: f64, margin: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
