use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite curvature data at s = {s}")]
    IntegrationFailure { s: f64 },

    #[error("solution blew up (|kappa_g| > {limit:.1e}) at s = {s}")]
    Divergence { s: f64, limit: f64 },

    #[error("trajectory reached the chart singularity 2*alpha*kappa_g + eta = 0 at s = {s}")]
    ChartSingularity { s: f64 },

    #[error("alpha = 0 is outside the cubic branch; use the alpha-zero disk solution")]
    AlphaZeroPath,

    #[error("degenerate (zero-area) cell {cell} while meshing")]
    MeshingError { cell: usize },

    #[error("mesh topology unusable: {0}")]
    Topology(String),

    #[error("first fundamental form degenerate at (u, v) = ({u}, {v})")]
    SingularPatch { u: f64, v: f64 },

    #[error(
        "branch classification ambiguous: max|tau_g| = {tau_residual:.3e}, \
         max|2*alpha*kappa_g + eta| = {const_residual:.3e}"
    )]
    AmbiguousBranch {
        tau_residual: f64,
        const_residual: f64,
    },

    #[error(
        "ring shooting did not converge in {iterations} iterations \
         (closure {closure:.3e}, turning residual {turning:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        closure: f64,
        turning: f64,
    },

    #[error("analytic continuation blew up; largest safe strip half-width is {t_safe:.3e}")]
    StripBlowup { t_safe: f64 },

    #[error("quadrature failed to reach the requested accuracy: {0}")]
    Accuracy(String),

    #[error("complex data has a pole or non-finite value inside the domain at ({u}, {v})")]
    Domain { u: f64, v: f64 },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors that indicate a caller mistake rather than a numerical failure.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_) | Error::AlphaZeroPath | Error::Parse(_)
        )
    }
}
