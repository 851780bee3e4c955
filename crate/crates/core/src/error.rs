use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside an operation's domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is not a density matrix: {0}")]
    InvalidState(String),

    /// A finite-chain mode with Λ_k = 0 (only possible at γ = 0, h = cos φ_k).
    #[error("degenerate mode k = {k} for N = {n}: dispersion vanishes at h = cos(2πk/N)")]
    DegenerateMode { k: usize, n: usize },

    #[error("quadrature failed ({detail}); error estimate {estimate:e}")]
    Quadrature { detail: String, estimate: f64 },

    #[error("derivative maximum sits on the grid boundary at h = {h}; widen the sweep")]
    PeakOnBoundary { h: f64 },

    #[error("at h = {h}: {source}")]
    AtField {
        h: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_field(self, h: f64) -> Self {
        match self {
            e @ Error::AtField { .. } => e,
            e => Error::AtField {
                h,
                source: Box::new(e),
            },
        }
    }

    /// True for failures of numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InvalidParameter(_) => false,
            Error::AtField { source, .. } => source.is_numerical(),
            _ => true,
        }
    }
}
