use thiserror::Error;

/// Errors shared across the model, quadrature, and CLI layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter is out of its admissible range.
    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A decoherence factor left the closed unit disk by more than roundoff.
    #[error("coherence factor magnitude {magnitude} exceeds 1 beyond tolerance")]
    CoherenceOutOfRange { magnitude: f64 },

    /// A closed-form path that assumes a real factor received a bath state
    /// for which F(t) is genuinely complex.
    #[error(
        "decoherence factor is complex (|Im F| = {imag_magnitude}); \
         bath spins are not all in sigma-x eigenstates"
    )]
    ComplexDecoherence { imag_magnitude: f64 },

    /// Step refinement (Simpson halving or RK4 step halving) hit its depth
    /// limit before the error estimate dropped below tolerance.
    #[error(
        "refinement did not converge: residual {last_error} still exceeds \
         tolerance {tolerance} after {refinements} refinements"
    )]
    QuadratureNotConverged {
        last_error: f64,
        tolerance: f64,
        refinements: u32,
    },

    /// The instantaneous eigenvalues of the reduced density matrix became
    /// degenerate along the path, so no eigenbranch can be followed through.
    #[error("reduced-state eigenvalues cross near t = {t} (gap {gap})")]
    EigenvalueCrossing { t: f64, gap: f64 },

    /// Brute-force propagation of the full 2^(N+1) state was requested for a
    /// bath too large to verify in reasonable time.
    #[error("bath of {n} spins exceeds the brute-force limit of {max} spins")]
    BathTooLarge { n: usize, max: usize },

    /// Malformed or inconsistent run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: distinct codes separate configuration
    /// mistakes from filesystem trouble and numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam { .. }
            | Error::ComplexDecoherence { .. }
            | Error::Config(_) => 2,
            Error::Io(_) => 3,
            Error::QuadratureNotConverged { .. }
            | Error::EigenvalueCrossing { .. }
            | Error::CoherenceOutOfRange { .. }
            | Error::BathTooLarge { .. } => 4,
        }
    }
}
