use thiserror::Error;

/// Crate-wide error type.
///
/// The variants map onto the process exit codes used by the experiment
/// runner: configuration errors exit with 2, budget overruns with 3 and
/// certificate or invariant breaches with 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: mismatched group/space, non-nested chains,
    /// missing required data, malformed grids.
    #[error("configuration error: {0}")]
    Config(String),

    /// The declared enumeration budget would be exceeded.
    #[error("enumeration budget exceeded: {required} elements required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    /// A sampler produced no admissible points at the requested scale.
    #[error("sampler resolution too coarse: {0}")]
    Resolution(String),

    /// Rate predictors require an error value strictly inside (0, 1).
    #[error("undefined regime: {0}")]
    UndefinedRegime(String),

    /// Exponent fitting failed (too few usable points).
    #[error("fit error: {0}")]
    Fit(String),

    /// A certified bound was violated by observed data. Carries a witness
    /// description; tests treat this as a hard failure.
    #[error("certificate violated: {0}")]
    CertificateViolation(String),

    /// A non-finite value surfaced in an exact pipeline.
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI: 2 config, 3 budget, 4 invariant breach.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UndefinedRegime(_) | Error::Fit(_) => 2,
            Error::BudgetExceeded { .. } => 3,
            Error::CertificateViolation(_) | Error::NonFinite(_) => 4,
            Error::Resolution(_) => 2,
        }
    }
}
