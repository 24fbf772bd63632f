use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {x} is not interior to the support")]
    OutsideSupport { x: f64 },

    #[error("log-density is not finite at probe point {x}")]
    NonFiniteLogDensity { x: f64 },

    #[error("integral did not converge: {0}")]
    DivergentIntegral(String),

    #[error("inverse-CDF sampling failed: {0}")]
    InversionFailure(String),

    #[error("{op} is not defined on support {support}")]
    UnsupportedSupport { op: &'static str, support: String },

    #[error("score is not strictly monotone near x = {at}")]
    NotMonotone { at: f64 },

    #[error("image bounds must be positive, got ({p_minus}, {p_plus})")]
    InvalidBounds { p_minus: f64, p_plus: f64 },

    #[error("brute-force budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("family is not characterizable: {0}")]
    NotCharacterizable(String),

    #[error("equivalence class is a singleton here; only d = 1 is admissible (got d = {d})")]
    SingletonClass { d: f64 },

    #[error("reference score is below tolerance on the whole grid")]
    DegenerateScore,

    #[error("no sign change found while bracketing the likelihood equation")]
    BracketFailure,

    #[error("every observation is zero; the scale MLE is undefined")]
    AllZeroSample,

    #[error("no closed-form estimator declared for {0}")]
    NoClosedForm(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("sample size {n} already covers the image (MCSS = {mcss})")]
    AlreadyCovered { n: usize, mcss: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical procedure did not converge: {0}")]
    NonConvergence(String),

    #[error("could not parse input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for the command-line front-end: 2 for input and
    /// configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::InvalidArgument(_)
            | Error::UnknownFamily(_)
            | Error::InvalidParams(_)
            | Error::InvalidBounds { .. }
            | Error::OutsideSupport { .. }
            | Error::AllZeroSample
            | Error::NoClosedForm(_)
            | Error::NotCharacterizable(_)
            | Error::UnsupportedSupport { .. }
            | Error::AlreadyCovered { .. }
            | Error::SingletonClass { .. }
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
