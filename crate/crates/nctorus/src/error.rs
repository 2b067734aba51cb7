use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Solver-type errors carry enough numbers to be actionable: a truncation
/// overflow reports the discarded mass, a conditioning failure reports the
/// divergent term ratio, and a continuation stall reports where on the
/// homotopy path the inner iteration gave up.
#[derive(Debug, Error)]
pub enum Error {
    #[error("theta {0} outside the open interval (0,1)")]
    ThetaOutOfRange(f64),

    #[error("elements have mismatched theta: {lhs} vs {rhs}")]
    ThetaMismatch { lhs: f64, rhs: f64 },

    #[error("argument must be unimodular, got modulus {0}")]
    NotUnimodular(f64),

    #[error("truncation discarded l1 mass {discarded:.3e} exceeding tail_tol {tail_tol:.3e}; increase max_radius")]
    TruncationOverflow { discarded: f64, tail_tol: f64 },

    #[error("element is not self-adjoint: l2 defect {defect:.3e}")]
    NotSelfAdjoint { defect: f64 },

    #[error("element is not positive: smallest represented eigenvalue {min_eigenvalue:.6e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("element failed the invertibility margin check: min singular value {min_singular_value:.3e}")]
    NotInvertible { min_singular_value: f64 },

    #[error("Neumann series is not contracting (term ratio {ratio:.3}); retry with a larger max_radius")]
    Conditioning { ratio: f64 },

    #[error("right-hand side has nonzero trace |{trace_magnitude:.3e}|; the operator image is trace-zero")]
    NoSolution { trace_magnitude: f64 },

    #[error("sign-definiteness check failed: eigenvalue range [{min:.3e}, {max:.3e}]")]
    SignIndefinite { min: f64, max: f64 },

    #[error("continuation stalled at t = {t}: inner iteration exceeded {max_iter} iterations")]
    ContinuationStall {
        t: f64,
        max_iter: usize,
        /// Continuation trace accumulated before the stall.
        partial: Vec<crate::nonlinear::ContinuationStep>,
    },

    #[error("unitarity defect {defect:.3e} exceeds ceiling {ceiling:.3e}; increase max_radius")]
    UnitarityDefect { defect: f64, ceiling: f64 },

    #[error("matrix dimension q = {q} exceeds the eigensolver cap {cap}")]
    RepresentationTooLarge { q: i64, cap: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("element file rejected: {}", .0.join("; "))]
    ElementFile(Vec<String>),

    #[error("config rejected: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code the CLI maps this error to: 2 for solver stalls,
    /// 1 for everything else (validation and domain errors).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ContinuationStall { .. } => 2,
            _ => 1,
        }
    }

    /// Machine-readable tag used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ThetaOutOfRange(_) => "theta_out_of_range",
            Error::ThetaMismatch { .. } => "theta_mismatch",
            Error::NotUnimodular(_) => "not_unimodular",
            Error::TruncationOverflow { .. } => "truncation_overflow",
            Error::NotSelfAdjoint { .. } => "not_self_adjoint",
            Error::NotPositive { .. } => "not_positive",
            Error::NotInvertible { .. } => "not_invertible",
            Error::Conditioning { .. } => "conditioning",
            Error::NoSolution { .. } => "no_solution",
            Error::SignIndefinite { .. } => "sign_indefinite",
            Error::ContinuationStall { .. } => "continuation_stall",
            Error::UnitarityDefect { .. } => "unitarity_defect",
            Error::RepresentationTooLarge { .. } => "representation_too_large",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ElementFile(_) => "element_file",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
