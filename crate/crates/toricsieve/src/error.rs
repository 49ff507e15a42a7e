//! Crate-wide error type and process exit-code mapping.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("F_q^{sub} is not a subfield of F_q^{sup} ({sub} does not divide {sup})")]
    NotASubfield { sub: usize, sup: usize },
    #[error("rays do not span the ambient lattice over Q (torus factor present)")]
    TorusFactor,
    #[error("weights are ill-formed: every n of the n+1 weights must be coprime")]
    IllFormedWeights,
    #[error("no strictly positive grading functional exists; graded pieces are unbounded")]
    UnboundedPiece,
    #[error("graded piece has an empty monomial basis")]
    EmptyPiece,
    #[error("class group has torsion; point enumeration requires a torsion-free class group")]
    UnsupportedTorsion,
    #[error("{what} needs {required} which exceeds the cap {cap}")]
    CapExceeded {
        what: String,
        required: u128,
        cap: u128,
    },
    #[error("Moebius inversion produced a non-integral point count at degree {degree}")]
    NonIntegralCount { degree: usize },
    #[error("point does not lie on the ambient subscheme (a generator is nonzero there)")]
    NotOnY,
    #[error("ambient subscheme is not quasismooth at this point (Jacobian rank below codimension)")]
    AmbientNotQuasismoothHere,
    #[error("jet rank still changing at k = {k_max}; no stabilization")]
    NoStabilization { k_max: usize },
    #[error("no fiber point of matching degree found within the search bound")]
    FiberDegreeSearchFailed,
    #[error("zeta argument s = {s} is not in the convergence region (requires s > {dim})")]
    DivergentRegion { s: i64, dim: usize },
    #[error("formula requires all local exponents positive, but a point with exponent 0 exists")]
    ZeroNu,
    #[error("variety is not smooth (a cone has determinant != 1)")]
    NotSmooth,
    #[error("twist class does not pair positively with the positivity witness")]
    InvalidTwist,
    #[error("fan is invalid: {0}")]
    FanInvalid(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code: 2 for validation-type failures, 3 when a cap is exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }
}
