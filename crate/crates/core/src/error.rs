use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants map one-to-one onto the failure modes of the individual stages so
/// that the pipeline can downgrade a failing stage to a diagnostic instead of
/// aborting a batch.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial degree {0} exceeds the factorization cap")]
    DegreeTooLarge(usize),
    #[error("polynomial degree {0} outside the supported range")]
    DegreeOutOfRange(usize),
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("prime {0} is a bad prime for this curve")]
    BadPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("local solvability recursion exceeded depth bound {bound} at p = {p}")]
    DepthExceeded { p: u64, bound: u32 },
    #[error("sextic model has no rational Weierstrass point")]
    NoRationalWeierstrass,
    #[error("division by a non-invertible element")]
    NonInvertible,
    #[error("divisor does not reduce well modulo {0}")]
    BadReduction(u64),
    #[error("could not factor {0}")]
    FactoringFailed(String),
    #[error("abstract group quotient of size {size} exceeds cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("p = {0} divides the order of the reduced divisor")]
    PDividesOrder(u64),
    #[error("p-adic precision exhausted")]
    PrecisionLoss,
    #[error("auxiliary divisor meets a Weierstrass residue disk")]
    WeierstrassDisk,
    #[error("logarithm vanishes modulo p^2 at p = {0}")]
    ZeroLog(u64),
    #[error("prime {0} is unusable for Chabauty")]
    UnusablePrime(u64),
    #[error("prime {0} is too large for exhaustive local analysis")]
    PrimeTooLarge(u64),
    #[error("no separating prime up to {0}")]
    NoSeparatingPrime(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("i/o error: {0}")]
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
