use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dense representation limited to {max} qubits, requested {requested}")]
    DimensionGuard { max: usize, requested: usize },

    #[error("invalid code size n = {0}: repetition codes need odd 3 <= n <= 63")]
    InvalidCodeSize(usize),

    #[error("truncation order m = {m} outside 1..={ell}")]
    TruncationOutOfRange { m: usize, ell: usize },

    #[error("stabilizer generators are linearly dependent over GF(2)")]
    DependentGenerators,

    #[error("syndrome has {got} bits, expected {expected}")]
    SyndromeLength { expected: usize, got: usize },

    #[error("codewords are not orthonormal (deviation {0:.3e})")]
    NonOrthonormalCodewords(f64),

    #[error("order guard: q + p = {sum} exceeds correctable weight {ell}")]
    OrderGuard { sum: usize, ell: usize },

    #[error("invalid ion parameters: {0}")]
    InvalidIonParams(String),

    #[error("invalid tone set: {0}")]
    InvalidTones(String),

    #[error("scheme is not permutation symmetric (weight {weight} rows differ)")]
    NonSymmetricScheme { weight: usize },

    #[error("time step guard: dt * total rate = {0:.4} exceeds 0.1")]
    TimeStepGuard(f64),

    #[error("state norm underflow during trajectory evolution")]
    NormUnderflow,

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("integrator failed to converge on [{t0}, {t1}]")]
    StepSizeFailure { t0: f64, t1: f64 },

    #[error("density matrix left the physical set: {0}")]
    Unphysical(String),

    #[error("uniformization failed: {0}")]
    Uniformization(String),

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("not enough code sizes: need at least {needed}, got {got}")]
    InsufficientSizes { needed: usize, got: usize },

    #[error("no crossing of p_L curves inside the swept range")]
    NoCrossing,

    #[error("no suppression: gamma_e = {gamma_e} >= gamma_e_star = {gamma_e_star}")]
    NoSuppression { gamma_e: f64, gamma_e_star: f64 },

    #[error("degenerate target: {0}")]
    DegenerateTarget(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
