use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Fock cutoff too small: {mass:.3e} population in the top levels (dim {dim})")]
    CutoffOverflow { dim: usize, mass: f64 },
    #[error("coherent state truncation tail {tail:.3e} exceeds tolerance {tol:.3e} at dim {dim}")]
    TruncationTail { dim: usize, tail: f64, tol: f64 },
    #[error("subsystem index {0} out of range")]
    SubsystemOutOfRange(usize),
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(&'static str),
    #[error("quadrature did not converge for element ({m}, {n})")]
    QuadratureFailed { m: usize, n: usize },
    #[error("interaction time outside the branch-approximation regime: g*tau = {g_tau}, bound {bound}")]
    RegimeViolation { g_tau: f64, bound: f64 },
    #[error("parameter {name} out of domain: {value}")]
    Domain { name: &'static str, value: f64 },
    #[error("state has weight {weight:.3e} outside the expected subspace (tolerance {tol:.3e})")]
    OutsideSupport { weight: f64, tol: f64 },
    #[error("success probability {0:.3e} too small to condition on")]
    NegligibleSuccess(f64),
    #[error("a trial would need about {0:.3e} chain realizations")]
    Unsimulable(f64),
    #[error("no interaction-time window: g*tau_min = {min} >= g*tau_max = {max}")]
    EmptyWindow { min: f64, max: f64 },
    #[error("degenerate purification input: f = g = 0")]
    DegenerateTrack,
    #[error("input is not normalized: norm^2 = {0}")]
    NotNormalized(f64),
    #[error("fidelity 1/2 cannot be purified")]
    Unpurifiable,
    #[error("accumulator overflow")]
    Overflow,
}

pub type Result<T> = core::result::Result<T, Error>;
