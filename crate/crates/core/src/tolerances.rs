//! Numerical tolerances used across the crate, gathered in one record.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Population allowed in the top two Fock levels before a propagator
    /// reports a cutoff overflow.
    pub cutoff_overflow: f64,
    /// Projector idempotence / self-adjointness (operator max-norm).
    pub projector: f64,
    /// Trace and Hermiticity checks on density matrices.
    pub density_trace: f64,
    pub density_hermitian: f64,
    /// Most negative eigenvalue tolerated in a density matrix.
    pub density_eigen: f64,
    /// Kraus rank is truncated once the completeness defect drops below this.
    pub kraus_completeness: f64,
    /// Weight outside span{Ψ⁻, Φ⁻_φ} accepted by `extract_xy`.
    pub xy_support: f64,
    /// Success probability below which an oracle refuses to normalize.
    pub min_success: f64,
    /// Relative cutoff for the attempts series.
    pub series_rel: f64,
    /// Absolute error target for the adaptive half-line quadrature.
    pub quadrature_abs: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        cutoff_overflow: 1e-8,
        projector: 1e-10,
        density_trace: 1e-10,
        density_hermitian: 1e-12,
        density_eigen: 1e-10,
        kraus_completeness: 1e-12,
        xy_support: 0.05,
        min_success: 1e-6,
        series_rel: 1e-17,
        quadrature_abs: 1e-13,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
