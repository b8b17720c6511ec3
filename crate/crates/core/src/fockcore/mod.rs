//! Truncated Fock-space linear algebra.
//!
//! Everything here is dense: field cutoffs at desk scale stay below a few
//! hundred levels, so plain row-major storage is fine.

mod coherent;
mod composite;
mod homodyne;
mod operator;
mod qubits;
mod vector;

pub use coherent::{coherent_overlap, default_cutoff, make_coherent, make_coherent_checked, Coherent};
pub use composite::{partial_trace, CompositeState, Subsystem};
pub use homodyne::{
    halfline_element, hermite_functions, quad_halfline_projector, HalfLine, QuadratureBasis,
};
pub use operator::FockOperator;
pub use qubits::{bell, concurrence, Qubit2, TwoQubitDensity, TwoQubitOp};
pub use vector::FockVector;

/// Small fixed-size two-qubit helpers.
pub mod qop {
    pub use super::qubits::{apply, dagger, identity, inner, kron2, matmul};
}
