//! Resonant qubit–field propagators in the interaction picture.
//!
//! Convention: `|0⟩` is the ground and `|1⟩` the excited qubit level,
//! `σ₊ = |1⟩⟨0|`, and the couplings are `g(aσ₊ + a†σ₋)` for one qubit and
//! `g(aJ₊ + a†J₋)` with `J± = σ±⊗1 + 1⊗σ±` for two. Free evolution is
//! removed, so the mode frequency never enters.

mod jcm;
mod tcm;

pub use jcm::{jcm_approx, jcm_exact, jcm_propagate, JcmBranch, JcmBranches, JcmParams};
pub use tcm::{
    rotated_coherent, tcm_approx, tcm_exact, tcm_propagate, BellCoeffs, BranchField, TcmBranch, TcmBranches,
    TcmParams,
};

use crate::tolerances::Tolerances;
use crate::{Error, Result};

fn check_cutoff(comps: &[&[crate::C64]]) -> Result<()> {
    let dim = comps[0].len();
    let start = dim.saturating_sub(2);
    let mass: f64 = comps.iter().flat_map(|c| c[start..].iter()).map(|a| a.norm_sqr()).sum();
    if mass > Tolerances::DEFAULT.cutoff_overflow {
        return Err(Error::CutoffOverflow { dim, mass });
    }
    Ok(())
}
