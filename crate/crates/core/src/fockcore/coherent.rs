#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;


use super::FockVector;
use crate::math::{cis, ln_factorial, C64};
use crate::{Error, Result};

/// Truncated coherent state and the population lost to the cutoff.
#[derive(Clone, Debug)]
pub struct Coherent {
    pub state: FockVector,
    pub tail_mass: f64,
}

/// `|α⟩` truncated to `dim` levels. Amplitudes are built in log space so
/// large `|α|` does not overflow `αⁿ` or `n!`.
pub fn make_coherent(alpha: C64, dim: usize) -> Result<Coherent> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    let r = alpha.norm();
    let amps: Vec<C64> = if r == 0.0 {
        (0..dim).map(|n| if n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect()
    } else {
        let (lr, ph) = (r.ln(), alpha.arg());
        (0..dim)
            .map(|n| {
                let mag = (-0.5 * r * r + n as f64 * lr - 0.5 * ln_factorial(n)).exp();
                cis(n as f64 * ph) * mag
            })
            .collect()
    };
    let state = FockVector::from_amps(amps)?;
    let tail_mass = (1.0 - state.norm_sqr()).max(0.0);
    Ok(Coherent { state, tail_mass })
}

/// Like [`make_coherent`] but rejects cutoffs whose truncation tail exceeds `tol`.
pub fn make_coherent_checked(alpha: C64, dim: usize, tol: f64) -> Result<Coherent> {
    let c = make_coherent(alpha, dim)?;
    if c.tail_mass > tol {
        return Err(Error::TruncationTail { dim, tail: c.tail_mass, tol });
    }
    Ok(c)
}

/// `⟨β|α⟩ = exp(−(|α|² + |β|²)/2 + β*α)`, no truncation.
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (-(alpha.norm_sqr() + beta.norm_sqr()) / 2.0 + beta.conj() * alpha).exp()
}

/// Cutoff `⌈n̄ + 10√n̄⌉ + 1`, rounded up to an even dimension so the
/// half-line quadrature grid has no node at the origin.
pub fn default_cutoff(nbar: f64) -> usize {
    let d = (nbar + 10.0 * nbar.sqrt()).ceil() as usize + 1;
    d + d % 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum() {
        let c = make_coherent(C64::new(0.0, 0.0), 8).unwrap();
        assert_eq!(c.state.amps()[0], C64::new(1.0, 0.0));
        assert_eq!(c.state.norm_sqr(), 1.0);
    }

    #[test]
    fn cutoff_default() {
        assert_eq!(default_cutoff(100.0), 202);
        assert_eq!(default_cutoff(0.0), 2);
        assert!(default_cutoff(50.0).is_multiple_of(2));
    }

    #[test]
    fn checked_rejects_short_cutoff() {
        assert!(make_coherent_checked(C64::new(10.0, 0.0), 50, 1e-12).is_err());
        assert!(make_coherent_checked(C64::new(10.0, 0.0), 256, 1e-12).is_ok());
    }

    #[test]
    fn overlap_vacuum() {
        let b = C64::new(1.3, -0.4);
        let o = coherent_overlap(C64::new(0.0, 0.0), b);
        assert!((o.re - (-b.norm_sqr() / 2.0).exp()).abs() < 1e-15);
        assert!(o.im.abs() < 1e-15);
    }
}
