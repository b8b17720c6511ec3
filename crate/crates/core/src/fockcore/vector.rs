#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;


use crate::math::{C64, ZERO};
use crate::{Error, Result};

/// A (possibly subnormalized) state vector on `span{|0⟩, …, |dim−1⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyDimension);
        }
        Ok(Self { amps })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_amps(vec![ZERO; dim])
    }

    /// Number state `|n⟩`.
    pub fn number(dim: usize, n: usize) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        if n >= dim {
            return Err(Error::SubsystemOutOfRange(n));
        }
        v.amps[n] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn scale(&mut self, s: C64) {
        for a in &mut self.amps {
            *a *= s;
        }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let mut out = self.clone();
        if n > 0.0 {
            out.scale(C64::new(1.0 / n, 0.0));
        }
        out
    }

    /// Population in the top `levels` Fock levels.
    pub fn top_mass(&self, levels: usize) -> f64 {
        let start = self.dim().saturating_sub(levels);
        self.amps[start..].iter().map(|a| a.norm_sqr()).sum()
    }

    /// Mean photon number of the (unnormalized) amplitudes.
    pub fn mean_photons(&self) -> f64 {
        self.amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let v = FockVector::number(4, 2).unwrap();
        assert_eq!(v.dim(), 4);
        assert_eq!(v.norm_sqr(), 1.0);
        assert_eq!(v.mean_photons(), 2.0);
        assert!(FockVector::zeros(0).is_err());
        assert!(FockVector::number(3, 3).is_err());
        let w = FockVector::number(5, 2).unwrap();
        assert!(v.inner(&w).is_err());
    }
}
