#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;


use super::FockVector;
use crate::math::{C64, ONE, ZERO};
use crate::{Error, Result};

/// Dense square operator, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    dim: usize,
    data: Vec<C64>,
}

impl FockOperator {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self { dim, data: vec![ZERO; dim * dim] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for n in 0..dim {
            op.data[n * dim + n] = ONE;
        }
        Ok(op)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for m in 0..dim {
            for n in 0..dim {
                op.data[m * dim + n] = f(m, n);
            }
        }
        Ok(op)
    }

    /// Annihilation operator `a`, truncated.
    pub fn annihilation(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |m, n| if n == m + 1 { C64::new((n as f64).sqrt(), 0.0) } else { ZERO })
    }

    /// Creation operator `a†`, truncated.
    pub fn creation(dim: usize) -> Result<Self> {
        Ok(Self::annihilation(dim)?.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.data[m * self.dim + n]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, v: C64) {
        self.data[m * self.dim + n] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = self.clone();
        for m in 0..d {
            for n in 0..d {
                out.data[m * d + n] = self.data[n * d + m].conj();
            }
        }
        out
    }

    fn check(&self, other_dim: usize) -> Result<()> {
        if self.dim != other_dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other_dim });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &FockOperator) -> Result<Self> {
        self.check(other.dim)?;
        let d = self.dim;
        let mut out = Self::zeros(d)?;
        for m in 0..d {
            for k in 0..d {
                let a = self.data[m * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                let dst = &mut out.data[m * d..(m + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        self.check(v.dim())?;
        let d = self.dim;
        let x = v.amps();
        let amps = (0..d)
            .map(|m| self.data[m * d..(m + 1) * d].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        FockVector::from_amps(amps)
    }

    pub fn add(&self, other: &FockOperator) -> Result<Self> {
        self.check(other.dim)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<Self> {
        self.check(other.dim)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, data })
    }

    /// Max-norm of the entrywise difference.
    pub fn max_abs_diff(&self, other: &FockOperator) -> Result<f64> {
        self.check(other.dim)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `max |P² − P|` and `max |P − P†|`.
    pub fn projector_defects(&self) -> (f64, f64) {
        let sq = self.matmul(self).expect("same dim");
        let idem = sq.max_abs_diff(self).expect("same dim");
        let herm = self.adjoint().max_abs_diff(self).expect("same dim");
        (idem, herm)
    }

    /// `⟨v|O|v⟩`.
    pub fn expectation(&self, v: &FockVector) -> Result<C64> {
        let ov = self.apply(v)?;
        v.inner(&ov)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|n| self.data[n * self.dim + n]).sum()
    }
}
