#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::Matrix4;

use crate::math::{C64, ONE, ZERO};
use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// Two-qubit amplitudes in the basis `|00⟩, |01⟩, |10⟩, |11⟩` (first qubit leftmost).
pub type Qubit2 = [C64; 4];
/// Two-qubit operator in the same basis, row-major.
pub type TwoQubitOp = [[C64; 4]; 4];

/// Bell states. `Ψ± = (|01⟩ ± |10⟩)/√2`, `Φ±_φ = (e^{−iφ}|00⟩ ± e^{iφ}|11⟩)/√2`.
pub mod bell {
    use super::Qubit2;
    use crate::math::{cis, C64, ZERO};
    use core::f64::consts::FRAC_1_SQRT_2 as H;

    pub fn psi_minus() -> Qubit2 {
        [ZERO, C64::new(H, 0.0), C64::new(-H, 0.0), ZERO]
    }

    pub fn psi_plus() -> Qubit2 {
        [ZERO, C64::new(H, 0.0), C64::new(H, 0.0), ZERO]
    }

    pub fn phi_minus_at(phase: f64) -> Qubit2 {
        [cis(-phase) * H, ZERO, ZERO, -cis(phase) * H]
    }

    pub fn phi_plus_at(phase: f64) -> Qubit2 {
        [cis(-phase) * H, ZERO, ZERO, cis(phase) * H]
    }

    pub fn phi_minus() -> Qubit2 {
        phi_minus_at(0.0)
    }

    pub fn phi_plus() -> Qubit2 {
        phi_plus_at(0.0)
    }
}

/// `⟨v|w⟩`.
pub fn inner(v: &Qubit2, w: &Qubit2) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// `A ⊗ B` for single-qubit operators.
pub fn kron2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> TwoQubitOp {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

pub fn apply(u: &TwoQubitOp, v: &Qubit2) -> Qubit2 {
    let mut out = [ZERO; 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|j| u[i][j] * v[j]).sum();
    }
    out
}

pub fn matmul(a: &TwoQubitOp, b: &TwoQubitOp) -> TwoQubitOp {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn dagger(a: &TwoQubitOp) -> TwoQubitOp {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn identity() -> TwoQubitOp {
    let mut out = [[ZERO; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = ONE;
    }
    out
}

/// Two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitDensity {
    m: TwoQubitOp,
}

impl TwoQubitDensity {
    pub fn from_matrix(m: TwoQubitOp) -> Self {
        Self { m }
    }

    pub fn from_pure(v: &Qubit2) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = v[i] * v[j].conj();
            }
        }
        Self { m }
    }

    pub fn maximally_mixed() -> Self {
        let mut m = identity();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = C64::new(0.25, 0.0);
        }
        Self { m }
    }

    pub fn zero() -> Self {
        Self { m: [[ZERO; 4]; 4] }
    }

    pub fn matrix(&self) -> &TwoQubitOp {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[i][j]
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.m[i][i].re).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.m;
        for row in &mut m {
            for x in row {
                *x *= s;
            }
        }
        Self { m }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut m = self.m;
        for (row, o) in m.iter_mut().zip(&other.m) {
            for (a, b) in row.iter_mut().zip(o) {
                *a += b;
            }
        }
        Self { m }
    }

    /// Divides by the trace; a zero-trace matrix is returned unchanged.
    pub fn normalized(&self) -> Self {
        let t = self.trace();
        if t > 0.0 { self.scaled(1.0 / t) } else { *self }
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, u: &TwoQubitOp) -> Self {
        Self { m: matmul(&matmul(u, &self.m), &dagger(u)) }
    }

    /// `⟨v|ρ|w⟩`.
    pub fn sandwich(&self, v: &Qubit2, w: &Qubit2) -> C64 {
        let rw = apply(&self.m, w);
        inner(v, &rw)
    }

    /// `⟨v|ρ|v⟩` for a normalized `v`.
    pub fn fidelity_pure(&self, v: &Qubit2) -> f64 {
        self.sandwich(v, v).re
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        worst
    }

    fn as_na(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|i, j| self.m[i][j])
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = self.as_na();
        let h = (h + h.adjoint()) * C64::new(0.5, 0.0);
        let e = h.symmetric_eigen().eigenvalues;
        let mut v = [e[0], e[1], e[2], e[3]];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        v
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.hermitian_defect() > tol.density_hermitian {
            return Err(Error::InvalidDensity("not Hermitian"));
        }
        if (self.trace() - 1.0).abs() > tol.density_trace {
            return Err(Error::InvalidDensity("trace differs from 1"));
        }
        if self.eigenvalues()[0] < -tol.density_eigen {
            return Err(Error::InvalidDensity("negative eigenvalue"));
        }
        Ok(())
    }
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λᵢ` the square roots
/// of the eigenvalues of `√ρ ρ̃ √ρ`, `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn concurrence(rho: &TwoQubitDensity) -> Result<f64> {
    let tol = Tolerances::DEFAULT;
    let h = rho.as_na();
    let h = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&e| e < -tol.density_eigen) {
        return Err(Error::InvalidDensity("negative eigenvalue"));
    }
    // eigenvalues below tolerance are rounding noise; their square roots would not be
    let sqrt_diag = eig.eigenvalues.map(|e| C64::new(if e > tol.density_eigen { e.sqrt() } else { 0.0 }, 0.0));
    let v = &eig.eigenvectors;
    let sqrt_rho = v * Matrix4::from_diagonal(&sqrt_diag) * v.adjoint();
    // σ_y ⊗ σ_y is real: antidiagonal (-1, 1, 1, -1)
    let yy = Matrix4::from_fn(|i, j| {
        if i + j == 3 {
            C64::new(if i == 0 || i == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            ZERO
        }
    });
    // λ_i are the singular values of √ρ·√ρ̃ = √ρ (Y √ρ* Y)
    let m = sqrt_rho * yy * sqrt_rho.map(|z| z.conj()) * yy;
    let mut lam: [f64; 4] = {
        let e = m.singular_values();
        [e[0], e[1], e[2], e[3]]
    };
    lam.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_states_orthonormal() {
        let all = [bell::psi_minus(), bell::psi_plus(), bell::phi_minus(), bell::phi_plus()];
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let o = inner(a, b).norm();
                assert!((o - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn concurrence_of_bell_and_mixed() {
        let c = concurrence(&TwoQubitDensity::from_pure(&bell::psi_minus())).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let c = concurrence(&TwoQubitDensity::maximally_mixed()).unwrap();
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn concurrence_rejects_non_positive() {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = C64::new(1.5, 0.0);
        m[1][1] = C64::new(-0.5, 0.0);
        assert!(concurrence(&TwoQubitDensity::from_matrix(m)).is_err());
    }

    #[test]
    fn validate_flags() {
        let t = Tolerances::DEFAULT;
        assert!(TwoQubitDensity::maximally_mixed().validate(&t).is_ok());
        assert!(TwoQubitDensity::maximally_mixed().scaled(2.0).validate(&t).is_err());
    }
}
