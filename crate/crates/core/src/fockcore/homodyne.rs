//! Quadrature measurement on a truncated mode.
//!
//! The rotated quadrature is `x_φ = (a e^{−iφ} + a† e^{iφ})/√2`. In the
//! truncated space its matrix is the tridiagonal Jacobi matrix of the
//! Hermite functions; its eigenvectors are `ψ_n(x_k)` at the eigenvalues
//! `x_k` (Gauss–Hermite nodes). Half-line projectors are sums over nodes on
//! one side, so they are exact orthogonal projectors in the truncated space.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;

use super::FockOperator;
use crate::math::{cis, C64, ZERO};
use crate::{Error, Result};

/// Which half of the quadrature axis a measurement outcome falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfLine {
    /// `x ≥ 0`
    NonNegative,
    /// `x < 0`
    Negative,
}

impl HalfLine {
    pub fn of(x: f64) -> Self {
        if x >= 0.0 { HalfLine::NonNegative } else { HalfLine::Negative }
    }
}

/// Oscillator eigenfunctions `ψ_0(x) … ψ_{count−1}(x)` by the three-term
/// recurrence `ψ_{n+1} = √(2/(n+1)) x ψ_n − √(n/(n+1)) ψ_{n−1}`, starting from
/// `ψ_0 = π^{−1/4} e^{−x²/2}`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut psi = vec![0.0; count];
    if count == 0 {
        return psi;
    }
    psi[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if count > 1 {
        psi[1] = 2f64.sqrt() * x * psi[0];
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        psi[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
    }
    psi
}

/// Eigenbasis of the truncated quadrature operator.
#[derive(Clone, Debug)]
pub struct QuadratureBasis {
    dim: usize,
    nodes: Vec<f64>,
    // row k holds the normalized eigenvector for nodes[k]
    vectors: Vec<f64>,
}

impl QuadratureBasis {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let jac = DMatrix::from_fn(dim, dim, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut raw: Vec<f64> = jac.symmetric_eigenvalues().iter().copied().collect();
        raw.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        // the spectrum is symmetric; enforce it so an odd grid has an exact 0
        let nodes: Vec<f64> = (0..dim).map(|k| 0.5 * (raw[k] - raw[dim - 1 - k])).collect();

        let mut vectors = vec![0.0; dim * dim];
        for (k, &x) in nodes.iter().enumerate() {
            // unnormalized recurrence from 1: avoids underflow of e^{−x²/2}
            let row = &mut vectors[k * dim..(k + 1) * dim];
            row[0] = 1.0;
            if dim > 1 {
                row[1] = 2f64.sqrt() * x;
            }
            for n in 1..dim.saturating_sub(1) {
                let nf = n as f64;
                row[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * row[n] - (nf / (nf + 1.0)).sqrt() * row[n - 1];
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
        Ok(Self { dim, nodes, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn side(&self, k: usize) -> HalfLine {
        HalfLine::of(self.nodes[k])
    }

    /// `⟨x_k; φ|ψ⟩` for the quadrature rotated by `phase`.
    pub fn amplitude(&self, k: usize, phase: f64, psi: &[C64]) -> C64 {
        let step = cis(-phase);
        let mut rot = C64::new(1.0, 0.0);
        let mut acc = ZERO;
        for (v, a) in self.vector(k).iter().zip(psi) {
            acc += rot * a * *v;
            rot *= step;
        }
        acc
    }

    /// Projector onto the half line `side` of `x_φ`.
    pub fn projector(&self, phase: f64, side: HalfLine) -> FockOperator {
        let d = self.dim;
        let mut real = vec![0.0; d * d];
        for k in (0..d).filter(|&k| self.side(k) == side) {
            let v = self.vector(k);
            for m in 0..d {
                let vm = v[m];
                let dst = &mut real[m * d..(m + 1) * d];
                for (o, vn) in dst.iter_mut().zip(v) {
                    *o += vm * vn;
                }
            }
        }
        let rot: Vec<C64> = (0..d).map(|n| cis(phase * n as f64)).collect();
        FockOperator::from_fn(d, |m, n| rot[m] * rot[n].conj() * real[m * d + n]).expect("dim > 0")
    }
}

/// Projector onto `x_φ ≥ 0` or `x_φ < 0` on `dim` Fock levels. The half
/// plane kept by `NonNegative` contains coherent states with phase `phase`.
/// For odd `dim` the node at the origin belongs to the non-negative side.
pub fn quad_halfline_projector(phase: f64, side: HalfLine, dim: usize) -> Result<FockOperator> {
    Ok(QuadratureBasis::new(dim)?.projector(phase, side))
}

/// `∫₀^∞ ψ_m(x) ψ_n(x) dx` by adaptive Simpson quadrature, untruncated.
pub fn halfline_element(m: usize, n: usize, tol: f64) -> Result<f64> {
    let count = m.max(n) + 1;
    let f = |x: f64| {
        let p = hermite_functions(x, count);
        p[m] * p[n]
    };
    // beyond the classical turning point the product decays like e^{−x²}
    let upper = (2.0 * count as f64 + 1.0).sqrt() + 12.0;
    let pieces = 8 * count;
    let h = upper / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson(&f, a, b, fa, fm, fb, whole, tol / pieces as f64, 40).ok_or(Error::QuadratureFailed { m, n })?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    Some(
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockcore::make_coherent;

    #[test]
    fn hermite_normalization() {
        // ∫ψ_n² over a fine grid
        for n in [0usize, 1, 5, 20] {
            let h = 1e-3;
            let s: f64 = (-20000..20000).map(|i| hermite_functions(i as f64 * h, n + 1)[n].powi(2) * h).sum();
            assert!((s - 1.0).abs() < 1e-9, "n={n} s={s}");
        }
    }

    #[test]
    fn vacuum_element_even_dim() {
        let p = quad_halfline_projector(0.0, HalfLine::NonNegative, 202).unwrap();
        assert!((p.get(0, 0).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn odd_dim_is_still_a_projector() {
        let p = quad_halfline_projector(0.7, HalfLine::NonNegative, 21).unwrap();
        let (i, h) = p.projector_defects();
        assert!(i < 1e-12 && h < 1e-14);
    }

    #[test]
    fn exact_elements_by_quadrature() {
        assert!((halfline_element(0, 0, 1e-13).unwrap() - 0.5).abs() < 1e-12);
        // ∫₀^∞ ψ₀ψ₁ = 1/√(2π)
        let e = halfline_element(0, 1, 1e-13).unwrap();
        assert!((e - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-12);
        // same parity, different index: zero
        assert!(halfline_element(1, 3, 1e-13).unwrap().abs() < 1e-12);
    }

    #[test]
    fn amplitude_matches_projector_weight() {
        let b = QuadratureBasis::new(40).unwrap();
        let psi = make_coherent(C64::new(1.0, 2.0), 40).unwrap().state;
        let phase = 0.3;
        let p = b.projector(phase, HalfLine::Negative);
        let via_p = p.expectation(&psi).unwrap().re;
        let via_amp: f64 = (0..40)
            .filter(|&k| b.side(k) == HalfLine::Negative)
            .map(|k| b.amplitude(k, phase, psi.amps()).norm_sqr())
            .sum();
        assert!((via_p - via_amp).abs() < 1e-12);
    }
}
