//! Fiber-plus-mirror channel acting on the field leaving a cavity.
//!
//! Loss is a pure-loss channel with transmissivity `χ = η e^{−γT}`. On a
//! coherent branch it only rescales the amplitude; between two branches
//! `|αe^{∓iφ}⟩` it also multiplies the coherence by the decoherence factor
//! `F = exp{−|α|²(1−e^{−2iφ})(1−χ)}`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use crate::fockcore::{CompositeState, FockOperator};
use crate::math::{ln_binomial, C64};
use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// Signal speed in fiber (m/s).
pub const C_FIBER: f64 = 2.0e8;

/// Kilometres of fiber per unit of `γT`.
pub const KM_PER_GAMMA_T: f64 = 20.0 / (0.2 * LN_10);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Accumulated fiber loss exponent `γT`.
    pub gamma_t: f64,
    /// Mirror transmittance.
    pub eta: f64,
    /// Elementary link length (km), kept consistent with `gamma_t`.
    pub l0_km: f64,
    /// Signal speed (m/s).
    pub c_fiber: f64,
}

impl ChannelParams {
    pub fn new(gamma_t: f64, eta: f64) -> Result<Self> {
        if !(gamma_t >= 0.0) || !gamma_t.is_finite() {
            return Err(Error::Domain { name: "gamma_t", value: gamma_t });
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain { name: "eta", value: eta });
        }
        Ok(Self { gamma_t, eta, l0_km: length_from_gamma_t(gamma_t), c_fiber: C_FIBER })
    }

    pub fn from_length(l0_km: f64, eta: f64) -> Result<Self> {
        if !(l0_km >= 0.0) {
            return Err(Error::Domain { name: "l0_km", value: l0_km });
        }
        let mut p = Self::new(gamma_t_from_length(l0_km), eta)?;
        p.l0_km = l0_km;
        Ok(p)
    }

    pub fn lossless() -> Self {
        Self { gamma_t: 0.0, eta: 1.0, l0_km: 0.0, c_fiber: C_FIBER }
    }

    /// `χ = η e^{−γT}`.
    pub fn transmissivity(&self) -> f64 {
        self.eta * (-self.gamma_t).exp()
    }
}

/// `L₀ = 20γT/(0.2 ln 10)` km.
pub fn length_from_gamma_t(gamma_t: f64) -> f64 {
    KM_PER_GAMMA_T * gamma_t
}

pub fn gamma_t_from_length(l0_km: f64) -> f64 {
    l0_km / KM_PER_GAMMA_T
}

/// `√η e^{−γT/2} α`.
pub fn attenuate(alpha: C64, p: &ChannelParams) -> C64 {
    alpha * p.transmissivity().sqrt()
}

/// `F(T, η, φ) = exp{−n̄(1−e^{−2iφ})(1−χ)}`. With `F = x − iy` this gives the
/// link parameters directly.
pub fn decoherence_factor(p: &ChannelParams, phi: f64, nbar: f64) -> C64 {
    let one_minus = C64::new(1.0 - (2.0 * phi).cos(), (2.0 * phi).sin());
    (-one_minus * (nbar * (1.0 - p.transmissivity()))).exp()
}

/// Overlap between the two field branches arriving at the second node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldOverlap {
    /// `|exp{−χ n̄ (1−e^{−2iφ})}| = exp{−χ n̄ (1 − cos 2φ)}`.
    pub exact: f64,
    /// Small-angle form `exp{−χ g²τ²/2}`.
    pub approx: f64,
}

pub fn field_overlap_fstar(p: &ChannelParams, g_tau: f64, nbar: f64) -> FieldOverlap {
    let chi = p.transmissivity();
    let exact = if nbar > 0.0 {
        let phi = g_tau / (2.0 * nbar.sqrt());
        (-chi * nbar * (1.0 - (2.0 * phi).cos())).exp()
    } else {
        1.0
    };
    FieldOverlap { exact, approx: (-chi * g_tau * g_tau / 2.0).exp() }
}

/// Pure-loss channel on a truncated mode in Kraus form.
///
/// `K_l = Σ_n c_l(n) |n−l⟩⟨n|` with `c_l(n)² = C(n,l) χ^{n−l} (1−χ)^l`.
#[derive(Clone, Debug, PartialEq)]
pub struct LossChannel {
    chi: f64,
    dim: usize,
    // coeff[l][m] = c_l(m + l)
    coeff: Vec<Vec<f64>>,
}

impl LossChannel {
    pub fn new(chi: f64, dim: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&chi) {
            return Err(Error::Domain { name: "transmissivity", value: chi });
        }
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let rank = if chi == 1.0 { 1 } else { dim };
        let coeff = (0..rank)
            .map(|l| {
                (0..dim - l)
                    .map(|m| {
                        let n = m + l;
                        let mut ln = ln_binomial(n, l);
                        if m > 0 {
                            ln += m as f64 * chi.ln();
                        }
                        if l > 0 {
                            ln += l as f64 * (1.0 - chi).ln();
                        }
                        (0.5 * ln).exp()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { chi, dim, coeff })
    }

    pub fn from_params(p: &ChannelParams, dim: usize) -> Result<Self> {
        Self::new(p.transmissivity(), dim)
    }

    pub fn transmissivity(&self) -> f64 {
        self.chi
    }

    pub fn rank(&self) -> usize {
        self.coeff.len()
    }

    /// `max_n |Σ_l c_l(n)² − 1|`.
    pub fn completeness_defect(&self) -> f64 {
        (0..self.dim)
            .map(|n| {
                let s: f64 = self.coeff.iter().enumerate().filter(|(l, _)| *l <= n).map(|(l, c)| c[n - l].powi(2)).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Applies the channel to the field block `ρ[m][n]` of an operator
    /// stored with row stride `stride` at offsets `(r0, c0)`.
    fn apply_block(&self, src: &[C64], stride: usize, r0: usize, c0: usize, dst: &mut [C64]) {
        let d = self.dim;
        for (l, c) in self.coeff.iter().enumerate() {
            for m in 0..d - l {
                let row = (r0 + m + l) * stride + c0 + l;
                let cm = c[m];
                for n in 0..d - l {
                    dst[(r0 + m) * stride + c0 + n] += src[row + n] * (cm * c[n]);
                }
            }
        }
    }

    pub fn apply_field(&self, rho: &FockOperator) -> Result<FockOperator> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: rho.dim() });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        self.apply_block(rho.data(), self.dim, 0, 0, &mut out);
        FockOperator::from_fn(self.dim, |m, n| out[m * self.dim + n])
    }

    /// Applies the channel to the field factor of a qubits ⊗ field state.
    pub fn apply(&self, state: &CompositeState) -> Result<CompositeState> {
        if state.field_dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: state.field_dim() });
        }
        check_field_tail(state)?;
        let rho = state.density();
        let d = self.dim;
        let blocks = 1usize << state.n_qubits();
        let stride = blocks * d;
        let mut out = vec![C64::new(0.0, 0.0); stride * stride];
        for a in 0..blocks {
            for b in 0..blocks {
                self.apply_block(&rho, stride, a * d, b * d, &mut out);
            }
        }
        CompositeState::mixed(state.n_qubits(), d, out)
    }
}

fn check_field_tail(state: &CompositeState) -> Result<()> {
    let d = state.field_dim();
    if d < 3 {
        return Ok(());
    }
    let rho = state.density();
    let stride = state.total_dim();
    let mass: f64 = (0..1usize << state.n_qubits())
        .flat_map(|q| [q * d + d - 2, q * d + d - 1])
        .map(|i| rho[i * stride + i].re)
        .sum();
    if mass > Tolerances::DEFAULT.cutoff_overflow {
        return Err(Error::CutoffOverflow { dim: d, mass });
    }
    Ok(())
}

/// Pure-loss channel with transmissivity `η e^{−γT}` on the field factor.
pub fn amplitude_damping_channel(state: &CompositeState, p: &ChannelParams) -> Result<CompositeState> {
    LossChannel::from_params(p, state.field_dim())?.apply(state)
}
