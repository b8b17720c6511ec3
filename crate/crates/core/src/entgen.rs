//! Heralded entanglement between two remote qubits through one coherent field.
//!
//! Qubit A interacts with `|α⟩`, the field travels through the lossy channel
//! to qubit B (prepared in `|1⟩`), and postselecting the field on `|α_F⟩`
//! leaves the pair in
//!
//! ```text
//! ρ = ½[(1+x)|Ψ⁻⟩⟨Ψ⁻| + (1−x)|Φ⁻_φ⟩⟨Φ⁻_φ| + iy|Φ⁻_φ⟩⟨Ψ⁻| − iy|Ψ⁻⟩⟨Φ⁻_φ|]
//! ```
//!
//! with `x − iy = F(T, η, φ)`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::channel::{decoherence_factor, ChannelParams, LossChannel};
use crate::dynamics::jcm_propagate;
use crate::fockcore::{bell, make_coherent, CompositeState, Qubit2, TwoQubitDensity};
use crate::math::{C64, I, ZERO};
use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// Admissible range of `gτ`: `4√(e^{γT}/η) ≤ gτ ≪ 50√n̄`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: f64,
    /// Soft upper bound.
    pub max: f64,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        self.min >= self.max
    }

    pub fn contains(&self, g_tau: f64) -> bool {
        g_tau >= self.min && g_tau < self.max
    }
}

pub fn interaction_window(p: &ChannelParams, nbar: f64) -> Result<Window> {
    if !(p.eta > 0.0) {
        return Err(Error::Domain { name: "eta", value: p.eta });
    }
    Ok(Window { min: 4.0 * (p.gamma_t.exp() / p.eta).sqrt(), max: 50.0 * nbar.sqrt() })
}

/// Heralded two-qubit state, parameterized by `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkState {
    pub x: f64,
    pub y: f64,
    /// Phase `φ` of `|Φ⁻_φ⟩`.
    pub phi_qubit: f64,
    pub nbar: f64,
    pub g_tau: f64,
    pub channel: ChannelParams,
    /// Whether `gτ` was inside the interaction window.
    pub in_window: bool,
}

impl LinkState {
    /// A bare `(x, y)` state with no generation provenance.
    pub fn from_xy(x: f64, y: f64) -> Result<Self> {
        if x * x + y * y > 1.0 + 1e-12 {
            return Err(Error::Domain { name: "x^2 + y^2", value: x * x + y * y });
        }
        Ok(Self { x, y, phi_qubit: 0.0, nbar: 0.0, g_tau: 0.0, channel: ChannelParams::lossless(), in_window: true })
    }

    /// `|F(T, η, φ)| = √(x² + y²)`, also the concurrence of the state.
    pub fn coherence(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn density(&self) -> TwoQubitDensity {
        link_density(self.x, self.y, self.phi_qubit)
    }
}

fn link_density(x: f64, y: f64, phi: f64) -> TwoQubitDensity {
    let psi = bell::psi_minus();
    let phm = bell::phi_minus_at(phi);
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let pp = psi[i] * psi[j].conj();
            let ff = phm[i] * phm[j].conj();
            let fp = phm[i] * psi[j].conj();
            let pf = psi[i] * phm[j].conj();
            m[i][j] = (pp * (1.0 + x) + ff * (1.0 - x) + I * y * (fp - pf)) * 0.5;
        }
    }
    TwoQubitDensity::from_matrix(m)
}

/// Closed-form `(x, y)` for a link with `φ = gτ/(2√n̄)`.
pub fn link_state(p: &ChannelParams, nbar: f64, g_tau: f64, phi_qubit: f64) -> Result<LinkState> {
    if !(nbar > 0.0) {
        return Err(Error::Domain { name: "nbar", value: nbar });
    }
    let phi = g_tau / (2.0 * nbar.sqrt());
    let f = decoherence_factor(p, phi, nbar);
    let in_window = interaction_window(p, nbar).map(|w| w.contains(g_tau)).unwrap_or(false);
    Ok(LinkState { x: f.re, y: -f.im, phi_qubit, nbar, g_tau, channel: *p, in_window })
}

/// Heralding probability of the ideal protocol.
pub fn success_probability_gen() -> f64 {
    0.5
}

/// `(x, y)` read off a two-qubit density plus the weight outside
/// `span{|Ψ⁻⟩, |Φ⁻_φ⟩}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XyFit {
    pub x: f64,
    pub y: f64,
    pub residual: f64,
}

pub fn extract_xy(rho: &TwoQubitDensity, phi_qubit: f64) -> Result<XyFit> {
    let psi = bell::psi_minus();
    let phm = bell::phi_minus_at(phi_qubit);
    let w_psi = rho.sandwich(&psi, &psi).re;
    let w_phi = rho.sandwich(&phm, &phm).re;
    let residual = rho.trace() - w_psi - w_phi;
    let tol = Tolerances::DEFAULT.xy_support;
    if residual.abs() > tol {
        return Err(Error::OutsideSupport { weight: residual, tol });
    }
    let y = 2.0 * rho.sandwich(&phm, &psi).im;
    Ok(XyFit { x: w_psi - w_phi, y, residual })
}

/// Output of the Fock-space generation pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationOutcome {
    /// Conditional two-qubit state (normalized).
    pub rho: TwoQubitDensity,
    /// Probability of the heralding projection.
    pub success: f64,
}

/// Full density-matrix simulation of link generation.
///
/// Exact JCM on A, Kraus loss on the travelling field, exact JCM on B for
/// `gτ_B = gτ√χ` (so B rotates the attenuated field by the same angle),
/// projection on `|α_F⟩ = |√χ α⟩`. A fixed local `exp(−iβX)` on B removes
/// the dynamical phase mismatch between the two interactions.
pub fn generation_oracle(p: &ChannelParams, nbar: f64, g_tau: f64, dim: usize) -> Result<GenerationOutcome> {
    if !(nbar > 0.0) {
        return Err(Error::Domain { name: "nbar", value: nbar });
    }
    let alpha = nbar.sqrt();
    let chi = p.transmissivity();
    let field = make_coherent(C64::new(alpha, 0.0), dim)?.state;
    let mut ground = field.into_amps();
    let mut excited = vec![ZERO; dim];
    jcm_propagate(&mut ground, &mut excited, g_tau);
    let after_a = CompositeState::from_field_components(&[ground, excited])?;
    let lossy = LossChannel::new(chi, dim)?.apply(&after_a)?.density();

    let alpha_f = make_coherent(C64::new((chi * nbar).sqrt(), 0.0), dim)?.state;
    let vf = alpha_f.amps();
    let g_tau_b = g_tau * chi.sqrt();
    // W[b][n] = ⟨α_F| U_B |1⟩|n⟩ restricted to qubit B = b
    let mut w = [vec![ZERO; dim], vec![ZERO; dim]];
    for n in 0..dim {
        if n + 1 < dim {
            let th = g_tau_b * ((n + 1) as f64).sqrt();
            w[1][n] = vf[n].conj() * th.cos();
            w[0][n] = -I * th.sin() * vf[n + 1].conj();
        } else {
            w[1][n] = vf[n].conj();
        }
    }
    let phi = g_tau / (2.0 * alpha);
    let beta = (g_tau * alpha - g_tau_b * (chi * nbar).sqrt()) / 2.0 - phi / 2.0;
    let (cb, sb) = (C64::new(beta.cos(), 0.0), -I * beta.sin());
    let w = [
        w[0].iter().zip(&w[1]).map(|(a, b)| cb * a + sb * b).collect::<Vec<_>>(),
        w[0].iter().zip(&w[1]).map(|(a, b)| sb * a + cb * b).collect::<Vec<_>>(),
    ];

    let stride = 2 * dim;
    let mut m = [[ZERO; 4]; 4];
    for a in 0..2 {
        for a2 in 0..2 {
            // t[b][n] = Σ_m W[b][m] ρ^{a a2}[m][n]
            let mut t = [vec![ZERO; dim], vec![ZERO; dim]];
            for (b, tb) in t.iter_mut().enumerate() {
                for (mi, wm) in w[b].iter().enumerate() {
                    if *wm == ZERO {
                        continue;
                    }
                    let row = &lossy[(a * dim + mi) * stride + a2 * dim..][..dim];
                    for (o, r) in tb.iter_mut().zip(row) {
                        *o += wm * r;
                    }
                }
            }
            for b in 0..2 {
                for b2 in 0..2 {
                    m[2 * a + b][2 * a2 + b2] = t[b].iter().zip(&w[b2]).map(|(x, y)| x * y.conj()).sum();
                }
            }
        }
    }
    let raw = TwoQubitDensity::from_matrix(m);
    let success = raw.trace();
    if success < Tolerances::DEFAULT.min_success {
        return Err(Error::NegligibleSuccess(success));
    }
    Ok(GenerationOutcome { rho: raw.normalized(), success })
}

/// Ideal heralded state for a pure two-qubit vector (used as a reference).
pub fn pure_link(v: &Qubit2) -> TwoQubitDensity {
    TwoQubitDensity::from_pure(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockcore::concurrence;

    #[test]
    fn window_examples() {
        let w = interaction_window(&ChannelParams::lossless(), 100.0).unwrap();
        assert_eq!((w.min, w.max), (4.0, 500.0));
        let w = interaction_window(&ChannelParams::new(0.0, 0.25).unwrap(), 100.0).unwrap();
        assert!((w.min - 8.0).abs() < 1e-14);
        assert!(interaction_window(&ChannelParams::new(0.0, 0.0).unwrap(), 100.0).is_err());
        // the lower bound meets 50√n̄ at γT = 2 ln(50√n̄/4)
        let edge = 2.0 * (500.0f64 / 4.0).ln();
        let w = interaction_window(&ChannelParams::new(edge + 1e-9, 1.0).unwrap(), 100.0).unwrap();
        assert!(w.is_empty());
        let w = interaction_window(&ChannelParams::new(edge - 1e-3, 1.0).unwrap(), 100.0).unwrap();
        assert!(!w.is_empty());
    }

    #[test]
    fn link_state_examples() {
        let l = link_state(&ChannelParams::lossless(), 100.0, 4.0, 0.0).unwrap();
        assert_eq!((l.x, l.y), (1.0, 0.0));
        assert!(l.in_window);
        let l = link_state(&ChannelParams::new(0.006908, 1.0).unwrap(), 100.0, 4.0, 0.0).unwrap();
        assert!((l.x - 0.913).abs() < 0.002);
    }

    #[test]
    fn x_curve_crosses_zero_and_dips() {
        let xs: Vec<f64> = (0..=150)
            .map(|i| link_state(&ChannelParams::new(i as f64 * 1e-3, 1.0).unwrap(), 100.0, 4.0, 0.0).unwrap().x)
            .collect();
        assert!(xs.iter().any(|&x| x < -0.3));
        let first_neg = xs.iter().position(|&x| x < 0.0).unwrap();
        assert!(xs[..first_neg].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn density_and_extraction_round_trip() {
        for &(x, y, phi) in &[(0.3, 0.4, 0.0), (-0.5, 0.1, 0.7), (1.0, 0.0, 0.0), (0.0, -0.6, 1.3)] {
            let rho = link_density(x, y, phi);
            assert!((rho.trace() - 1.0).abs() < 1e-14);
            let fit = extract_xy(&rho, phi).unwrap();
            assert!((fit.x - x).abs() < 1e-14 && (fit.y - y).abs() < 1e-14);
            let c = concurrence(&rho).unwrap();
            assert!((c - f64::hypot(x, y)).abs() < 1e-10, "{c}");
        }
        let fit = extract_xy(&TwoQubitDensity::from_pure(&bell::psi_minus()), 0.0).unwrap();
        assert!((fit.x - 1.0).abs() < 1e-15 && fit.y.abs() < 1e-15);
        assert!(extract_xy(&TwoQubitDensity::from_pure(&bell::psi_plus()), 0.0).is_err());
    }

    #[test]
    fn oracle_lossless_is_singlet() {
        let out = generation_oracle(&ChannelParams::lossless(), 100.0, 4.0, 202).unwrap();
        assert!(out.rho.fidelity_pure(&bell::psi_minus()) >= 0.98);
        assert!((out.success - 0.5).abs() < 0.01, "{}", out.success);
    }

    #[test]
    fn oracle_matches_closed_form() {
        let p = ChannelParams::new(0.08, 1.0).unwrap();
        let out = generation_oracle(&p, 100.0, 4.0, 202).unwrap();
        let fit = extract_xy(&out.rho, 0.0).unwrap();
        let l = link_state(&p, 100.0, 4.0, 0.0).unwrap();
        assert!((fit.x - l.x).abs() < 0.02 && (fit.y - l.y).abs() < 0.02, "{fit:?} vs {l:?}");
    }

    #[test]
    fn no_interaction_is_separable() {
        let out = generation_oracle(&ChannelParams::lossless(), 25.0, 0.0, 80).unwrap();
        assert!(concurrence(&out.rho).unwrap() < 1e-8);
    }
}
