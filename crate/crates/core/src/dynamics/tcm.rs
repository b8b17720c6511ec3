#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use super::check_cutoff;
use crate::fockcore::{bell, make_coherent, CompositeState, FockVector, Qubit2};
use crate::math::{cis, C64, ZERO};
use crate::{Error, Result};

/// Two qubits coupled symmetrically to one mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TcmParams {
    /// Coupling (rad/s); only needed to convert to seconds.
    pub g: f64,
    pub nbar: f64,
    /// Dimensionless time `τ = gt/(π√(4n̄+2))`.
    pub tau: f64,
}

impl TcmParams {
    pub fn new(nbar: f64, tau: f64) -> Self {
        Self { g: 1.0, nbar, tau }
    }

    /// `gt`.
    pub fn g_t(&self) -> f64 {
        PI * self.tau * (4.0 * self.nbar + 2.0).sqrt()
    }

    /// Interaction time in seconds.
    pub fn seconds(&self) -> f64 {
        self.g_t() / self.g
    }

    /// Collapse window `1/4 ≤ τ ≤ 3/4`.
    pub fn in_collapse_regime(&self) -> bool {
        (0.25..=0.75).contains(&self.tau)
    }
}

/// Exact evolution of the four field components indexed by `|00⟩, |01⟩,
/// |10⟩, |11⟩`. The singlet is dark; the triplet block with `N` excitations,
/// basis `{|00⟩|N⟩, Ψ⁺|N−1⟩, |11⟩|N−2⟩}`, has couplings `√(2N)` and
/// `√(2(N−1))` and is exponentiated in closed form. Members that fall
/// outside the cutoff are dropped from the block Hamiltonian.
pub fn tcm_propagate(comps: [&mut [C64]; 4], g_t: f64) {
    let [c00, c01, c10, c11] = comps;
    let d = c00.len();
    let h = FRAC_1_SQRT_2;
    let singlet: Vec<C64> = (0..d).map(|n| (c01[n] - c10[n]) * h).collect();
    let mut triplet: Vec<C64> = (0..d).map(|n| (c01[n] + c10[n]) * h).collect();

    for big_n in 1..=d {
        // member k present iff its Fock index is inside [0, d)
        let has0 = big_n < d;
        let has2 = big_n >= 2;
        let a = if has0 { (2.0 * big_n as f64).sqrt() } else { 0.0 };
        let b = if has2 { (2.0 * (big_n - 1) as f64).sqrt() } else { 0.0 };
        let omega = (a * a + b * b).sqrt();
        if omega == 0.0 {
            continue;
        }
        let v = [
            if has0 { c00[big_n] } else { ZERO },
            triplet[big_n - 1],
            if has2 { c11[big_n - 2] } else { ZERO },
        ];
        let (ca, cb) = (a / omega, b / omega);
        // U = v0v0ᵀ + e^{−iΩgt}v₊v₊ᵀ + e^{iΩgt}v₋v₋ᵀ, v0 = (cb, 0, −ca),
        // v± = (ca, ±1, cb)/√2
        let (cs, sn) = ((omega * g_t).cos(), (omega * g_t).sin());
        let cosw = C64::new(cs, 0.0);
        let isin = C64::new(0.0, -sn);
        let proj0 = cb * v[0] - ca * v[2];
        let plus = ca * v[0] + cb * v[2];
        let out = [
            cb * proj0 + ca * (cosw * plus + isin * v[1]),
            isin * plus + cosw * v[1],
            -ca * proj0 + cb * (cosw * plus + isin * v[1]),
        ];
        if has0 {
            c00[big_n] = out[0];
        }
        triplet[big_n - 1] = out[1];
        if has2 {
            c11[big_n - 2] = out[2];
        }
    }
    for n in 0..d {
        c01[n] = (triplet[n] + singlet[n]) * h;
        c10[n] = (triplet[n] - singlet[n]) * h;
    }
}

/// Exact Tavis–Cummings evolution of `two_qubits ⊗ field`.
pub fn tcm_exact(two_qubits: Qubit2, field: &FockVector, p: &TcmParams) -> Result<CompositeState> {
    let mut comps: [Vec<C64>; 4] = core::array::from_fn(|q| field.amps().iter().map(|f| two_qubits[q] * f).collect());
    {
        let [a, b, c, e] = &mut comps;
        tcm_propagate([a, b, c, e], p.g_t());
    }
    check_cutoff(&[&comps[0], &comps[1], &comps[2], &comps[3]])?;
    CompositeState::from_field_components(&comps)
}

/// Bell-basis coefficients `a∓ = ⟨Ψ∓|ψ⟩`, `b∓ = ⟨Φ∓|ψ⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellCoeffs {
    pub a_minus: C64,
    pub a_plus: C64,
    pub b_minus: C64,
    pub b_plus: C64,
}

impl BellCoeffs {
    pub fn from_state(q: &Qubit2) -> Self {
        use crate::fockcore::qop::inner;
        Self {
            a_minus: inner(&bell::psi_minus(), q),
            a_plus: inner(&bell::psi_plus(), q),
            b_minus: inner(&bell::phi_minus(), q),
            b_plus: inner(&bell::phi_plus(), q),
        }
    }

    pub fn to_state(&self) -> Qubit2 {
        let mut out = [ZERO; 4];
        for (c, v) in [
            (self.a_minus, bell::psi_minus()),
            (self.a_plus, bell::psi_plus()),
            (self.b_minus, bell::phi_minus()),
            (self.b_plus, bell::phi_plus()),
        ] {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a_minus.norm_sqr() + self.a_plus.norm_sqr() + self.b_minus.norm_sqr() + self.b_plus.norm_sqr()
    }
}

/// Field attached to a branch: the untouched coherent state, or one of the
/// counter-rotating states `|α±⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BranchField {
    Coherent { alpha: f64 },
    Rotated { alpha: f64, sign: i8 },
}

/// `|α±⟩ = Σ coh_n(α) e^{±i2πτ[n̄+1+n−(n−n̄)²/(4n̄+2)]} |n⟩`.
pub fn rotated_coherent(alpha: C64, tau: f64, nbar: f64, sign: f64, dim: usize) -> Result<FockVector> {
    let mut v = make_coherent(alpha, dim)?.state;
    for (n, a) in v.amps_mut().iter_mut().enumerate() {
        let nf = n as f64;
        let dn = nf - nbar;
        *a *= cis(sign * 2.0 * PI * tau * (nbar + 1.0 + nf - dn * dn / (4.0 * nbar + 2.0)));
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TcmBranch {
    /// Unnormalized qubit part, coefficients included.
    pub qubits: Qubit2,
    pub field: BranchField,
}

/// Three-branch approximation of the evolved state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TcmBranches {
    pub params: TcmParams,
    pub branches: [TcmBranch; 3],
}

impl TcmBranches {
    pub fn reconstruct(&self, dim: usize) -> Result<CompositeState> {
        let mut comps: [Vec<C64>; 4] = core::array::from_fn(|_| vec![ZERO; dim]);
        let p = &self.params;
        for b in &self.branches {
            if b.qubits.iter().all(|c| *c == ZERO) {
                continue;
            }
            let f = match b.field {
                BranchField::Coherent { alpha } => make_coherent(C64::new(alpha, 0.0), dim)?.state,
                BranchField::Rotated { alpha, sign } => {
                    rotated_coherent(C64::new(alpha, 0.0), p.tau, p.nbar, sign as f64, dim)?
                }
            };
            for (comp, q) in comps.iter_mut().zip(b.qubits) {
                for (o, a) in comp.iter_mut().zip(f.amps()) {
                    *o += q * a;
                }
            }
        }
        CompositeState::from_field_components(&comps)
    }
}

/// Branch expansion for a real coherent input `α = √n̄`:
/// `(a₋Ψ⁻ + b₋Φ⁻)|α⟩ + (a₊−b₊)/2 (Ψ⁺ − Φ⁺_{2πτ})|α₊⟩ + (a₊+b₊)/2 (Ψ⁺ + Φ⁺_{−2πτ})|α₋⟩`.
pub fn tcm_approx(c: &BellCoeffs, p: &TcmParams) -> Result<TcmBranches> {
    if p.tau < 0.0 || !p.tau.is_finite() {
        return Err(Error::Domain { name: "tau", value: p.tau });
    }
    let alpha = p.nbar.sqrt();
    let combine = |x: C64, u: Qubit2, y: C64, v: Qubit2| -> Qubit2 { core::array::from_fn(|i| x * u[i] + y * v[i]) };
    let phase = 2.0 * PI * p.tau;
    let half = C64::new(0.5, 0.0);
    let one = C64::new(1.0, 0.0);
    let dark = combine(c.a_minus, bell::psi_minus(), c.b_minus, bell::phi_minus());
    let up = combine(one, bell::psi_plus(), -one, bell::phi_plus_at(phase));
    let down = combine(one, bell::psi_plus(), one, bell::phi_plus_at(-phase));
    let scale = |k: C64, v: Qubit2| -> Qubit2 { v.map(|x| k * x) };
    Ok(TcmBranches {
        params: *p,
        branches: [
            TcmBranch { qubits: dark, field: BranchField::Coherent { alpha } },
            TcmBranch { qubits: scale((c.a_plus - c.b_plus) * half, up), field: BranchField::Rotated { alpha, sign: 1 } },
            TcmBranch { qubits: scale((c.a_plus + c.b_plus) * half, down), field: BranchField::Rotated { alpha, sign: -1 } },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overlap(a: &CompositeState, b: &CompositeState) -> f64 {
        let (x, y) = (a.amplitudes().unwrap(), b.amplitudes().unwrap());
        let o: C64 = x.iter().zip(y).map(|(p, q)| p.conj() * q).sum();
        o.norm_sqr() / (a.trace() * b.trace())
    }

    #[test]
    fn singlet_is_dark() {
        let f = make_coherent(C64::new(10.0, 0.0), 202).unwrap().state;
        let s = tcm_exact(bell::psi_minus(), &f, &TcmParams::new(100.0, 0.5)).unwrap();
        let t = CompositeState::product(&bell::psi_minus(), &f).unwrap();
        let diff: f64 = s.amplitudes().unwrap().iter().zip(t.amplitudes().unwrap()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn zero_time_identity() {
        let f = make_coherent(C64::new(2.0, 0.0), 30).unwrap().state;
        let q = bell::phi_plus();
        let s = tcm_exact(q, &f, &TcmParams::new(4.0, 0.0)).unwrap();
        assert!((overlap(&s, &CompositeState::product(&q, &f).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_excitation_block() {
        // |00⟩|1⟩ couples to Ψ⁺|0⟩ at frequency √2 g
        let f = FockVector::number(6, 1).unwrap();
        let q = [C64::new(1.0, 0.0), ZERO, ZERO, ZERO];
        let gt = 0.3;
        let p = TcmParams { g: 1.0, nbar: 0.0, tau: gt / (PI * 2f64.sqrt()) };
        let s = tcm_exact(q, &f, &p).unwrap();
        let w = 2f64.sqrt() * gt;
        assert!((s.field_component(0).unwrap()[1].re - w.cos()).abs() < 1e-14);
        let psi_plus_amp = (s.field_component(1).unwrap()[0] + s.field_component(2).unwrap()[0]) * FRAC_1_SQRT_2;
        assert!((psi_plus_amp.im + w.sin()).abs() < 1e-14);
    }

    #[test]
    fn psi_plus_leaves_initial_field() {
        let f = make_coherent(C64::new(10.0, 0.0), 202).unwrap().state;
        let s = tcm_exact(bell::psi_plus(), &f, &TcmParams::new(100.0, 0.5)).unwrap();
        let mut w = 0.0;
        for q in 0..4 {
            let comp = FockVector::from_amps(s.field_component(q).unwrap().to_vec()).unwrap();
            w += f.inner(&comp).unwrap().norm_sqr();
        }
        assert!(w.sqrt() <= 0.02, "overlap {w}");
    }

    #[test]
    fn dark_coefficients_only() {
        let c = BellCoeffs { a_minus: C64::new(1.0, 0.0), a_plus: ZERO, b_minus: ZERO, b_plus: ZERO };
        let b = tcm_approx(&c, &TcmParams::new(100.0, 0.5)).unwrap();
        assert!(b.branches[1].qubits.iter().chain(&b.branches[2].qubits).all(|x| *x == ZERO));
        assert_eq!(b.branches[0].qubits, bell::psi_minus());
    }

    #[test]
    fn half_period_branch_states() {
        // at τ = 1/2, Φ⁺_{±π} = −Φ⁺
        let c = BellCoeffs { a_minus: ZERO, a_plus: C64::new(1.0, 0.0), b_minus: ZERO, b_plus: ZERO };
        let b = tcm_approx(&c, &TcmParams::new(100.0, 0.5)).unwrap();
        let expect_up: Qubit2 = core::array::from_fn(|i| (bell::psi_plus()[i] + bell::phi_plus()[i]) * 0.5);
        let expect_down: Qubit2 = core::array::from_fn(|i| (bell::psi_plus()[i] - bell::phi_plus()[i]) * 0.5);
        for i in 0..4 {
            assert!((b.branches[1].qubits[i] - expect_up[i]).norm() < 1e-15);
            assert!((b.branches[2].qubits[i] - expect_down[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn coefficient_round_trip() {
        let q: Qubit2 = [C64::new(0.1, 0.2), C64::new(-0.3, 0.4), C64::new(0.5, 0.0), C64::new(0.0, -0.6)];
        let back = BellCoeffs::from_state(&q).to_state();
        for i in 0..4 {
            assert!((back[i] - q[i]).norm() < 1e-15);
        }
    }
}
