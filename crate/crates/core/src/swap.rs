//! Entanglement swapping by an unambiguous Bell measurement.
//!
//! The two qubits at a node interact with a coherent field in one cavity
//! for half a collapse period (`τ = 1/2`), the field is read out by homodyne
//! detection, and the process is repeated with a second cavity whose field is
//! rotated by `π/2`. The two signal/no-signal results name the Bell state.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::dynamics::{rotated_coherent, tcm_propagate, BellCoeffs, TcmParams};
use crate::fockcore::{bell, make_coherent, qop, HalfLine, QuadratureBasis, Qubit2, TwoQubitDensity, TwoQubitOp};
use crate::math::{cis, C64, I, ZERO};
use crate::{Error, Result};

/// Homodyne result of one cavity. `Signal` means the field was found in the
/// half-plane of the unrotated coherent state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Detector {
    Signal,
    NoSignal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PsiMinus,
    PhiMinus,
    PhiPlus,
    PsiPlus,
}

impl BellLabel {
    pub fn state(self) -> Qubit2 {
        match self {
            BellLabel::PsiMinus => bell::psi_minus(),
            BellLabel::PhiMinus => bell::phi_minus(),
            BellLabel::PhiPlus => bell::phi_plus(),
            BellLabel::PsiPlus => bell::psi_plus(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapOutcome {
    pub pattern: (Detector, Detector),
    pub label: BellLabel,
    /// Phase the projected pair carries; removed by the classical consumer.
    pub phase: (f64, f64),
}

impl SwapOutcome {
    pub fn phase(&self) -> C64 {
        C64::new(self.phase.0, self.phase.1)
    }
}

/// Pattern → Bell state table, in the order `SS, SN, NS, NN`.
pub const OUTCOMES: [SwapOutcome; 4] = [
    SwapOutcome { pattern: (Detector::Signal, Detector::Signal), label: BellLabel::PsiMinus, phase: (-1.0, 0.0) },
    SwapOutcome { pattern: (Detector::Signal, Detector::NoSignal), label: BellLabel::PhiMinus, phase: (0.0, 1.0) },
    SwapOutcome { pattern: (Detector::NoSignal, Detector::Signal), label: BellLabel::PhiPlus, phase: (0.0, -1.0) },
    SwapOutcome { pattern: (Detector::NoSignal, Detector::NoSignal), label: BellLabel::PsiPlus, phase: (1.0, 0.0) },
];

fn outcome_index(first: Detector, second: Detector) -> usize {
    match (first, second) {
        (Detector::Signal, Detector::Signal) => 0,
        (Detector::Signal, Detector::NoSignal) => 1,
        (Detector::NoSignal, Detector::Signal) => 2,
        (Detector::NoSignal, Detector::NoSignal) => 3,
    }
}

/// Outcome probabilities `{|a₋|², |b₋|², |b₊|², |a₊|²}` in table order.
pub fn bell_measurement_analytic(c: &BellCoeffs) -> Result<[(SwapOutcome, f64); 4]> {
    let n = c.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n));
    }
    let p = [c.a_minus.norm_sqr(), c.b_minus.norm_sqr(), c.b_plus.norm_sqr(), c.a_plus.norm_sqr()];
    Ok(core::array::from_fn(|i| (OUTCOMES[i], p[i])))
}

/// One outcome of the Fock-space Bell measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub outcome: SwapOutcome,
    pub prob: f64,
    /// Fidelity of the conditional pair with the tabulated Bell state.
    pub fidelity: f64,
}

/// Number of excitations of each two-qubit basis state.
const N_EXC: [f64; 4] = [0.0, 1.0, 1.0, 2.0];

struct Cavity {
    basis: QuadratureBasis,
    /// `W[q_in][q_out][n]`: TCM output for `|q_in⟩|α⟩`.
    response: Vec<[Vec<C64>; 4]>,
    /// `⟨n|α₊⟩`, reference branch for the feed-forward phase.
    rotated: Vec<C64>,
}

impl Cavity {
    fn new(nbar: f64, dim: usize) -> Result<Self> {
        let alpha = C64::new(nbar.sqrt(), 0.0);
        let p = TcmParams::new(nbar, 0.5);
        let field = make_coherent(alpha, dim)?.state;
        let mut response = Vec::with_capacity(4);
        for q in 0..4 {
            let mut comps: [Vec<C64>; 4] = core::array::from_fn(|_| vec![ZERO; dim]);
            comps[q].copy_from_slice(field.amps());
            {
                let [a, b, c, d] = &mut comps;
                tcm_propagate([a, b, c, d], p.g_t());
            }
            response.push(comps);
        }
        let rotated = rotated_coherent(alpha, 0.5, nbar, 1.0, dim)?.into_amps();
        Ok(Self { basis: QuadratureBasis::new(dim)?, response, rotated })
    }

    /// Measures the field after the interaction. `frame` is the phase of the
    /// cavity field relative to the real axis. Returns unnormalized
    /// post-measurement qubit states for signal and no-signal.
    fn measure(&self, rho: &TwoQubitOp, frame: f64) -> [TwoQubitOp; 2] {
        let q: [C64; 4] = core::array::from_fn(|i| cis(frame * N_EXC[i]));
        // to the real-amplitude frame: Q† ρ Q
        let mut rho_r = *rho;
        for (i, row) in rho_r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v *= q[i].conj() * q[j];
            }
        }
        let mut out = [[[ZERO; 4]; 4]; 2];
        let x_a = qop::kron2(&[[ZERO, C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), ZERO]], &qop_identity2());
        for k in 0..self.basis.dim() {
            let v = self.basis.vector(k);
            let mut kraus = [[ZERO; 4]; 4];
            for (q_in, w) in self.response.iter().enumerate() {
                for (q_out, comp) in w.iter().enumerate() {
                    kraus[q_out][q_in] = comp.iter().zip(v).map(|(a, b)| a * b).sum();
                }
            }
            let side = match self.basis.side(k) {
                HalfLine::NonNegative => 0,
                HalfLine::Negative => 1,
            };
            if side == 1 {
                // the no-signal field still carries the branch phase; undo it on qubit A
                let amp: C64 = self.rotated.iter().zip(v).map(|(a, b)| a * b).sum();
                let th = amp.arg();
                let mut c = qop::identity();
                for (i, row) in c.iter_mut().enumerate() {
                    for (j, e) in row.iter_mut().enumerate() {
                        *e = *e * th.cos() - I * th.sin() * x_a[i][j];
                    }
                }
                kraus = qop::matmul(&c, &kraus);
            }
            let term = qop::matmul(&qop::matmul(&kraus, &rho_r), &qop::dagger(&kraus));
            for i in 0..4 {
                for j in 0..4 {
                    out[side][i][j] += term[i][j];
                }
            }
        }
        for o in out.iter_mut() {
            for (i, row) in o.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v *= q[i] * q[j].conj();
                }
            }
        }
        out
    }
}

fn qop_identity2() -> [[C64; 2]; 2] {
    [[C64::new(1.0, 0.0), ZERO], [ZERO, C64::new(1.0, 0.0)]]
}

/// Fock-space simulation of the two-cavity Bell measurement at `τ = 1/2`.
///
/// Each homodyne detection is resolved into quadrature eigen-outcomes whose
/// sign gives the signal pattern. On no-signal outcomes qubit A receives the
/// local correction `exp(−iθX)` with `θ = arg⟨x|α₊⟩`, which removes the
/// which-branch phase the field would otherwise leave behind.
pub fn bell_measurement_oracle(state: &TwoQubitDensity, nbar: f64, dim: usize) -> Result<[OracleOutcome; 4]> {
    if !(nbar > 0.0) {
        return Err(Error::Domain { name: "nbar", value: nbar });
    }
    let cav = Cavity::new(nbar, dim)?;
    let last = cav.response.iter().flat_map(|w| w.iter()).map(|c| c[dim - 2].norm_sqr() + c[dim - 1].norm_sqr()).sum::<f64>();
    if last > crate::tolerances::Tolerances::DEFAULT.cutoff_overflow {
        return Err(Error::CutoffOverflow { dim, mass: last });
    }
    let first = cav.measure(state.matrix(), 0.0);
    let mut res = [OracleOutcome { outcome: OUTCOMES[0], prob: 0.0, fidelity: 0.0 }; 4];
    for (s1, r1) in [Detector::Signal, Detector::NoSignal].into_iter().zip(first.iter()) {
        let second = cav.measure(r1, FRAC_PI_2);
        for (s2, r2) in [Detector::Signal, Detector::NoSignal].into_iter().zip(second.iter()) {
            let idx = outcome_index(s1, s2);
            let rho = TwoQubitDensity::from_matrix(*r2);
            let prob = rho.trace();
            let label = OUTCOMES[idx].label.state();
            let fidelity = if prob > 0.0 { rho.sandwich(&label, &label).re / prob } else { 0.0 };
            res[idx] = OracleOutcome { outcome: OUTCOMES[idx], prob, fidelity };
        }
    }
    Ok(res)
}

/// `½ Σ |p_i − q_i|`.
pub fn total_variation(p: &[f64; 4], q: &[f64; 4]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

/// Fidelity after one swap of two pairs of fidelity `F`: `1 − 2F(1−F)`.
pub fn swap_fidelity_map(f: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&f) {
        return Err(Error::Domain { name: "fidelity", value: f });
    }
    Ok(1.0 - 2.0 * f * (1.0 - f))
}

pub fn iterate_swaps(f0: f64, k: u32) -> Result<f64> {
    (0..k).try_fold(f0, |f, _| swap_fidelity_map(f))
}

/// `⌈log₂ n⌉` nested swap rounds for a chain of `n` links.
pub fn swap_rounds(n_links: u64) -> u32 {
    if n_links <= 1 {
        0
    } else {
        64 - (n_links - 1).leading_zeros()
    }
}

/// Bell measurement on the middle qubits of `|ab⟩_{A B₁} ⊗ |cd⟩_{B₂ C}`.
/// Returns, in table order, the probability and normalized `(A, C)` state of
/// each outcome.
pub fn swap_pure(ab: &Qubit2, bc: &Qubit2) -> [(SwapOutcome, f64, Qubit2); 4] {
    core::array::from_fn(|i| {
        let label = OUTCOMES[i].label.state();
        // ⟨label|_{B₁B₂} (|ab⟩ ⊗ |bc⟩) as a vector on (A, C)
        let mut out = [ZERO; 4];
        for a in 0..2 {
            for c in 0..2 {
                let mut s = ZERO;
                for b1 in 0..2 {
                    for b2 in 0..2 {
                        s += label[2 * b1 + b2].conj() * ab[2 * a + b1] * bc[2 * b2 + c];
                    }
                }
                out[2 * a + c] = s;
            }
        }
        let p: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        if p > 0.0 {
            let n = p.sqrt();
            out.iter_mut().for_each(|z| *z /= n);
        }
        (OUTCOMES[i], p, out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(v: Qubit2) -> BellCoeffs {
        BellCoeffs::from_state(&v)
    }

    #[test]
    fn analytic_table() {
        let d = bell_measurement_analytic(&coeffs(bell::psi_minus())).unwrap();
        assert_eq!(d[0].0.label, BellLabel::PsiMinus);
        assert!((d[0].1 - 1.0).abs() < 1e-15);
        let h = C64::new(0.5, 0.0);
        let c = BellCoeffs { a_minus: h, a_plus: h, b_minus: h, b_plus: h };
        let d = bell_measurement_analytic(&c).unwrap();
        assert!(d.iter().all(|(_, p)| (p - 0.25).abs() < 1e-15));
        let bad = BellCoeffs { a_minus: h, a_plus: h, b_minus: h, b_plus: ZERO };
        assert!(bell_measurement_analytic(&bad).is_err());
    }

    #[test]
    fn table_is_bijective() {
        for (i, a) in OUTCOMES.iter().enumerate() {
            for b in &OUTCOMES[i + 1..] {
                assert_ne!(a.pattern, b.pattern);
                assert_ne!(a.label, b.label);
            }
            assert!((a.phase().norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn three_node_composition() {
        let s = bell::psi_minus();
        let br = swap_pure(&s, &s);
        for (o, p, ac) in br {
            assert!((p - 0.25).abs() < 1e-15);
            // the distant pair is the same Bell state up to a Pauli frame
            let best = [bell::psi_minus(), bell::psi_plus(), bell::phi_minus(), bell::phi_plus()]
                .iter()
                .map(|b| qop::inner(b, &ac).norm_sqr())
                .fold(0.0, f64::max);
            assert!((best - 1.0).abs() < 1e-14, "{:?}", o.label);
        }
    }

    #[test]
    fn fidelity_map_examples() {
        assert_eq!(swap_fidelity_map(1.0).unwrap(), 1.0);
        assert_eq!(swap_fidelity_map(0.5).unwrap(), 0.5);
        assert!(swap_fidelity_map(0.4).is_err());
        assert_eq!(iterate_swaps(0.93, 0).unwrap(), 0.93);
        assert!((iterate_swaps(0.999, 1).unwrap() - 0.998002).abs() < 1e-12);
        let f6 = iterate_swaps(0.999, 6).unwrap();
        assert!((f6 - 0.93987).abs() < 1e-5, "{f6}");
    }

    #[test]
    fn round_counts() {
        assert_eq!(swap_rounds(1), 0);
        assert_eq!(swap_rounds(2), 1);
        assert_eq!(swap_rounds(60), 6);
        assert_eq!(swap_rounds(64), 6);
        assert_eq!(swap_rounds(100), 7);
    }

    #[test]
    fn oracle_singlet_lights_both_detectors() {
        let r = bell_measurement_oracle(&TwoQubitDensity::from_pure(&bell::psi_minus()), 100.0, 202).unwrap();
        assert!(r[0].prob >= 0.98 && r[0].fidelity >= 0.98, "{:?}", r[0]);
        let total: f64 = r.iter().map(|o| o.prob).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_dominant_patterns() {
        for (v, idx) in [(bell::psi_plus(), 3), (bell::phi_plus(), 2), (bell::phi_minus(), 1)] {
            let r = bell_measurement_oracle(&TwoQubitDensity::from_pure(&v), 100.0, 202).unwrap();
            let best = (0..4).max_by(|&a, &b| r[a].prob.partial_cmp(&r[b].prob).unwrap()).unwrap();
            assert_eq!(best, idx);
            let analytic = bell_measurement_analytic(&coeffs(v)).unwrap().map(|(_, p)| p);
            assert!(total_variation(&r.map(|o| o.prob), &analytic) <= 0.05);
        }
    }
}
