//! Recurrence entanglement purification.
//!
//! Each round consumes two pairs. Both nodes apply the postselected operation
//! `M = |Ψ⁻⟩⟨Ψ⁻| + |Φ⁻⟩⟨Φ⁻|` to their two qubits, measure the second pair
//! and correct the first. On Bell-diagonal `(f, g, h)` tracks this is
//!
//! ```text
//! f' = f²/(f²+g²)   g' = g²/(f²+g²)   h' = h²/(f²+g²)   P = (f²+g²)/2
//! ```

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::fockcore::{bell, TwoQubitDensity, TwoQubitOp};
use crate::math::{C64, ZERO};
use crate::{Error, Result};

/// `M = |Ψ⁻⟩⟨Ψ⁻| + |Φ⁻⟩⟨Φ⁻|`.
pub fn m_gate() -> TwoQubitOp {
    let (psi, phi) = (bell::psi_minus(), bell::phi_minus());
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = psi[i] * psi[j].conj() + phi[i] * phi[j].conj();
        }
    }
    m
}

/// Which Bell state the track converges to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    PsiMinus,
    PsiPlus,
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationTrack {
    pub f: f64,
    pub g: f64,
    /// Cross term; defined from round 1 on.
    pub h: Option<f64>,
    pub round: u32,
    pub per_round_probs: Vec<f64>,
    /// `ln P_Pur`.
    pub ln_overall: f64,
    seed: (f64, f64),
}

impl PurificationTrack {
    /// Overall success probability `P_Pur`; may underflow to 0.
    pub fn overall_prob(&self) -> f64 {
        self.ln_overall.exp()
    }

    pub fn log10_overall(&self) -> f64 {
        self.ln_overall / core::f64::consts::LN_10
    }

    /// `max{f, g}`.
    pub fn fidelity(&self) -> f64 {
        self.f.max(self.g)
    }

    pub fn direction(&self) -> Direction {
        if self.f > self.g {
            Direction::PsiMinus
        } else if self.g > self.f {
            Direction::PsiPlus
        } else {
            Direction::Undefined
        }
    }
}

/// Round-0 track from the link parameters (the local rotation taking
/// `Φ⁻` to `Φ⁺` is implied).
pub fn purify_track_init(x: f64, y: f64) -> Result<PurificationTrack> {
    let r2 = x * x + y * y;
    if !(r2 <= 1.0 + 1e-12) {
        return Err(Error::Domain { name: "x^2 + y^2", value: r2 });
    }
    Ok(PurificationTrack {
        f: (1.0 + x) / 2.0,
        g: (1.0 - x) / 2.0,
        h: None,
        round: 0,
        per_round_probs: Vec::new(),
        ln_overall: 0.0,
        seed: (x, y),
    })
}

pub fn purify_step(track: &PurificationTrack) -> Result<PurificationTrack> {
    let (f2, g2) = (track.f * track.f, track.g * track.g);
    let s = f2 + g2;
    if s <= 0.0 {
        return Err(Error::DegenerateTrack);
    }
    let h = match track.h {
        None => {
            let (x, y) = track.seed;
            y * y / (2.0 + 2.0 * x * x)
        }
        Some(h) => h * h / s,
    };
    let p = s / 2.0;
    let mut per_round_probs = track.per_round_probs.clone();
    per_round_probs.push(p);
    Ok(PurificationTrack {
        f: f2 / s,
        g: g2 / s,
        h: Some(h),
        round: track.round + 1,
        per_round_probs,
        ln_overall: 2.0 * track.ln_overall + p.ln(),
        seed: track.seed,
    })
}

/// `N` rounds; `P_Pur = Π_k P_(k)^{2^{N−1−k}}` accumulated in log space.
pub fn purify_n(x: f64, y: f64, rounds: u32) -> Result<PurificationTrack> {
    let mut t = purify_track_init(x, y)?;
    for _ in 0..rounds {
        t = purify_step(&t)?;
    }
    Ok(t)
}

/// Four-qubit register in the order `A1, B1, A2, B2`.
struct Register {
    m: Vec<C64>,
}

const N4: usize = 16;

impl Register {
    fn product(p1: &TwoQubitDensity, p2: &TwoQubitDensity) -> Self {
        let mut m = vec![ZERO; N4 * N4];
        for i in 0..N4 {
            for j in 0..N4 {
                m[i * N4 + j] = p1.get(i >> 2, j >> 2) * p2.get(i & 3, j & 3);
            }
        }
        Self { m }
    }

    fn bits(i: usize) -> [usize; 4] {
        [(i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1]
    }

    fn index(b: [usize; 4]) -> usize {
        (b[0] << 3) | (b[1] << 2) | (b[2] << 1) | b[3]
    }

    /// Embeds a two-qubit operator acting on qubits `(q1, q2)`.
    fn embed(op: &TwoQubitOp, q1: usize, q2: usize) -> Vec<C64> {
        let mut out = vec![ZERO; N4 * N4];
        for i in 0..N4 {
            let b = Self::bits(i);
            for a in 0..2 {
                for c in 0..2 {
                    let amp = op[2 * a + c][2 * b[q1] + b[q2]];
                    if amp == ZERO {
                        continue;
                    }
                    let mut nb = b;
                    nb[q1] = a;
                    nb[q2] = c;
                    out[Self::index(nb) * N4 + i] += amp;
                }
            }
        }
        out
    }

    fn sandwich(&mut self, u: &[C64]) {
        let mut tmp = vec![ZERO; N4 * N4];
        for i in 0..N4 {
            for k in 0..N4 {
                let a = u[i * N4 + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N4 {
                    tmp[i * N4 + j] += a * self.m[k * N4 + j];
                }
            }
        }
        let mut out = vec![ZERO; N4 * N4];
        for i in 0..N4 {
            for j in 0..N4 {
                out[i * N4 + j] = (0..N4).map(|k| tmp[i * N4 + k] * u[j * N4 + k].conj()).sum();
            }
        }
        self.m = out;
    }

    /// Unnormalized state of `(A1, B1)` given `(A2, B2) = (i, j)`.
    fn condition(&self, i: usize, j: usize) -> TwoQubitDensity {
        let mut r = [[ZERO; 4]; 4];
        for (a, row) in r.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                let ra = Self::index([a >> 1, a & 1, i, j]);
                let rb = Self::index([b >> 1, b & 1, i, j]);
                *v = self.m[ra * N4 + rb];
            }
        }
        TwoQubitDensity::from_matrix(r)
    }
}

fn single(u: [[C64; 2]; 2], on_first: bool) -> TwoQubitOp {
    let id = [[C64::new(1.0, 0.0), ZERO], [ZERO, C64::new(1.0, 0.0)]];
    if on_first {
        crate::fockcore::qop::kron2(&u, &id)
    } else {
        crate::fockcore::qop::kron2(&id, &u)
    }
}

fn pauli_x_pow(k: usize) -> [[C64; 2]; 2] {
    let (o, z) = (C64::new(1.0, 0.0), ZERO);
    if k % 2 == 1 {
        [[z, o], [o, z]]
    } else {
        [[o, z], [z, o]]
    }
}

/// One purification round simulated on the full 16-dimensional register.
///
/// Each raw pair first gets `S ⊗ S` with `S = diag(1, i)`, mapping
/// `Φ⁻ → Φ⁺`. After `M` on `(A1, A2)` and `(B1, B2)` and the computational
/// measurement `(A2, B2) = (i, j)`, A1 is corrected by `X^{1⊕i}` and B1 by
/// `X^j`. Returns the outcome-averaged state and its total probability.
pub fn purify_oracle_step(pair1: &TwoQubitDensity, pair2: &TwoQubitDensity) -> Result<(TwoQubitDensity, f64)> {
    let (o, z) = (C64::new(1.0, 0.0), ZERO);
    let s = [[o, z], [z, C64::new(0.0, 1.0)]];
    let rot = crate::fockcore::qop::kron2(&s, &s);
    let mut reg = Register::product(&pair1.conjugated(&rot), &pair2.conjugated(&rot));
    let m = m_gate();
    reg.sandwich(&Register::embed(&m, 0, 2));
    reg.sandwich(&Register::embed(&m, 1, 3));
    let mut total = TwoQubitDensity::zero();
    let mut prob = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let branch = reg.condition(i, j);
            let p = branch.trace();
            if p <= 0.0 {
                continue;
            }
            let u = crate::fockcore::qop::matmul(&single(pauli_x_pow(1 ^ i), true), &single(pauli_x_pow(j), false));
            total = total.plus(&branch.conjugated(&u));
            prob += p;
        }
    }
    if prob <= 0.0 {
        return Err(Error::NegligibleSuccess(prob));
    }
    Ok((total.normalized(), prob))
}
