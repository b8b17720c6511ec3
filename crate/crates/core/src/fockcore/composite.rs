use alloc::vec;
use alloc::vec::Vec;


use super::{FockOperator, FockVector, TwoQubitDensity};
use crate::math::{C64, ZERO};
use crate::{Error, Result};

/// A factor of a qubits ⊗ field product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    Qubit(usize),
    Field,
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Pure(Vec<C64>),
    Mixed(Vec<C64>),
}

/// State of `n_qubits` qubits and one truncated field mode.
///
/// Basis index is `q * field_dim + n` with `q` the qubit register value,
/// qubit 0 being the most significant bit. A register without a field uses
/// `field_dim = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeState {
    n_qubits: usize,
    field_dim: usize,
    repr: Repr,
}

impl CompositeState {
    fn total(n_qubits: usize, field_dim: usize) -> usize {
        (1usize << n_qubits) * field_dim
    }

    pub fn pure(n_qubits: usize, field_dim: usize, amps: Vec<C64>) -> Result<Self> {
        if field_dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let n = Self::total(n_qubits, field_dim);
        if amps.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: amps.len() });
        }
        Ok(Self { n_qubits, field_dim, repr: Repr::Pure(amps) })
    }

    pub fn mixed(n_qubits: usize, field_dim: usize, rho: Vec<C64>) -> Result<Self> {
        if field_dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let n = Self::total(n_qubits, field_dim);
        if rho.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: rho.len() });
        }
        Ok(Self { n_qubits, field_dim, repr: Repr::Mixed(rho) })
    }

    /// `|q⟩ ⊗ |field⟩` from register amplitudes and a field vector.
    pub fn product(qubits: &[C64], field: &FockVector) -> Result<Self> {
        let n_qubits = qubits.len().trailing_zeros() as usize;
        if qubits.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << n_qubits, got: qubits.len() });
        }
        let d = field.dim();
        let mut amps = Vec::with_capacity(qubits.len() * d);
        for q in qubits {
            amps.extend(field.amps().iter().map(|f| q * f));
        }
        Self::pure(n_qubits, d, amps)
    }

    /// Pure state from one field vector per register value.
    pub fn from_field_components(comps: &[Vec<C64>]) -> Result<Self> {
        let n_qubits = comps.len().trailing_zeros() as usize;
        if comps.is_empty() || comps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << n_qubits, got: comps.len() });
        }
        let d = comps[0].len();
        let mut amps = Vec::with_capacity(comps.len() * d);
        for c in comps {
            if c.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: c.len() });
            }
            amps.extend_from_slice(c);
        }
        Self::pure(n_qubits, d, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn field_dim(&self) -> usize {
        self.field_dim
    }

    pub fn total_dim(&self) -> usize {
        Self::total(self.n_qubits, self.field_dim)
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Pure(a) => Some(a),
            Repr::Mixed(_) => None,
        }
    }

    /// `|⟨a|b⟩|²/(⟨a|a⟩⟨b|b⟩)` between two pure states.
    pub fn pure_fidelity(&self, other: &CompositeState) -> Result<f64> {
        let (Some(x), Some(y)) = (self.amplitudes(), other.amplitudes()) else {
            return Err(Error::InvalidDensity("pure state expected"));
        };
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        let o: C64 = x.iter().zip(y).map(|(p, q)| p.conj() * q).sum();
        Ok(o.norm_sqr() / (self.trace() * other.trace()))
    }

    /// Field amplitudes paired with register value `q` (pure states only).
    pub fn field_component(&self, q: usize) -> Option<&[C64]> {
        let d = self.field_dim;
        self.amplitudes().map(|a| &a[q * d..(q + 1) * d])
    }

    /// Dense density matrix, row-major.
    pub fn density(&self) -> Vec<C64> {
        match &self.repr {
            Repr::Mixed(r) => r.clone(),
            Repr::Pure(a) => {
                let n = a.len();
                let mut rho = vec![ZERO; n * n];
                for i in 0..n {
                    for j in 0..n {
                        rho[i * n + j] = a[i] * a[j].conj();
                    }
                }
                rho
            }
        }
    }

    pub fn into_mixed(self) -> Self {
        let rho = self.density();
        Self { n_qubits: self.n_qubits, field_dim: self.field_dim, repr: Repr::Mixed(rho) }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(a) => a.iter().map(|x| x.norm_sqr()).sum(),
            Repr::Mixed(r) => {
                let n = self.total_dim();
                (0..n).map(|i| r[i * n + i].re).sum()
            }
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        match &self.repr {
            Repr::Pure(_) => 0.0,
            Repr::Mixed(r) => {
                let n = self.total_dim();
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    for j in i..n {
                        worst = worst.max((r[i * n + j] - r[j * n + i].conj()).norm());
                    }
                }
                worst
            }
        }
    }

    /// Reduced two-qubit matrix; requires two qubits and no field left.
    pub fn to_two_qubit(&self) -> Result<TwoQubitDensity> {
        if self.n_qubits != 2 || self.field_dim != 1 {
            return Err(Error::DimensionMismatch { expected: 4, got: self.total_dim() });
        }
        let r = self.density();
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row.copy_from_slice(&r[i * 4..i * 4 + 4]);
        }
        Ok(TwoQubitDensity::from_matrix(m))
    }

    /// Field operator; requires that no qubits are left.
    pub fn to_field_operator(&self) -> Result<FockOperator> {
        if self.n_qubits != 0 {
            return Err(Error::DimensionMismatch { expected: self.field_dim, got: self.total_dim() });
        }
        let r = self.density();
        let d = self.field_dim;
        FockOperator::from_fn(d, |m, n| r[m * d + n])
    }
}

/// Traces out every subsystem not listed in `keep`. Kept qubits retain
/// their relative order; the result is always in density form.
pub fn partial_trace(state: &CompositeState, keep: &[Subsystem]) -> Result<CompositeState> {
    let nq = state.n_qubits;
    let d = state.field_dim;
    let mut keep_q = vec![false; nq];
    let mut keep_f = false;
    for s in keep {
        match *s {
            Subsystem::Qubit(i) if i < nq => keep_q[i] = true,
            Subsystem::Qubit(i) => return Err(Error::SubsystemOutOfRange(i)),
            Subsystem::Field => keep_f = true,
        }
    }
    if keep.is_empty() {
        return Err(Error::SubsystemOutOfRange(usize::MAX));
    }
    let kq: Vec<usize> = (0..nq).filter(|&i| keep_q[i]).collect();
    let tq: Vec<usize> = (0..nq).filter(|&i| !keep_q[i]).collect();
    let kd = if keep_f { d } else { 1 };
    let td = if keep_f { 1 } else { d };
    let nk = (1usize << kq.len()) * kd;
    let nt = (1usize << tq.len()) * td;

    // full index of (kept index, traced index)
    let full = |k: usize, t: usize| -> usize {
        let (kreg, kn) = (k / kd, k % kd);
        let (treg, tn) = (t / td, t % td);
        let mut reg = 0usize;
        for (pos, &q) in kq.iter().enumerate() {
            let bit = (kreg >> (kq.len() - 1 - pos)) & 1;
            reg |= bit << (nq - 1 - q);
        }
        for (pos, &q) in tq.iter().enumerate() {
            let bit = (treg >> (tq.len() - 1 - pos)) & 1;
            reg |= bit << (nq - 1 - q);
        }
        let n = if keep_f { kn } else { tn };
        reg * d + n
    };
    let index: Vec<usize> = (0..nk).flat_map(|k| (0..nt).map(move |t| (k, t))).map(|(k, t)| full(k, t)).collect();

    let mut out = vec![ZERO; nk * nk];
    match &state.repr {
        Repr::Pure(a) => {
            for k1 in 0..nk {
                for k2 in k1..nk {
                    let s: C64 = (0..nt).map(|t| a[index[k1 * nt + t]] * a[index[k2 * nt + t]].conj()).sum();
                    out[k1 * nk + k2] = s;
                    out[k2 * nk + k1] = s.conj();
                }
            }
        }
        Repr::Mixed(r) => {
            let n = state.total_dim();
            for k1 in 0..nk {
                for k2 in 0..nk {
                    out[k1 * nk + k2] = (0..nt).map(|t| r[index[k1 * nt + t] * n + index[k2 * nt + t]]).sum();
                }
            }
        }
    }
    CompositeState::mixed(kq.len(), kd, out)
}
