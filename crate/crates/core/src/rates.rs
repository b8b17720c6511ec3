//! Closed-form repeater rates.
//!
//! A chain of `n` links of length `L₀`. Each link makes `2^N` raw pairs and
//! purifies them `N` times; links run in parallel and wait for the slowest,
//! then `⌈log₂ n⌉` parallel swap rounds join them and the end points purify
//! again until the fidelity exceeds `1 − ε`:
//!
//! ```text
//! R = 1 / (N̄ (T_link A_n + T_swap))
//! ```

#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::channel::{gamma_t_from_length, ChannelParams, C_FIBER};
use crate::entgen::{link_state, success_probability_gen};
use crate::math::{harmonic, ln_binomial, KahanSum};
use crate::purify::{purify_n, purify_step, purify_track_init};
use crate::swap::{iterate_swaps, swap_rounds};
use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// Timing floor applied to short links (s).
pub const SHORT_LINK_FLOOR: f64 = 10e-6;
/// Links shorter than this (km) use the floor.
pub const SHORT_LINK_KM: f64 = 2.0;
/// Atoms a node can load efficiently.
pub const MEMORY_ATOMS: u64 = 19;

/// Cavity-QED hardware constants. `gamma` is kept for reference only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hardware {
    /// Coupling (rad/s).
    pub g: f64,
    /// Cavity decay (rad/s).
    pub kappa: f64,
    /// Spontaneous emission (rad/s); not used by the rate model.
    pub gamma: f64,
    /// Homodyne detection time (s).
    pub t_det: f64,
    /// Signal speed (m/s).
    pub c_fiber: f64,
}

impl Hardware {
    fn from_mhz(g: f64, kappa: f64, gamma: f64) -> Self {
        let w = 2.0 * PI * 1e6;
        Self { g: g * w, kappa: kappa * w, gamma: gamma * w, t_det: 1.0 / (kappa * w), c_fiber: C_FIBER }
    }

    /// Trapped ion, `{g, κ, Γ} = 2π × {1.0, 0.05, 11.5}` MHz.
    pub fn casabone() -> Self {
        Self::from_mhz(1.0, 0.05, 11.5)
    }

    pub fn ritter() -> Self {
        Self::from_mhz(5.0, 3.0, 3.0)
    }

    pub fn reimann() -> Self {
        Self::from_mhz(18.0, 0.4, 5.2)
    }

    pub fn neuzner() -> Self {
        Self::from_mhz(7.6, 2.8, 3.0)
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "casabone" => Some(Self::casabone()),
            "ritter" => Some(Self::ritter()),
            "reimann" => Some(Self::reimann()),
            "neuzner" => Some(Self::neuzner()),
            _ => None,
        }
    }

    pub const PRESETS: [&'static str; 4] = ["casabone", "ritter", "reimann", "neuzner"];
}

/// How the fidelity of a purified link is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkFidelity {
    /// `max{f_N, g_N}` from the link's `(x, y)`.
    Computed,
    /// `1 − ε`, the link is assumed to reach the threshold.
    Nominal,
}

/// A whole inner chain used as one elementary link of an outer chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperLink {
    pub n_links: u64,
    pub l0_km: f64,
    pub rounds: u32,
    pub link_fidelity: LinkFidelity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeaterConfig {
    pub n_links: u64,
    pub l0_km: f64,
    /// Purification rounds per link.
    pub rounds: u32,
    pub hardware: Hardware,
    pub nbar: f64,
    pub g_tau: f64,
    pub eta: f64,
    /// Threshold `ε`; pairs with `F > 1 − ε` count as near-maximally entangled.
    pub epsilon: f64,
    pub link_fidelity: LinkFidelity,
    /// Purify at the end points after swapping.
    pub endpoint_purification: bool,
    pub super_link: Option<SuperLink>,
}

impl RepeaterConfig {
    pub fn new(n_links: u64, l0_km: f64, rounds: u32) -> Self {
        Self {
            n_links,
            l0_km,
            rounds,
            hardware: Hardware::casabone(),
            nbar: 100.0,
            g_tau: 4.0,
            eta: 1.0,
            epsilon: 1e-3,
            link_fidelity: LinkFidelity::Computed,
            endpoint_purification: true,
            super_link: None,
        }
    }

    /// Atoms a node must hold to purify `2^N` pairs in parallel.
    pub fn atoms_per_node(&self) -> u64 {
        1u64 << self.rounds
    }

    pub fn exceeds_memory(&self) -> bool {
        self.atoms_per_node() > MEMORY_ATOMS
    }

    pub fn total_km(&self) -> f64 {
        self.n_links as f64 * self.l0_km
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_links == 0 {
            return Err(Error::Domain { name: "n_links", value: 0.0 });
        }
        for (name, v) in [("l0_km", self.l0_km), ("nbar", self.nbar), ("g", self.hardware.g), ("kappa", self.hardware.kappa)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain { name, value: v });
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Domain { name: "epsilon", value: self.epsilon });
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Domain { name: "eta", value: self.eta });
        }
        if self.rounds > 30 {
            return Err(Error::Domain { name: "rounds", value: self.rounds as f64 });
        }
        Ok(())
    }

    fn short(&self) -> bool {
        self.l0_km < SHORT_LINK_KM
    }

    fn hop(&self) -> f64 {
        self.l0_km * 1e3 / self.hardware.c_fiber
    }

    fn inner(&self, s: &SuperLink) -> Self {
        Self {
            n_links: s.n_links,
            l0_km: s.l0_km,
            rounds: s.rounds,
            link_fidelity: s.link_fidelity,
            endpoint_purification: false,
            super_link: None,
            ..*self
        }
    }
}

/// Generation attempt: `T₁ = 1/g + 2/κ + 2L₀/c + T_det`.
pub fn t1(c: &RepeaterConfig) -> f64 {
    if c.short() {
        return SHORT_LINK_FLOOR;
    }
    let h = &c.hardware;
    1.0 / h.g + 2.0 / h.kappa + 2.0 * c.hop() + h.t_det
}

/// Purification attempt: `T₂ = 1/g + T_det + L₀/c`.
pub fn t2(c: &RepeaterConfig) -> f64 {
    if c.short() {
        return SHORT_LINK_FLOOR;
    }
    1.0 / c.hardware.g + c.hardware.t_det + c.hop()
}

/// `T_link = 2^N T₁ + (2^N − 1) T₂`.
pub fn t_link(c: &RepeaterConfig) -> f64 {
    let m = (c.rounds as f64).exp2();
    m * t1(c) + (m - 1.0) * t2(c)
}

/// `T_swap = ⌈log₂ n⌉ (√2/g + 2T_det + L₀/c)`, floored per round on short links.
pub fn t_swap(c: &RepeaterConfig) -> f64 {
    let k = swap_rounds(c.n_links) as f64;
    if c.short() {
        return k * SHORT_LINK_FLOOR;
    }
    k * (core::f64::consts::SQRT_2 / c.hardware.g + 2.0 * c.hardware.t_det + c.hop())
}

fn check_probability(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain { name: "P", value: p });
    }
    Ok(())
}

/// Expected maximum of `n` independent geometric variables with success
/// probability `P`, i.e. the mean number of rounds until every link of the
/// chain has succeeded once.
///
/// Sums `Σ_{k≥0} [1 − (1 − q^k)^n]` with `q = 1 − P`. For `−ln q < 10⁻⁴`
/// the Euler–Maclaurin form `H_n/λ + 1/2 (+ λ/12 for n = 1)` is used.
pub fn attempts_avg(n: u64, p: f64) -> Result<f64> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::Domain { name: "n", value: 0.0 });
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let lambda = -(-p).ln_1p();
    if lambda < 1e-4 {
        let extra = if n == 1 { lambda / 12.0 } else { 0.0 };
        return Ok(harmonic(n as usize) / lambda + 0.5 + extra);
    }
    let nf = n as f64;
    let rel = Tolerances::DEFAULT.series_rel;
    let mut sum = KahanSum::default();
    sum.add(1.0);
    let mut k = 1u64;
    loop {
        let qk = (-lambda * k as f64).exp();
        let term = -(nf * (-qk).ln_1p()).exp_m1();
        sum.add(term);
        if term < rel * sum.value() {
            break;
        }
        k += 1;
    }
    Ok(sum.value())
}

/// `Σ_{i=1}^n C(n,i)(−1)^{i+1}/(1 − (1−P)^i)`; loses precision quickly with
/// `n` and is kept as a cross-check.
pub fn attempts_avg_binomial(n: u64, p: f64) -> Result<f64> {
    check_probability(p)?;
    let mut sum = KahanSum::default();
    // exact integer coefficients while they fit; the alternating sum amplifies any rounding
    let mut exact: Option<u128> = Some(1);
    for i in 1..=n {
        exact = exact.and_then(|c| c.checked_mul((n - i + 1) as u128)).map(|c| c / i as u128);
        let c = match exact {
            Some(c) => c as f64,
            None => ln_binomial(n as usize, i as usize).exp(),
        };
        let denom = -((i as f64) * (-p).ln_1p()).exp_m1();
        let s = if i % 2 == 1 { 1.0 } else { -1.0 };
        sum.add(s * c / denom);
    }
    Ok(sum.value())
}

/// Extra purification at the end points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overhead {
    /// Rounds `j`.
    pub rounds: u32,
    /// Average pairs consumed, `N̄ = 2^j / P_Pur(j)`.
    pub n_bar: f64,
    /// `P_Pur(j)`.
    pub p_pur: f64,
    /// Fidelity after the extra rounds.
    pub fidelity: f64,
}

const MAX_ENDPOINT_ROUNDS: u32 = 64;

/// Smallest `j` with `max{f_j, g_j} > 1 − ε`, seeded with `x = 2F − 1`.
pub fn endpoint_overhead(f_after_swaps: f64, epsilon: f64) -> Result<Overhead> {
    if !(f_after_swaps > 0.5 && f_after_swaps <= 1.0) {
        return Err(Error::Unpurifiable);
    }
    let mut t = purify_track_init(2.0 * f_after_swaps - 1.0, 0.0)?;
    while t.fidelity() <= 1.0 - epsilon {
        if t.round >= MAX_ENDPOINT_ROUNDS {
            return Err(Error::Unpurifiable);
        }
        t = purify_step(&t)?;
    }
    let ln_n_bar = t.round as f64 * LN_2 - t.ln_overall;
    Ok(Overhead { rounds: t.round, n_bar: ln_n_bar.exp(), p_pur: t.overall_prob(), fidelity: t.fidelity() })
}

/// Repeaterless bound `−log₂(1−χ) · c/(2L)` for a channel of transmissivity
/// `χ` and length `L` km.
pub fn repeaterless_bound(chi: f64, length_km: f64, c_fiber: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&chi) {
        return Err(Error::Domain { name: "chi", value: chi });
    }
    if !(length_km > 0.0) {
        return Err(Error::Domain { name: "length_km", value: length_km });
    }
    Ok(-(-chi).ln_1p() / LN_2 * c_fiber / (2.0 * length_km * 1e3))
}

/// Bound for pure fiber loss plus mirror transmittance over `length_km`.
pub fn repeaterless_bound_fiber(length_km: f64, eta: f64, c_fiber: f64) -> Result<f64> {
    repeaterless_bound(eta * (-gamma_t_from_length(length_km)).exp(), length_km, c_fiber)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub total_km: f64,
    pub n_links: u64,
    pub l0_km: f64,
    pub rounds: u32,
    /// Link parameters before purification.
    pub x: f64,
    pub y: f64,
    /// Success probability of one raw pair.
    pub p_elementary: f64,
    /// `ln P` with `P = P_elem^{2^N} P_Pur`.
    pub ln_p: f64,
    pub link_fidelity: f64,
    pub swap_rounds: u32,
    pub fidelity_after_swaps: f64,
    pub t1: f64,
    pub t2: f64,
    pub t_link: f64,
    pub t_swap: f64,
    pub a_n: f64,
    pub j_extra: u32,
    pub n_bar: f64,
    pub f_final: f64,
    /// Pairs per second; 0 if below the representable range.
    pub r: f64,
    pub log10_r: f64,
    pub benchmark_rate: f64,
}

impl RateReport {
    pub fn p(&self) -> f64 {
        self.ln_p.exp()
    }
}

/// Success probability and seed `(x, y)` of one elementary link.
fn elementary(c: &RepeaterConfig) -> Result<(f64, f64, f64)> {
    match &c.super_link {
        None => {
            let ch = ChannelParams::from_length(c.l0_km, c.eta)?;
            let l = link_state(&ch, c.nbar, c.g_tau, 0.0)?;
            Ok((success_probability_gen(), l.x, l.y))
        }
        Some(s) => {
            let inner = repeater_rate(&c.inner(s))?;
            Ok((1.0 / inner.a_n, 2.0 * inner.fidelity_after_swaps - 1.0, 0.0))
        }
    }
}

pub fn repeater_rate(c: &RepeaterConfig) -> Result<RateReport> {
    c.validate()?;
    let (p_elem, x, y) = elementary(c)?;
    let track = purify_n(x, y, c.rounds)?;
    let ln_p = (c.rounds as f64).exp2() * p_elem.ln() + track.ln_overall;
    let link_fidelity = match c.link_fidelity {
        LinkFidelity::Computed => track.fidelity(),
        LinkFidelity::Nominal => 1.0 - c.epsilon,
    };
    let k = swap_rounds(c.n_links);
    let fidelity_after_swaps = iterate_swaps(link_fidelity.max(0.5), k)?;
    let overhead = if c.endpoint_purification {
        endpoint_overhead(fidelity_after_swaps, c.epsilon)?
    } else {
        Overhead { rounds: 0, n_bar: 1.0, p_pur: 1.0, fidelity: fidelity_after_swaps }
    };
    let (t1, t2, t_link, t_swap) = (t1(c), t2(c), t_link(c), t_swap(c));
    let p = ln_p.exp();
    let (a_n, log10_r) = if p > 0.0 {
        let a = attempts_avg(c.n_links, p)?;
        (a, -(overhead.n_bar * (t_link * a + t_swap)).log10())
    } else {
        // P below f64 range: A_n ≈ H_n/P and the swap time is negligible
        let ln_a = harmonic(c.n_links as usize).ln() - ln_p;
        (f64::INFINITY, -(overhead.n_bar.ln() + t_link.ln() + ln_a) / core::f64::consts::LN_10)
    };
    let total_km = c.total_km();
    let benchmark_rate = repeaterless_bound_fiber(total_km, c.eta, c.hardware.c_fiber)?;
    Ok(RateReport {
        total_km,
        n_links: c.n_links,
        l0_km: c.l0_km,
        rounds: c.rounds,
        x,
        y,
        p_elementary: p_elem,
        ln_p,
        link_fidelity,
        swap_rounds: k,
        fidelity_after_swaps,
        t1,
        t2,
        t_link,
        t_swap,
        a_n,
        j_extra: overhead.rounds,
        n_bar: overhead.n_bar,
        f_final: overhead.fidelity,
        r: libm::pow(10.0, log10_r),
        log10_r,
        benchmark_rate,
    })
}

/// Parameter sets of the reference scenarios.
pub mod presets {
    use super::*;

    fn links(total_km: f64, l0_km: f64) -> u64 {
        libm::round(total_km / l0_km).max(1.0) as u64
    }

    /// Single link, no swapping and no end-point purification.
    pub fn fig3(l0_km: f64, rounds: u32, eta: f64) -> RepeaterConfig {
        RepeaterConfig { eta, endpoint_purification: false, ..RepeaterConfig::new(1, l0_km, rounds) }
    }

    /// `L₀ = 3.5` km, `N ∈ {2, 4}`.
    pub fn fig4(total_km: f64, rounds: u32) -> RepeaterConfig {
        RepeaterConfig::new(links(total_km, 3.5), 3.5, rounds)
    }

    /// `L₀ ∈ {3.5, 7}` km, `N = 3`.
    pub fn fig5(total_km: f64, l0_km: f64) -> RepeaterConfig {
        RepeaterConfig::new(links(total_km, l0_km), l0_km, 3)
    }

    /// 0.3 km links at nominal fidelity, one round.
    pub fn fig6a(total_km: f64) -> RepeaterConfig {
        RepeaterConfig { link_fidelity: LinkFidelity::Nominal, ..RepeaterConfig::new(links(total_km, 0.3), 0.3, 1) }
    }

    /// 18 km chains of 60 fig6a links used as elementary links.
    pub fn fig6b(total_km: f64) -> RepeaterConfig {
        let inner = SuperLink { n_links: 60, l0_km: 0.3, rounds: 1, link_fidelity: LinkFidelity::Nominal };
        RepeaterConfig {
            link_fidelity: LinkFidelity::Nominal,
            super_link: Some(inner),
            ..RepeaterConfig::new(links(total_km, 18.0), 18.0, 1)
        }
    }

    /// 105 km with 30 links of 3.5 km and three rounds.
    pub fn km105() -> RepeaterConfig {
        RepeaterConfig::new(30, 3.5, 3)
    }
}
