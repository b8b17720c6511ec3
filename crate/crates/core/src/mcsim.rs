//! Monte Carlo of the repeater chain.
//!
//! One trial delivers one end-to-end pair. A chain realization lets every
//! link retry independently (geometric number of attempts, each lasting
//! `T_link`), waits for the slowest link and then swaps. End-point
//! purification consumes chain realizations in batches of `2^j`; every
//! purification in the batch succeeds with its round probability `P_(k)`.
//!
//! Each trial draws from its own ChaCha stream (`seed`, stream = trial
//! index) and summaries only hold integer sums, so any partition of the
//! trials merges to bit-identical results.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::purify::{purify_step, purify_track_init};
use crate::rates::{repeater_rate, RateReport, RepeaterConfig};
use crate::{Error, Result};

/// Number of attempts (≥ 1) until the first success.
pub fn geometric_sample<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<u64> {
    Ok(attempt_law(p)?.sample(rng) + 1)
}

fn attempt_law(p: f64) -> Result<Geometric> {
    // p = 0 is accepted by the distribution but never terminates
    if !(p > 0.0) {
        return Err(Error::Domain { name: "P", value: p });
    }
    Geometric::new(p).map_err(|_| Error::Domain { name: "P", value: p })
}

/// Largest mean number of chain realizations per trial `from_config` accepts.
pub const MAX_CHAINS_PER_TRIAL: f64 = 1e6;

/// How failed end-point purifications are replaced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointPolicy {
    /// Any failure discards all `2^j` pairs of the batch; mean usage `2^j/P_Pur`.
    Batch,
    /// Only the failed pair's sub-tree is rebuilt; mean usage `2^j/Π_k P_(k)`.
    Subtree,
}

/// Everything a trial needs, extracted from the closed-form model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    pub n_links: u64,
    /// Per-attempt success probability of one link.
    pub p: f64,
    pub t_link: f64,
    pub t_swap: f64,
    /// `P_(k)` of the end-point purification rounds.
    pub endpoint_probs: Vec<f64>,
    pub policy: EndpointPolicy,
    pub final_fidelity: f64,
}

impl ChainModel {
    pub fn from_config(c: &RepeaterConfig) -> Result<(Self, RateReport)> {
        let r = repeater_rate(c)?;
        let p = r.p();
        if !(p > 0.0) {
            return Err(Error::NegligibleSuccess(p));
        }
        if !(r.n_bar <= MAX_CHAINS_PER_TRIAL) {
            return Err(Error::Unsimulable(r.n_bar));
        }
        let mut endpoint_probs = Vec::new();
        if r.j_extra > 0 {
            let mut t = purify_track_init(2.0 * r.fidelity_after_swaps - 1.0, 0.0)?;
            for _ in 0..r.j_extra {
                t = purify_step(&t)?;
            }
            endpoint_probs = t.per_round_probs;
        }
        let model = Self {
            n_links: r.n_links,
            p,
            t_link: r.t_link,
            t_swap: r.t_swap,
            endpoint_probs,
            policy: EndpointPolicy::Batch,
            final_fidelity: r.f_final,
        };
        Ok((model, r))
    }

    /// Bare chain of `n` links with unit attempt time and no swapping or
    /// purification, for checking `A_n`.
    pub fn attempts_only(n_links: u64, p: f64) -> Self {
        Self {
            n_links,
            p,
            t_link: 1.0,
            t_swap: 0.0,
            endpoint_probs: Vec::new(),
            policy: EndpointPolicy::Batch,
            final_fidelity: 1.0,
        }
    }
}

/// Detailed record of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Attempts of each link in the last chain realization.
    pub attempts_per_link: Vec<u64>,
    /// Slowest-link attempts of every chain realization.
    pub chain_maxima: Vec<u64>,
    pub total_link_time: f64,
    pub swap_time: f64,
    pub endpoint_pairs_used: u64,
    pub end_to_end_time: f64,
    pub final_fidelity: f64,
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Sampler<'a> {
    model: &'a ChainModel,
    geo: Geometric,
    accept: Vec<Bernoulli>,
    rng: ChaCha8Rng,
    last_links: Option<Vec<u64>>,
    maxima: Option<Vec<u64>>,
}

impl<'a> Sampler<'a> {
    fn new(model: &'a ChainModel, seed: u64, index: u64, record: bool) -> Result<Self> {
        let geo = attempt_law(model.p)?;
        let accept = model
            .endpoint_probs
            .iter()
            .map(|&p| Bernoulli::new(p).map_err(|_| Error::Domain { name: "P_k", value: p }))
            .collect::<Result<_>>()?;
        let (last_links, maxima) = if record { (Some(Vec::new()), Some(Vec::new())) } else { (None, None) };
        Ok(Self { model, geo, accept, rng: trial_rng(seed, index), last_links, maxima })
    }

    /// One chain realization; returns the slowest link's attempts.
    fn chain(&mut self) -> u64 {
        let mut worst = 0;
        if let Some(v) = self.last_links.as_mut() {
            v.clear();
        }
        for _ in 0..self.model.n_links {
            let a = self.geo.sample(&mut self.rng) + 1;
            worst = worst.max(a);
            if let Some(v) = self.last_links.as_mut() {
                v.push(a);
            }
        }
        if let Some(m) = self.maxima.as_mut() {
            m.push(worst);
        }
        worst
    }

    /// Builds one pair at purification level `level`; returns
    /// `(Σ chain maxima, chains used)`.
    fn pair(&mut self, level: usize) -> (u64, u64) {
        if level == 0 {
            return (self.chain(), 1);
        }
        match self.model.policy {
            EndpointPolicy::Subtree => {
                let (mut m, mut c) = (0, 0);
                loop {
                    let (m1, c1) = self.pair(level - 1);
                    let (m2, c2) = self.pair(level - 1);
                    m += m1 + m2;
                    c += c1 + c2;
                    if self.accept[level - 1].sample(&mut self.rng) {
                        return (m, c);
                    }
                }
            }
            EndpointPolicy::Batch => {
                let (mut m, mut c) = (0, 0);
                loop {
                    let batch = 1u64 << level;
                    for _ in 0..batch {
                        m += self.chain();
                    }
                    c += batch;
                    let mut ok = true;
                    for k in 0..level {
                        for _ in 0..(1u64 << (level - 1 - k)) {
                            ok &= self.accept[k].sample(&mut self.rng);
                        }
                    }
                    if ok {
                        return (m, c);
                    }
                }
            }
        }
    }
}

fn trial_counts(model: &ChainModel, seed: u64, index: u64) -> Result<(u64, u64)> {
    let mut s = Sampler::new(model, seed, index, false)?;
    Ok(s.pair(model.endpoint_probs.len()))
}

/// Replays trial `index` and keeps the per-link detail.
pub fn trial_record(model: &ChainModel, seed: u64, index: u64) -> Result<TrialRecord> {
    let mut s = Sampler::new(model, seed, index, true)?;
    let (m, c) = s.pair(model.endpoint_probs.len());
    let total_link_time = m as f64 * model.t_link;
    let swap_time = c as f64 * model.t_swap;
    Ok(TrialRecord {
        attempts_per_link: s.last_links.take().unwrap_or_default(),
        chain_maxima: s.maxima.take().unwrap_or_default(),
        total_link_time,
        swap_time,
        endpoint_pairs_used: c,
        end_to_end_time: total_link_time + swap_time,
        final_fidelity: model.final_fidelity,
    })
}

/// Exact integer sums over trials; `m` is the summed slowest-link attempts
/// and `c` the number of chain realizations of a trial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    pub sum_m: u128,
    pub sum_c: u128,
    pub sum_mm: u128,
    pub sum_cc: u128,
    pub sum_mc: u128,
}

impl Tally {
    fn push(&mut self, m: u64, c: u64) -> Result<()> {
        let (m, c) = (m as u128, c as u128);
        let add = |acc: &mut u128, v: u128| -> Result<()> {
            *acc = acc.checked_add(v).ok_or(Error::Overflow)?;
            Ok(())
        };
        self.trials = self.trials.checked_add(1).ok_or(Error::Overflow)?;
        add(&mut self.sum_m, m)?;
        add(&mut self.sum_c, c)?;
        add(&mut self.sum_mm, m.checked_mul(m).ok_or(Error::Overflow)?)?;
        add(&mut self.sum_cc, c * c)?;
        add(&mut self.sum_mc, m.checked_mul(c).ok_or(Error::Overflow)?)
    }

    /// Associative and commutative merge.
    pub fn merge(&self, other: &Tally) -> Result<Tally> {
        let f = |a: u128, b: u128| a.checked_add(b).ok_or(Error::Overflow);
        Ok(Tally {
            trials: self.trials.checked_add(other.trials).ok_or(Error::Overflow)?,
            sum_m: f(self.sum_m, other.sum_m)?,
            sum_c: f(self.sum_c, other.sum_c)?,
            sum_mm: f(self.sum_mm, other.sum_mm)?,
            sum_cc: f(self.sum_cc, other.sum_cc)?,
            sum_mc: f(self.sum_mc, other.sum_mc)?,
        })
    }
}

/// Runs trials `start..end` of the stream family `seed`.
pub fn run_block(model: &ChainModel, seed: u64, start: u64, end: u64) -> Result<Tally> {
    let mut t = Tally::default();
    for i in start..end {
        let (m, c) = trial_counts(model, seed, i)?;
        t.push(m, c)?;
    }
    Ok(t)
}

/// Estimates with standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub trials: u64,
    /// Mean slowest-link attempts per chain realization.
    pub a_n_hat: f64,
    pub a_n_se: f64,
    /// Mean chain realizations per delivered pair.
    pub n_bar_hat: f64,
    pub n_bar_se: f64,
    /// Delivered pairs per second.
    pub r_hat: f64,
    pub r_se: f64,
    pub f_hat: f64,
}

pub fn summarize(t: &Tally, model: &ChainModel) -> Result<McSummary> {
    if t.trials < 2 {
        return Err(Error::Domain { name: "trials", value: t.trials as f64 });
    }
    let k = t.trials as f64;
    let (sm, sc) = (t.sum_m as f64, t.sum_c as f64);
    let (smm, scc, smc) = (t.sum_mm as f64, t.sum_cc as f64, t.sum_mc as f64);
    let (mbar, cbar) = (sm / k, sc / k);
    let var = |s2: f64, mean: f64| ((s2 / k - mean * mean) * k / (k - 1.0)).max(0.0);

    let a = sm / sc;
    // ratio estimator: Var(Σm/Σc) ≈ Var(m − a c)/(k c̄²)
    let resid = ((smm - 2.0 * a * smc + a * a * scc) / (k - 1.0)).max(0.0);
    let a_se = (resid / k).sqrt() / cbar;

    let (tl, ts) = (model.t_link, model.t_swap);
    let t_mean = tl * mbar + ts * cbar;
    let t_second = tl * tl * smm / k + 2.0 * tl * ts * smc / k + ts * ts * scc / k;
    let t_var = ((t_second - t_mean * t_mean) * k / (k - 1.0)).max(0.0);
    let r = 1.0 / t_mean;
    Ok(McSummary {
        trials: t.trials,
        a_n_hat: a,
        a_n_se: a_se,
        n_bar_hat: cbar,
        n_bar_se: (var(scc, cbar) / k).sqrt(),
        r_hat: r,
        r_se: r * r * (t_var / k).sqrt(),
        f_hat: model.final_fidelity,
    })
}

/// Sequential driver.
pub fn simulate_chain(model: &ChainModel, trials: u64, seed: u64) -> Result<McSummary> {
    summarize(&run_block(model, seed, 0, trials)?, model)
}

/// Splits `0..trials` into fixed blocks of `block` trials.
pub fn blocks(trials: u64, block: u64) -> Vec<(u64, u64)> {
    let block = block.max(1);
    let mut out = vec![];
    let mut s = 0;
    while s < trials {
        let e = (s + block).min(trials);
        out.push((s, e));
        s = e;
    }
    out
}
