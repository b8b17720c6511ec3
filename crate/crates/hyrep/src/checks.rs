//! Oracle-versus-closed-form checks behind `hyrep oracle`.
//!
//! Each check runs a Fock-space simulation next to the analytic model and
//! reports the measured deviations against fixed limits.

use hyrep_core::channel::{amplitude_damping_channel, decoherence_factor, ChannelParams, LossChannel};
use hyrep_core::dynamics::{jcm_approx, jcm_exact, tcm_exact, BellCoeffs, JcmParams, TcmParams};
use hyrep_core::entgen::{extract_xy, generation_oracle, link_state, LinkState};
use hyrep_core::fockcore::{
    bell, default_cutoff, halfline_element, make_coherent, CompositeState, FockOperator, FockVector, HalfLine,
    Qubit2, QuadratureBasis, TwoQubitDensity,
};
use hyrep_core::math::{cis, C64};
use hyrep_core::purify::{purify_oracle_step, purify_step, purify_track_init};
use hyrep_core::swap::{bell_measurement_analytic, bell_measurement_oracle, total_variation};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CheckName {
    Jcm,
    Tcm,
    Channel,
    Entgen,
    Purify,
    Swap,
    Homodyne,
}

impl CheckName {
    pub const ALL: [CheckName; 7] = [
        CheckName::Jcm,
        CheckName::Tcm,
        CheckName::Channel,
        CheckName::Entgen,
        CheckName::Purify,
        CheckName::Swap,
        CheckName::Homodyne,
    ];

    /// Mean photon number used when none is given.
    pub fn default_nbar(self) -> f64 {
        match self {
            CheckName::Channel => 50.0,
            _ => 100.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `value ≤ limit`.
    Max,
    /// Passes when `value ≥ limit`.
    Min,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: CheckName,
    pub nbar: f64,
    pub dim: usize,
    pub metrics: Vec<Metric>,
    pub pass: bool,
}

impl CheckReport {
    fn new(check: CheckName, nbar: f64, dim: usize) -> Self {
        Self { check, nbar, dim, metrics: Vec::new(), pass: true }
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.push(name.into(), value, limit, Bound::Max);
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.push(name.into(), value, limit, Bound::Min);
    }

    fn push(&mut self, name: String, value: f64, limit: f64, bound: Bound) {
        let pass = match bound {
            Bound::Max => value <= limit,
            Bound::Min => value >= limit,
        };
        self.pass &= pass;
        self.metrics.push(Metric { name, value, limit, bound, pass });
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

pub fn run_check(check: CheckName, nbar: Option<f64>, dim: Option<usize>) -> CliResult<CheckReport> {
    let nbar = nbar.unwrap_or(check.default_nbar());
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(CliError::Usage(format!("nbar must be a non-negative number, got {nbar}")));
    }
    let dim = dim.unwrap_or_else(|| default_cutoff(nbar).max(8));
    match check {
        CheckName::Jcm => check_jcm(nbar, dim),
        CheckName::Tcm => check_tcm(nbar, dim),
        CheckName::Channel => check_channel(nbar, dim),
        CheckName::Entgen => check_entgen(nbar, dim),
        CheckName::Purify => check_purify(),
        CheckName::Swap => check_swap(nbar, dim),
        CheckName::Homodyne => check_homodyne(nbar, dim),
    }
}

fn max_amp_diff(a: &CompositeState, b: &CompositeState) -> f64 {
    match (a.amplitudes(), b.amplitudes()) {
        (Some(x), Some(y)) => x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max),
        _ => f64::INFINITY,
    }
}

const G_TAU: f64 = 4.0;

pub fn check_jcm(nbar: f64, dim: usize) -> CliResult<CheckReport> {
    let mut r = CheckReport::new(CheckName::Jcm, nbar, dim);
    let ground = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    if nbar == 0.0 {
        let vac = FockVector::number(dim, 0)?;
        let s = jcm_exact(ground, &vac, &JcmParams::from_g_tau(G_TAU, 1.0))?;
        r.at_most("ground_vacuum_drift", max_amp_diff(&s, &CompositeState::product(&ground, &vac)?), 1e-14);
        return Ok(r);
    }
    let p = JcmParams::from_g_tau(G_TAU, nbar);
    let alpha = C64::new(nbar.sqrt(), 0.0);
    let field = make_coherent(alpha, dim)?.state;
    for (label, q) in [("ground", ground), ("excited", [C64::new(0.0, 0.0), C64::new(1.0, 0.0)])] {
        let exact = jcm_exact(q, &field, &p)?;
        r.at_most(format!("norm_defect_{label}"), (exact.trace() - 1.0).abs(), 1e-12);
        let approx = jcm_approx(q, alpha, &p)?.reconstruct(dim)?;
        r.at_least(format!("fidelity_{label}"), exact.pure_fidelity(&approx)?, 0.99);
    }
    Ok(r)
}

pub fn check_tcm(nbar: f64, dim: usize) -> CliResult<CheckReport> {
    let mut r = CheckReport::new(CheckName::Tcm, nbar, dim);
    let p = TcmParams::new(nbar, 0.5);
    let field = make_coherent(C64::new(nbar.sqrt(), 0.0), dim)?.state;
    let singlet = bell::psi_minus();
    let s = tcm_exact(singlet, &field, &p)?;
    r.at_most("singlet_drift", max_amp_diff(&s, &CompositeState::product(&singlet, &field)?), 1e-12);
    let mixed: Qubit2 = [C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(-0.5, 0.0), C64::new(0.5, 0.0)];
    let t = tcm_exact(mixed, &field, &p)?;
    r.at_most("norm_defect", (t.trace() - 1.0).abs(), 1e-12);
    if nbar == 0.0 {
        let zero: Qubit2 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let u = tcm_exact(zero, &field, &p)?;
        r.at_most("ground_vacuum_drift", max_amp_diff(&u, &CompositeState::product(&zero, &field)?), 1e-14);
    }
    Ok(r)
}

pub fn check_channel(nbar: f64, dim: usize) -> CliResult<CheckReport> {
    let mut r = CheckReport::new(CheckName::Channel, nbar, dim);
    let mut worst_coh: f64 = 0.0;
    let mut worst_complete: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for (scale, phi, eta, gt) in [(1.0, 0.2, 1.0, 0.05), (0.5, 0.3, 0.8, 0.1), (0.2, 0.15, 0.7, 0.0), (1.0, 0.1, 0.9, 0.5)] {
        let nb = nbar * scale;
        let p = ChannelParams::new(gt, eta)?;
        let ch = LossChannel::from_params(&p, dim)?;
        worst_complete = worst_complete.max(ch.completeness_defect());
        // |a⟩⟨b| ↦ ⟨b|a⟩^{1−χ} |√χ a⟩⟨√χ b|
        let alpha = C64::new(nb.sqrt(), 0.0);
        let (a, b) = (alpha * cis(-phi), alpha * cis(phi));
        let (va, vb) = (make_coherent(a, dim)?.state, make_coherent(b, dim)?.state);
        let op = FockOperator::from_fn(dim, |m, n| va.amps()[m] * vb.amps()[n].conj())?;
        let out = ch.apply_field(&op)?;
        let s = p.transmissivity().sqrt();
        let (wa, wb) = (make_coherent(a * s, dim)?.state, make_coherent(b * s, dim)?.state);
        let got = wa.inner(&out.apply(&wb)?)?;
        worst_coh = worst_coh.max((got - decoherence_factor(&p, phi, nb)).norm());

        let q = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let state = CompositeState::product(&q, &make_coherent(alpha, dim)?.state)?;
        worst_trace = worst_trace.max((amplitude_damping_channel(&state, &p)?.trace() - 1.0).abs());
    }
    r.at_most("coherence_error", worst_coh, 1e-6);
    r.at_most("kraus_completeness_defect", worst_complete, 1e-12);
    r.at_most("trace_defect", worst_trace, 1e-12);
    Ok(r)
}

/// `η × γT` grid of the link-parameter figure.
pub const ENTGEN_GRID: ([f64; 3], [f64; 5]) = ([1.0, 0.85, 0.7], [0.0, 0.0375, 0.075, 0.1125, 0.15]);

pub fn check_entgen(nbar: f64, dim: usize) -> CliResult<CheckReport> {
    if nbar <= 0.0 {
        return Err(CliError::Usage("entgen check needs nbar > 0".into()));
    }
    let mut r = CheckReport::new(CheckName::Entgen, nbar, dim);
    let (mut dx, mut dy, mut resid): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut success_dev: f64 = 0.0;
    let (etas, gts) = ENTGEN_GRID;
    for &eta in &etas {
        for &gt in &gts {
            let p = ChannelParams::new(gt, eta)?;
            let out = generation_oracle(&p, nbar, G_TAU, dim)?;
            let fit = extract_xy(&out.rho, 0.0)?;
            let l = link_state(&p, nbar, G_TAU, 0.0)?;
            dx = dx.max((fit.x - l.x).abs());
            dy = dy.max((fit.y - l.y).abs());
            resid = resid.max(fit.residual);
            success_dev = success_dev.max((out.success - 0.5).abs());
        }
    }
    r.at_most("max_dx", dx, 0.02);
    r.at_most("max_dy", dy, 0.02);
    r.at_most("max_support_residual", resid, 0.05);
    r.at_most("max_success_deviation", success_dev, 0.02);
    Ok(r)
}

/// Low-discrepancy `(x, y)` points in the unit disk.
pub fn disk_points(count: usize) -> Vec<(f64, f64)> {
    let (a1, a2) = (0.618_033_988_749_894_9, 0.754_877_666_246_692_7);
    (1..=count)
        .map(|k| {
            let u = (0.5 + k as f64 * a1).fract();
            let v = (0.5 + k as f64 * a2).fract();
            let x = 2.0 * u - 1.0;
            (x, (2.0 * v - 1.0) * (1.0 - x * x).sqrt())
        })
        .collect()
}

pub fn check_purify() -> CliResult<CheckReport> {
    let mut r = CheckReport::new(CheckName::Purify, 0.0, 2);
    let (pm, pp) = (bell::psi_minus(), bell::psi_plus());
    let (mut w, mut cross, mut succ, mut rec): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in disk_points(20) {
        let rho = LinkState::from_xy(x, y)?.density();
        let (out, p) = purify_oracle_step(&rho, &rho)?;
        let d = 2.0 + 2.0 * x * x;
        w = w.max((out.sandwich(&pm, &pm).re - (1.0 + x) * (1.0 + x) / d).abs());
        w = w.max((out.sandwich(&pp, &pp).re - (1.0 - x) * (1.0 - x) / d).abs());
        cross = cross.max((out.sandwich(&pm, &pp) - C64::new(y * y / d, 0.0)).norm());
        succ = succ.max((p - (1.0 + x * x) / 4.0).abs());
        let t = purify_step(&purify_track_init(x, y)?)?;
        rec = rec.max((t.f - out.sandwich(&pm, &pm).re).abs()).max((t.per_round_probs[0] - p).abs());
    }
    r.at_most("weight_error", w, 1e-10);
    r.at_most("cross_term_error", cross, 1e-10);
    r.at_most("success_error", succ, 1e-10);
    r.at_most("recurrence_error", rec, 1e-10);
    Ok(r)
}

pub fn check_swap(nbar: f64, dim: usize) -> CliResult<CheckReport> {
    if nbar <= 0.0 {
        return Err(CliError::Usage("swap check needs nbar > 0".into()));
    }
    let mut r = CheckReport::new(CheckName::Swap, nbar, dim);
    let inputs = [
        ("psi_minus", bell::psi_minus()),
        ("psi_plus", bell::psi_plus()),
        ("phi_plus", bell::phi_plus()),
        ("phi_minus", bell::phi_minus()),
    ];
    let mut worst_fid: f64 = 1.0;
    for (label, v) in inputs {
        let got = bell_measurement_oracle(&TwoQubitDensity::from_pure(&v), nbar, dim)?;
        let want = bell_measurement_analytic(&BellCoeffs::from_state(&v))?.map(|(_, p)| p);
        r.at_most(format!("tv_{label}"), total_variation(&got.map(|o| o.prob), &want), 0.05);
        for o in got.iter().filter(|o| o.prob > 0.5) {
            worst_fid = worst_fid.min(o.fidelity);
        }
    }
    r.at_least("min_conditional_fidelity", worst_fid, 0.95);
    Ok(r)
}

pub fn check_homodyne(nbar: f64, dim: usize) -> CliResult<CheckReport> {
    let mut r = CheckReport::new(CheckName::Homodyne, nbar, dim);
    let basis = QuadratureBasis::new(dim)?;
    let id = FockOperator::identity(dim)?;
    let (mut idem, mut herm, mut complete, mut elem): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for phase in [0.0, std::f64::consts::FRAC_PI_2] {
        let keep = basis.projector(phase, HalfLine::NonNegative);
        let drop = basis.projector(phase, HalfLine::Negative);
        for p in [&keep, &drop] {
            let (i, s) = p.projector_defects();
            idem = idem.max(i);
            herm = herm.max(s);
        }
        complete = complete.max(keep.add(&drop)?.max_abs_diff(&id)?);
    }
    let keep = basis.projector(0.0, HalfLine::NonNegative);
    for m in 0..6 {
        for n in 0..6 {
            elem = elem.max((keep.get(m, n).re - halfline_element(m, n, 1e-13)?).abs());
        }
    }
    r.at_most("idempotence_defect", idem, 1e-10);
    r.at_most("hermiticity_defect", herm, 1e-10);
    r.at_most("completeness_defect", complete, 1e-10);
    // the truncated spectral projector approaches the exact elements as 1/dim
    r.at_most("low_index_element_error", elem, 0.5 / dim as f64);
    if nbar > 0.0 {
        let alpha = make_coherent(C64::new(nbar.sqrt(), 0.0), dim)?.state;
        r.at_least("kept_branch_weight", keep.expectation(&alpha)?.re, 1.0 - 1e-6);
    }
    Ok(r)
}
