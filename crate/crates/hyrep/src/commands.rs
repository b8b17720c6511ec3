//! Data products of the subcommands, kept free of argument parsing and IO.

use hyrep_core::channel::{field_overlap_fstar, ChannelParams};
use hyrep_core::entgen::link_state;
use hyrep_core::mcsim::{summarize, ChainModel, EndpointPolicy, McSummary};
use hyrep_core::purify::{purify_track_init, purify_step};
use hyrep_core::rates::{attempts_avg, repeater_rate, RateReport, RepeaterConfig};
use serde::Serialize;

use crate::error::CliResult;
use crate::figures::SweepPoint;
use crate::output::{Cell, Table};
use crate::parallel::{map_ordered, run_trials};

/// Link parameters over `γT` for each `η`.
pub fn link_table(gamma_ts: &[f64], etas: &[f64], nbar: f64, g_tau: f64) -> CliResult<Table> {
    let mut t = Table::new(
        "link",
        &[
            ("eta", "1"),
            ("gammaT", "1"),
            ("L0", "km"),
            ("x", "1"),
            ("y", "1"),
            ("concurrence", "1"),
            ("Fstar", "1"),
            ("Fstar_approx", "1"),
            ("in_window", "bool"),
        ],
    );
    for &eta in etas {
        for &gt in gamma_ts {
            let p = ChannelParams::new(gt, eta)?;
            let l = link_state(&p, nbar, g_tau, 0.0)?;
            let f = field_overlap_fstar(&p, g_tau, nbar);
            t.push(vec![
                eta.into(),
                gt.into(),
                p.l0_km.into(),
                l.x.into(),
                l.y.into(),
                l.coherence().into(),
                f.exact.into(),
                f.approx.into(),
                l.in_window.into(),
            ]);
        }
    }
    Ok(t)
}

/// Recurrence coefficients and `log₁₀ P_Pur` over `x` for each depth.
pub fn purify_table(xs: &[f64], y: f64, depths: &[u32]) -> CliResult<Table> {
    let mut t = Table::new(
        "purify",
        &[
            ("rounds", "1"),
            ("x", "1"),
            ("y", "1"),
            ("f", "1"),
            ("g", "1"),
            ("h", "1"),
            ("fidelity", "1"),
            ("P_round", "1"),
            ("log10_P_pur", "1"),
        ],
    );
    let max_depth = depths.iter().copied().max().unwrap_or(0);
    for &x in xs {
        let mut track = purify_track_init(x, y)?;
        for depth in 1..=max_depth {
            track = purify_step(&track)?;
            if depths.contains(&depth) {
                t.push(vec![
                    depth.into(),
                    x.into(),
                    y.into(),
                    track.f.into(),
                    track.g.into(),
                    track.h.unwrap_or(f64::NAN).into(),
                    track.fidelity().into(),
                    track.per_round_probs[depth as usize - 1].into(),
                    track.log10_overall().into(),
                ]);
            }
        }
    }
    // stable order: by depth, then x
    t.rows.sort_by(|a, b| match (&a[0], &b[0]) {
        (Cell::Int(p), Cell::Int(q)) => p.cmp(q),
        _ => std::cmp::Ordering::Equal,
    });
    Ok(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct RatePoint {
    pub series: String,
    pub report: RateReport,
}

/// Distance where the rate meets the repeaterless bound, interpolated
/// linearly in `log₁₀(R / bound)`.
#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    pub series: String,
    pub total_km: f64,
    /// Whether the chain beats the bound beyond the crossing.
    pub beats_bound_after: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateSweep {
    pub points: Vec<RatePoint>,
    pub crossings: Vec<Crossing>,
}

pub fn rate_sweep(points: &[SweepPoint]) -> CliResult<RateSweep> {
    let reports = map_ordered(points, |p| repeater_rate(&p.config));
    let mut out = Vec::with_capacity(points.len());
    for (p, r) in points.iter().zip(reports) {
        out.push(RatePoint { series: p.series.clone(), report: r? });
    }
    let crossings = crossings(&out);
    Ok(RateSweep { points: out, crossings })
}

fn crossings(points: &[RatePoint]) -> Vec<Crossing> {
    let gap = |r: &RateReport| r.log10_r - r.benchmark_rate.log10();
    let mut found = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.series != b.series {
            continue;
        }
        let (ga, gb) = (gap(&a.report), gap(&b.report));
        if ga.is_finite() && gb.is_finite() && (ga < 0.0) != (gb < 0.0) {
            let (la, lb) = (a.report.total_km, b.report.total_km);
            let l = la + (lb - la) * ga / (ga - gb);
            found.push(Crossing { series: a.series.clone(), total_km: l, beats_bound_after: gb >= 0.0 });
        }
    }
    found
}

pub fn rate_table(s: &RateSweep) -> Table {
    let mut t = Table::new(
        "rate",
        &[
            ("series", "-"),
            ("L", "km"),
            ("n_links", "1"),
            ("L0", "km"),
            ("rounds", "1"),
            ("log10_P", "1"),
            ("A_n", "1"),
            ("T_link", "s"),
            ("T_swap", "s"),
            ("F_after_swaps", "1"),
            ("j_extra", "1"),
            ("N_bar", "1"),
            ("F_final", "1"),
            ("R", "1/s"),
            ("log10_R", "1"),
            ("benchmark_rate", "1/s"),
        ],
    );
    for p in &s.points {
        let r = &p.report;
        t.push(vec![
            p.series.clone().into(),
            r.total_km.into(),
            r.n_links.into(),
            r.l0_km.into(),
            r.rounds.into(),
            (r.ln_p / std::f64::consts::LN_10).into(),
            r.a_n.into(),
            r.t_link.into(),
            r.t_swap.into(),
            r.fidelity_after_swaps.into(),
            r.j_extra.into(),
            r.n_bar.into(),
            r.f_final.into(),
            r.r.into(),
            r.log10_r.into(),
            r.benchmark_rate.into(),
        ]);
    }
    t
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedForm {
    pub a_n: f64,
    pub n_bar: f64,
    pub r: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct McReport {
    pub config: RepeaterConfig,
    pub model: ChainModel,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub summary: McSummary,
    pub closed_form: ClosedForm,
    /// `(estimate − closed form) / standard error`.
    pub z_a_n: f64,
    pub z_r: f64,
    pub notes: Vec<String>,
}

pub fn mc_report(config: &RepeaterConfig, policy: EndpointPolicy, trials: u64, seed: u64, workers: usize) -> CliResult<McReport> {
    let (mut model, rate) = ChainModel::from_config(config)?;
    model.policy = policy;
    let tally = run_trials(&model, trials, seed, workers)?;
    let summary = summarize(&tally, &model)?;
    let a_n = attempts_avg(model.n_links, model.p)?;
    let closed_form = ClosedForm { a_n, n_bar: rate.n_bar, r: rate.r };
    let mut notes = vec!["every link may generate and purify pairs in parallel without bound".to_string()];
    if config.exceeds_memory() {
        notes.push(format!("{} atoms per node needed, more than can be loaded efficiently", config.atoms_per_node()));
    }
    if policy == EndpointPolicy::Subtree {
        notes.push("closed-form rate assumes whole-batch end-point purification".into());
    }
    Ok(McReport {
        config: *config,
        trials,
        seed,
        workers,
        z_a_n: (summary.a_n_hat - a_n) / summary.a_n_se,
        z_r: (summary.r_hat - rate.r) / summary.r_se,
        summary,
        closed_form,
        model,
        notes,
    })
}
