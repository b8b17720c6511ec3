//! Argument parsing and output routing.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hyrep_core::mcsim::EndpointPolicy;
use hyrep_core::rates::{presets, Hardware, LinkFidelity, RepeaterConfig};
use serde::Serialize;

use crate::checks::{run_check, CheckName};
use crate::commands::{link_table, mc_report, purify_table, rate_sweep, rate_table};
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult};
use crate::figures::{figure_points, Figure, SweepPoint};
use crate::grid::Grid;
use crate::manifest::RunManifest;
use crate::output::Table;

#[derive(Debug, Parser)]
#[command(name = "hyrep", version, about = "Hybrid cavity-QED quantum repeater models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Link parameters (x, y, concurrence, field overlap) over the loss factor.
    Link(LinkArgs),
    /// Purification coefficients and success probabilities over x.
    Purify(PurifyArgs),
    /// Repeater rates for a configuration or a figure preset.
    Rate(RateArgs),
    /// Compare the Fock-space oracles with the closed forms.
    Oracle(OracleArgs),
    /// Monte Carlo of the repeater chain.
    Mc(McArgs),
    /// List presets or print one as a config file.
    Presets(PresetArgs),
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    /// Loss factor γT as start:stop:step or a list.
    #[arg(long, default_value = "0:0.15:0.0025", conflicts_with = "l0")]
    pub gamma_t: Grid,
    /// Link lengths in km instead of γT.
    #[arg(long)]
    pub l0: Option<Grid>,
    #[arg(long, default_value_t = 100.0)]
    pub nbar: f64,
    #[arg(long, default_value_t = 4.0)]
    pub gtau: f64,
    /// Mirror transmittances.
    #[arg(long, default_value = "1,0.85,0.7")]
    pub eta: Grid,
    /// CSV file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PurifyArgs {
    #[arg(long, default_value = "0:1:0.01")]
    pub x_range: Grid,
    #[arg(long, default_value_t = 0.0)]
    pub y: f64,
    #[arg(long, default_value = "2,3,4", value_delimiter = ',')]
    pub rounds: Vec<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Model parameters that override the config file.
#[derive(Debug, Default, Args)]
pub struct ModelArgs {
    /// Flat TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub hardware: Option<String>,
    #[arg(long)]
    pub n_links: Option<u64>,
    #[arg(long)]
    pub l0_km: Option<f64>,
    #[arg(long)]
    pub total_km: Option<f64>,
    #[arg(long)]
    pub rounds: Option<u32>,
    #[arg(long)]
    pub nbar: Option<f64>,
    #[arg(long)]
    pub gtau: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_parser = parse_link_fidelity)]
    pub link_fidelity: Option<LinkFidelity>,
    #[arg(long)]
    pub endpoint_purification: Option<bool>,
}

fn parse_link_fidelity(s: &str) -> Result<LinkFidelity, String> {
    match s {
        "computed" => Ok(LinkFidelity::Computed),
        "nominal" => Ok(LinkFidelity::Nominal),
        _ => Err(format!("expected computed or nominal, got {s:?}")),
    }
}

impl ModelArgs {
    fn file(&self) -> CliResult<ConfigFile> {
        let base = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            hardware: self.hardware.clone(),
            n_links: self.n_links,
            l0_km: self.l0_km,
            total_km: self.total_km,
            rounds: self.rounds,
            nbar: self.nbar,
            g_tau: self.gtau,
            eta: self.eta,
            epsilon: self.epsilon,
            link_fidelity: self.link_fidelity,
            endpoint_purification: self.endpoint_purification,
            ..Default::default()
        };
        Ok(base.layered(flags))
    }

    fn is_empty(&self) -> bool {
        self.file().map(|f| f == ConfigFile::default()).unwrap_or(false)
    }
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long, value_enum)]
    pub figure: Option<Figure>,
    /// Distances (km) for a figure sweep; link lengths for figure 3.
    #[arg(long)]
    pub distances: Option<Grid>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with the full rate reports.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum, required = true, value_delimiter = ',')]
    pub check: Vec<CheckName>,
    #[arg(long)]
    pub nbar: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Policy {
    Batch,
    Subtree,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Start from a figure preset at `--total-km` (default 18 km for 6a).
    #[arg(long, value_enum)]
    pub figure: Option<Figure>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value = "batch")]
    pub policy: Policy,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// Print this figure's configuration as TOML.
    #[arg(long, value_enum)]
    pub figure: Option<Figure>,
    /// Total distance (km), or link length for figure 3.
    #[arg(long, default_value_t = 18.0)]
    pub distance: f64,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Link(a) => cmd_link(a),
        Command::Purify(a) => cmd_purify(a),
        Command::Rate(a) => cmd_rate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Presets(a) => cmd_presets(a),
    }
}

fn to_value<T: Serialize>(v: &T) -> CliResult<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

/// Writes `table` to `out` with a manifest, or to stdout.
fn emit_table(table: &Table, out: Option<&Path>, mut manifest: RunManifest, started: Instant) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, table.to_bytes()?)?;
            manifest.outputs.push(path.to_path_buf());
            manifest.wall_clock_s = started.elapsed().as_secs_f64();
            let m = manifest.write_beside(path)?;
            println!("wrote {} rows to {} ({})", table.rows.len(), path.display(), m.display());
        }
        None => table.write(std::io::stdout().lock())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, mut manifest: RunManifest, started: Instant) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            manifest.outputs.push(path.to_path_buf());
            manifest.wall_clock_s = started.elapsed().as_secs_f64();
            manifest.write_beside(path)?;
            println!("wrote {}", path.display());
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_link(a: LinkArgs) -> CliResult<()> {
    let started = Instant::now();
    if !(a.nbar > 0.0) || !(a.gtau >= 0.0) {
        return Err(CliError::Usage(format!("need nbar > 0 and gtau >= 0, got {} and {}", a.nbar, a.gtau)));
    }
    let gts: Vec<f64> = match &a.l0 {
        Some(ls) => ls.points().iter().map(|&l| hyrep_core::channel::gamma_t_from_length(l)).collect(),
        None => a.gamma_t.points().to_vec(),
    };
    if gts.iter().any(|&g| g < 0.0) || a.eta.points().iter().any(|&e| !(0.0..=1.0).contains(&e)) {
        return Err(CliError::Usage("gamma_t must be >= 0 and eta in [0, 1]".into()));
    }
    let table = link_table(&gts, a.eta.points(), a.nbar, a.gtau)?;
    let cfg = serde_json::json!({ "gamma_t": gts, "eta": a.eta, "nbar": a.nbar, "g_tau": a.gtau });
    emit_table(&table, a.out.as_deref(), RunManifest::new("link", cfg), started)
}

fn cmd_purify(a: PurifyArgs) -> CliResult<()> {
    let started = Instant::now();
    if a.rounds.is_empty() || a.rounds.iter().any(|&n| n == 0 || n > 64) {
        return Err(CliError::Usage("rounds must be between 1 and 64".into()));
    }
    let table = purify_table(a.x_range.points(), a.y, &a.rounds)?;
    let cfg = serde_json::json!({ "x": a.x_range, "y": a.y, "rounds": a.rounds });
    emit_table(&table, a.out.as_deref(), RunManifest::new("purify", cfg), started)
}

fn cmd_rate(a: RateArgs) -> CliResult<()> {
    let started = Instant::now();
    let points: Vec<SweepPoint> = match a.figure {
        Some(fig) => {
            let file = a.model.file()?;
            figure_points(fig, a.distances.as_ref())
                .into_iter()
                .map(|p| Ok(SweepPoint { config: file.resolve(&p.config)?, ..p }))
                .collect::<CliResult<_>>()?
        }
        None => {
            if a.model.is_empty() {
                return Err(CliError::Usage("give --figure, --config or model flags".into()));
            }
            let c = a.model.file()?.resolve(&RepeaterConfig::new(1, 1.0, 0))?;
            vec![SweepPoint { series: "config".into(), config: c }]
        }
    };
    for p in points.iter().filter(|p| p.config.exceeds_memory()).take(1) {
        eprintln!("warning: {} atoms per node needed, more than can be loaded efficiently", p.config.atoms_per_node());
    }
    let sweep = rate_sweep(&points)?;
    let table = rate_table(&sweep);
    let cfg = serde_json::json!({ "figure": a.figure, "distances": a.distances, "points": to_value(&points)? });
    if let Some(path) = &a.report {
        emit_json(&sweep, Some(path), RunManifest::new("rate", cfg.clone()), started)?;
    }
    emit_table(&table, a.out.as_deref(), RunManifest::new("rate", cfg), started)?;
    // keep stdout clean when it carries the CSV
    let say = |line: String| if a.out.is_some() { println!("{line}") } else { eprintln!("{line}") };
    if let Some(first) = sweep.points.first() {
        let r = &first.report;
        say(format!("{}: L = {} km, R = {:.4e} /s, F = {:.6}", first.series, r.total_km, r.r, r.f_final));
    }
    for c in &sweep.crossings {
        say(format!("{}: crosses the repeaterless bound at {:.1} km", c.series, c.total_km));
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> CliResult<()> {
    let started = Instant::now();
    let mut reports = Vec::new();
    for &c in &a.check {
        let r = run_check(c, a.nbar, a.dim)?;
        eprintln!("{:?}: {}", c, if r.pass { "pass" } else { "FAIL" });
        for m in &r.metrics {
            eprintln!("  {:<28} {:>12.4e} limit {:>10.3e} {}", m.name, m.value, m.limit, if m.pass { "ok" } else { "FAIL" });
        }
        reports.push(r);
    }
    let cfg = serde_json::json!({ "checks": a.check, "nbar": a.nbar, "dim": a.dim });
    emit_json(&reports, a.out.as_deref(), RunManifest::new("oracle", cfg), started)?;
    let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| format!("{:?}", r.check)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("checks failed: {}", failed.join(", "))))
    }
}

fn cmd_mc(a: McArgs) -> CliResult<()> {
    let started = Instant::now();
    let file = a.model.file()?;
    let total = file.total_km.unwrap_or(18.0);
    let base = match a.figure {
        Some(fig) => figure_points(fig, Some(&Grid(vec![total])))[0].config,
        None if a.model.is_empty() => presets::fig6a(total),
        None => RepeaterConfig::new(1, 1.0, 0),
    };
    let file = if a.figure.is_some() { ConfigFile { total_km: None, ..file } } else { file };
    let config = file.resolve(&base)?;
    let trials = a.trials.or(file.trials).unwrap_or(100_000);
    let seed = a.seed.or(file.seed).unwrap_or(1);
    if trials < 2 {
        return Err(CliError::Usage("need at least 2 trials".into()));
    }
    let workers = a.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let policy = match a.policy {
        Policy::Batch => EndpointPolicy::Batch,
        Policy::Subtree => EndpointPolicy::Subtree,
    };
    let report = mc_report(&config, policy, trials, seed, workers)?;
    let s = &report.summary;
    eprintln!(
        "A_n = {:.4} ± {:.4} (closed {:.4}), R = {:.4} ± {:.4} /s (closed {:.4})",
        s.a_n_hat, s.a_n_se, report.closed_form.a_n, s.r_hat, s.r_se, report.closed_form.r
    );
    let mut manifest = RunManifest::new("mc", serde_json::json!({ "config": config, "trials": trials, "policy": policy }));
    manifest.seed = Some(seed);
    emit_json(&report, a.out.as_deref(), manifest, started)
}

fn cmd_presets(a: PresetArgs) -> CliResult<()> {
    match a.figure {
        Some(fig) => {
            let p = figure_points(fig, Some(&Grid(vec![a.distance])));
            let text = ConfigFile::from_config(&p[0].config).to_toml()?;
            print!("# figure preset {fig:?} at {} km\n{text}", a.distance);
        }
        None => {
            println!("hardware presets (g, kappa, gamma in 2pi MHz; t_det in us):");
            for name in Hardware::PRESETS {
                let h = Hardware::preset(name).expect("listed preset");
                let w = 2.0 * std::f64::consts::PI * 1e6;
                println!("  {name:<10} {:>6.2} {:>6.2} {:>6.2} {:>8.3}", h.g / w, h.kappa / w, h.gamma / w, h.t_det * 1e6);
            }
            println!("figure presets: 3 4 5 6a 6b 105km");
        }
    }
    Ok(())
}
