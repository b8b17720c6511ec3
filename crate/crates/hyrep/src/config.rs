//! Flat TOML configuration for chain models.
//!
//! Every key is optional; unset keys keep the value of the base
//! configuration (a figure preset or the defaults). Command-line flags are
//! parsed into the same record and layered on top of the file.

use std::path::Path;

use hyrep_core::rates::{Hardware, LinkFidelity, RepeaterConfig, SuperLink};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Hardware preset name; individual constants below override it.
    pub hardware: Option<String>,
    /// Coupling in rad/s.
    pub g: Option<f64>,
    /// Cavity decay in rad/s.
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    /// Detection time in s.
    pub t_det: Option<f64>,
    /// m/s.
    pub c_fiber: Option<f64>,

    pub n_links: Option<u64>,
    pub l0_km: Option<f64>,
    /// Sets `n_links = round(total_km / l0_km)`.
    pub total_km: Option<f64>,
    pub rounds: Option<u32>,
    pub nbar: Option<f64>,
    pub g_tau: Option<f64>,
    pub eta: Option<f64>,
    pub epsilon: Option<f64>,
    pub link_fidelity: Option<LinkFidelity>,
    pub endpoint_purification: Option<bool>,

    pub super_link_n: Option<u64>,
    pub super_link_l0_km: Option<f64>,
    pub super_link_rounds: Option<u32>,
    pub super_link_fidelity: Option<LinkFidelity>,

    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

macro_rules! layer {
    ($base:ident, $over:ident; $($f:ident),*) => {
        ConfigFile { $($f: $over.$f.or($base.$f)),* }
    };
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Keys set in `over` win.
    pub fn layered(self, over: ConfigFile) -> ConfigFile {
        let base = self;
        layer!(base, over; hardware, g, kappa, gamma, t_det, c_fiber, n_links, l0_km, total_km, rounds,
            nbar, g_tau, eta, epsilon, link_fidelity, endpoint_purification,
            super_link_n, super_link_l0_km, super_link_rounds, super_link_fidelity, seed, trials)
    }

    pub fn resolve(&self, base: &RepeaterConfig) -> CliResult<RepeaterConfig> {
        let mut c = *base;
        if let Some(name) = &self.hardware {
            c.hardware = Hardware::preset(name)
                .ok_or_else(|| CliError::Config(format!("unknown hardware preset {name:?} (known: {:?})", Hardware::PRESETS)))?;
        }
        let h = &mut c.hardware;
        set(&mut h.g, self.g);
        set(&mut h.kappa, self.kappa);
        set(&mut h.gamma, self.gamma);
        set(&mut h.t_det, self.t_det);
        set(&mut h.c_fiber, self.c_fiber);
        set(&mut c.n_links, self.n_links);
        set(&mut c.l0_km, self.l0_km);
        if let Some(total) = self.total_km {
            if self.n_links.is_some() {
                return Err(CliError::Config("set either n_links or total_km, not both".into()));
            }
            if !(total > 0.0) || !(c.l0_km > 0.0) {
                return Err(CliError::Config(format!("total_km = {total} with l0_km = {}", c.l0_km)));
            }
            c.n_links = (total / c.l0_km).round().max(1.0) as u64;
        }
        set(&mut c.rounds, self.rounds);
        set(&mut c.nbar, self.nbar);
        set(&mut c.g_tau, self.g_tau);
        set(&mut c.eta, self.eta);
        set(&mut c.epsilon, self.epsilon);
        set(&mut c.link_fidelity, self.link_fidelity);
        set(&mut c.endpoint_purification, self.endpoint_purification);

        let touches_super = self.super_link_n.is_some()
            || self.super_link_l0_km.is_some()
            || self.super_link_rounds.is_some()
            || self.super_link_fidelity.is_some();
        if touches_super {
            let mut s = c.super_link.unwrap_or(SuperLink { n_links: 1, l0_km: c.l0_km, rounds: 1, link_fidelity: LinkFidelity::Computed });
            set(&mut s.n_links, self.super_link_n);
            set(&mut s.l0_km, self.super_link_l0_km);
            set(&mut s.rounds, self.super_link_rounds);
            set(&mut s.link_fidelity, self.super_link_fidelity);
            c.super_link = Some(s);
        }
        c.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(c)
    }

    /// Flat record that resolves back to `c`.
    pub fn from_config(c: &RepeaterConfig) -> Self {
        let s = c.super_link;
        ConfigFile {
            hardware: None,
            g: Some(c.hardware.g),
            kappa: Some(c.hardware.kappa),
            gamma: Some(c.hardware.gamma),
            t_det: Some(c.hardware.t_det),
            c_fiber: Some(c.hardware.c_fiber),
            n_links: Some(c.n_links),
            l0_km: Some(c.l0_km),
            total_km: None,
            rounds: Some(c.rounds),
            nbar: Some(c.nbar),
            g_tau: Some(c.g_tau),
            eta: Some(c.eta),
            epsilon: Some(c.epsilon),
            link_fidelity: Some(c.link_fidelity),
            endpoint_purification: Some(c.endpoint_purification),
            super_link_n: s.map(|s| s.n_links),
            super_link_l0_km: s.map(|s| s.l0_km),
            super_link_rounds: s.map(|s| s.rounds),
            super_link_fidelity: s.map(|s| s.link_fidelity),
            seed: None,
            trials: None,
        }
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}
