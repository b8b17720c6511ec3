//! Distance sweeps of the reference scenarios.
//!
//! Figures 3 to 5 use `τ = 4/g` and `n̄ = 100`. Figure 3 sweeps the length
//! of a single link; the others sweep the total distance as whole numbers
//! of links.

use hyrep_core::rates::{presets, RepeaterConfig};
use serde::Serialize;

use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum Figure {
    #[value(name = "3")]
    Fig3,
    #[value(name = "4")]
    Fig4,
    #[value(name = "5")]
    Fig5,
    #[value(name = "6a")]
    Fig6a,
    #[value(name = "6b")]
    Fig6b,
    #[value(name = "105km")]
    Km105,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub series: String,
    pub config: RepeaterConfig,
}

fn multiples(step: f64, count: u64) -> Vec<f64> {
    (1..=count).map(|k| k as f64 * step).collect()
}

/// Points of `fig`; `distances` replaces the default axis (link length for
/// figure 3, total length otherwise).
pub fn figure_points(fig: Figure, distances: Option<&Grid>) -> Vec<SweepPoint> {
    let axis = |default: Vec<f64>| distances.map(|g| g.points().to_vec()).unwrap_or(default);
    let mut out = Vec::new();
    let mut series = |label: String, ls: &[f64], make: &dyn Fn(f64) -> RepeaterConfig| {
        for &l in ls {
            out.push(SweepPoint { series: label.clone(), config: make(l) });
        }
    };
    match fig {
        Figure::Fig3 => {
            let ls = axis(multiples(0.1, 100));
            for eta in [1.0, 0.8] {
                for rounds in [1, 2, 3] {
                    series(format!("N={rounds},eta={eta}"), &ls, &|l| presets::fig3(l, rounds, eta));
                }
            }
        }
        Figure::Fig4 => {
            let ls = axis(multiples(3.5, 300));
            for rounds in [2, 4] {
                series(format!("N={rounds}"), &ls, &|l| presets::fig4(l, rounds));
            }
        }
        Figure::Fig5 => {
            for l0 in [3.5, 7.0] {
                let ls = axis(multiples(l0, (1050.0 / l0) as u64));
                series(format!("L0={l0}"), &ls, &|l| presets::fig5(l, l0));
            }
        }
        Figure::Fig6a => series("L0=0.3".into(), &axis(multiples(0.3, 100)), &presets::fig6a),
        Figure::Fig6b => series("super=60x0.3".into(), &axis(multiples(18.0, 60)), &presets::fig6b),
        Figure::Km105 => out.push(SweepPoint { series: "105km".into(), config: presets::km105() }),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_axes() {
        let p = figure_points(Figure::Fig4, None);
        assert_eq!(p.len(), 600);
        assert_eq!(p[0].config.n_links, 1);
        assert_eq!(p[299].config.n_links, 300);
        assert_eq!(figure_points(Figure::Fig3, None).len(), 600);
        assert_eq!(figure_points(Figure::Km105, None)[0].config.n_links, 30);
    }

    #[test]
    fn custom_distances_round_to_links() {
        let g: Grid = "18,900".parse().unwrap();
        let p = figure_points(Figure::Fig6b, Some(&g));
        assert_eq!(p.iter().map(|s| s.config.n_links).collect::<Vec<_>>(), vec![1, 50]);
    }
}
