//! Named figure reproductions. Every parameter is fixed here so a figure is
//! one call: ε_A = ε_B = 0.01, η = 0.975, v_el = 0.01, β = 0.96, 0.2 dB/km,
//! and `T_PS` at the success-maximizing value for each `(V, k)`.

use serde::Serialize;

use super::{at_variance, Geometry, TpsPolicy};
use crate::channel::LinkParams;
use crate::error::{Error, Result};
use crate::keyrate::{plob_bound, secret_key_rate, ProtocolConfig};
use crate::source::{success_probability, SourceParams};

pub const FIGURES: [&str; 7] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

const MAX_K: u32 = 4;
const FIG8_ETAS: [f64; 4] = [0.85, 0.90, 0.95, 1.0];

/// A figure as a numeric table; `NaN` marks points with no valid
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureTable {
    pub name: String,
    pub title: String,
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn base(v: f64) -> ProtocolConfig {
    ProtocolConfig {
        source: SourceParams { v, k: 0, t_ps: 1.0 },
        link: LinkParams { v_b: v, ..LinkParams::default() },
        beta: 0.96,
    }
}

fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    let r = (max / min).ln();
    (0..n).map(|i| min * (r * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Rate for `k` photons at the success-maximizing `T_PS`; `NaN` if that
/// configuration does not exist.
fn rate(cfg: &ProtocolConfig, k: u32, raw: bool) -> f64 {
    let mut c = *cfg;
    c.source.k = k;
    TpsPolicy::MaxSuccess
        .apply(c)
        .and_then(|c| secret_key_rate(&c))
        .map(|r| if raw { r.k_raw } else { r.k })
        .unwrap_or(f64::NAN)
}

fn rate_label(raw: bool) -> &'static str {
    if raw {
        "K_raw"
    } else {
        "K"
    }
}

fn common_params(v: Option<f64>) -> Vec<(String, String)> {
    let link = LinkParams::default();
    let mut p = vec![
        ("eps_A".to_string(), link.eps_a.to_string()),
        ("eps_B".to_string(), link.eps_b.to_string()),
        ("eta".to_string(), link.eta.to_string()),
        ("v_el".to_string(), link.v_el.to_string()),
        ("beta".to_string(), "0.96".to_string()),
        ("loss_coeff".to_string(), link.loss_coeff.to_string()),
        ("T_PS".to_string(), "success-optimal per (V, k)".to_string()),
    ];
    if let Some(v) = v {
        p.insert(0, ("V".to_string(), v.to_string()));
    }
    p
}

fn success_vs_tps() -> FigureTable {
    let v = 15.0;
    let mut columns = vec!["T_PS".to_string()];
    columns.extend((1..=MAX_K).map(|k| format!("P_k{k}")));
    let rows = linspace(0.005, 0.995, 199)
        .into_iter()
        .map(|t| {
            let mut row = vec![t];
            row.extend((1..=MAX_K).map(|k| {
                SourceParams::new(v, k, t).and_then(|s| success_probability(&s)).unwrap_or(f64::NAN)
            }));
            row
        })
        .collect();
    FigureTable {
        name: "fig3".into(),
        title: "k-photon success probability vs tap transmittance".into(),
        params: vec![("V".into(), v.to_string())],
        columns,
        rows,
    }
}

fn rate_vs_variance(name: &str, geometry: Geometry, l_ab: f64, raw: bool) -> FigureTable {
    let label = rate_label(raw);
    let mut columns = vec!["V".to_string()];
    columns.extend((0..=MAX_K).map(|k| format!("{label}_k{k}")));
    let rows = logspace(1.5, 1000.0, 120)
        .into_iter()
        .map(|v| {
            let cfg = geometry.place(&base(v), l_ab);
            let mut row = vec![v];
            row.extend((0..=MAX_K).map(|k| rate(&cfg, k, raw)));
            row
        })
        .collect();
    let mut params = common_params(None);
    params.insert(0, ("geometry".into(), geometry.to_string()));
    params.insert(1, ("L_AB".into(), l_ab.to_string()));
    FigureTable { name: name.into(), title: format!("{label} vs V_A = V_B, {geometry}, L_AB = {l_ab} km"), params, columns, rows }
}

fn rate_vs_distance(name: &str, geometry: Geometry, v: f64, distances: Vec<f64>, raw: bool) -> FigureTable {
    let label = rate_label(raw);
    let mut columns = vec!["L_km".to_string()];
    columns.extend((0..=MAX_K).map(|k| format!("{label}_k{k}")));
    columns.push("PLOB".into());
    let loss = LinkParams::default().loss_coeff;
    let rows = distances
        .into_iter()
        .map(|l| {
            let cfg = geometry.place(&base(v), l);
            let mut row = vec![l];
            row.extend((0..=MAX_K).map(|k| rate(&cfg, k, raw)));
            row.push(plob_bound(l, loss));
            row
        })
        .collect();
    let mut params = common_params(Some(v));
    params.insert(0, ("geometry".into(), geometry.to_string()));
    FigureTable { name: name.into(), title: format!("{label} vs L_AB, {geometry}"), params, columns, rows }
}

fn rate_vs_distance_per_eta(raw: bool) -> FigureTable {
    let (v, geometry) = (15.0, Geometry::ExtremeAsymmetric);
    let label = rate_label(raw);
    let mut columns = vec!["L_km".to_string()];
    for eta in FIG8_ETAS {
        for k in 0..=1 {
            columns.push(format!("{label}_k{k}_eta{eta:.2}"));
        }
    }
    let rows = linspace(0.5, 70.0, 140)
        .into_iter()
        .map(|l| {
            let mut row = vec![l];
            for eta in FIG8_ETAS {
                let mut cfg = geometry.place(&base(v), l);
                cfg.link.eta = eta;
                row.extend((0..=1).map(|k| rate(&cfg, k, raw)));
            }
            row
        })
        .collect();
    let mut params = common_params(Some(v));
    params.retain(|(k, _)| k != "eta");
    params.insert(0, ("geometry".into(), geometry.to_string()));
    FigureTable { name: "fig8".into(), title: format!("{label} vs L_AB for several η, {geometry}"), params, columns, rows }
}

fn rate_vs_eta(raw: bool) -> FigureTable {
    let (v, geometry, l_ab) = (15.0, Geometry::ExtremeAsymmetric, 20.0);
    let label = rate_label(raw);
    let mut columns = vec!["eta".to_string()];
    columns.extend((0..=MAX_K).map(|k| format!("{label}_k{k}")));
    let rows = linspace(0.5, 1.0, 101)
        .into_iter()
        .map(|eta| {
            let mut cfg = geometry.place(&base(v), l_ab);
            cfg.link.eta = eta;
            let mut row = vec![eta];
            row.extend((0..=MAX_K).map(|k| rate(&cfg, k, raw)));
            row
        })
        .collect();
    let mut params = common_params(Some(v));
    params.retain(|(k, _)| k != "eta");
    params.insert(0, ("geometry".into(), geometry.to_string()));
    params.insert(1, ("L_AB".into(), l_ab.to_string()));
    FigureTable { name: "fig9".into(), title: format!("{label} vs η, {geometry}, L_AB = {l_ab} km"), params, columns, rows }
}

/// Builds the named figure. With `raw`, rate columns carry the signed
/// `K_raw` instead of the clamped `K`.
pub fn figure(name: &str, raw: bool) -> Result<FigureTable> {
    Ok(match name {
        "fig3" => success_vs_tps(),
        "fig4" => rate_vs_variance("fig4", Geometry::Symmetric, 6.0, raw),
        "fig5" => rate_vs_variance("fig5", Geometry::ExtremeAsymmetric, 30.0, raw),
        "fig6" => rate_vs_distance("fig6", Geometry::Symmetric, 100.0, linspace(0.1, 10.0, 100), raw),
        "fig7" => rate_vs_distance("fig7", Geometry::ExtremeAsymmetric, 15.0, linspace(0.5, 70.0, 140), raw),
        "fig8" => rate_vs_distance_per_eta(raw),
        "fig9" => rate_vs_eta(raw),
        other => return Err(Error::UnknownParameter(format!("figure {other}"))),
    })
}

/// `cfg` at variance `v` with `k` photons and the success-maximizing `T_PS`.
pub fn preset_config(v: f64, k: u32, geometry: Geometry, l_ab: f64) -> Result<ProtocolConfig> {
    let mut c = geometry.place(&base(v), l_ab);
    c.source.k = k;
    at_variance(&c, v, TpsPolicy::MaxSuccess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_figures_build() {
        for name in FIGURES {
            let t = figure(name, false).unwrap();
            assert!(!t.rows.is_empty());
            assert!(t.rows.iter().all(|r| r.len() == t.columns.len()), "{name}");
        }
        assert!(figure("fig10", false).is_err());
    }

    #[test]
    fn fig7_columns() {
        let t = figure("fig7", false).unwrap();
        assert_eq!(t.columns, ["L_km", "K_k0", "K_k1", "K_k2", "K_k3", "K_k4", "PLOB"]);
        let raw = figure("fig7", true).unwrap();
        assert_eq!(raw.columns[1], "K_raw_k0");
    }

    #[test]
    fn fig3_curves_have_single_interior_maximum() {
        let t = figure("fig3", false).unwrap();
        for col in 1..t.columns.len() {
            let ys: Vec<f64> = t.rows.iter().map(|r| r[col]).collect();
            let peak = ys.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            assert!(peak > 0 && peak < ys.len() - 1);
            assert!(ys[..=peak].windows(2).all(|w| w[1] >= w[0]));
            assert!(ys[peak..].windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
