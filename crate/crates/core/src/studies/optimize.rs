//! Thresholds and optima of the key rate.
//!
//! All roots are taken on the signed rate `K_raw`.

use serde::Serialize;

use super::roots::{bisect, first_sign_change, golden_max};
use super::{at_variance, Geometry, Parameter, TpsPolicy};
use crate::error::{Error, Result};
use crate::keyrate::{secret_key_rate, ProtocolConfig};

/// Farthest distance searched for the zero-rate point, km.
pub const MAX_SEARCH_KM: f64 = 500.0;

fn k_raw(cfg: &ProtocolConfig) -> Result<f64> {
    secret_key_rate(cfg).map(|r| r.k_raw)
}

/// Distance at which the signed key rate first reaches zero. Returns 0 when
/// there is no key even at zero length.
pub fn max_distance(cfg: &ProtocolConfig, geometry: Geometry, tol_km: f64) -> Result<f64> {
    let rate = |l: f64| k_raw(&geometry.place(cfg, l));
    if rate(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    loop {
        if rate(hi)? <= 0.0 {
            break;
        }
        if hi >= MAX_SEARCH_KM {
            return Err(Error::UnboundedBracket(MAX_SEARCH_KM));
        }
        lo = hi;
        hi = (2.0 * hi).min(MAX_SEARCH_KM);
    }
    bisect(rate, lo, hi, tol_km)
}

/// Points in the coarse variance scan.
const VARIANCE_GRID: usize = 200;

/// Variance maximizing the key rate at a fixed distance: coarse log-spaced
/// scan, then golden section inside the best cell.
pub fn optimal_variance(
    cfg: &ProtocolConfig,
    geometry: Geometry,
    l_ab: f64,
    v_range: (f64, f64),
    policy: TpsPolicy,
) -> Result<(f64, f64)> {
    let (v_min, v_max) = v_range;
    if !(v_min >= 1.1 && v_max <= 1e4 && v_max > v_min) {
        return Err(Error::Domain(format!("variance range [{v_min}, {v_max}] must lie within [1.1, 1e4]")));
    }
    let placed = geometry.place(cfg, l_ab);
    // Configurations without a valid source (no interior T_PS optimum) count
    // as no key.
    let rate = |v: f64| -> Result<f64> {
        match at_variance(&placed, v, policy) {
            Ok(c) => k_raw(&c),
            Err(Error::Degenerate(_)) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e),
        }
    };

    let ratio = (v_max / v_min).ln();
    let grid: Vec<f64> = (0..VARIANCE_GRID)
        .map(|i| v_min * (ratio * i as f64 / (VARIANCE_GRID - 1) as f64).exp())
        .collect();
    let values = grid.iter().map(|&v| rate(v)).collect::<Result<Vec<f64>>>()?;
    let (best, &best_k) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    if !(best_k > 0.0) {
        return Err(Error::NoKey(format!("K ≤ 0 for every V in [{v_min}, {v_max}]")));
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(VARIANCE_GRID - 1)];
    let (v_star, k_star) = golden_max(rate, lo, hi, 1e-4)?;
    if k_star >= best_k {
        Ok((v_star, k_star))
    } else {
        Ok((grid[best], best_k))
    }
}

/// Lowest homodyne efficiency still giving a positive key at `l_ab`.
pub fn eta_threshold(cfg: &ProtocolConfig, geometry: Geometry, l_ab: f64, tol: f64) -> Result<f64> {
    let placed = geometry.place(cfg, l_ab);
    let rate = |eta: f64| {
        let mut c = placed;
        c.link.eta = eta;
        k_raw(&c)
    };
    if rate(1.0)? <= 0.0 {
        return Err(Error::NoKey(format!("K ≤ 0 at η = 1 and L_AB = {l_ab} km")));
    }
    const ETA_FLOOR: f64 = 1e-6;
    if rate(ETA_FLOOR)? > 0.0 {
        return Ok(ETA_FLOOR);
    }
    bisect(rate, ETA_FLOOR, 1.0, tol)
}

/// Where two protocol variants trade places.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Crossover {
    At(f64),
    None,
}

impl Crossover {
    pub fn value(self) -> Option<f64> {
        match self {
            Crossover::At(x) => Some(x),
            Crossover::None => None,
        }
    }
}

/// Cells scanned for a sign change of `K_a − K_b`.
const CROSSOVER_SCAN: usize = 400;

/// Distance at which `K_a − K_b` changes sign, searched below the shorter of
/// the two maximum distances.
pub fn crossover(cfg_a: &ProtocolConfig, cfg_b: &ProtocolConfig, geometry: Geometry, tol_km: f64) -> Result<Crossover> {
    let reach = |c: &ProtocolConfig| match max_distance(c, geometry, tol_km) {
        Err(Error::UnboundedBracket(l)) => Ok(l),
        other => other,
    };
    let upper = reach(cfg_a)?.min(reach(cfg_b)?);
    if upper <= 0.0 {
        return Ok(Crossover::None);
    }
    let diff = |l: f64| Ok(k_raw(&geometry.place(cfg_a, l))? - k_raw(&geometry.place(cfg_b, l))?);
    let root = first_sign_change(diff, 1e-6 * upper, upper, CROSSOVER_SCAN, tol_km)?;
    Ok(root.map_or(Crossover::None, Crossover::At))
}

/// Value of `axis` in `[lo, hi]` at which `K_a − K_b` first changes sign.
/// Compares clamped rates, so stretches where neither variant has key never
/// register as a crossover.
pub fn crossover_along(
    cfg_a: &ProtocolConfig,
    cfg_b: &ProtocolConfig,
    axis: Parameter,
    (lo, hi): (f64, f64),
    tol: f64,
) -> Result<Crossover> {
    let rate_at = |cfg: &ProtocolConfig, x: f64| {
        let mut c = *cfg;
        axis.set(&mut c, x)?;
        secret_key_rate(&c).map(|r| r.k)
    };
    let diff = |x: f64| Ok(rate_at(cfg_a, x)? - rate_at(cfg_b, x)?);
    let root = first_sign_change(diff, lo, hi, CROSSOVER_SCAN, tol)?;
    Ok(root.map_or(Crossover::None, Crossover::At))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LinkParams;
    use crate::source::SourceParams;

    #[test]
    fn roots_bracket_sign_change() {
        let cfg = ProtocolConfig::default();
        for geometry in [Geometry::Symmetric, Geometry::ExtremeAsymmetric] {
            let tol = 0.01;
            let l = max_distance(&cfg, geometry, tol).unwrap();
            assert!(l > 0.0);
            let before = k_raw(&geometry.place(&cfg, l - tol)).unwrap();
            let after = k_raw(&geometry.place(&cfg, l + tol)).unwrap();
            assert!(before > 0.0 && after < 0.0, "{geometry}: {before} {after}");
        }
    }

    #[test]
    fn no_reconciliation_no_distance() {
        let cfg = ProtocolConfig { beta: 0.0, ..ProtocolConfig::default() };
        assert_eq!(max_distance(&cfg, Geometry::ExtremeAsymmetric, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn identical_configs_never_cross() {
        let cfg = ProtocolConfig::default();
        assert_eq!(crossover(&cfg, &cfg, Geometry::ExtremeAsymmetric, 0.01).unwrap(), Crossover::None);
    }

    #[test]
    fn ideal_channel_tolerates_detection_loss() {
        let cfg = ProtocolConfig {
            source: SourceParams::baseline(15.0).unwrap(),
            link: LinkParams { eps_a: 0.0, eps_b: 0.0, v_el: 0.0, ..LinkParams::default() },
            beta: 0.96,
        };
        let ideal = eta_threshold(&cfg, Geometry::ExtremeAsymmetric, 0.0, 1e-6).unwrap();
        let noisy = eta_threshold(&ProtocolConfig::default(), Geometry::ExtremeAsymmetric, 0.0, 1e-6).unwrap();
        assert!(ideal < noisy && noisy < 0.975, "ideal {ideal}, noisy {noisy}");
    }

    #[test]
    fn eta_threshold_without_key_errors() {
        let cfg = ProtocolConfig::default();
        assert!(matches!(
            eta_threshold(&cfg, Geometry::ExtremeAsymmetric, 200.0, 1e-4),
            Err(Error::NoKey(_))
        ));
    }

    #[test]
    fn variance_optimum_consistent_with_grid() {
        let cfg = ProtocolConfig::default();
        let (v, k) = optimal_variance(&cfg, Geometry::ExtremeAsymmetric, 5.0, (1.1, 1e4), TpsPolicy::Fixed).unwrap();
        let step = (1e4f64 / 1.1).ln() / (VARIANCE_GRID - 1) as f64;
        for i in 0..VARIANCE_GRID {
            let g = 1.1 * (step * i as f64).exp();
            let kg = k_raw(&at_variance(&cfg.with_distances(5.0, 0.0), g, TpsPolicy::Fixed).unwrap()).unwrap();
            assert!(kg <= k + 1e-12);
        }
        assert!(v > 1.1 && v < 1e4);
        assert!(optimal_variance(&cfg, Geometry::Symmetric, 300.0, (1.1, 1e4), TpsPolicy::Fixed).is_err());
    }
}
