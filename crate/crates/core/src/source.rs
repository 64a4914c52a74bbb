//! Two-mode squeezed source with k-photon subtraction on the transmitted mode.
//!
//! A beam splitter of transmittance `T_PS` taps the mode headed for the relay
//! and an ideal photon-number-resolving detector heralds exactly `k` photons
//! in the tap. The no-subtraction protocol is the point `k = 0, T_PS = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::BipartiteCovariance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// EPR variance (SNU).
    pub v: f64,
    /// Photons subtracted.
    pub k: u32,
    /// Tap beam-splitter transmittance.
    pub t_ps: f64,
}

impl SourceParams {
    pub fn new(v: f64, k: u32, t_ps: f64) -> Result<Self> {
        let src = Self { v, k, t_ps };
        src.validate()?;
        Ok(src)
    }

    /// The untouched EPR source.
    pub fn baseline(v: f64) -> Result<Self> {
        Self::new(v, 0, 1.0)
    }

    /// `k` subtracted photons at the transmittance that maximizes the success
    /// probability; `k = 0` maps to the baseline.
    pub fn with_optimal_tps(v: f64, k: u32) -> Result<Self> {
        if k == 0 {
            return Self::baseline(v);
        }
        Self::new(v, k, optimal_tps(v, k)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v >= 1.0) || !self.v.is_finite() {
            return Err(Error::Domain(format!("EPR variance V = {} must be ≥ 1", self.v)));
        }
        if !(self.t_ps > 0.0 && self.t_ps <= 1.0) {
            return Err(Error::Domain(format!("T_PS = {} must lie in (0, 1]", self.t_ps)));
        }
        Ok(())
    }

    pub fn xi(&self) -> f64 {
        // validated on construction
        xi(self.v).unwrap_or(f64::NAN)
    }
}

/// Result of a successful subtraction: heralding probability and the
/// covariance entries of the conditional state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubtractedSource {
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SubtractedSource {
    pub fn covariance(&self) -> BipartiteCovariance {
        BipartiteCovariance::new_unchecked(self.x, self.y, self.z)
    }
}

/// `ξ = √((V−1)/(V+1))`, i.e. `tanh r` of the squeezer.
pub fn xi(v: f64) -> Result<f64> {
    if !(v >= 1.0) {
        return Err(Error::Domain(format!("EPR variance V = {v} must be ≥ 1")));
    }
    if v.is_infinite() {
        return Ok(1.0);
    }
    Ok(((v - 1.0) / (v + 1.0)).sqrt())
}

fn xi_sq(v: f64) -> f64 {
    (v - 1.0) / (v + 1.0)
}

/// Probability that the tap detector registers exactly `k` photons.
pub fn success_probability(src: &SourceParams) -> Result<f64> {
    src.validate()?;
    let SourceParams { v, k, t_ps } = *src;
    if k == 0 && t_ps == 1.0 {
        return Ok(1.0);
    }
    let xi2 = xi_sq(v);
    let k_f = f64::from(k);
    let denom = 1.0 - xi2 * t_ps;
    Ok((1.0 - xi2) * xi2.powi(k as i32) * (1.0 - t_ps).powi(k as i32) / denom.powf(k_f + 1.0))
}

/// Heralding probability and covariance entries of the photon-subtracted state.
///
/// `Z` carries the factor 2 of the `x = a + a†` convention, so that the
/// baseline reproduces `(V, V, √(V²−1))`.
pub fn subtracted_covariance(src: &SourceParams) -> Result<SubtractedSource> {
    let p = success_probability(src)?;
    if !(p > 0.0) {
        return Err(Error::Degenerate(format!(
            "k = {} at T_PS = {} heralds with zero probability",
            src.k, src.t_ps
        )));
    }
    let SourceParams { v, k, t_ps } = *src;
    if k == 0 && t_ps == 1.0 {
        let cov = BipartiteCovariance::epr(v)?;
        return Ok(SubtractedSource { p, x: cov.a, y: cov.b, z: cov.c });
    }
    let xi2 = xi_sq(v);
    let k_f = f64::from(k);
    let q = xi2 * t_ps;
    let denom = 1.0 - q;
    let x = 2.0 * (1.0 + k_f) / denom - 1.0;
    let y = 2.0 * (1.0 + k_f * q) / denom - 1.0;
    let z = 2.0 * t_ps.sqrt() * xi2.sqrt() * (1.0 + k_f) / denom;
    Ok(SubtractedSource { p, x, y, z })
}

/// Transmittance maximizing the `k`-photon heralding probability:
/// `T* = (k+1) − k/ξ²`, the unique stationary point of the success probability.
pub fn optimal_tps(v: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("optimal T_PS is undefined for k = 0".into()));
    }
    if !(v > 1.0) {
        return Err(Error::Domain(format!("EPR variance V = {v} must be > 1")));
    }
    let xi2 = if v.is_infinite() { 1.0 } else { xi_sq(v) };
    let k_f = f64::from(k);
    if (k_f + 1.0) * xi2 <= k_f {
        return Err(Error::Degenerate(format!(
            "no interior maximum for k = {k} at V = {v}; optimum sits at T_PS → 0"
        )));
    }
    Ok((k_f + 1.0) - k_f / xi2)
}
