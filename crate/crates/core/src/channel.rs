//! Reduction of the two relay links, the relay's Bell measurement and Bob's
//! displacement to an equivalent one-way channel seen from Alice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard single-mode fiber attenuation, dB/km.
pub const DEFAULT_LOSS_DB_PER_KM: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Alice–relay fiber length, km.
    pub l_ac: f64,
    /// Bob–relay fiber length, km.
    pub l_bc: f64,
    /// dB/km.
    pub loss_coeff: f64,
    /// Thermal excess noise on Alice's link (SNU).
    pub eps_a: f64,
    /// Thermal excess noise on Bob's link (SNU).
    pub eps_b: f64,
    /// Bob's EPR variance (SNU).
    pub v_b: f64,
    /// Homodyne quantum efficiency at the relay.
    pub eta: f64,
    /// Homodyne electronic noise (SNU).
    pub v_el: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            l_ac: 0.0,
            l_bc: 0.0,
            loss_coeff: DEFAULT_LOSS_DB_PER_KM,
            eps_a: 0.01,
            eps_b: 0.01,
            v_b: 15.0,
            eta: 0.975,
            v_el: 0.01,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("L_AC", self.l_ac),
            ("L_BC", self.l_bc),
            ("loss_coeff", self.loss_coeff),
            ("eps_A", self.eps_a),
            ("eps_B", self.eps_b),
            ("v_el", self.v_el),
        ];
        for (name, value) in nonneg {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Domain(format!("{name} = {value} must be a finite value ≥ 0")));
            }
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Domain(format!("η = {} must lie in (0, 1]", self.eta)));
        }
        if !(self.v_b >= 1.0) {
            return Err(Error::Domain(format!("V_B = {} must be ≥ 1", self.v_b)));
        }
        Ok(())
    }
}

/// Equivalent one-way channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveChannel {
    pub t_a: f64,
    pub t_b: f64,
    pub g_sq: f64,
    /// Normalized transmittance `T_A·g²/2`.
    pub t: f64,
    pub eps_th: f64,
    pub chi_line: f64,
    pub chi_hom: f64,
    pub chi_t: f64,
}

/// Fiber transmittance `10^(−αL/10)`.
pub fn transmittance(length_km: f64, loss_coeff: f64) -> f64 {
    10f64.powf(-loss_coeff * length_km / 10.0)
}

/// Displacement gain squared minimizing the equivalent excess noise.
pub fn displacement_gain_sq(v_b: f64, t_b: f64) -> Result<f64> {
    if !(v_b > 1.0) {
        return Err(Error::Degenerate(format!("V_B = {v_b}: zero displacement gain, no key possible")));
    }
    if !(t_b > 0.0) {
        return Err(Error::Domain(format!("T_B = {t_b} must be > 0")));
    }
    if v_b.is_infinite() {
        return Ok(2.0 / t_b);
    }
    Ok(2.0 * (v_b - 1.0) / (t_b * (v_b + 1.0)))
}

/// Equivalent excess noise for an arbitrary displacement gain `g`.
pub fn equivalent_excess_noise_general(v_b: f64, g: f64, t_a: f64, t_b: f64, eps_a: f64, eps_b: f64) -> f64 {
    let chi_a = 1.0 / t_a - 1.0 + eps_a;
    let chi_b = 1.0 / t_b - 1.0 + eps_b;
    let mismatch = (2.0 / (t_b * g * g)).sqrt() * (v_b - 1.0).sqrt() - (v_b + 1.0).sqrt();
    (t_b / t_a) * mismatch * mismatch + (t_b / t_a) * (chi_b - 1.0) + chi_a + 1.0
}

pub fn effective_channel(link: &LinkParams) -> Result<EffectiveChannel> {
    link.validate()?;
    let t_a = transmittance(link.l_ac, link.loss_coeff);
    let t_b = transmittance(link.l_bc, link.loss_coeff);
    if !(t_a > 0.0) {
        return Err(Error::Degenerate(format!("T_A underflows to 0 at L_AC = {} km", link.l_ac)));
    }
    let g_sq = displacement_gain_sq(link.v_b, t_b)?;
    let t = t_a * g_sq / 2.0;
    if t > 1.0 {
        return Err(Error::Degenerate(format!(
            "normalized transmittance {t} exceeds 1 (L_BC = {} km ≫ L_AC = {} km)",
            link.l_bc, link.l_ac
        )));
    }
    let eps_th = (t_b / t_a) * (link.eps_b - 2.0) + link.eps_a + 2.0 / t_a;
    let chi_line = (1.0 - t) / t + eps_th;
    let chi_hom = (link.v_el + 1.0 - link.eta) / link.eta;
    let chi_t = chi_line + 2.0 * chi_hom / t;
    Ok(EffectiveChannel { t_a, t_b, g_sq, t, eps_th, chi_line, chi_hom, chi_t })
}
