//! Asymptotic secret key rate under one-mode collective Gaussian attacks,
//! reverse reconciliation, and the repeaterless (PLOB) benchmark.

use serde::{Deserialize, Serialize};

use crate::channel::{self, EffectiveChannel, LinkParams};
use crate::error::{Error, Result};
use crate::gaussian::{self, BipartiteCovariance, PHYSICALITY_SLACK};
use crate::source::{self, SourceParams};

/// Full protocol input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub source: SourceParams,
    pub link: LinkParams,
    /// Reverse-reconciliation efficiency.
    pub beta: f64,
}

impl Default for ProtocolConfig {
    /// V = 15 baseline source, ε = 0.01 on both links, η = 0.975,
    /// v_el = 0.01, β = 0.96, zero distance.
    fn default() -> Self {
        Self {
            source: SourceParams { v: 15.0, k: 0, t_ps: 1.0 },
            link: LinkParams::default(),
            beta: 0.96,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.link.validate()?;
        if !(self.beta >= 0.0 && self.beta <= 1.0) {
            return Err(Error::Domain(format!("β = {} must lie in [0, 1]", self.beta)));
        }
        Ok(())
    }

    /// Sets `V_A = V_B = v`, keeping everything else.
    pub fn with_variance(mut self, v: f64) -> Self {
        self.source.v = v;
        self.link.v_b = v;
        self
    }

    pub fn with_distances(mut self, l_ac: f64, l_bc: f64) -> Self {
        self.link.l_ac = l_ac;
        self.link.l_bc = l_bc;
        self
    }

    /// Total Alice–Bob fiber length.
    pub fn l_ab(&self) -> f64 {
        self.link.l_ac + self.link.l_bc
    }
}

/// Everything computed for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub p: f64,
    pub cov: BipartiteCovariance,
    pub i_ab: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub chi_be: f64,
    /// Signed rate, bits per protocol use.
    pub k_raw: f64,
    /// `max(k_raw, 0)`.
    pub k: f64,
}

/// Alice–Bob covariance after the channel: `(X, T(Y + χ_t), √T·Z)`.
pub fn conditioned_covariance(cfg: &ProtocolConfig) -> Result<BipartiteCovariance> {
    let (_, cov, _) = assemble(cfg)?;
    Ok(cov)
}

fn assemble(cfg: &ProtocolConfig) -> Result<(f64, BipartiteCovariance, EffectiveChannel)> {
    cfg.validate()?;
    let src = source::subtracted_covariance(&cfg.source)?;
    let ch = channel::effective_channel(&cfg.link)?;
    let cov = BipartiteCovariance::new(src.x, ch.t * (src.y + ch.chi_t), ch.t.sqrt() * src.z)?;
    Ok((src.p, cov, ch))
}

/// Shannon information (bits) between two heterodyne records.
pub fn mutual_information(cov: &BipartiteCovariance) -> f64 {
    let r = cov.c * cov.c / ((cov.a + 1.0) * (cov.b + 1.0));
    // log2((a+1)/(a+1 − c²/(b+1))) = −log2(1 − r)
    (-(-r).ln_1p() / std::f64::consts::LN_2).max(0.0)
}

/// Holevo bound on Eve's information about Bob's heterodyne outcome.
pub fn holevo_bound(cov: &BipartiteCovariance) -> Result<f64> {
    let (l1, l2) = gaussian::symplectic_pair(cov)?;
    let l3 = gaussian::conditional_eigenvalue(cov)?;
    holevo_from_spectrum(l1, l2, l3)
}

fn holevo_from_spectrum(l1: f64, l2: f64, l3: f64) -> Result<f64> {
    let g = |l: f64| gaussian::entropy_g((l - 1.0) / 2.0);
    let chi = g(l1)? + g(l2)? - g(l3)?;
    if chi < -PHYSICALITY_SLACK {
        return Err(Error::Unphysical(format!("negative Holevo bound {chi:e}")));
    }
    Ok(chi.max(0.0))
}

pub fn secret_key_rate(cfg: &ProtocolConfig) -> Result<RateReport> {
    let (p, cov, _) = assemble(cfg)?;
    let i_ab = mutual_information(&cov);
    let (lambda1, lambda2) = gaussian::symplectic_pair(&cov)?;
    let lambda3 = gaussian::conditional_eigenvalue(&cov)?;
    let chi_be = holevo_from_spectrum(lambda1, lambda2, lambda3)?;
    let k_raw = p * (cfg.beta * i_ab - chi_be);
    Ok(RateReport { p, cov, i_ab, lambda1, lambda2, lambda3, chi_be, k_raw, k: k_raw.max(0.0) })
}

/// Repeaterless secret-key capacity `−log2(1 − T)` of the whole Alice–Bob
/// fiber; `+∞` at zero length.
pub fn plob_bound(l_ab: f64, loss_coeff: f64) -> f64 {
    let t = channel::transmittance(l_ab, loss_coeff);
    if t >= 1.0 {
        return f64::INFINITY;
    }
    -(-t).ln_1p() / std::f64::consts::LN_2
}
