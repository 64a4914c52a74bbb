//! Parameter sweeps, optimizers, threshold finders and the figure presets.

pub mod optimize;
pub mod presets;
pub mod roots;
pub mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::keyrate::ProtocolConfig;
use crate::source::SourceParams;

pub use optimize::{crossover, crossover_along, eta_threshold, max_distance, optimal_variance, Crossover};
pub use presets::{figure, FigureTable, FIGURES};
pub use sweep::{sweep, sweep_with_jobs, Grid, Output, Parameter, StudyResult, SweepRow, SweepSpec};

/// Placement of the relay between Alice and Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Geometry {
    /// `L_AC = L_BC = L_AB / 2`
    Symmetric,
    /// Relay at Bob: `L_BC = 0`, `L_AC = L_AB`.
    ExtremeAsymmetric,
}

impl Geometry {
    pub fn place(self, cfg: &ProtocolConfig, l_ab: f64) -> ProtocolConfig {
        match self {
            Geometry::Symmetric => cfg.with_distances(l_ab / 2.0, l_ab / 2.0),
            Geometry::ExtremeAsymmetric => cfg.with_distances(l_ab, 0.0),
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Symmetric => "symmetric",
            Geometry::ExtremeAsymmetric => "extreme-asym",
        })
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" | "sym" => Ok(Geometry::Symmetric),
            "extreme-asym" | "extreme_asymmetric" | "extreme-asymmetric" | "asym" => {
                Ok(Geometry::ExtremeAsymmetric)
            }
            other => Err(Error::UnknownParameter(format!("geometry {other}"))),
        }
    }
}

/// How `T_PS` follows changes of `V` or `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum TpsPolicy {
    /// Keep whatever the configuration holds.
    #[default]
    Fixed,
    /// Re-derive the success-maximizing transmittance for the current
    /// `(V, k)`; `k = 0` means no beam splitter.
    MaxSuccess,
}

impl TpsPolicy {
    pub fn apply(self, mut cfg: ProtocolConfig) -> Result<ProtocolConfig> {
        if self == TpsPolicy::MaxSuccess {
            cfg.source = SourceParams::with_optimal_tps(cfg.source.v, cfg.source.k)?;
        }
        Ok(cfg)
    }
}

/// `cfg` at a new variance `V_A = V_B = v`, `T_PS` following `policy`.
pub fn at_variance(cfg: &ProtocolConfig, v: f64, policy: TpsPolicy) -> Result<ProtocolConfig> {
    policy.apply(cfg.with_variance(v))
}
