//! Run configuration: built-in defaults, overridden by an optional flat JSON
//! file, overridden by command-line flags. Every field remembers where its
//! value came from.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use psmdi::channel::DEFAULT_LOSS_DB_PER_KM;
use psmdi::studies::TpsPolicy;
use psmdi::{Geometry, LinkParams, ProtocolConfig, SourceParams};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Default,
    File,
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Default => "default",
            Origin::File => "file",
            Origin::Flag => "flag",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sourced<T> {
    pub value: T,
    pub origin: Origin,
}

impl<T> Sourced<T> {
    fn default(value: T) -> Self {
        Self { value, origin: Origin::Default }
    }

    /// Takes the first present layer, highest precedence first.
    fn layer(&mut self, file: Option<T>, flag: Option<T>) {
        if let Some(v) = flag {
            *self = Self { value: v, origin: Origin::Flag };
        } else if let Some(v) = file {
            *self = Self { value: v, origin: Origin::File };
        }
    }
}

/// Beam-splitter transmittance: a number, or the success-maximizing value
/// for the configured `(V, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tps {
    Optimal,
    Fixed(f64),
}

impl fmt::Display for Tps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tps::Optimal => f.write_str("optimal"),
            Tps::Fixed(t) => write!(f, "{t}"),
        }
    }
}

impl std::str::FromStr for Tps {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("optimal") {
            return Ok(Tps::Optimal);
        }
        s.parse().map(Tps::Fixed).map_err(|_| format!("expected a number or `optimal`, got `{s}`"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TpsValue {
    Number(f64),
    Text(String),
}

/// The config file: a flat JSON object; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "V")]
    v: Option<f64>,
    k: Option<u32>,
    #[serde(rename = "T_PS")]
    t_ps: Option<TpsValue>,
    mode: Option<String>,
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "L_AC")]
    l_ac: Option<f64>,
    #[serde(rename = "L_BC")]
    l_bc: Option<f64>,
    loss_coeff: Option<f64>,
    eps: Option<f64>,
    #[serde(rename = "eps_A")]
    eps_a: Option<f64>,
    #[serde(rename = "eps_B")]
    eps_b: Option<f64>,
    eta: Option<f64>,
    v_el: Option<f64>,
    beta: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

/// Protocol flags shared by every computing subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Flat JSON config file (keys: V, k, T_PS, mode, L, L_AC, L_BC,
    /// loss_coeff, eps, eps_A, eps_B, eta, v_el, beta)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// EPR variance V_A = V_B (SNU)
    #[arg(long = "V", value_name = "V")]
    pub v: Option<f64>,
    /// Photons subtracted
    #[arg(long)]
    pub k: Option<u32>,
    /// Subtraction beam-splitter transmittance, or `optimal`
    #[arg(long)]
    pub tps: Option<Tps>,
    /// Relay placement: symmetric | extreme-asym
    #[arg(long)]
    pub mode: Option<String>,
    /// Alice–Bob distance, km, split according to --mode
    #[arg(long = "L", value_name = "KM")]
    pub l: Option<f64>,
    /// Alice–relay distance, km (overrides the --mode split)
    #[arg(long)]
    pub lac: Option<f64>,
    /// Bob–relay distance, km (overrides the --mode split)
    #[arg(long)]
    pub lbc: Option<f64>,
    /// Fiber loss, dB/km
    #[arg(long)]
    pub loss: Option<f64>,
    /// Excess noise on both links (SNU)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Excess noise on Alice's link
    #[arg(long = "eps-a")]
    pub eps_a: Option<f64>,
    /// Excess noise on Bob's link
    #[arg(long = "eps-b")]
    pub eps_b: Option<f64>,
    /// Homodyne efficiency
    #[arg(long)]
    pub eta: Option<f64>,
    /// Homodyne electronic noise (SNU)
    #[arg(long)]
    pub vel: Option<f64>,
    /// Reconciliation efficiency
    #[arg(long)]
    pub beta: Option<f64>,
}

/// Every protocol input, resolved, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub v: Sourced<f64>,
    pub k: Sourced<u32>,
    pub t_ps: Sourced<Tps>,
    pub mode: Sourced<Geometry>,
    pub l: Sourced<f64>,
    pub l_ac: Option<Sourced<f64>>,
    pub l_bc: Option<Sourced<f64>>,
    pub loss_coeff: Sourced<f64>,
    pub eps_a: Sourced<f64>,
    pub eps_b: Sourced<f64>,
    pub eta: Sourced<f64>,
    pub v_el: Sourced<f64>,
    pub beta: Sourced<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let link = LinkParams::default();
        Self {
            v: Sourced::default(15.0),
            k: Sourced::default(0),
            t_ps: Sourced::default(Tps::Optimal),
            mode: Sourced::default(Geometry::ExtremeAsymmetric),
            l: Sourced::default(0.0),
            l_ac: None,
            l_bc: None,
            loss_coeff: Sourced::default(DEFAULT_LOSS_DB_PER_KM),
            eps_a: Sourced::default(link.eps_a),
            eps_b: Sourced::default(link.eps_b),
            eta: Sourced::default(link.eta),
            v_el: Sourced::default(link.v_el),
            beta: Sourced::default(0.96),
        }
    }
}

fn parse_mode(s: &str) -> Result<Geometry, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("unknown mode `{s}` (expected symmetric or extreme-asym)")))
}

fn optional_layer(slot: &mut Option<Sourced<f64>>, file: Option<f64>, flag: Option<f64>) {
    if let Some(v) = flag {
        *slot = Some(Sourced { value: v, origin: Origin::Flag });
    } else if let Some(v) = file {
        *slot = Some(Sourced { value: v, origin: Origin::File });
    }
}

impl RunConfig {
    /// Loads `args.config` if given and applies all layers.
    pub fn from_args(args: &ConfigArgs) -> Result<Self, CliError> {
        let file = match args.config {
            Some(ref path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::resolve(file, args)
    }

    pub fn resolve(file: FileConfig, flags: &ConfigArgs) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.v.layer(file.v, flags.v);
        cfg.k.layer(file.k, flags.k);
        let file_tps = match file.t_ps {
            None => None,
            Some(TpsValue::Number(t)) => Some(Tps::Fixed(t)),
            Some(TpsValue::Text(s)) => Some(s.parse::<Tps>().map_err(|e| CliError::Usage(format!("T_PS: {e}")))?),
        };
        cfg.t_ps.layer(file_tps, flags.tps);
        let file_mode = file.mode.as_deref().map(parse_mode).transpose()?;
        let flag_mode = flags.mode.as_deref().map(parse_mode).transpose()?;
        cfg.mode.layer(file_mode, flag_mode);
        cfg.l.layer(file.l, flags.l);
        optional_layer(&mut cfg.l_ac, file.l_ac, flags.lac);
        optional_layer(&mut cfg.l_bc, file.l_bc, flags.lbc);
        cfg.loss_coeff.layer(file.loss_coeff, flags.loss);
        // The shared `eps` sits just below the per-link keys of the same layer.
        cfg.eps_a.layer(file.eps_a.or(file.eps), flags.eps_a.or(flags.eps));
        cfg.eps_b.layer(file.eps_b.or(file.eps), flags.eps_b.or(flags.eps));
        cfg.eta.layer(file.eta, flags.eta);
        cfg.v_el.layer(file.v_el, flags.vel);
        cfg.beta.layer(file.beta, flags.beta);
        Ok(cfg)
    }

    pub fn tps_policy(&self) -> TpsPolicy {
        match self.t_ps.value {
            Tps::Optimal => TpsPolicy::MaxSuccess,
            Tps::Fixed(_) => TpsPolicy::Fixed,
        }
    }

    /// The protocol configuration at distance `l_ab` under the configured
    /// geometry, with explicit `L_AC` / `L_BC` taking precedence.
    pub fn protocol_at(&self, l_ab: f64) -> Result<ProtocolConfig, CliError> {
        let t_ps = match self.t_ps.value {
            Tps::Fixed(t) => t,
            Tps::Optimal => 1.0,
        };
        let base = ProtocolConfig {
            source: SourceParams { v: self.v.value, k: self.k.value, t_ps },
            link: LinkParams {
                l_ac: 0.0,
                l_bc: 0.0,
                loss_coeff: self.loss_coeff.value,
                eps_a: self.eps_a.value,
                eps_b: self.eps_b.value,
                v_b: self.v.value,
                eta: self.eta.value,
                v_el: self.v_el.value,
            },
            beta: self.beta.value,
        };
        let mut cfg = self.mode.value.place(&base, l_ab);
        if let Some(l) = self.l_ac {
            cfg.link.l_ac = l.value;
        }
        if let Some(l) = self.l_bc {
            cfg.link.l_bc = l.value;
        }
        let cfg = self.tps_policy().apply(cfg)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The configuration at the configured distance `L`.
    pub fn protocol(&self) -> Result<ProtocolConfig, CliError> {
        self.protocol_at(self.l.value)
    }

    /// `key = value (origin)` lines for the output header.
    pub fn provenance(&self) -> Vec<(String, String)> {
        fn line<T: fmt::Display>(name: &str, s: &Sourced<T>) -> (String, String) {
            (name.to_string(), format!("{} ({})", s.value, s.origin))
        }
        let mut out = vec![
            line("V", &self.v),
            line("k", &self.k),
            line("T_PS", &self.t_ps),
            line("mode", &self.mode),
            line("L", &self.l),
        ];
        for (name, slot) in [("L_AC", &self.l_ac), ("L_BC", &self.l_bc)] {
            if let Some(s) = slot {
                out.push(line(name, s));
            }
        }
        out.extend([
            line("loss_coeff", &self.loss_coeff),
            line("eps_A", &self.eps_a),
            line("eps_B", &self.eps_b),
            line("eta", &self.eta),
            line("v_el", &self.v_el),
            line("beta", &self.beta),
        ]);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_library() {
        let cfg = RunConfig::default().protocol().unwrap();
        assert_eq!(cfg, ProtocolConfig::default());
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = FileConfig::parse(r#"{"V": 40, "k": 1, "eta": 0.9, "eps": 0.02, "mode": "symmetric"}"#).unwrap();
        let flags = ConfigArgs { v: Some(60.0), eps_b: Some(0.05), ..ConfigArgs::default() };
        let run = RunConfig::resolve(file, &flags).unwrap();
        assert_eq!(run.v, Sourced { value: 60.0, origin: Origin::Flag });
        assert_eq!(run.k, Sourced { value: 1, origin: Origin::File });
        assert_eq!(run.eta, Sourced { value: 0.9, origin: Origin::File });
        assert_eq!(run.eps_a, Sourced { value: 0.02, origin: Origin::File });
        assert_eq!(run.eps_b, Sourced { value: 0.05, origin: Origin::Flag });
        assert_eq!(run.beta.origin, Origin::Default);
        assert_eq!(run.mode.value, Geometry::Symmetric);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(FileConfig::parse(r#"{"V": 15, "colour": 3}"#).is_err());
    }

    #[test]
    fn tps_forms() {
        let file = FileConfig::parse(r#"{"T_PS": "optimal", "k": 1}"#).unwrap();
        let run = RunConfig::resolve(file, &ConfigArgs::default()).unwrap();
        let t = run.protocol().unwrap().source.t_ps;
        assert!((t - 6.0 / 7.0).abs() < 1e-12);

        let file = FileConfig::parse(r#"{"T_PS": 0.5, "k": 1}"#).unwrap();
        let run = RunConfig::resolve(file, &ConfigArgs::default()).unwrap();
        assert_eq!(run.protocol().unwrap().source.t_ps, 0.5);

        let file = FileConfig::parse(r#"{"T_PS": "half"}"#).unwrap();
        assert!(RunConfig::resolve(file, &ConfigArgs::default()).is_err());
    }

    #[test]
    fn geometry_split_and_explicit_lengths() {
        let flags = ConfigArgs { mode: Some("symmetric".into()), l: Some(10.0), ..ConfigArgs::default() };
        let cfg = RunConfig::resolve(FileConfig::default(), &flags).unwrap().protocol().unwrap();
        assert_eq!((cfg.link.l_ac, cfg.link.l_bc), (5.0, 5.0));

        let flags = ConfigArgs { l: Some(10.0), lbc: Some(2.0), ..ConfigArgs::default() };
        let cfg = RunConfig::resolve(FileConfig::default(), &flags).unwrap().protocol().unwrap();
        assert_eq!((cfg.link.l_ac, cfg.link.l_bc), (10.0, 2.0));
    }

    #[test]
    fn bad_values_are_domain_errors() {
        let flags = ConfigArgs { eta: Some(1.5), ..ConfigArgs::default() };
        let err = RunConfig::resolve(FileConfig::default(), &flags).unwrap().protocol().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
