use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::TpsPolicy;
use crate::error::{Error, Result};
use crate::keyrate::{self, ProtocolConfig, RateReport};

/// Sweepable inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parameter {
    /// `V_A = V_B`
    V,
    K,
    TPs,
    LAc,
    LBc,
    /// Total length with the relay in the middle.
    LAbSymmetric,
    Eta,
    VEl,
    Beta,
    /// `ε_A = ε_B`
    Eps,
}

impl Parameter {
    pub const ALL: [Parameter; 10] = [
        Parameter::V,
        Parameter::K,
        Parameter::TPs,
        Parameter::LAc,
        Parameter::LBc,
        Parameter::LAbSymmetric,
        Parameter::Eta,
        Parameter::VEl,
        Parameter::Beta,
        Parameter::Eps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::V => "V",
            Parameter::K => "k",
            Parameter::TPs => "T_PS",
            Parameter::LAc => "L_AC",
            Parameter::LBc => "L_BC",
            Parameter::LAbSymmetric => "L_AB_symmetric",
            Parameter::Eta => "eta",
            Parameter::VEl => "v_el",
            Parameter::Beta => "beta",
            Parameter::Eps => "eps",
        }
    }

    /// Writes `value` into `cfg`.
    pub fn set(self, cfg: &mut ProtocolConfig, value: f64) -> Result<()> {
        match self {
            Parameter::V => *cfg = cfg.with_variance(value),
            Parameter::K => {
                if !(value >= 0.0) || value.fract() != 0.0 || value > f64::from(u16::MAX) {
                    return Err(Error::Domain(format!("k = {value} is not a photon number")));
                }
                cfg.source.k = value as u32;
            }
            Parameter::TPs => cfg.source.t_ps = value,
            Parameter::LAc => cfg.link.l_ac = value,
            Parameter::LBc => cfg.link.l_bc = value,
            Parameter::LAbSymmetric => *cfg = cfg.with_distances(value / 2.0, value / 2.0),
            Parameter::Eta => cfg.link.eta = value,
            Parameter::VEl => cfg.link.v_el = value,
            Parameter::Beta => cfg.beta = value,
            Parameter::Eps => {
                cfg.link.eps_a = value;
                cfg.link.eps_b = value;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parameter::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

/// Axis values: an explicit list or `steps` evenly spaced points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Grid {
    List(Vec<f64>),
    Range { min: f64, max: f64, steps: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::List(ref v) => v.clone(),
            Grid::Range { min, max, steps } => match steps {
                0 => Vec::new(),
                1 => vec![min],
                n => (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let values = self.values();
        if values.is_empty() {
            return Err(Error::InvalidStudy("empty grid".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStudy("grid values must be finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidStudy("grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `min:max:steps` or a comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidStudy(format!("cannot parse grid `{s}`"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let grid = if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let steps = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
            Grid::Range { min: num(parts[0])?, max: num(parts[1])?, steps }
        } else {
            Grid::List(s.split(',').map(num).collect::<Result<_>>()?)
        };
        grid.validate()?;
        Ok(grid)
    }
}

/// Columns that can be pulled from a [`RateReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Output {
    P,
    A,
    B,
    C,
    IAb,
    Lambda1,
    Lambda2,
    Lambda3,
    ChiBe,
    KRaw,
    K,
}

impl Output {
    pub const ALL: [Output; 11] = [
        Output::P,
        Output::A,
        Output::B,
        Output::C,
        Output::IAb,
        Output::Lambda1,
        Output::Lambda2,
        Output::Lambda3,
        Output::ChiBe,
        Output::KRaw,
        Output::K,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::P => "P",
            Output::A => "a",
            Output::B => "b",
            Output::C => "c",
            Output::IAb => "I_AB",
            Output::Lambda1 => "lambda1",
            Output::Lambda2 => "lambda2",
            Output::Lambda3 => "lambda3",
            Output::ChiBe => "chi_BE",
            Output::KRaw => "K_raw",
            Output::K => "K",
        }
    }

    pub fn get(self, r: &RateReport) -> f64 {
        match self {
            Output::P => r.p,
            Output::A => r.cov.a,
            Output::B => r.cov.b,
            Output::C => r.cov.c,
            Output::IAb => r.i_ab,
            Output::Lambda1 => r.lambda1,
            Output::Lambda2 => r.lambda2,
            Output::Lambda3 => r.lambda3,
            Output::ChiBe => r.chi_be,
            Output::KRaw => r.k_raw,
            Output::K => r.k,
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // `K` and `k` differ only in case, so match exactly first.
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .or_else(|| Output::ALL.into_iter().find(|o| o.name().eq_ignore_ascii_case(s)))
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: ProtocolConfig,
    pub axis1: (Parameter, Grid),
    pub axis2: Option<(Parameter, Grid)>,
    pub outputs: Vec<Output>,
    pub tps_policy: TpsPolicy,
}

impl SweepSpec {
    pub fn new(base: ProtocolConfig, axis: Parameter, grid: Grid) -> Self {
        Self { base, axis1: (axis, grid), axis2: None, outputs: vec![Output::KRaw, Output::K], tps_policy: TpsPolicy::Fixed }
    }

    pub fn validate(&self) -> Result<()> {
        self.axis1.1.validate()?;
        if let Some((p, ref g)) = self.axis2 {
            g.validate()?;
            if p == self.axis1.0 {
                return Err(Error::InvalidStudy(format!("axis {p} given twice")));
            }
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidStudy("no outputs selected".into()));
        }
        Ok(())
    }

    /// Axis coordinates in row-major order (axis 1 outer).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let first = self.axis1.1.values();
        match self.axis2 {
            None => first.into_iter().map(|x| vec![x]).collect(),
            Some((_, ref g)) => {
                let second = g.values();
                first.iter().flat_map(|&x| second.iter().map(move |&y| vec![x, y])).collect()
            }
        }
    }

    pub fn axes(&self) -> Vec<Parameter> {
        std::iter::once(self.axis1.0).chain(self.axis2.as_ref().map(|a| a.0)).collect()
    }

    /// The resolved configuration at one grid point.
    pub fn config_at(&self, coords: &[f64]) -> Result<ProtocolConfig> {
        let mut cfg = self.base;
        let axes = self.axes();
        for (&axis, &value) in axes.iter().zip(coords) {
            axis.set(&mut cfg, value)?;
        }
        if !axes.contains(&Parameter::TPs) {
            cfg = self.tps_policy.apply(cfg)?;
        }
        Ok(cfg)
    }

    fn evaluate(&self, coords: &[f64]) -> SweepRow {
        let values = self
            .config_at(coords)
            .and_then(|cfg| keyrate::secret_key_rate(&cfg))
            .map(|r| self.outputs.iter().map(|o| o.get(&r)).collect())
            .map_err(|e| e.to_string());
        SweepRow { axis_values: coords.to_vec(), values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_values: Vec<f64>,
    /// Selected outputs, or the reason the point could not be evaluated.
    pub values: std::result::Result<Vec<f64>, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

pub fn sweep(spec: &SweepSpec) -> Result<StudyResult> {
    sweep_with_jobs(spec, 1)
}

/// Evaluates every grid point, fanning out over `jobs` worker threads. Row
/// order is the grid order regardless of `jobs`.
pub fn sweep_with_jobs(spec: &SweepSpec, jobs: usize) -> Result<StudyResult> {
    spec.validate()?;
    let points = spec.points();
    let rows = if jobs <= 1 {
        points.iter().map(|p| spec.evaluate(p)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidStudy(format!("thread pool: {e}")))?;
        pool.install(|| points.par_iter().map(|p| spec.evaluate(p)).collect())
    };
    Ok(StudyResult { spec: spec.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("T_PS".parse::<Parameter>().unwrap(), Parameter::TPs);
        assert_eq!("l_ab_symmetric".parse::<Parameter>().unwrap(), Parameter::LAbSymmetric);
        assert!("gamma".parse::<Parameter>().is_err());
        assert_eq!("K".parse::<Output>().unwrap(), Output::K);
        assert_eq!("k_raw".parse::<Output>().unwrap(), Output::KRaw);
    }

    #[test]
    fn parse_grids() {
        assert_eq!("0:10:3".parse::<Grid>().unwrap().values(), vec![0.0, 5.0, 10.0]);
        assert_eq!("1, 2,4".parse::<Grid>().unwrap().values(), vec![1.0, 2.0, 4.0]);
        assert!("3,2".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("a:b".parse::<Grid>().is_err());
    }

    #[test]
    fn single_point_matches_engine() {
        let base = ProtocolConfig::default().with_distances(5.0, 0.0);
        let spec = SweepSpec::new(base, Parameter::LAc, Grid::List(vec![5.0]));
        let result = sweep(&spec).unwrap();
        let r = keyrate::secret_key_rate(&base).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.rows[0].values, Ok(vec![r.k_raw, r.k]));
    }

    #[test]
    fn two_axis_row_major() {
        let mut spec = SweepSpec::new(ProtocolConfig::default(), Parameter::LAc, "0:10:3".parse().unwrap());
        spec.axis2 = Some((Parameter::K, "0,1,2,3".parse().unwrap()));
        spec.tps_policy = TpsPolicy::MaxSuccess;
        let result = sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 12);
        assert_eq!(result.rows[0].axis_values, vec![0.0, 0.0]);
        assert_eq!(result.rows[1].axis_values, vec![0.0, 1.0]);
        assert_eq!(result.rows[4].axis_values, vec![5.0, 0.0]);
        assert!(result.rows.iter().all(|r| r.values.is_ok()));
    }

    #[test]
    fn degenerate_points_are_marked_not_dropped() {
        // k = 1 with T_PS = 1 never heralds.
        let spec = SweepSpec::new(ProtocolConfig::default(), Parameter::K, Grid::List(vec![0.0, 1.0]));
        let result = sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 2);
        assert!(result.rows[0].values.is_ok());
        assert!(result.rows[1].values.is_err());
    }

    #[test]
    fn parallel_order_is_stable() {
        let spec = SweepSpec::new(ProtocolConfig::default(), Parameter::LAc, "0:40:97".parse().unwrap());
        assert_eq!(sweep_with_jobs(&spec, 1).unwrap(), sweep_with_jobs(&spec, 4).unwrap());
    }
}
