use clap::{Args, Subcommand};
use psmdi::fock::{self, DEFAULT_TRUNCATION_TOL};
use psmdi::source::{optimal_tps, success_probability};
use psmdi::studies::{self, Crossover, Grid, Output, Parameter, SweepSpec};
use psmdi::{plob_bound, secret_key_rate, SourceParams};

use crate::config::{ConfigArgs, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};
use crate::OutputArgs;

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_with<T, E>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr<Err = E>,
    E: std::fmt::Display,
{
    s.parse().map_err(|e: E| e.to_string())
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn meta(table: &mut Table, key: &str, value: impl ToString) {
    table.meta.push((key.to_string(), value.to_string()));
}

pub fn rate(args: &ConfigArgs) -> Result<Table, CliError> {
    let run = RunConfig::from_args(args)?;
    let cfg = run.protocol()?;
    let r = secret_key_rate(&cfg)?;
    let mut table = Table::new(
        "rate",
        columns(&[
            "L_AC", "L_BC", "T_PS", "P", "a", "b", "c", "I_AB", "lambda1", "lambda2", "lambda3", "chi_BE", "K_raw",
            "K", "PLOB",
        ]),
    );
    table.meta = run.provenance();
    table.push(
        [
            cfg.link.l_ac,
            cfg.link.l_bc,
            cfg.source.t_ps,
            r.p,
            r.cov.a,
            r.cov.b,
            r.cov.c,
            r.i_ab,
            r.lambda1,
            r.lambda2,
            r.lambda3,
            r.chi_be,
            r.k_raw,
            r.k,
            plob_bound(cfg.l_ab(), cfg.link.loss_coeff),
        ]
        .map(Cell::from)
        .to_vec(),
    );
    Ok(table)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Swept parameter: V, k, T_PS, L_AC, L_BC, L_AB_symmetric, eta, v_el, beta, eps
    #[arg(long, value_parser = parse_with::<Parameter, psmdi::Error>)]
    pub axis: Parameter,
    /// `min:max:steps` or a comma-separated list
    #[arg(long, value_parser = parse_with::<Grid, psmdi::Error>)]
    pub grid: Grid,
    /// Optional second (inner) axis
    #[arg(long, requires = "grid2", value_parser = parse_with::<Parameter, psmdi::Error>)]
    pub axis2: Option<Parameter>,
    #[arg(long, requires = "axis2", value_parser = parse_with::<Grid, psmdi::Error>)]
    pub grid2: Option<Grid>,
    /// Comma-separated outputs: P, a, b, c, I_AB, lambda1, lambda2, lambda3, chi_BE, K_raw, K
    #[arg(long, value_delimiter = ',', default_value = "K_raw,K", value_parser = parse_with::<Output, psmdi::Error>)]
    pub outputs: Vec<Output>,
    /// Worker threads; row order does not depend on it
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn sweep(args: &SweepArgs) -> Result<Table, CliError> {
    let run = RunConfig::from_args(&args.config)?;
    let mut spec = SweepSpec::new(run.protocol()?, args.axis, args.grid.clone());
    spec.axis2 = args.axis2.zip(args.grid2.clone());
    spec.outputs = args.outputs.clone();
    spec.tps_policy = run.tps_policy();
    spec.validate().map_err(usage)?;
    let result = studies::sweep_with_jobs(&spec, usize::from(args.jobs))?;

    let mut cols: Vec<String> = spec.axes().iter().map(|p| p.name().to_string()).collect();
    cols.extend(spec.outputs.iter().map(|o| o.name().to_string()));
    cols.push("error".into());
    let mut table = Table::new("sweep", cols);
    table.meta = run.provenance();
    meta(&mut table, "axis", args.axis);
    if let Some(a) = args.axis2 {
        meta(&mut table, "axis2", a);
    }
    for row in result.rows {
        let mut cells: Vec<Cell> = row.axis_values.into_iter().map(Cell::from).collect();
        match row.values {
            Ok(values) => {
                cells.extend(values.into_iter().map(Cell::from));
                cells.push(Cell::from(""));
            }
            Err(e) => {
                cells.extend(spec.outputs.iter().map(|_| Cell::from(f64::NAN)));
                cells.push(Cell::from(e));
            }
        }
        table.push(cells);
    }
    Ok(table)
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig3, fig4, fig5, fig6, fig7, fig8 or fig9
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(studies::FIGURES))]
    pub name: String,
    /// Signed rate K_raw instead of max(K_raw, 0)
    #[arg(long)]
    pub raw: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn figure(args: &FigureArgs) -> Result<Table, CliError> {
    let fig = studies::figure(&args.name, args.raw)?;
    let mut table = Table::new(format!("{}: {}", fig.name, fig.title), fig.columns);
    table.meta = fig.params;
    for row in fig.rows {
        table.push(row.into_iter().map(Cell::from).collect());
    }
    Ok(table)
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(subcommand)]
    pub target: OptimizeTarget,
}

#[derive(Debug, Subcommand)]
pub enum OptimizeTarget {
    /// Distance at which the key rate reaches zero
    MaxDistance {
        /// Root tolerance, km
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Variance V_A = V_B maximizing the key rate at --L
    Variance {
        #[arg(long, default_value_t = 1.1)]
        vmin: f64,
        #[arg(long, default_value_t = 1000.0)]
        vmax: f64,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Success-maximizing subtraction transmittance for (V, k)
    Tps {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lowest homodyne efficiency with positive key at --L
    EtaThreshold {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Where the key rate with --kb photons subtracted overtakes --ka
    Crossover {
        #[arg(long, default_value_t = 0)]
        ka: u32,
        #[arg(long, default_value_t = 1)]
        kb: u32,
        /// `distance` (relay placed by --mode) or a sweep parameter name
        #[arg(long, default_value = "distance")]
        along: String,
        /// Search interval, required unless --along distance
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl OptimizeArgs {
    pub fn output(&self) -> &OutputArgs {
        match self.target {
            OptimizeTarget::MaxDistance { ref output, .. }
            | OptimizeTarget::Variance { ref output, .. }
            | OptimizeTarget::Tps { ref output, .. }
            | OptimizeTarget::EtaThreshold { ref output, .. }
            | OptimizeTarget::Crossover { ref output, .. } => output,
        }
    }
}

type Verdict = Result<(), CliError>;

pub fn optimize(args: &OptimizeArgs) -> Result<(Table, Verdict), CliError> {
    match args.target {
        OptimizeTarget::MaxDistance { tol, ref config, .. } => {
            let run = RunConfig::from_args(config)?;
            let cfg = run.protocol()?;
            let l_max = studies::max_distance(&cfg, run.mode.value, tol)?;
            let mut table = Table::new("optimize max-distance", columns(&["L_max_km"]));
            table.meta = run.provenance();
            meta(&mut table, "tol_km", tol);
            table.push(vec![l_max.into()]);
            let verdict = if l_max > 0.0 {
                Ok(())
            } else {
                Err(CliError::NoResult("no key even at zero distance".into()))
            };
            Ok((table, verdict))
        }
        OptimizeTarget::Variance { vmin, vmax, ref config, .. } => {
            let run = RunConfig::from_args(config)?;
            let cfg = run.protocol()?;
            let (v, k) =
                studies::optimal_variance(&cfg, run.mode.value, run.l.value, (vmin, vmax), run.tps_policy())?;
            let mut table = Table::new("optimize variance", columns(&["V_opt", "K_raw"]));
            table.meta = run.provenance();
            meta(&mut table, "vmin", vmin);
            meta(&mut table, "vmax", vmax);
            table.push(vec![v.into(), k.into()]);
            Ok((table, Ok(())))
        }
        OptimizeTarget::Tps { ref config, .. } => {
            let run = RunConfig::from_args(config)?;
            let (v, k) = (run.v.value, run.k.value);
            let t = optimal_tps(v, k)?;
            let p = success_probability(&SourceParams::new(v, k, t)?)?;
            let mut table = Table::new("optimize tps", columns(&["V", "k", "T_PS_opt", "P"]));
            table.meta = run.provenance();
            table.push(vec![v.into(), f64::from(k).into(), t.into(), p.into()]);
            Ok((table, Ok(())))
        }
        OptimizeTarget::EtaThreshold { tol, ref config, .. } => {
            let run = RunConfig::from_args(config)?;
            let cfg = run.protocol()?;
            let eta = studies::eta_threshold(&cfg, run.mode.value, run.l.value, tol)?;
            let mut table = Table::new("optimize eta-threshold", columns(&["eta_min"]));
            table.meta = run.provenance();
            meta(&mut table, "tol", tol);
            table.push(vec![eta.into()]);
            Ok((table, Ok(())))
        }
        OptimizeTarget::Crossover { ka, kb, ref along, lo, hi, tol, ref config, .. } => {
            let run = RunConfig::from_args(config)?;
            let with_k = |k: u32| {
                let mut r = run.clone();
                r.k.value = k;
                r.protocol()
            };
            let (cfg_a, cfg_b) = (with_k(ka)?, with_k(kb)?);
            let (column, found) = if along == "distance" {
                ("L_cross_km", studies::crossover(&cfg_a, &cfg_b, run.mode.value, tol)?)
            } else {
                let axis: Parameter = along.parse().map_err(usage)?;
                let (Some(lo), Some(hi)) = (lo, hi) else {
                    return Err(CliError::Usage(format!("--along {along} needs --lo and --hi")));
                };
                if !(lo < hi) {
                    return Err(CliError::Usage(format!("empty interval [{lo}, {hi}]")));
                }
                ("crossing", studies::crossover_along(&cfg_a, &cfg_b, axis, (lo, hi), tol)?)
            };
            let mut table = Table::new("optimize crossover", columns(&[column]));
            table.meta = run.provenance();
            meta(&mut table, "ka", ka);
            meta(&mut table, "kb", kb);
            meta(&mut table, "along", along);
            let verdict = match found {
                Crossover::At(x) => {
                    table.push(vec![x.into()]);
                    Ok(())
                }
                Crossover::None => {
                    table.push(vec![f64::NAN.into()]);
                    Err(CliError::NoResult(format!("k = {ka} and k = {kb} never trade places")))
                }
            };
            Ok((table, verdict))
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Relative tolerance on P, X, Y, Z
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Fock truncation tolerance, relative to the heralding probability
    #[arg(long = "trunc-tol", default_value_t = DEFAULT_TRUNCATION_TOL)]
    pub trunc_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn validate(args: &ValidateArgs) -> Result<(Table, Verdict), CliError> {
    if !(args.tol > 0.0) || !(args.trunc_tol > 0.0 && args.trunc_tol < 1.0) {
        return Err(CliError::Usage("--tol must be > 0 and --trunc-tol in (0, 1)".into()));
    }
    let grid = fock::acceptance_grid();
    let reports = fock::validate_grid(&grid, args.tol, args.trunc_tol);
    let mut table = Table::new(
        "validate",
        columns(&["V", "T_PS", "k", "err_P", "err_X", "err_Y", "err_Z", "tail_bound", "pass", "error"]),
    );
    meta(&mut table, "tol", args.tol);
    meta(&mut table, "trunc_tol", args.trunc_tol);
    let mut failed = 0;
    for (&(v, t, k), report) in grid.iter().zip(&reports) {
        let mut cells = vec![v.into(), t.into(), f64::from(k).into()];
        match report {
            Ok(r) => {
                failed += usize::from(!r.pass);
                cells.extend([r.err_p, r.err_x, r.err_y, r.err_z, r.tail_bound].map(Cell::from));
                cells.push(r.pass.to_string().into());
                cells.push("".into());
            }
            Err(e) => {
                failed += 1;
                cells.extend([f64::NAN; 5].map(Cell::from));
                cells.push("false".into());
                cells.push(e.to_string().into());
            }
        }
        table.push(cells);
    }
    let verdict = if failed == 0 { Ok(()) } else { Err(CliError::ValidationFailed { failed, total: grid.len() }) };
    Ok((table, verdict))
}
