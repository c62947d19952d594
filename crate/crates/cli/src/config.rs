//! Command-line arguments and their validated form.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use jcxy_core::sweep::DEFAULT_GRID_POINTS;
use jcxy_core::{HalfInt, PhiGrid, Topology, DEFAULT_DEGENERACY_TOLERANCE, MAX_SITES};

use crate::error::CliError;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "jcxy",
    version,
    about = "Spectra of an XY spin molecule coupled to a one-photon cavity mode"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum at a single coupling angle or (G, J) point.
    Spectrum(SpectrumArgs),
    /// Normalized spectra over a grid of coupling angles.
    Sweep(SweepArgs),
    /// Distinct levels and top-level maximum for a range of open chains.
    Table(TableArgs),
    /// Check the structural invariants of one model.
    Verify(VerifyArgs),
    /// Dump the Hamiltonian in coordinate format.
    Matrix(MatrixArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of spins.
    #[arg(long = "n")]
    pub n_sites: usize,
    #[arg(long, default_value = "open-nn")]
    pub topology: String,
    /// Spin (1-based) carrying the photon coupling.
    #[arg(long, default_value_t = 1)]
    pub jc_site: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Size of the thread pool; the default uses all cores.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Coupling angle, G = cos(phi), J = sin(phi).
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "j")]
    pub g: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "g")]
    pub j: Option<f64>,
    /// Keep only the sectors with this |total_mz|, e.g. 7/2.
    #[arg(long)]
    pub sector: Option<String>,
    /// Degeneracy tolerance.
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of uniform grid points over [-pi/2, pi/2].
    #[arg(long, conflicts_with = "phi_list")]
    pub points: Option<usize>,
    /// Comma separated increasing angles; the endpoints are always added.
    #[arg(long, allow_hyphen_values = true)]
    pub phi_list: Option<String>,
    #[arg(long)]
    pub sector: Option<String>,
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Fix the photon site; by default odd chains scan k = 1..=ceil(N/2).
    #[arg(long)]
    pub jc_site: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Add a term that mixes invariant sectors (negative control).
    #[arg(long, hide = true)]
    pub inject_sector_breaking: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub j: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Grid request before it is turned into angles.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Count(usize),
    List(Vec<f64>),
}

impl GridSpec {
    pub fn build(&self) -> Result<PhiGrid, CliError> {
        let grid = match self {
            GridSpec::Count(count) => PhiGrid::uniform(*count),
            GridSpec::List(values) => PhiGrid::from_values(values.clone()),
        };
        grid.map_err(CliError::from)
    }
}

/// Validated model and output settings shared by the commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_sites: usize,
    pub topology: Topology,
    pub jc_site: usize,
    pub grid: GridSpec,
    pub tolerance: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub sector: Option<HalfInt>,
    pub workers: Option<usize>,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

pub fn parse_topology(text: &str) -> Result<Topology, CliError> {
    text.parse::<Topology>().map_err(|_| {
        let names: Vec<&str> = Topology::ALL.iter().map(|t| t.as_str()).collect();
        usage(format!(
            "unknown topology '{text}' (expected one of {})",
            names.join(", ")
        ))
    })
}

pub fn validate_model(model: &ModelArgs) -> Result<(usize, Topology, usize), CliError> {
    let topology = parse_topology(&model.topology)?;
    if model.n_sites == 0 || model.n_sites > MAX_SITES {
        return Err(usage(format!(
            "--n must be between 1 and {MAX_SITES}, got {}",
            model.n_sites
        )));
    }
    if model.jc_site == 0 || model.jc_site > model.n_sites {
        return Err(usage(format!(
            "--jc-site must be between 1 and {}, got {}",
            model.n_sites, model.jc_site
        )));
    }
    Ok((model.n_sites, topology, model.jc_site))
}

pub fn validate_tolerance(tol: f64) -> Result<f64, CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err(usage(format!(
            "--tol must be a non-negative number, got {tol}"
        )))
    }
}

fn validate_workers(workers: Option<usize>) -> Result<Option<usize>, CliError> {
    match workers {
        Some(0) => Err(usage("--workers must be at least 1")),
        w => Ok(w),
    }
}

fn parse_sector(text: Option<&str>, n_sites: usize) -> Result<Option<HalfInt>, CliError> {
    let Some(text) = text else { return Ok(None) };
    let value = HalfInt::parse(text)
        .filter(|v| v.twice() >= 0)
        .ok_or_else(|| {
            usage(format!(
                "--sector expects a non-negative half-integer such as 7/2, got '{text}'"
            ))
        })?;
    let n_bits = n_sites as i32 + 1;
    if value.twice() > n_bits || (n_bits - value.twice()) % 2 != 0 {
        return Err(usage(format!(
            "--sector {value} does not exist for {n_sites} spins"
        )));
    }
    Ok(Some(value))
}

fn parse_phi_list(text: &str) -> Result<Vec<f64>, CliError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(usage("--phi-list is empty"));
    }
    trimmed
        .split(',')
        .map(|item| {
            item.trim().parse::<f64>().map_err(|_| {
                usage(format!(
                    "--phi-list entry '{}' is not a number",
                    item.trim()
                ))
            })
        })
        .collect()
}

/// Single evaluation point of `spectrum`: `(phi, G, J)`.
pub fn spectrum_point(args: &SpectrumArgs) -> Result<(f64, f64, f64), CliError> {
    match (args.phi.as_slice(), args.g, args.j) {
        ([], Some(g), Some(j)) => {
            if !(g.is_finite() && j.is_finite()) || (g == 0.0 && j == 0.0) {
                return Err(usage("--g and --j must be finite and not both zero"));
            }
            Ok((j.atan2(g), g, j))
        }
        ([phi], None, None) => {
            if !phi.is_finite() {
                return Err(usage("--phi must be finite"));
            }
            let (g, j) = jcxy_core::sweep::couplings(*phi);
            Ok((*phi, g, j))
        }
        ([], None, None) => Err(usage("give either --phi or both --g and --j")),
        ([_], _, _) => Err(usage("--phi cannot be combined with --g/--j")),
        _ => Err(usage("only one --phi value is allowed")),
    }
}

impl RunConfig {
    pub fn for_spectrum(args: &SpectrumArgs) -> Result<(Self, (f64, f64, f64)), CliError> {
        let (n_sites, topology, jc_site) = validate_model(&args.model)?;
        let point = spectrum_point(args)?;
        let config = RunConfig {
            n_sites,
            topology,
            jc_site,
            grid: GridSpec::List(vec![point.0]),
            tolerance: validate_tolerance(args.tol)?,
            format: args.output.format,
            out: args.output.out.clone(),
            sector: parse_sector(args.sector.as_deref(), n_sites)?,
            workers: validate_workers(args.output.workers)?,
        };
        Ok((config, point))
    }

    pub fn for_sweep(args: &SweepArgs) -> Result<Self, CliError> {
        let (n_sites, topology, jc_site) = validate_model(&args.model)?;
        let grid = match (&args.points, &args.phi_list) {
            (Some(_), Some(_)) => return Err(usage("--points and --phi-list are exclusive")),
            (Some(count), None) => GridSpec::Count(*count),
            (None, Some(list)) => GridSpec::List(parse_phi_list(list)?),
            (None, None) => GridSpec::Count(DEFAULT_GRID_POINTS),
        };
        grid.build()?;
        Ok(RunConfig {
            n_sites,
            topology,
            jc_site,
            grid,
            tolerance: validate_tolerance(args.tol)?,
            format: args.output.format,
            out: args.output.out.clone(),
            sector: parse_sector(args.sector.as_deref(), n_sites)?,
            workers: validate_workers(args.output.workers)?,
        })
    }
}

/// Validated `table` request.
#[derive(Debug, Clone, PartialEq)]
pub struct TableConfig {
    pub n_range: std::ops::RangeInclusive<usize>,
    pub jc_site: Option<usize>,
    pub tolerance: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl TableConfig {
    pub fn from_args(args: &TableArgs) -> Result<Self, CliError> {
        if args.n_min < 1 || args.n_min > args.n_max || args.n_max > MAX_SITES {
            return Err(usage(format!(
                "need 1 <= --n-min <= --n-max <= {MAX_SITES}, got {}..{}",
                args.n_min, args.n_max
            )));
        }
        if let Some(k) = args.jc_site {
            if k == 0 || k > args.n_min {
                return Err(usage(format!(
                    "--jc-site {k} must lie in 1..={} for every chain in the range",
                    args.n_min
                )));
            }
        }
        Ok(TableConfig {
            n_range: args.n_min..=args.n_max,
            jc_site: args.jc_site,
            tolerance: validate_tolerance(args.tol)?,
            format: args.output.format,
            out: args.output.out.clone(),
            workers: validate_workers(args.output.workers)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("jcxy").chain(args.iter().copied()))
    }

    fn spectrum_args(args: &[&str]) -> SpectrumArgs {
        match parse(args).unwrap().command {
            Command::Spectrum(a) => a,
            other => panic!("unexpected {other:?}"),
        }
    }

    fn sweep_args(args: &[&str]) -> SweepArgs {
        match parse(args).unwrap().command {
            Command::Sweep(a) => a,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spectrum_needs_exactly_one_point() {
        let a = spectrum_args(&["spectrum", "--n", "2", "--phi", "0", "--phi", "0.5"]);
        assert!(matches!(
            RunConfig::for_spectrum(&a),
            Err(CliError::Usage(_))
        ));
        let a = spectrum_args(&["spectrum", "--n", "2"]);
        assert!(matches!(
            RunConfig::for_spectrum(&a),
            Err(CliError::Usage(_))
        ));
        let a = spectrum_args(&["spectrum", "--n", "2", "--phi", "-1.2"]);
        let (config, (phi, _, _)) = RunConfig::for_spectrum(&a).unwrap();
        assert_eq!(phi, -1.2);
        assert_eq!(config.topology, Topology::OpenNN);
        let a = spectrum_args(&["spectrum", "--n", "2", "--g", "0", "--j", "-2"]);
        let (_, (phi, g, j)) = RunConfig::for_spectrum(&a).unwrap();
        assert_eq!((phi, g, j), (-std::f64::consts::FRAC_PI_2, 0.0, -2.0));
    }

    #[test]
    fn model_validation() {
        for bad in [
            &["spectrum", "--n", "0", "--phi", "0"][..],
            &["spectrum", "--n", "15", "--phi", "0"],
            &["spectrum", "--n", "3", "--jc-site", "4", "--phi", "0"],
            &["spectrum", "--n", "3", "--topology", "ring", "--phi", "0"],
            &["spectrum", "--n", "3", "--phi", "0", "--sector", "3/2"],
            &["spectrum", "--n", "3", "--phi", "0", "--sector", "abc"],
            &["spectrum", "--n", "3", "--phi", "0", "--tol=-1"],
            &["spectrum", "--n", "3", "--phi", "0", "--workers", "0"],
        ] {
            let a = spectrum_args(bad);
            assert!(
                matches!(RunConfig::for_spectrum(&a), Err(CliError::Usage(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn sweep_grids() {
        let c = RunConfig::for_sweep(&sweep_args(&["sweep", "--n", "3"])).unwrap();
        assert_eq!(c.grid, GridSpec::Count(721));
        let c = RunConfig::for_sweep(&sweep_args(&[
            "sweep",
            "--n",
            "3",
            "--phi-list",
            "-0.5, 0.25",
        ]))
        .unwrap();
        assert_eq!(c.grid, GridSpec::List(vec![-0.5, 0.25]));
        for bad in [
            &["sweep", "--n", "3", "--phi-list", ""][..],
            &["sweep", "--n", "3", "--points", "0"],
            &["sweep", "--n", "3", "--phi-list", "0.3,0.1"],
            &["sweep", "--n", "3", "--phi-list", "2.0"],
        ] {
            assert!(RunConfig::for_sweep(&sweep_args(bad)).is_err(), "{bad:?}");
        }
        let c =
            RunConfig::for_sweep(&sweep_args(&["sweep", "--n", "6", "--sector", "7/2"])).unwrap();
        assert_eq!(c.sector, Some(HalfInt::from_twice(7)));
        assert!(parse(&["sweep", "--n", "3", "--points", "5", "--phi-list", "0"]).is_err());
    }

    #[test]
    fn table_range() {
        let args = |extra: &[&str]| match parse(&[&["table"][..], extra].concat()).unwrap().command
        {
            Command::Table(a) => a,
            other => panic!("unexpected {other:?}"),
        };
        let c = TableConfig::from_args(&args(&[])).unwrap();
        assert_eq!(c.n_range, 2..=10);
        assert!(TableConfig::from_args(&args(&["--n-min", "5", "--n-max", "4"])).is_err());
        assert!(TableConfig::from_args(&args(&["--n-min", "2", "--jc-site", "3"])).is_err());
    }
}
