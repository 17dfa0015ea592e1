use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bqte::config::DEFAULT_SEED;
use bqte::{
    default_battery, estimate_bqte, estimate_tail_curves, evaluation_grid, load_csv, load_scenarios,
    pool_trials, relative_curve, run_scenario, serialize_curve, serialize_curve_set,
    serialize_reports, serialize_summary, summarize, CsvOptions, CurveFormat, EffectCurve, Error,
    EstimatorConfig, EstimatorKind, GridPolicy, ImputationRule, Result, TrialDataset,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Back-transformed quantile treatment effects for two-group trials.
#[derive(Parser, Debug)]
#[command(name = "bqte", version)]
struct Cli {
    /// Worker threads for bootstrap and simulation (default: all cores).
    /// Results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// BQTE curve with bootstrap intervals.
    Estimate(CurveArgs),
    /// Upper and lower tail curves (UTBQTE, LTBQTE).
    Tails(CurveArgs),
    /// Mean difference and ratio of means.
    Summary(SummaryArgs),
    /// Monte Carlo bias, RMSE and coverage.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Trial CSV; repeat to pool several trials.
    #[arg(long = "input", short = 'i', required = true)]
    inputs: Vec<PathBuf>,

    /// Censored rows: `censor` keeps the censoring time, `fixed:V` uses V.
    #[arg(long, default_value = "censor")]
    impute: ImputationRule,

    #[arg(long, default_value = "group")]
    group_column: String,

    #[arg(long, default_value = "duration")]
    duration_column: String,

    #[arg(long, default_value = "censored")]
    censored_column: String,

    /// Accept zero outcomes (negative ones are always rejected).
    #[arg(long)]
    allow_zero: bool,
}

#[derive(Args, Debug)]
struct BootstrapArgs {
    #[arg(long, default_value_t = 2000)]
    bootstrap: usize,

    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Absolute,
    Relative,
    Both,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    data: DataArgs,

    #[command(flatten)]
    boot: BootstrapArgs,

    /// Number of cut points, or `auto` for the control sample size.
    #[arg(long, default_value = "auto", value_parser = parse_cutpoints)]
    cutpoints: Cutpoints,

    #[arg(long, default_value = "bagging")]
    estimator: EstimatorKind,

    /// `observed`, `uniform:N` or `list:x1,x2,...`
    #[arg(long, default_value = "observed")]
    grid: GridPolicy,

    #[arg(long, value_enum, default_value = "absolute")]
    scale: ScaleArg,

    /// Output file; stdout when absent.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,

    /// csv, json or svg; taken from the --out extension when absent.
    #[arg(long)]
    format: Option<CurveFormat>,
}

#[derive(Clone, Copy, Debug)]
struct Cutpoints(Option<usize>);

fn parse_cutpoints(s: &str) -> std::result::Result<Cutpoints, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Cutpoints(None));
    }
    s.parse::<usize>()
        .map(|k| Cutpoints(Some(k)))
        .map_err(|_| format!("expected `auto` or a count, got `{s}`"))
}

#[derive(Args, Debug)]
struct SummaryArgs {
    #[command(flatten)]
    data: DataArgs,

    #[command(flatten)]
    boot: BootstrapArgs,

    #[arg(long, short = 'o')]
    out: Option<PathBuf>,

    /// json or csv.
    #[arg(long)]
    format: Option<CurveFormat>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Scenario TOML file; the built-in battery when absent.
    #[arg(long)]
    scenario: Option<PathBuf>,

    /// Report JSON; stdout when absent.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,

    /// Override every scenario's replication count.
    #[arg(long)]
    replications: Option<usize>,

    /// Override every scenario's bootstrap count.
    #[arg(long)]
    bootstrap: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let workers = cli.workers;
    if workers == Some(0) {
        return Err(Error::Config("--workers must be positive".into()));
    }
    match cli.command {
        Command::Estimate(args) => curves(args, workers, false),
        Command::Tails(args) => curves(args, workers, true),
        Command::Summary(args) => summary(args, workers),
        Command::Simulate(args) => simulate(args, workers),
    }
}

fn load_dataset(args: &DataArgs) -> Result<TrialDataset> {
    let opts = CsvOptions {
        group_column: args.group_column.clone(),
        duration_column: args.duration_column.clone(),
        censored_column: args.censored_column.clone(),
        allow_zero: args.allow_zero,
    };
    let trials = args
        .inputs
        .iter()
        .map(|p| load_csv(p, &opts)?.impute_censored(args.impute))
        .collect::<Result<Vec<_>>>()?;
    let data = if trials.len() == 1 {
        trials.into_iter().next().expect("one trial")
    } else {
        pool_trials(&trials)?
    };
    if !data.imputation_log.is_empty() {
        eprintln!(
            "note: imputed {} censored observation(s) ({})",
            data.imputation_log.len(),
            args.impute
        );
    }
    Ok(data)
}

fn base_config(boot: &BootstrapArgs, workers: Option<usize>) -> EstimatorConfig {
    EstimatorConfig {
        bootstrap: boot.bootstrap,
        alpha: boot.alpha,
        seed: boot.seed,
        workers,
        ..EstimatorConfig::default()
    }
}

/// Explicit `--format`, else the output extension, else `fallback`.
fn output_format(format: Option<CurveFormat>, out: Option<&Path>, fallback: CurveFormat) -> Result<CurveFormat> {
    if let Some(f) = format {
        return Ok(f);
    }
    match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(ext) => ext.parse(),
        None => Ok(fallback),
    }
}

fn curves(args: CurveArgs, workers: Option<usize>, tails: bool) -> Result<()> {
    let data = load_dataset(&args.data)?;
    let mut config = base_config(&args.boot, workers);
    config.cutpoints = args.cutpoints.0;
    config.estimator = args.estimator;
    config.grid = args.grid.clone();
    config.validate()?;
    let format = output_format(args.format, args.out.as_deref(), CurveFormat::Csv)?;

    let grid = evaluation_grid(&data, &config)?;
    let absolute = if tails {
        let t = estimate_tail_curves(&data, &config, &grid)?;
        vec![t.upper, t.lower]
    } else {
        vec![estimate_bqte(&data, &config, &grid)?]
    };
    let mut out = Vec::new();
    if args.scale != ScaleArg::Relative {
        out.extend(absolute.iter().cloned());
    }
    if args.scale != ScaleArg::Absolute {
        for c in &absolute {
            out.push(relative_curve(c)?);
        }
    }
    for w in absolute.iter().flat_map(|c| &c.provenance.warnings) {
        eprintln!("warning: {w}");
    }
    write_curves(&out, format, args.out.as_deref())
}

fn curve_file_name(base: &Path, curve: &EffectCurve, format: CurveFormat) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    base.with_file_name(format!(
        "{stem}_{}_{}.{}",
        curve.kind.as_str(),
        curve.scale.as_str(),
        format.extension()
    ))
}

/// One curve goes to the target as is. Several curves become one JSON
/// array, or one file per curve (`stem_kind_scale.ext`) for csv and svg.
fn write_curves(curves: &[EffectCurve], format: CurveFormat, out: Option<&Path>) -> Result<()> {
    if let [curve] = curves {
        return emit(out, &serialize_curve(curve, format)?);
    }
    match (format, out) {
        (CurveFormat::Json, _) => emit(out, &serialize_curve_set(curves)?),
        (_, Some(base)) => {
            for c in curves {
                let path = curve_file_name(base, c, format);
                fs::write(&path, serialize_curve(c, format)?)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        (CurveFormat::Csv, None) => {
            let mut buf = Vec::new();
            for (i, c) in curves.iter().enumerate() {
                if i > 0 {
                    buf.push(b'\n');
                }
                buf.extend_from_slice(format!("# {} {}\n", c.kind, c.scale).as_bytes());
                buf.extend_from_slice(&serialize_curve(c, format)?);
            }
            emit(None, &buf)
        }
        (CurveFormat::Svg, None) => Err(Error::Config(
            "several svg curves need --out so each gets its own file".into(),
        )),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn summary(args: SummaryArgs, workers: Option<usize>) -> Result<()> {
    let data = load_dataset(&args.data)?;
    let config = base_config(&args.boot, workers);
    config.validate()?;
    let format = output_format(args.format, args.out.as_deref(), CurveFormat::Json)?;
    let s = summarize(&data, &config)?;
    emit(args.out.as_deref(), &serialize_summary(&s, format)?)
}

fn simulate(args: SimulateArgs, workers: Option<usize>) -> Result<()> {
    let mut scenarios = match &args.scenario {
        Some(path) => load_scenarios(path)?,
        None => default_battery(),
    };
    for s in &mut scenarios {
        if let Some(r) = args.replications {
            s.replications = r;
        }
        if let Some(b) = args.bootstrap {
            s.config.bootstrap = b;
        }
        s.config.workers = workers;
        s.validate()?;
    }
    let mut reports = Vec::with_capacity(scenarios.len());
    for s in &scenarios {
        let report = run_scenario(s)?;
        eprintln!("{}: {:.1}s", s.name, report.runtime_seconds);
        reports.push(report);
    }
    emit(args.out.as_deref(), &serialize_reports(&reports)?)
}
