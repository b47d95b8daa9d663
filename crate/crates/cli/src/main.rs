use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curvecast::cv::{
    load_config, load_panel, run_experiment, ExperimentConfig, ResultStatus, RunProvenance, Scheme,
};
use curvecast::data::FetchOptions;
use curvecast::report::{
    aggregate, emit, load_results, render_block_csv, render_markdown, EmitFormat, EmitOptions,
};
use curvecast::Error;

// Exit-code map, fixed for scriptability.
const EXIT_FETCH: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_FALLBACK: u8 = 4;
const EXIT_DATA: u8 = 5;

#[derive(Parser)]
#[command(
    name = "curvecast",
    version,
    about = "Walk-forward forecasting benchmark for the U.S. Treasury constant-maturity yield panel"
)]
struct Cli {
    /// Experiment configuration file (TOML).
    #[arg(long, global = true, default_value = "experiment.toml")]
    config: PathBuf,
    /// Resolve all relative paths against this directory.
    #[arg(long, global = true)]
    workdir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download and cache every configured ticker.
    Fetch(FetchArgs),
    /// Run the configured experiment and write the report files.
    Run(RunArgs),
    /// Render reports from an existing per-window results CSV.
    Report(ReportArgs),
    /// List the available model kinds and the configured roster.
    ListModels,
    /// Check the configuration file and print a summary.
    ValidateConfig,
}

#[derive(Args)]
struct FetchArgs {
    /// Fail instead of touching the network.
    #[arg(long)]
    offline: bool,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Override the walk-forward scheme (sliding | expanding).
    #[arg(long)]
    scheme: Option<String>,
    /// Override the forecast horizon in business days.
    #[arg(long)]
    horizon: Option<usize>,
    /// Run only these model ids (comma separated).
    #[arg(long)]
    models: Option<String>,
    /// Worker cap for window evaluation (0 = one per core).
    #[arg(long)]
    parallelism: Option<usize>,
    /// Seed recorded in all outputs and passed to adapters.
    #[arg(long)]
    seed: Option<u64>,
    /// Never touch the network; use the cache only.
    #[arg(long)]
    offline: bool,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Per-window results file (windows.csv) produced by `run`.
    results: PathBuf,
    /// Output format: markdown | csv | json.
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Include the per-block series.
    #[arg(long)]
    per_block: bool,
    /// Write files here instead of printing to stdout.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn data_error(e: Error) -> Failure {
    let code = match &e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Fetch { .. } => EXIT_FETCH,
        _ => EXIT_DATA,
    };
    Failure::new(code, e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workdir) = &cli.workdir {
        if let Err(e) = std::env::set_current_dir(workdir) {
            eprintln!("error: cannot enter workdir {}: {e}", workdir.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let outcome = match &cli.command {
        Command::Fetch(args) => cmd_fetch(&cli.config, args),
        Command::Run(args) => cmd_run(&cli.config, args),
        Command::Report(args) => cmd_report(args),
        Command::ListModels => cmd_list_models(&cli.config),
        Command::ValidateConfig => cmd_validate(&cli.config),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load(config_path: &Path) -> Result<ExperimentConfig, Failure> {
    load_config(config_path).map_err(|e| Failure::new(EXIT_CONFIG, e.to_string()))
}

fn cmd_fetch(config_path: &Path, args: &FetchArgs) -> Result<u8, Failure> {
    let mut config = load(config_path)?;
    if args.offline {
        config.data.offline = true;
    }
    if let Some(dir) = &args.cache_dir {
        config.data.cache_dir = dir.clone();
    }

    let options = if config.data.offline {
        FetchOptions::Offline
    } else {
        FetchOptions::PreferCache
    };
    for ticker in &config.data.tickers {
        let series = fetch_one(&config, ticker, options)
            .map_err(|e| Failure::new(exit_for_fetch(&e), e.to_string()))?;
        println!(
            "{ticker}: {} rows ({} values) {}..{}",
            series.len(),
            series.value_count(),
            series
                .first_date()
                .map(|d| d.to_string())
                .unwrap_or_else(|| "-".into()),
            series
                .last_date()
                .map(|d| d.to_string())
                .unwrap_or_else(|| "-".into()),
        );
    }
    Ok(0)
}

fn exit_for_fetch(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_FETCH,
    }
}

fn fetch_one(
    config: &ExperimentConfig,
    ticker: &str,
    options: FetchOptions,
) -> Result<curvecast::data::RawSeries, Error> {
    curvecast::data::fetch_series(
        ticker,
        &config.data.endpoint,
        &config.data.cache_dir,
        options,
        &config.data.tickers,
    )
}

fn cmd_run(config_path: &Path, args: &RunArgs) -> Result<u8, Failure> {
    let mut config = load(config_path)?;

    if let Some(scheme) = &args.scheme {
        config.protocol.scheme = match scheme.as_str() {
            "sliding" => Scheme::Sliding,
            "expanding" => Scheme::Expanding,
            other => {
                return Err(Failure::new(
                    EXIT_CONFIG,
                    format!("unknown scheme {other:?} (expected sliding or expanding)"),
                ))
            }
        };
    }
    if let Some(h) = args.horizon {
        if h == 0 {
            return Err(Failure::new(EXIT_CONFIG, "horizon must be positive"));
        }
        config.protocol.horizon = h;
    }
    if let Some(p) = args.parallelism {
        config.run.parallelism = p;
    }
    if let Some(seed) = args.seed {
        config.run.seed = seed;
    }
    if args.offline {
        config.data.offline = true;
    }
    if let Some(dir) = &args.cache_dir {
        config.data.cache_dir = dir.clone();
    }
    if let Some(dir) = &args.output_dir {
        config.run.output_dir = dir.clone();
    }
    if let Some(filter) = &args.models {
        let wanted: Vec<&str> = filter.split(',').map(str::trim).collect();
        for id in &wanted {
            if !config.models.iter().any(|m| m.id == *id) {
                return Err(Failure::new(
                    EXIT_CONFIG,
                    format!("unknown model id {id:?} in --models"),
                ));
            }
        }
        config.models.retain(|m| wanted.contains(&m.id.as_str()));
    }

    let panel = load_panel(&config).map_err(data_error)?;
    println!(
        "panel: {} tenors x {} business days ({}..{})",
        panel.n_tenors(),
        panel.len(),
        panel.index()[0],
        panel.index().last().expect("nonempty panel"),
    );

    let checkpoint = config.run.output_dir.join("checkpoint.csv");
    let output = run_experiment(&config, &panel, Some(&checkpoint)).map_err(data_error)?;
    let report = aggregate(&output.results, output.provenance.clone()).map_err(data_error)?;
    let written = emit(
        &report,
        &output.results,
        &EmitOptions {
            output_dir: config.run.output_dir.clone(),
            per_block: config.run.per_block,
        },
    )
    .map_err(data_error)?;

    for model in &config.models {
        let cells: Vec<_> = report
            .groups
            .iter()
            .filter(|g| g.key.model_id == model.id && g.overall.windows > 0)
            .collect();
        if cells.is_empty() {
            println!("{}: no scored windows", model.id);
            continue;
        }
        let n = cells.len() as f64;
        let rmse = cells.iter().map(|g| g.overall.mean_rmse).sum::<f64>() / n;
        let mape = cells.iter().map(|g| g.overall.mean_mape).sum::<f64>() / n;
        let fallback: usize = cells.iter().map(|g| g.overall.fallback_windows).sum();
        let skipped: usize = cells.iter().map(|g| g.overall.skipped_windows).sum();
        println!(
            "{}: {} windows/tenor, mean RMSE {rmse:.6}, mean MAPE {mape:.6}% \
             (fallback {fallback}, skipped {skipped})",
            model.id,
            output.plan.windows.len(),
        );
    }
    for path in &written {
        println!("wrote {}", path.display());
    }

    let fallback = output
        .results
        .iter()
        .any(|r| r.status == ResultStatus::Fallback);
    Ok(if fallback { EXIT_FALLBACK } else { 0 })
}

fn cmd_report(args: &ReportArgs) -> Result<u8, Failure> {
    let format: EmitFormat = args
        .format
        .parse()
        .map_err(|e: Error| Failure::new(EXIT_CONFIG, e.to_string()))?;
    let (results, csv_prov) = load_results(&args.results)
        .map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", args.results.display())))?;
    if results.is_empty() {
        return Err(Failure::new(
            EXIT_DATA,
            format!("{} contains no window results", args.results.display()),
        ));
    }

    // Rebuild run-level provenance from the rows and the CSV comment; the
    // comment preserves the panel's tenor order when present.
    let mut tenors: Vec<String> = csv_prov
        .as_ref()
        .map(|p| p.tenors.clone())
        .unwrap_or_default();
    if tenors.is_empty() {
        tenors = results.iter().map(|r| r.tenor.clone()).collect();
        tenors.sort();
        tenors.dedup();
    }
    let provenance = RunProvenance {
        seed: csv_prov.as_ref().map(|p| p.seed).unwrap_or_default(),
        config_hash: csv_prov
            .as_ref()
            .map(|p| p.config_hash.clone())
            .unwrap_or_else(|| "unknown".into()),
        version: csv_prov
            .as_ref()
            .map(|p| p.version.clone())
            .unwrap_or_else(|| "unknown".into()),
        scheme: results[0].scheme,
        horizon: results[0].horizon,
        window_count: results
            .iter()
            .map(|r| r.window_index + 1)
            .max()
            .unwrap_or(0),
        tenors,
        panel_start: results
            .iter()
            .map(|r| r.train_start)
            .min()
            .expect("nonempty"),
        panel_end: results.iter().map(|r| r.train_end).max().expect("nonempty"),
        hyperparams: Vec::new(),
    };
    let report = aggregate(&results, provenance).map_err(data_error)?;

    if let Some(dir) = &args.output_dir {
        let written = emit(
            &report,
            &results,
            &EmitOptions {
                output_dir: dir.clone(),
                per_block: args.per_block,
            },
        )
        .map_err(data_error)?;
        for path in &written {
            println!("wrote {}", path.display());
        }
        return Ok(0);
    }

    match format {
        EmitFormat::Markdown => {
            print!("{}", render_markdown(&report).map_err(data_error)?);
            if args.per_block {
                println!();
                print!("{}", render_block_csv(&report));
            }
        }
        EmitFormat::Csv => print!("{}", render_block_csv(&report)),
        EmitFormat::Json => {
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
            println!("{json}");
        }
    }
    Ok(0)
}

fn cmd_list_models(config_path: &Path) -> Result<u8, Failure> {
    println!("model kinds:");
    for (kind, blurb) in [
        (
            "naive",
            "repeat the last training value (random walk benchmark)",
        ),
        ("naive-mean", "repeat the training-window mean"),
        (
            "seasonal-naive",
            "repeat the last season (default season 5)",
        ),
        (
            "arima",
            "ARIMA with stepwise AIC order search (orders frozen per block)",
        ),
        (
            "dhr-arima",
            "Fourier terms plus ARIMA errors (default period 261, 3 harmonics)",
        ),
        (
            "var",
            "vector autoregression, AIC lag selection (stationary input by default)",
        ),
        ("vecm", "Johansen VECM on levels with trace or fixed rank"),
        (
            "external",
            "subprocess adapter speaking the JSON line protocol",
        ),
    ] {
        println!("  {kind:<15} {blurb}");
    }
    if config_path.exists() {
        let config = load(config_path)?;
        println!("\nconfigured roster ({}):", config_path.display());
        for model in &config.models {
            println!(
                "  {:<15} kind={} stationary_input={}",
                model.id,
                model.kind.name(),
                model.stationary_input
            );
        }
    }
    Ok(0)
}

fn cmd_validate(config_path: &Path) -> Result<u8, Failure> {
    let config = load(config_path)?;
    println!("{} is valid", config_path.display());
    println!(
        "  scheme {} window {} step {} horizon {}",
        config.protocol.scheme,
        config.protocol.train_window,
        config.protocol.step,
        config.protocol.horizon
    );
    println!(
        "  span {}..{} tenors {}",
        config.data.start,
        config.data.end,
        config.data.tickers.join(",")
    );
    println!(
        "  models: {}",
        config
            .models
            .iter()
            .map(|m| m.id.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("  config hash {}", config.hash());
    Ok(0)
}
