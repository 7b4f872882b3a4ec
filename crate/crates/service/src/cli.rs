use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kgval::pipeline::{validate_kg, ConfigError, InputSpec, ReportFormat, RunConfig, SparqlInput};

use crate::api::{app, AppState, ServerConfig};

/// Environment variable that overrides the configured cache directory.
pub const CACHE_DIR_ENV: &str = "VALIDATOR_CACHE_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kgval", version, about = "Validate knowledge-graph instances against external sources")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Score every instance of a KG and write the report.
    Validate(ValidateArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Turtle file to validate instead of the configured input.
    #[arg(long, conflicts_with = "sparql")]
    pub input: Option<PathBuf>,
    /// SPARQL endpoint to validate instead of the configured input.
    #[arg(long)]
    pub sparql: Option<String>,
    /// Maximum number of instances fetched with --sparql.
    #[arg(long, default_value_t = 1000, requires = "sparql")]
    pub limit: usize,
    /// Domain specification file.
    #[arg(long)]
    pub ds: Option<PathBuf>,
    /// Comma separated source weights in configuration order.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Matching radius in metres.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Ground-truth CSV (subject,property,correct).
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub concurrency: Option<usize>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: String,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Validate(args) => validate(&args),
        Command::Serve(args) => serve(&args),
    }
}

fn absolute(path: &Path) -> String {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf()).display().to_string()
}

/// The configuration file with command-line and environment overrides applied.
pub fn effective_config(args: &ValidateArgs) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(path) = &args.input {
        config.input = InputSpec::Turtle(absolute(path));
    }
    if let Some(endpoint) = &args.sparql {
        config.input = InputSpec::Sparql(SparqlInput { endpoint: endpoint.clone(), limit: args.limit });
    }
    if let Some(ds) = &args.ds {
        config.domain_spec = absolute(ds);
    }
    if let Some(w) = &args.weights {
        config.weights = Some(w.clone());
    }
    if let Some(t) = args.threshold {
        config.threshold = t;
    }
    if let Some(r) = args.radius {
        config.radius_m = r;
    }
    if let Some(b) = &args.baseline {
        config.baseline = Some(absolute(b));
    }
    if let Some(c) = args.concurrency {
        config.concurrency = Some(c);
    }
    apply_cache_override(&mut config, std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from));
    if let Some(dir) = &args.cache_dir {
        config.cache_dir = Some(absolute(dir));
    }
    config.check()?;
    Ok(config)
}

fn apply_cache_override(config: &mut RunConfig, env: Option<PathBuf>) {
    if let Some(dir) = env.filter(|d| !d.as_os_str().is_empty()) {
        config.cache_dir = Some(absolute(&dir));
    }
}

fn validate(args: &ValidateArgs) -> i32 {
    let config = match effective_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = match validate_kg(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_config() { EXIT_CONFIG } else { EXIT_FATAL };
        }
    };
    for s in &report.skipped {
        log::info!("skipped {}: {}", s.subject, s.reason);
    }
    let format = match args.format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::CsvSummary,
    };
    let text = report.render(format);
    let written = match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FATAL
        }
    }
}

fn serve(args: &ServeArgs) -> i32 {
    let mut server = match ServerConfig::load(&args.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    server.override_cache_dir(std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from));
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FATAL;
        }
    };
    runtime.block_on(async {
        let listener = match tokio::net::TcpListener::bind(&args.bind).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: cannot bind {}: {e}", args.bind);
                return EXIT_FATAL;
            }
        };
        log::info!("listening on {}", args.bind);
        match axum::serve(listener, app(AppState::new(server))).await {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_FATAL
            }
        }
    })
}
