use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nonherm_clt::harness::{run_experiment, ExperimentConfig, HarnessError};
use nonherm_clt::report::{
    analyze_directory, run_oracle_check, write_figures, write_sample_outputs, OracleCheckOptions, ReportError,
    RECORDS_FILE,
};

const EXIT_IDENTITY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Monte Carlo checks of the central limit theorem for linear eigenvalue
/// statistics of non-Hermitian random matrices.
#[derive(Parser, Debug)]
#[command(name = "nonherm-clt", version)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `outputs`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads. Affects speed only, never results.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Cauchy contour radius; overrides the config.
    #[arg(long, global = true)]
    contour_radius: Option<f64>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample replicates and persist records.
    Sample,
    /// Estimate moments from persisted records and write tables.
    Analyze {
        /// Record file; defaults to `<out>/records.tsv`.
        records: Option<PathBuf>,
    },
    /// Write the eigenvalue scatter, QQ data and variance trend.
    Figures { records: Option<PathBuf> },
    /// Check the kernel and series identities on a built-in grid.
    OracleCheck {
        /// Use deliberately coarse disk quadrature.
        #[arg(long)]
        coarse: bool,
        /// Truncation order of the Gaussian analytic function series.
        #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u64).range(1..))]
        gaf_truncation: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        let code = match &e {
            ReportError::Harness(HarnessError::FailureBudget { .. }) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        ReportError::from(e).into()
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::usage("sample needs --config PATH"))?;
    let mut cfg = ExperimentConfig::load(path).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(r) = cli.contour_radius {
        cfg.contour.radius = r;
    }
    if let Some(out) = &cli.out {
        cfg.outputs = out.clone();
    }
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(cfg)
}

fn records_path(cli: &Cli, given: &Option<PathBuf>) -> Result<PathBuf, Failure> {
    if let Some(p) = given {
        return Ok(p.clone());
    }
    if let Some(out) = &cli.out {
        return Ok(out.join(RECORDS_FILE));
    }
    if let Some(path) = &cli.config {
        let cfg = ExperimentConfig::load(path).map_err(|e| Failure::usage(e.to_string()))?;
        return Ok(cfg.outputs.join(RECORDS_FILE));
    }
    Err(Failure::usage("give a record file, --out DIR or --config PATH"))
}

fn output_dir(cli: &Cli, records: &Path) -> PathBuf {
    cli.out
        .clone()
        .unwrap_or_else(|| records.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")))
}

fn cmd_sample(cli: &Cli) -> Result<u8, Failure> {
    let cfg = load_config(cli)?;
    let runs = run_experiment(&cfg, cli.threads.map(|t| t as usize))?;
    let written = write_sample_outputs(&cfg, &cfg.outputs, &runs)?;
    if !cli.quiet {
        let law = cfg.entry_law();
        if !law.is_compliant() {
            println!("law {} does not satisfy the entry assumptions; results are a control", cfg.law);
        }
        for run in &runs {
            println!(
                "n = {}: {} replicates, {} failed",
                run.n,
                run.records.len(),
                run.failure_count()
            );
        }
        for p in written {
            println!("wrote {}", p.display());
        }
    }
    Ok(0)
}

fn cmd_analyze(cli: &Cli, records: &Option<PathBuf>) -> Result<u8, Failure> {
    let records = records_path(cli, records)?;
    let out = output_dir(cli, &records);
    let bundle = analyze_directory(&records, &out)?;
    if !cli.quiet {
        for a in &bundle.analyses {
            let flagged = a.deviations.iter().filter(|d| d.flagged()).count();
            println!(
                "n = {}: {} rows, {} flagged, {} replicates",
                a.n,
                a.deviations.len(),
                flagged,
                a.replicates
            );
        }
        for m in &bundle.manifest {
            println!("{}  {}", m.sha256, m.path);
        }
    }
    Ok(0)
}

fn cmd_figures(cli: &Cli, records: &Option<PathBuf>) -> Result<u8, Failure> {
    let records = records_path(cli, records)?;
    let out = output_dir(cli, &records);
    let summary = write_figures(&records, &out)?;
    if !cli.quiet {
        let s = summary.scatter;
        println!(
            "scatter: n = {}, {} of {} eigenvalues inside radius 1.1",
            s.n, s.inside_radius_1_1, s.points
        );
        println!("qq: {} points for {}", summary.qq_points, summary.qq_statistic);
        println!("wrote figures to {}", out.display());
    }
    Ok(0)
}

fn cmd_oracle_check(cli: &Cli, coarse: bool, gaf_truncation: u64) -> Result<u8, Failure> {
    let rows = run_oracle_check(&OracleCheckOptions {
        coarse,
        gaf_truncation: gaf_truncation as usize,
    });
    let failing: Vec<_> = rows.iter().filter(|r| !r.passes()).collect();
    if !cli.quiet {
        println!("{:<8} {:<44} {:>12} {:>12}  status", "identity", "arguments", "gap", "tolerance");
        for r in &rows {
            println!(
                "{:<8} {:<44} {:>12.3e} {:>12.3e}  {}",
                r.identity,
                r.arguments,
                r.gap,
                r.tolerance,
                if r.passes() { "pass" } else { "FAIL" }
            );
        }
    }
    if failing.is_empty() {
        return Ok(0);
    }
    for r in &failing {
        eprintln!("identity failed: {} {} (gap {:.3e} > {:.3e})", r.identity, r.arguments, r.gap, r.tolerance);
    }
    Ok(EXIT_IDENTITY)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample => cmd_sample(&cli),
        Command::Analyze { records } => cmd_analyze(&cli, records),
        Command::Figures { records } => cmd_figures(&cli, records),
        Command::OracleCheck { coarse, gaf_truncation } => cmd_oracle_check(&cli, *coarse, *gaf_truncation),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
