//! The `uslcrp` command line: `outage`, `dmt`, `bounds` and `validate`.
//!
//! Each command turns an [`ExperimentConfig`] (a preset or a TOML file, with
//! flags taking precedence) into CSV text. The `*_csv` functions are the pure
//! part and can be called directly; the binary only adds argument parsing and
//! an atomic write of the result.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::analysis::{dmt_baseline, dmt_miso, dmt_us_lcrp, symmetric_bound_outage, Bound, RateParams};
use crate::config::{ExperimentConfig, TopologyMode};
use crate::montecarlo::{
    estimate_outage, power_for, sweep, write_csv, Cell, RateMode, TopologySource, CSV_HEADER,
};
use crate::protocol::Scheme;
use crate::validate::{run_validation, ValidationSettings};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "uslcrp", version, about = "Outage simulation and analysis for user-selection cooperative relaying")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo outage probability at fixed end-to-end rates.
    Outage(OutageArgs),
    /// Rate-scaled outage sweeps with the analytic DMT curves alongside.
    Dmt(DmtArgs),
    /// Upper and lower outage bounds for US-LCRP.
    Bounds(BoundsArgs),
    /// Check the protocol invariants over many random rounds.
    Validate(ValidateArgs),
}

/// Where the experiment comes from, and flags that override it.
#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
pub struct ExperimentArgs {
    /// Built-in setup: fig3, fig4, fig5 or fig6.
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed that every trial stream derives from.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum trials per cell.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Trial cap for cells that have not yet seen 100 outages.
    #[arg(long)]
    pub max_trials: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Comma-separated scheme names.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<Scheme>>,
    /// Comma-separated Eb/N0 grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ebn0: Option<Vec<f64>>,
    /// Comma-separated rates (fixed mode) or multiplexing gains (scaled mode).
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    /// Comma-separated values of L.
    #[arg(long, value_delimiter = ',')]
    pub broadcast_slots: Option<Vec<usize>>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

impl ExperimentArgs {
    /// The configuration after applying every override.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match (&self.preset, &self.config) {
            (Some(name), _) => ExperimentConfig::preset(name)?,
            (None, Some(path)) => ExperimentConfig::load(path)?,
            (None, None) => return Err(Error::config("preset", "either --preset or --config is required")),
        };
        let e = &mut config.experiment;
        if let Some(seed) = self.seed {
            e.seed = seed;
        }
        if let Some(trials) = self.trials {
            e.trials = trials;
            if self.max_trials.is_none() {
                e.max_trials = e.max_trials.max(trials);
            }
        }
        if let Some(max_trials) = self.max_trials {
            e.max_trials = max_trials;
        }
        if let Some(workers) = self.workers {
            e.workers = workers;
        }
        if let Some(schemes) = &self.schemes {
            e.schemes = schemes.clone();
        }
        if let Some(ebn0) = &self.ebn0 {
            config.sweep.ebn0_db = ebn0.clone();
        }
        if let Some(rates) = &self.rates {
            config.rate.values = rates.clone();
        }
        if let Some(slots) = &self.broadcast_slots {
            config.network.broadcast_slots = slots.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutageArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DmtArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Only emit the analytic diversity gains, no simulation.
    #[arg(long)]
    pub analytic_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Append a US-LCRP Monte Carlo estimate to every row.
    #[arg(long)]
    pub with_sim: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Number of random rounds per scheme.
    #[arg(long, default_value_t = 100_000)]
    pub traces: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 5)]
    pub users: usize,
    #[arg(long, default_value_t = 3)]
    pub relays: usize,
    #[arg(long, default_value_t = 6)]
    pub broadcast_slots: usize,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub ebn0: f64,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

impl ValidateArgs {
    pub fn settings(&self) -> ValidationSettings {
        ValidationSettings {
            traces: self.traces,
            n_users: self.users,
            n_relays: self.relays,
            n_broadcast_slots: self.broadcast_slots,
            ebn0_db: self.ebn0,
            seed: self.seed,
            workers: self.workers,
            inject_fault: self.inject_fault,
            ..ValidationSettings::default()
        }
    }
}

fn require_rate_mode(config: &ExperimentConfig, mode: RateMode, command: &str) -> Result<()> {
    if config.rate.mode != mode {
        return Err(Error::config(
            "rate.mode",
            format!("`{command}` needs \"{}\" rates", mode.name()),
        ));
    }
    Ok(())
}

/// Outage CSV for every `(N, M, L)`, then scheme, rate and Eb/N0.
pub fn outage_csv(config: &ExperimentConfig) -> Result<String> {
    require_rate_mode(config, RateMode::Fixed, "outage")?;
    let mut rows = Vec::new();
    for spec in config.sweep_specs()? {
        rows.extend(sweep(&spec)?);
    }
    let mut out = Vec::new();
    write_csv(&rows, &mut out)?;
    Ok(String::from_utf8(out).expect("CSV is ASCII"))
}

pub const DMT_COLUMNS: &str = "d_us_lcrp,d_baseline,d_miso";

fn dmt_fields(n: usize, m: usize, l: usize, r: f64) -> String {
    format!("{:?},{:?},{:?}", dmt_us_lcrp(n, m, l, r), dmt_baseline(n, m, r), dmt_miso(n, m, r))
}

/// Scaled-rate outage rows with the analytic diversity gains of each row's
/// multiplexing gain appended. With `analytic_only` the CSV has one row per
/// `(N, M, L, r)` and columns `N,M,L,r,d_us_lcrp,d_baseline,d_miso`.
pub fn dmt_csv(config: &ExperimentConfig, analytic_only: bool) -> Result<String> {
    require_rate_mode(config, RateMode::Scaled, "dmt")?;
    let mut out = String::new();
    if analytic_only {
        config.validate()?;
        let _ = writeln!(out, "N,M,L,r,{DMT_COLUMNS}");
        for (n, m) in config.sizes() {
            for &l in &config.network.broadcast_slots {
                for &r in &config.rate.values {
                    let _ = writeln!(out, "{n},{m},{l},{r:?},{}", dmt_fields(n, m, l, r));
                }
            }
        }
        return Ok(out);
    }
    let _ = writeln!(out, "{CSV_HEADER},{DMT_COLUMNS}");
    for spec in config.sweep_specs()? {
        for row in sweep(&spec)? {
            let d = dmt_fields(row.n_users, row.n_relays, row.n_broadcast_slots, row.rate_value);
            let _ = writeln!(out, "{},{d}", row.csv_fields());
        }
    }
    Ok(out)
}

pub const BOUNDS_HEADER: &str = "N,M,L,rate_value,ebn0_db,p_upper,p_lower";
pub const BOUNDS_SIM_COLUMNS: &str = "trials,outages,p_hat,ci_low,ci_high";

/// US-LCRP outage bounds on the experiment's fixed network(s), optionally
/// with a Monte Carlo estimate of the same cell.
pub fn bounds_csv(config: &ExperimentConfig, with_sim: bool) -> Result<String> {
    require_rate_mode(config, RateMode::Fixed, "bounds")?;
    if config.network.model.is_none() && config.network.topology != TopologyMode::Fixed {
        return Err(Error::config("network.topology", "bounds need a fixed network"));
    }
    config.validate()?;
    let mut out = String::new();
    let _ = write!(out, "{BOUNDS_HEADER}");
    if with_sim {
        let _ = write!(out, ",{BOUNDS_SIM_COLUMNS}");
    }
    out.push('\n');
    for (n, m) in config.sizes() {
        let topology = config.topology(n, m)?;
        let TopologySource::Fixed(model) = &topology else {
            unreachable!("fixed mode was checked above");
        };
        for &l in &config.network.broadcast_slots {
            for &rate in &config.rate.values {
                for &ebn0_db in &config.sweep.ebn0_db {
                    let power = power_for(Scheme::UsLcrp, l, m, ebn0_db)?;
                    let rates = RateParams::from_model(model, &power);
                    let upper = symmetric_bound_outage(&rates, l, rate, Bound::Upper);
                    let lower = symmetric_bound_outage(&rates, l, rate, Bound::Lower);
                    let _ = write!(out, "{n},{m},{l},{rate:?},{ebn0_db:?},{upper:?},{lower:?}");
                    if with_sim {
                        let cell = Cell {
                            scheme: Scheme::UsLcrp,
                            topology: &topology,
                            n_broadcast_slots: l,
                            ebn0_db,
                            rate,
                        };
                        let e = estimate_outage(
                            &cell,
                            &config.budget(),
                            config.experiment.seed,
                            config.experiment.workers,
                        )?;
                        let _ = write!(
                            out,
                            ",{},{},{:?},{:?},{:?}",
                            e.trials, e.outages, e.p_hat, e.ci_low, e.ci_high
                        );
                    }
                    out.push('\n');
                }
            }
        }
    }
    Ok(out)
}

/// Writes `contents` to a temporary file next to `path`, then renames it into
/// place, so readers never observe a partial file.
pub fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir)?;
    file.write_all(contents.as_bytes())?;
    file.as_file().sync_all()?;
    file.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Runs a parsed command. `Ok(false)` means the command ran but reported
/// failure (only `validate` does this).
pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Outage(args) => {
            let config = args.experiment.resolve()?;
            write_atomically(&args.experiment.out, &outage_csv(&config)?)?;
        }
        Command::Dmt(args) => {
            let config = args.experiment.resolve()?;
            write_atomically(&args.experiment.out, &dmt_csv(&config, args.analytic_only)?)?;
        }
        Command::Bounds(args) => {
            let config = args.experiment.resolve()?;
            write_atomically(&args.experiment.out, &bounds_csv(&config, args.with_sim)?)?;
        }
        Command::Validate(args) => {
            let report = run_validation(&args.settings())?;
            let text = report.render();
            print!("{text}");
            if let Some(path) = &args.out {
                write_atomically(path, &text)?;
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

/// Entry point of the binary. Usage errors exit with status 2, every other
/// failure with status 1.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
