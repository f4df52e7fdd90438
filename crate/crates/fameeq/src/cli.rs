//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on runtime failure (including a failed
//! `mse-check`), 2 on configuration or usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fameeq_core::channel::{rayleigh_iid, LinkNoise};
use fameeq_core::equalize::{lmmse, flmmse, EqualizeError};
use fameeq_core::rng::{derive_rng, Purpose};
use fameeq_core::Complex64;
use thiserror::Error;

use crate::config::{Bits, Config, ConfigError, EqualizerSpec, SnrList};
use crate::io::{write_channel, EqualizerFixture};
use crate::simkit::{resolve_threads, snr_to_no, sweep_with, Execution, SimError};
use crate::studies::{mse_check, oracle_gap, quantize_demo};

/// Top-level parser.
#[derive(Debug, Parser)]
#[command(name = "fameeq", version, about = "Soft-output finite-alphabet equalization toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coded BER versus SNR for a set of equalizers.
    BerSweep(SweepArgs),
    /// Closed-form NPI variance against Monte-Carlo MSE.
    MseCheck(Common),
    /// FL-MMSE and FAME-FBS objectives against exhaustive search.
    OracleGap(Common),
    /// Shows the uniform binning of a vector and writes fixtures.
    QuantizeDemo(QuantizeArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config file; defaults apply to anything it omits.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated SNR points in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Equalizer as `name[,bits]`; repeat for several. Replaces the config list.
    #[arg(long, value_parser = EqualizerSpec::parse_flag)]
    equalizer: Vec<EqualizerSpec>,
    /// Maximum frames per SNR point.
    #[arg(long)]
    frames: Option<usize>,
}

#[derive(Debug, Args)]
struct QuantizeArgs {
    #[command(flatten)]
    common: Common,
    /// Resolution in bits.
    #[arg(long, default_value_t = 2)]
    bits: u32,
    /// Comma-separated complex entries such as `0.3+0.1i`. Without it the
    /// L-MMSE row of user 0 on a random channel is used.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<String>>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// Exit code 1.
    #[error("{0:#}")]
    Runtime(anyhow::Error),
}

impl CliError {
    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(c) => c.into(),
            other => CliError::Runtime(other.into()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(common: &Common) -> Result<Config, CliError> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = common.seed {
        cfg.set_seed(s);
    }
    Ok(cfg)
}

fn out_dir(common: &Common) -> Result<Option<&Path>, CliError> {
    match &common.out {
        Some(p) => {
            fs::create_dir_all(p).with_context(|| format!("creating {}", p.display()))?;
            Ok(Some(p.as_path()))
        }
        None => Ok(None),
    }
}

fn write(dir: &Path, name: &str, contents: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Runs a parsed command.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::BerSweep(a) => ber_sweep(a),
        Command::MseCheck(c) => run_mse_check(c),
        Command::OracleGap(c) => run_oracle_gap(c),
        Command::QuantizeDemo(a) => run_quantize_demo(a),
    }
}

fn ber_sweep(a: SweepArgs) -> Result<(), CliError> {
    let mut cfg = load(&a.common)?;
    if let Some(snr) = a.snr {
        cfg.sim.snr_db = SnrList::new(snr).map_err(CliError::Config)?;
    }
    if !a.equalizer.is_empty() {
        cfg.sim.equalizers = a.equalizer;
    }
    if let Some(f) = a.frames {
        cfg.sim.stop.max_frames = f.try_into().map_err(|_| CliError::Config("--frames must be >= 1".into()))?;
    }
    cfg.sim.validate()?;
    let threads = resolve_threads(cfg.threads);
    let report = sweep_with(&cfg.sim, Execution::Parallel(threads))?;
    let csv = report.to_csv();
    print!("{csv}");
    eprintln!("{} points in {:.1} s on {} threads", report.points.len(), report.wall_time_s, report.threads);
    if let Some(dir) = out_dir(&a.common)? {
        write(dir, "ber.csv", csv.as_bytes())?;
        write(dir, "ber.json", report.to_json().as_bytes())?;
    }
    Ok(())
}

fn run_mse_check(c: Common) -> Result<(), CliError> {
    let cfg = load(&c)?;
    let report = mse_check(&cfg.mse_check, cfg.seed).context("mse-check")?;
    println!("instance,antennas,users,rho,analytic,monte_carlo,rel_dev");
    for (i, r) in report.instances.iter().enumerate() {
        println!("{i},{},{},{:e},{:e},{:e},{:.4}", r.antennas, r.users, r.rho, r.analytic, r.monte_carlo, r.rel_dev);
    }
    if let Some(dir) = out_dir(&c)? {
        write(dir, "mse_check.json", serde_json::to_string_pretty(&report).unwrap().as_bytes())?;
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "{verdict} max relative deviation {:.4} (tolerance {})",
        report.max_rel_dev, report.tolerance
    );
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Runtime(anyhow::anyhow!("variance deviation above tolerance")))
    }
}

fn run_oracle_gap(c: Common) -> Result<(), CliError> {
    let cfg = load(&c)?;
    let report = match oracle_gap(&cfg.oracle_gap, cfg.seed) {
        Ok(r) => r,
        Err(e @ EqualizeError::BudgetExceeded { .. }) => return Err(CliError::Config(e.to_string())),
        Err(e) => return Err(CliError::Runtime(anyhow::Error::new(e).context("oracle-gap"))),
    };
    let csv = report.to_csv();
    print!("{csv}");
    for (name, f) in [
        ("flmmse", (|r: &_| crate::studies::GapRow::flmmse_ratio(r)) as fn(&crate::studies::GapRow) -> f64),
        ("fame_fbs", crate::studies::GapRow::fbs_ratio),
    ] {
        println!(
            "# {name} ratio: median {:.4} p90 {:.4} max {:.4}",
            report.quantile(0.5, f),
            report.quantile(0.9, f),
            report.quantile(1.0, f)
        );
    }
    println!("# fame_fbs <= flmmse on {}/{} rows", report.fbs_not_worse(), report.rows.len());
    if let Some(dir) = out_dir(&c)? {
        write(dir, "oracle_gap.csv", csv.as_bytes())?;
    }
    Ok(())
}

fn parse_values(v: &[String]) -> Result<Vec<Complex64>, CliError> {
    v.iter()
        .map(|s| {
            s.trim()
                .parse::<Complex64>()
                .map_err(|_| CliError::Config(format!("cannot parse {s:?} as a complex number")))
        })
        .collect()
}

fn run_quantize_demo(a: QuantizeArgs) -> Result<(), CliError> {
    let cfg = load(&a.common)?;
    let bits = Bits::new(a.bits).map_err(CliError::Config)?.get();
    let og = &cfg.oracle_gap;
    let (b, u) = (og.antennas.get(), og.users.get());
    let noise = LinkNoise::new(1.0, snr_to_no(og.snr_db, 1.0, u)).expect("positive noise");
    let ch = rayleigh_iid(b, u, 1, &mut derive_rng(cfg.seed, 0, Purpose::Channel));
    let values = match &a.values {
        Some(v) => parse_values(v)?,
        None => lmmse(ch.matrix(0), noise.rho()).context("L-MMSE")?.w(0).into_inner(),
    };
    let q = quantize_demo(&values, bits).map_err(|e| CliError::Config(e.to_string()))?;
    println!("bits {bits}  w_max {}  bin width {}", q.w_max, q.bin_width);
    println!("entry,re,im,int_re,int_im,centroid_re,centroid_im");
    for (i, ((v, n), c)) in q.input.iter().zip(&q.integers).zip(&q.centroids).enumerate() {
        println!("{i},{},{},{},{},{},{}", v[0], v[1], n[0], n[1], c[0], c[1]);
    }
    if let Some(dir) = out_dir(&a.common)? {
        write(dir, "quantization.json", serde_json::to_string_pretty(&q).unwrap().as_bytes())?;
        let mut buf = Vec::new();
        write_channel(&ch, &mut buf).context("channel dump")?;
        write(dir, "channel.bin", &buf)?;
        let fl = flmmse(ch.matrix(0), &noise, bits).context("FL-MMSE")?;
        let fx = EqualizerFixture::new("FLMMSE", noise.rho(), &fl);
        write(dir, "flmmse.json", serde_json::to_string_pretty(&fx).unwrap().as_bytes())?;
    }
    Ok(())
}
