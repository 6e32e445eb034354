//! The `nokey` command line.
//!
//! ```text
//! nokey run --protocol p1 --n 3 --x 5 --seed 42 --snapshots --out r.json
//! nokey run --config experiments/p1_passive.json
//! nokey sweep --protocols p1,p2,p4 --n 1,2 --l 1,2 --out grid.csv
//! nokey verify r.json
//! nokey tables emit --kind perm --n 3 --seed 1 --out fa.txt
//! nokey tables check fa.txt
//! ```
//!
//! Reports go to `--out`; relative paths, and reports written without
//! `--out`, land in `$NOKEY_OUT_DIR` when it is set.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{run_experiment, verify_report, ExperimentConfig, ExperimentReport, KeyMode, MessageSet};
use crate::adversary::AttackStrategy;
use crate::oracles::{parse_table_file, sample_function, sample_permutation, write_table_file, TableFile};
use crate::protocols::{Averaging, ProtocolId};
use crate::{rng, Error, Result};

pub const OUT_DIR_ENV: &str = "NOKEY_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "nokey", version, about = "Run quantum no-key protocol experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run(RunArgs),
    /// Run a grid over protocols and widths; one CSV row per cell.
    Sweep(SweepArgs),
    /// Re-run a report's embedded configuration and compare.
    Verify { report: PathBuf },
    /// Emit or check truth-table files.
    #[command(subcommand)]
    Tables(TablesCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AverageArg {
    None,
    Pads,
    PadsAndKeys,
}

impl From<AverageArg> for Averaging {
    fn from(a: AverageArg) -> Self {
        match a {
            AverageArg::None => Averaging::None,
            AverageArg::Pads => Averaging::Pads,
            AverageArg::PadsAndKeys => Averaging::PadsAndKeys,
        }
    }
}

#[derive(Debug, Args)]
struct Shared {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials per message.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// none | passive | phase:x=<hex>,passes=<mask> | measure:passes=<mask> | mim[:x=<hex>]
    #[arg(long, default_value = "none")]
    attack: AttackStrategy,
    #[arg(long)]
    snapshots: bool,
    #[arg(long, value_enum, default_value = "none")]
    average: AverageArg,
    /// sampled | fixed | exhaustive-mac
    #[arg(long, default_value = "sampled")]
    keys: KeyMode,
    #[arg(long)]
    qubit_cap: Option<u32>,
    #[arg(long)]
    enum_limit: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Start from a JSON experiment configuration; width and protocol flags are then ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    protocol: Option<ProtocolId>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    t: u32,
    /// Message; repeat for several. Defaults to every n-bit message.
    #[arg(long = "x", value_parser = parse_u64)]
    messages: Vec<u64>,
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    keep_transcripts: bool,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    fa_file: Option<PathBuf>,
    #[arg(long)]
    fb_file: Option<PathBuf>,
    #[arg(long)]
    sa_file: Option<PathBuf>,
    #[arg(long)]
    sb_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    protocols: Vec<ProtocolId>,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    l: Vec<u32>,
    #[arg(long, default_value_t = 3)]
    t: u32,
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum TablesCommand {
    /// Sample a table and write it in the text format.
    Emit {
        #[arg(long, value_enum)]
        kind: TableKind,
        #[arg(long)]
        n: u32,
        /// Output width (functions only).
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a table file.
    Check { file: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableKind {
    Perm,
    Func,
}

fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    match s.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("`{s}`: {e}"))
}

/// Entry point for the binary; returns the process exit status.
pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}

/// Exit status: 0 success, 1 failed assertion or verification, 2 usage or configuration error.
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
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify { report } => cmd_verify(&report),
        Command::Tables(t) => cmd_tables(t),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn apply_shared(c: &mut ExperimentConfig, s: &Shared) {
    c.seed = s.seed;
    c.trials = s.trials;
    c.attack = s.attack;
    c.snapshots = s.snapshots;
    c.average = s.average.into();
    c.keys = s.keys;
    if let Some(cap) = s.qubit_cap {
        c.qubit_cap = cap;
    }
    if let Some(limit) = s.enum_limit {
        c.enum_limit = limit;
    }
}

fn read_table(path: &Path) -> Result<TableFile> {
    parse_table_file(&fs::read_to_string(path)?)
}

fn build_config(a: &RunArgs) -> Result<ExperimentConfig> {
    if let Some(path) = &a.config {
        let mut c: ExperimentConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        if let Some(cap) = a.shared.qubit_cap {
            c.qubit_cap = cap;
        }
        if let Some(limit) = a.shared.enum_limit {
            c.enum_limit = limit;
        }
        return Ok(c);
    }
    let protocol = a
        .protocol
        .ok_or_else(|| Error::InvalidConfig("--protocol is required without --config".into()))?;
    let n = a
        .n
        .ok_or_else(|| Error::InvalidConfig("--n is required without --config".into()))?;
    let mut c = ExperimentConfig::new(protocol, n, a.l);
    c.t = a.t;
    apply_shared(&mut c, &a.shared);
    if !a.messages.is_empty() {
        c.messages = MessageSet::List(a.messages.clone());
    }
    c.keep_transcripts = a.keep_transcripts;
    c.name = a.name.clone().unwrap_or_default();
    if let Some(p) = &a.fa_file {
        c.f_a = Some(read_table(p)?.into_permutation()?);
    }
    if let Some(p) = &a.fb_file {
        c.f_b = Some(read_table(p)?.into_permutation()?);
    }
    if let Some(p) = &a.sa_file {
        c.s_a = Some(read_table(p)?.into_function());
    }
    if let Some(p) = &a.sb_file {
        c.s_b = Some(read_table(p)?.into_function());
    }
    Ok(c)
}

/// Apply `$NOKEY_OUT_DIR` to relative paths.
pub fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, text: &str) -> Result<PathBuf> {
    let path = resolve_out(path);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, text)?;
    Ok(path)
}

fn print_summary(r: &ExperimentReport) {
    let c = &r.config;
    eprintln!(
        "{} n={} l={} t={} attack={} runs={} recovered={} ({:.4})",
        c.protocol, c.n, c.l, c.t, c.attack, r.summary.runs, r.summary.recovered, r.summary.recovery_rate
    );
    if let Some(d) = &r.detection {
        eprintln!(
            "detection ({}): {}/{} = {:.4}, {:.1}% CI [{:.4}, {:.4}]",
            d.verdict,
            d.detected,
            d.runs,
            d.rate,
            d.confidence * 100.0,
            d.ci_low,
            d.ci_high
        );
    }
    for a in &r.assertions {
        eprintln!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
}

fn cmd_run(a: RunArgs) -> Result<i32> {
    let config = build_config(&a)?;
    let report = run_experiment(&config)?;
    print_summary(&report);
    let json = report.to_json()?;
    let out = a.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|_| {
            let stem = if config.name.is_empty() { config.protocol.name() } else { &config.name };
            PathBuf::from(format!("{stem}.json"))
        })
    });
    match out {
        Some(path) => {
            let written = write_file(&path, &json)?;
            eprintln!("report written to {}", written.display());
        }
        None => println!("{json}"),
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_sweep(a: SweepArgs) -> Result<i32> {
    let mut csv = String::from(
        "protocol,n,l,t,status,runs,recovery_rate,max_deviation,max_distance,detection_rate,passed\n",
    );
    let mut all_passed = true;
    for &protocol in &a.protocols {
        let ls: Vec<u32> = if protocol.is_keyed() { a.l.clone() } else { vec![0] };
        for &n in &a.n {
            for &l in &ls {
                let t = if protocol == ProtocolId::P6 { a.t } else { 0 };
                let mut c = ExperimentConfig::new(protocol, n, l);
                c.t = t;
                apply_shared(&mut c, &a.shared);
                if !protocol.is_keyed() {
                    c.average = Averaging::None;
                }
                match run_experiment(&c) {
                    Ok(r) => {
                        let dev = r
                            .mixedness
                            .iter()
                            .flat_map(|m| [m.per_run_max_deviation, m.averaged_max_deviation])
                            .flatten()
                            .fold(f64::NAN, f64::max);
                        let dist = r.distances.iter().map(|d| d.max_distance).fold(f64::NAN, f64::max);
                        let det = r.detection.as_ref().map_or(f64::NAN, |d| d.rate);
                        all_passed &= r.passed();
                        csv.push_str(&format!(
                            "{protocol},{n},{l},{t},ok,{},{},{},{},{},{}\n",
                            r.summary.runs,
                            r.summary.recovery_rate,
                            fmt_opt(dev),
                            fmt_opt(dist),
                            fmt_opt(det),
                            r.passed()
                        ));
                    }
                    Err(e) => {
                        let reason = e.to_string().replace(',', ";");
                        csv.push_str(&format!("{protocol},{n},{l},{t},skipped: {reason},,,,,,\n"));
                    }
                }
            }
        }
    }
    match a.out {
        Some(path) => {
            let written = write_file(&path, &csv)?;
            eprintln!("sweep written to {}", written.display());
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
        }
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:e}")
    }
}

fn cmd_verify(path: &Path) -> Result<i32> {
    let report = ExperimentReport::from_json(&fs::read_to_string(path)?)?;
    if verify_report(&report)? {
        eprintln!("verified: {} reproduces byte-identically", path.display());
        Ok(0)
    } else {
        eprintln!("mismatch: re-running the embedded configuration gives a different report body");
        Ok(1)
    }
}

fn cmd_tables(cmd: TablesCommand) -> Result<i32> {
    match cmd {
        TablesCommand::Emit { kind, n, l, seed, out } => {
            let mut rng = rng::stream(seed);
            let table = match kind {
                TableKind::Perm => TableFile::Permutation(sample_permutation(n, &mut rng)?),
                TableKind::Func => TableFile::Function(sample_function(n, l, &mut rng)?),
            };
            let text = write_table_file(&table);
            match out {
                Some(path) => {
                    let written = write_file(&path, &text)?;
                    eprintln!("table written to {}", written.display());
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        TablesCommand::Check { file } => match read_table(&file) {
            Ok(TableFile::Permutation(p)) => {
                println!("permutation n={} ({} entries, bijective)", p.width(), p.table().len());
                Ok(0)
            }
            Ok(TableFile::Function(f)) => {
                println!(
                    "function n={} l={} ({} entries)",
                    f.input_width(),
                    f.output_width(),
                    f.table().len()
                );
                Ok(0)
            }
            Err(e) => {
                eprintln!("invalid table {}: {e}", file.display());
                Ok(1)
            }
        },
    }
}
