//! Command-line front end for the key-rate engines.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 model-domain
//! error (no positive rate, no zero crossing, parameters outside the
//! channel model), 4 output I/O failure, 5 oracle-suite failure.

mod config;
mod output;
mod svg;
mod validate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{ConfigFile, Loaded};
use mpqkd::model::derive_channel;
use mpqkd::rates::{rate_ad, rate_devicelevel, rate_info};
use mpqkd::scan::{
    calibrated_qbar11, max_distance, optimize_mu, qber_threshold, scan_common_qber, scan_distance,
};
use mpqkd::{Engine, MuPolicy, ScanSpec};
use output::{
    AdRecord, Calibration, EngineTriple, InfoRecord, OriginalRecord, PointReport, QberThresholds,
    RatesRecord, ThresholdsReport,
};

/// The plain rate threshold the synthetic-channel calibration targets.
const CALIBRATION_Q_STAR: f64 = 0.046;

#[derive(Parser)]
#[command(
    name = "mpqkd",
    version,
    about = "Secret-key rates for mode-pairing QKD, with and without advantage distillation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the channel and all three rate engines at one distance.
    Rate {
        /// Total transmission distance in km.
        #[arg(allow_negative_numbers = true)]
        distance: f64,
        /// JSON configuration file; defaults apply when omitted.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Pin the intensity instead of optimizing it per engine.
        #[arg(long)]
        mu: Option<f64>,
        /// Override the largest distillation block size.
        #[arg(long)]
        b_max: Option<u32>,
    },
    /// Sweep distance and write a CSV table, optionally an SVG chart.
    ScanDistance {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// First distance in km.
        #[arg(long)]
        from: f64,
        /// Last distance in km.
        #[arg(long)]
        to: f64,
        /// Grid step in km.
        #[arg(long)]
        step: f64,
        /// Output CSV path.
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
        /// Optional SVG chart path.
        #[arg(long, value_name = "SVG")]
        svg: Option<PathBuf>,
        /// Engine whose intensity fills the witness columns.
        #[arg(long, value_enum, default_value_t = EngineArg::Ad)]
        engine: EngineArg,
        /// Pin the intensity instead of optimizing it per point.
        #[arg(long)]
        mu: Option<f64>,
        /// Override the largest distillation block size.
        #[arg(long)]
        b_max: Option<u32>,
    },
    /// Sweep a common error rate on the synthetic channel and write a CSV.
    ScanQber {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// First error rate.
        #[arg(long)]
        from: f64,
        /// Last error rate (at most 0.5).
        #[arg(long)]
        to: f64,
        /// Grid step.
        #[arg(long)]
        step: f64,
        /// Output CSV path.
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
        /// Override the largest distillation block size.
        #[arg(long)]
        b_max: Option<u32>,
        /// Effective single-photon fraction; the default calibrates the
        /// plain-rate threshold to 4.6%.
        #[arg(long)]
        qbar11_eff: Option<f64>,
    },
    /// Report maximum distances and QBER thresholds for every engine.
    Thresholds {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Override the largest distillation block size.
        #[arg(long)]
        b_max: Option<u32>,
    },
    /// Run the deterministic oracle suite and print its JSON report.
    Validate {
        /// JSON configuration file, checked for validity.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Simulated rounds (and blocks) per check; at least 100000.
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Original,
    Info,
    Ad,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Original => Engine::Original,
            EngineArg::Info => Engine::Info,
            EngineArg::Ad => Engine::Ad,
        }
    }
}

enum Failure {
    Usage(String),
    Model(mpqkd::Error),
    Io(String),
    Validation,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Model(_) => 3,
            Failure::Io(_) => 4,
            Failure::Validation => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(msg) => msg.clone(),
            Failure::Model(e) => e.to_string(),
            Failure::Io(msg) => msg.clone(),
            Failure::Validation => "oracle suite reported failing checks".to_owned(),
        }
    }
}

/// Sorts engine errors into exit codes: bad ranges and parameters are
/// usage errors, everything else is a statement about the model.
fn classify(e: mpqkd::Error) -> Failure {
    match e {
        mpqkd::Error::InvalidRange { .. } | mpqkd::Error::InvalidParameter { .. } => {
            Failure::Usage(e.to_string())
        }
        other => Failure::Model(other),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Rate {
            distance,
            config,
            mu,
            b_max,
        } => cmd_rate(config.as_deref(), distance, mu, b_max),
        Cmd::ScanDistance {
            config,
            from,
            to,
            step,
            out,
            svg,
            engine,
            mu,
            b_max,
        } => cmd_scan_distance(
            config.as_deref(),
            from,
            to,
            step,
            &out,
            svg.as_deref(),
            engine.into(),
            mu,
            b_max,
        ),
        Cmd::ScanQber {
            config,
            from,
            to,
            step,
            out,
            b_max,
            qbar11_eff,
        } => cmd_scan_qber(config.as_deref(), from, to, step, &out, b_max, qbar11_eff),
        Cmd::Thresholds { config, b_max } => cmd_thresholds(config.as_deref(), b_max),
        Cmd::Validate {
            config,
            seed,
            samples,
        } => cmd_validate(config.as_deref(), seed, samples),
    }
}

fn load(config: Option<&Path>) -> Result<Loaded, Failure> {
    ConfigFile::load(config).map_err(Failure::Usage)
}

fn block_range(loaded: &Loaded, b_max: Option<u32>) -> Result<(u32, u32), Failure> {
    let hi = b_max.unwrap_or(loaded.b_range.1);
    if hi < loaded.b_range.0 {
        return Err(Failure::Usage(format!(
            "--b-max {hi} is below the configured b_min {}",
            loaded.b_range.0
        )));
    }
    Ok((loaded.b_range.0, hi))
}

fn cmd_rate(
    config: Option<&Path>,
    distance: f64,
    mu: Option<f64>,
    b_max: Option<u32>,
) -> Result<(), Failure> {
    let loaded = load(config)?;
    if !(distance >= 0.0) {
        return Err(Failure::Usage(format!(
            "distance must be non-negative, got {distance}"
        )));
    }
    let b_range = block_range(&loaded, b_max)?;
    let params = loaded.params;
    let fixed = mu.or(loaded.mu);
    let mu_for = |engine: Engine| match fixed {
        Some(v) => v,
        None => optimize_mu(&params, distance, engine, b_range).0,
    };

    let mu_orig = mu_for(Engine::Original);
    let ch_orig = derive_channel(&params, distance, mu_orig).map_err(classify)?;
    let original = OriginalRecord {
        rate: rate_devicelevel(&ch_orig, params.f),
        mu_opt: mu_orig,
    };

    let mu_info = mu_for(Engine::Info);
    let ch_info = derive_channel(&params, distance, mu_info).map_err(classify)?;
    let ri = rate_info(&ch_info, params.f);
    let info = InfoRecord {
        rate: ri.rate,
        mu_opt: mu_info,
        lambda3_opt: ri.lambda3_opt,
        bracket: ri.components.bracket,
    };

    let mu_ad = mu_for(Engine::Ad);
    let ch_ad = derive_channel(&params, distance, mu_ad).map_err(classify)?;
    let ra = rate_ad(&ch_ad, params.f, b_range.0, b_range.1).map_err(classify)?;
    let ad = AdRecord {
        rate: ra.rate,
        mu_opt: mu_ad,
        b_opt: ra.b_opt,
        lambda3_opt: ra.lambda3_opt,
        q_s: ra.components.q_s,
        bracket: ra.components.bracket,
    };

    // The channel block is the distillation engine's operating point,
    // which is also the fixed one when an intensity was pinned.
    let report = PointReport {
        l_km: distance,
        channel: (&ch_ad).into(),
        rates: RatesRecord { original, info, ad },
    };
    print_json(&report);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan_distance(
    config: Option<&Path>,
    from: f64,
    to: f64,
    step: f64,
    out: &Path,
    svg_path: Option<&Path>,
    engine: Engine,
    mu: Option<f64>,
    b_max: Option<u32>,
) -> Result<(), Failure> {
    let loaded = load(config)?;
    let b_range = block_range(&loaded, b_max)?;
    let mu_policy = match mu.or(loaded.mu) {
        Some(v) => MuPolicy::Fixed(v),
        None => MuPolicy::Optimize,
    };
    let spec = ScanSpec {
        params: loaded.params,
        engine,
        l_from: from,
        l_to: to,
        l_step: step,
        mu_policy,
        b_range,
    };
    let table = scan_distance(&spec).map_err(classify)?;
    let file = std::fs::File::create(out)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", out.display())))?;
    output::write_scan_csv(std::io::BufWriter::new(file), &table)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", out.display())))?;
    if let Some(svg_path) = svg_path {
        let doc = svg::scan_chart(&table);
        std::fs::write(svg_path, doc)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", svg_path.display())))?;
    }
    Ok(())
}

fn cmd_scan_qber(
    config: Option<&Path>,
    from: f64,
    to: f64,
    step: f64,
    out: &Path,
    b_max: Option<u32>,
    qbar11_eff: Option<f64>,
) -> Result<(), Failure> {
    let loaded = load(config)?;
    let b_range = block_range(&loaded, b_max)?;
    let qbar = match qbar11_eff {
        Some(v) => v,
        None => calibrated_qbar11(loaded.params.f, CALIBRATION_Q_STAR).map_err(classify)?,
    };
    let table = scan_common_qber(&loaded.params, qbar, from, to, step, b_range).map_err(classify)?;
    let file = std::fs::File::create(out)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", out.display())))?;
    output::write_qber_csv(std::io::BufWriter::new(file), &table)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", out.display())))?;
    eprintln!("qbar11_eff = {}", output::sci(table.qbar11_eff));
    Ok(())
}

fn cmd_thresholds(config: Option<&Path>, b_max: Option<u32>) -> Result<(), Failure> {
    let loaded = load(config)?;
    let b_range = block_range(&loaded, b_max)?;
    let params = loaded.params;

    let l_orig = max_distance(&params, Engine::Original, (1, 1), 0.5).map_err(classify)?;
    let l_info = max_distance(&params, Engine::Info, (1, 1), 0.5).map_err(classify)?;
    let l_ad = max_distance(&params, Engine::Ad, b_range, 0.5).map_err(classify)?;

    let qbar = calibrated_qbar11(params.f, CALIBRATION_Q_STAR).map_err(classify)?;
    let q_orig = qber_threshold(&params, qbar, Engine::Original, (1, 1), 1e-4).map_err(classify)?;
    let q_info = qber_threshold(&params, qbar, Engine::Info, (1, 1), 1e-4).map_err(classify)?;
    let q_ad = qber_threshold(&params, qbar, Engine::Ad, b_range, 1e-4).map_err(classify)?;

    let report = ThresholdsReport {
        l_max_km: EngineTriple {
            original: l_orig,
            info: l_info,
            ad: l_ad,
        },
        extension_km: l_ad - l_orig,
        qber_threshold: QberThresholds {
            original: q_orig,
            info: q_info,
            ad: q_ad,
            ratio_ad_over_original: q_ad / q_orig,
        },
        calibration: Calibration {
            qbar11_eff: qbar,
            target_original_threshold: CALIBRATION_Q_STAR,
            error_correction_f: params.f,
        },
    };
    print_json(&report);
    Ok(())
}

fn cmd_validate(config: Option<&Path>, seed: u64, samples: u64) -> Result<(), Failure> {
    load(config)?;
    if samples < 100_000 {
        return Err(Failure::Usage(format!(
            "--samples {samples} is below the floor of 100000; estimates would be too noisy to check"
        )));
    }
    let report = validate::run(seed, samples);
    print_json(&report);
    if report.all_pass {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

/// Prints a report to stdout. Write errors are ignored so that piping
/// into a pager or `head` cannot turn a finished computation into a
/// panic.
fn print_json<T: serde::Serialize>(value: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("reports contain only finite numbers");
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}
