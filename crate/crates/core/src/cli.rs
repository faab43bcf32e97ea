//! Command-line front end.
//!
//! Configuration is resolved as built-in defaults for the command, then an
//! optional JSON file (`--config`, either a bare config object or a run
//! manifest), then command-line overrides. The resolved config is written to
//! the run manifest next to the CSV output.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::channel::LinkParams;
use crate::detectors::DetectorId;
use crate::error::{Error, Result};
use crate::harness::output::{self, Manifest};
use crate::harness::{
    calibrate, detection_probability, run_fig1, run_fig2, run_fig4, run_ramping_demo, tags, AttackPattern,
    CalibrationSpec, CapacityPoint, CapacitySweep, CurvePoint, DetectionScenario, Fig4Config, RampConfig, RampSchedule,
    DEFAULT_M_GRID,
};
use crate::numerics::RngStream;

pub const OUT_DIR_ENV: &str = "MIMO_PLS_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Capacities vs M, passive eavesdropper, perfect CSI
    Fig1,
    /// Capacities vs M, pilot-contamination attack, LS-estimated CSI
    Fig2,
    /// Detection probability vs SNR for the detectors at a fixed false-alarm rate
    Fig4,
    /// Calibrate one detector and re-measure its false-alarm rate
    Calibrate,
    /// Calibrate one detector and measure its detection probability
    Detect,
    /// Naive energy detector against a slow power-ramping attack
    Ramp,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Fig1 => "fig1",
            Command::Fig2 => "fig2",
            Command::Fig4 => "fig4",
            Command::Calibrate => "calibrate",
            Command::Detect => "detect",
            Command::Ramp => "ramp",
        }
    }
}

/// Every tunable of every command. Fields a command does not use are still
/// echoed into its manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub seed: u64,
    pub trials: usize,
    pub m: usize,
    pub m_grid: Vec<usize>,
    pub snr_db: f64,
    pub snr_grid_db: Vec<f64>,
    pub n0: f64,
    pub beta_lu: f64,
    pub beta_ed: f64,
    pub ed_power_ratio: f64,
    pub p_tx: f64,
    pub rho: f64,
    pub detector: DetectorId,
    pub detectors: Vec<DetectorId>,
    pub target_pfa: f64,
    pub slots: usize,
    pub psk_order: usize,
    pub attack: AttackPattern,
    pub n0_bias: f64,
    pub calibration_trials: usize,
    pub ramp: RampSchedule,
    pub slots_per_interval: usize,
    pub ema_weight: f64,
}

impl SystemConfig {
    pub fn defaults_for(command: Command) -> Self {
        let fig4 = Fig4Config::default();
        let base = SystemConfig {
            seed: 1,
            trials: 10_000,
            m: 200,
            m_grid: DEFAULT_M_GRID.to_vec(),
            snr_db: 10.0,
            snr_grid_db: fig4.snr_grid_db.clone(),
            n0: 1.0,
            beta_lu: 1.0,
            beta_ed: 1.0,
            ed_power_ratio: 1.0,
            p_tx: 1.0,
            rho: 0.0,
            detector: DetectorId::Scheme1b,
            detectors: fig4.detectors.clone(),
            target_pfa: 0.01,
            slots: 4,
            psk_order: 4,
            attack: AttackPattern::All,
            n0_bias: 1.0,
            calibration_trials: 10_000,
            ramp: RampSchedule::default(),
            slots_per_interval: 10,
            ema_weight: 0.5,
        };
        match command {
            Command::Fig1 => SystemConfig {
                trials: 1_000,
                snr_db: 0.0,
                ..base
            },
            Command::Fig2 => SystemConfig {
                trials: 1_000,
                snr_db: 20.0,
                ed_power_ratio: 0.1,
                ..base
            },
            Command::Ramp => SystemConfig { trials: 1_000, ..base },
            Command::Fig4 | Command::Calibrate | Command::Detect => base,
        }
    }

    /// Link at `snr_db`, with p_lu = 10^(snr/10)·n0/β_LU.
    pub fn link_at(&self, snr_db: f64) -> LinkParams {
        let p_lu = 10f64.powf(snr_db / 10.0) * self.n0 / self.beta_lu;
        LinkParams {
            beta_lu: self.beta_lu,
            beta_ed: self.beta_ed,
            p_lu,
            p_ed: p_lu * self.ed_power_ratio,
            n0: self.n0,
            m: self.m,
            rho: self.rho,
        }
    }

    pub fn capacity_sweep(&self) -> CapacitySweep {
        CapacitySweep {
            m_grid: self.m_grid.clone(),
            link: self.link_at(self.snr_db),
            p_tx: self.p_tx,
            trials: self.trials,
        }
    }

    pub fn fig4(&self) -> Fig4Config {
        Fig4Config {
            m: self.m,
            psk_order: self.psk_order,
            snr_grid_db: self.snr_grid_db.clone(),
            trials: self.trials,
            target_pfa: self.target_pfa,
            beta: self.beta_lu,
            n0: self.n0,
            ed_power_ratio: self.ed_power_ratio,
            slots_1b: self.slots,
            detectors: self.detectors.clone(),
        }
    }

    pub fn scenario(&self) -> DetectionScenario {
        DetectionScenario {
            n0_bias: self.n0_bias,
            ..DetectionScenario::new(self.link_at(self.snr_db), self.slots, self.psk_order)
        }
    }

    pub fn calibration_spec(&self) -> CalibrationSpec {
        CalibrationSpec {
            detector: self.detector,
            target_pfa: self.target_pfa,
            trials: self.calibration_trials,
            scenario: self.scenario(),
        }
    }

    pub fn ramp(&self) -> RampConfig {
        RampConfig {
            link: self.link_at(self.snr_db),
            schedule: self.ramp,
            slots_per_interval: self.slots_per_interval,
            ema_weight: self.ema_weight,
            target_pfa: self.target_pfa,
            calibration_trials: self.calibration_trials,
            trials: self.trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub out: PathBuf,
    /// Worker cap; results do not depend on it.
    pub threads: Option<usize>,
    pub config: SystemConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Includes `--help` and `--version`, which are not failures.
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => EXIT_OK,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mimo-pls",
    version,
    about = "Massive MIMO secrecy-capacity and pilot-attack detection experiments"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Output CSV path; the manifest goes next to it as <stem>.manifest.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for <command>.csv when --out is not given
    #[arg(long, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    /// JSON config or run manifest applied before the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads [default: all cores]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

#[derive(Debug, Args, Default)]
struct Overrides {
    /// RNG seed [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trials per point [default: 1000 for fig1/fig2/ramp, 10000 otherwise]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    /// BS antenna count M for fig4/calibrate/detect/ramp [default: 200]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    m: Option<u64>,
    /// Comma-separated antenna counts for fig1/fig2 [default: 2,4,8,16,32,64,100,200,400]
    #[arg(long, value_delimiter = ',')]
    m_grid: Option<Vec<usize>>,
    /// Uplink SNR p_lu*beta_lu/n0, dB [default: 0 fig1, 20 fig2, 10 otherwise]
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Comma-separated SNR grid for fig4, dB [default: -10,-8,...,20]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_grid_db: Option<Vec<f64>>,
    /// Noise power per antenna, linear [default: 1]
    #[arg(long)]
    n0: Option<f64>,
    /// LU large-scale fading, linear [default: 1]
    #[arg(long)]
    beta_lu: Option<f64>,
    /// ED large-scale fading, linear [default: 1]
    #[arg(long)]
    beta_ed: Option<f64>,
    /// ED/LU pilot power ratio, linear [default: 0.1 fig2, 1 otherwise]
    #[arg(long)]
    ed_power_ratio: Option<f64>,
    /// Downlink transmit power for fig1/fig2, linear [default: 1]
    #[arg(long)]
    p_tx: Option<f64>,
    /// Correlation of the ED channel with the LU channel, in [0,1] [default: 0]
    #[arg(long)]
    rho: Option<f64>,
    /// Detector for calibrate/detect: naive, scheme1a, scheme1b, scheme2 [default: scheme1b]
    #[arg(long)]
    detector: Option<DetectorId>,
    /// Comma-separated detectors for fig4 [default: scheme1a,scheme1b,scheme2]
    #[arg(long, value_delimiter = ',')]
    detectors: Option<Vec<DetectorId>>,
    /// Target false-alarm probability [default: 0.01]
    #[arg(long)]
    pfa: Option<f64>,
    /// Training slots L of the eigenvalue test, 2..=8 [default: 4]
    #[arg(long)]
    slots: Option<usize>,
    /// PSK alphabet order N [default: 4]
    #[arg(long)]
    psk_order: Option<usize>,
    /// ED activity for detect: none, all, one, subset:K [default: all]
    #[arg(long)]
    attack: Option<AttackPattern>,
    /// BS noise estimate as a multiple of the true n0 [default: 1]
    #[arg(long)]
    n0_bias: Option<f64>,
    /// Null trials for threshold calibration [default: 10000]
    #[arg(long)]
    calibration_trials: Option<usize>,
    /// Ramp start power, multiple of p_lu [default: 0.1]
    #[arg(long)]
    ramp_start: Option<f64>,
    /// Ramp power growth factor per interval [default: 1.05]
    #[arg(long)]
    ramp_growth: Option<f64>,
    /// Ramp length in intervals [default: 96]
    #[arg(long)]
    ramp_intervals: Option<usize>,
    /// Training slots per ramp interval [default: 10]
    #[arg(long)]
    slots_per_interval: Option<usize>,
    /// Weight of the newest interval in the BS's beta estimate, (0,1] [default: 0.5]
    #[arg(long)]
    ema_weight: Option<f64>,
}

impl Overrides {
    fn apply(self, cfg: &mut Map<String, Value>) -> std::result::Result<(), serde_json::Error> {
        let mut set = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                cfg.insert(key.to_string(), v);
            }
        };
        set("seed", self.seed.map(Value::from));
        set("trials", self.trials.map(Value::from));
        set("m", self.m.map(Value::from));
        set("m_grid", self.m_grid.map(Value::from));
        set("snr_db", self.snr_db.map(Value::from));
        set("snr_grid_db", self.snr_grid_db.map(Value::from));
        set("n0", self.n0.map(Value::from));
        set("beta_lu", self.beta_lu.map(Value::from));
        set("beta_ed", self.beta_ed.map(Value::from));
        set("ed_power_ratio", self.ed_power_ratio.map(Value::from));
        set("p_tx", self.p_tx.map(Value::from));
        set("rho", self.rho.map(Value::from));
        set("detector", self.detector.map(|d| Value::from(d.as_str())));
        set(
            "detectors",
            self.detectors
                .map(|ds| Value::from(ds.iter().map(|d| d.as_str()).collect::<Vec<_>>())),
        );
        set("target_pfa", self.pfa.map(Value::from));
        set("slots", self.slots.map(Value::from));
        set("psk_order", self.psk_order.map(Value::from));
        set("attack", self.attack.map(|a| Value::from(a.to_string())));
        set("n0_bias", self.n0_bias.map(Value::from));
        set("calibration_trials", self.calibration_trials.map(Value::from));
        set("slots_per_interval", self.slots_per_interval.map(Value::from));
        set("ema_weight", self.ema_weight.map(Value::from));
        if let Some(Value::Object(ramp)) = cfg.get_mut("ramp") {
            for (key, v) in [
                ("start_power", self.ramp_start.map(Value::from)),
                ("growth_per_interval", self.ramp_growth.map(Value::from)),
                ("intervals", self.ramp_intervals.map(Value::from)),
            ] {
                if let Some(v) = v {
                    ramp.insert(key.to_string(), v);
                }
            }
        }
        Ok(())
    }
}

fn merge(base: &mut Map<String, Value>, layer: Map<String, Value>) {
    for (key, v) in layer {
        match (base.get_mut(&key), v) {
            (Some(Value::Object(inner)), Value::Object(sub)) => merge(inner, sub),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Reads a config layer. A run manifest contributes its `config` object and
/// must belong to the same command.
fn load_config_file(path: &Path, command: Command) -> std::result::Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(mut obj) = value else {
        return Err(CliError::Usage(format!(
            "config {} must be a JSON object",
            path.display()
        )));
    };
    if obj.contains_key("version") && obj.contains_key("command") {
        let recorded = obj
            .get("command")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        if recorded != command.as_str() {
            return Err(CliError::Usage(format!(
                "manifest {} is for '{recorded}', not '{}'",
                path.display(),
                command.as_str()
            )));
        }
        return match obj.remove("config") {
            Some(Value::Object(cfg)) => Ok(cfg),
            _ => Err(CliError::Usage(format!(
                "manifest {} has no config object",
                path.display()
            ))),
        };
    }
    Ok(obj)
}

pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let command = cli.command;
    let Value::Object(mut cfg) =
        serde_json::to_value(SystemConfig::defaults_for(command)).map_err(|e| CliError::Usage(e.to_string()))?
    else {
        unreachable!("config serializes to an object")
    };
    if let Some(path) = &cli.run.config {
        merge(&mut cfg, load_config_file(path, command)?);
    }
    cli.overrides
        .apply(&mut cfg)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let config: SystemConfig =
        serde_json::from_value(Value::Object(cfg)).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
    let out = match (cli.run.out, cli.run.out_dir) {
        (Some(out), _) => out,
        (None, Some(dir)) => dir.join(format!("{}.csv", command.as_str())),
        (None, None) => {
            return Err(CliError::Usage(format!(
                "no output path: pass --out, --out-dir or set {OUT_DIR_ENV}"
            )))
        }
    };
    Ok(RunConfig {
        command,
        out,
        threads: cli.run.threads.map(|t| t as usize),
        config,
    })
}

fn capacity_results(points: &[CapacityPoint]) -> (Vec<CurvePoint>, Value) {
    let curve = points.iter().flat_map(|p| p.curve()).collect();
    (curve, serde_json::to_value(points).unwrap_or(Value::Null))
}

fn run(cfg: &RunConfig) -> Result<(Vec<CurvePoint>, Value)> {
    let sc = &cfg.config;
    let root = RngStream::new(sc.seed, 0);
    Ok(match cfg.command {
        Command::Fig1 => capacity_results(&run_fig1(&sc.capacity_sweep(), &root)?),
        Command::Fig2 => capacity_results(&run_fig2(&sc.capacity_sweep(), &root)?),
        Command::Fig4 => {
            let res = run_fig4(&sc.fig4(), &root)?;
            (res.curve(), serde_json::to_value(&res)?)
        }
        Command::Calibrate | Command::Detect => {
            let spec = sc.calibration_spec();
            let base = root.descend(&[tags::CALIBRATE, sc.detector as u64]);
            let th = calibrate(&spec, &base.child(0))?;
            let mut false_alarm = detection_probability(
                sc.detector,
                &th,
                &spec.scenario,
                AttackPattern::None,
                sc.trials,
                &base.child(1),
            )?;
            false_alarm.series = format!("{}:false_alarm", sc.detector);
            let mut curve = vec![false_alarm.clone()];
            let mut results = serde_json::json!({
                "thresholds": th,
                "false_alarm": false_alarm,
            });
            if cfg.command == Command::Detect {
                let mut detection = detection_probability(
                    sc.detector,
                    &th,
                    &spec.scenario,
                    sc.attack,
                    sc.trials,
                    &root.descend(&[tags::DETECT, sc.detector as u64]),
                )?;
                detection.series = format!("{}:{}", sc.detector, sc.attack);
                results["detection"] = serde_json::to_value(&detection)?;
                curve.push(detection);
            }
            (curve, results)
        }
        Command::Ramp => {
            let res = run_ramping_demo(&sc.ramp(), &root)?;
            (res.curve(), serde_json::to_value(&res)?)
        }
    })
}

fn run_and_write(cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let (curve, results) = run(cfg)?;
    output::write_csv(&cfg.out, &curve)?;
    let manifest = Manifest {
        version: output::version_string(),
        command: cfg.command.as_str().to_string(),
        seed: cfg.config.seed,
        snr_definition: output::SNR_DEFINITION.to_string(),
        config: serde_json::to_value(&cfg.config)?,
        results,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    output::write_manifest(&output::manifest_path(&cfg.out), &manifest)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::CalibrationInfeasible(_) => EXIT_CONFIG,
        Error::Io { .. } | Error::Json(_) => EXIT_RUNTIME,
    }
}

/// Runs the command, writes CSV and manifest, and returns the process exit
/// status. Errors are reported on stderr.
pub fn execute(cfg: &RunConfig) -> i32 {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let outcome = match pool.build() {
        Ok(pool) => pool.install(|| run_and_write(cfg)),
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_RUNTIME;
        }
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
