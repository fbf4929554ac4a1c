//! Config-file and command-line ingestion.
//!
//! Both sources feed the same key table. Config files hold one
//! `key = value` pair per line (`#` starts a comment); keys are the
//! hyphenated `SimConfig` field names, and the CLI flag spellings are
//! accepted too. Flags always override file values.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rta_ofdma_core::model::secs_to_nanos;
use rta_ofdma_core::{ChannelRules, Nanos, SchedulerKind, ShuffleMode, SimConfig, StopRule};

use crate::CliError;

/// Total delivered packets per sweep point unless `--stop-value` says
/// otherwise; enough to resolve P_late at 1e-5.
pub const DEFAULT_PACKETS_PER_POINT: u64 = 10_000_000;
pub const DEFAULT_REPLICATIONS: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "rta-ofdma", version, about = "Uplink OFDMA real-time access simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep one parameter and write one CSV row per value.
    Sweep(SweepArgs),
    /// Dump the per-slot RU trace of a scripted-arrival run as JSON lines.
    Trace(TraceArgs),
}

/// Scenario flags shared by `sweep` and `trace`.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// uora, cra or gra.
    #[arg(long)]
    pub scheduler: Option<String>,
    /// Channel access rules: ax or be.
    #[arg(long)]
    pub rules: Option<String>,
    /// Number of RTA stations: N, a list `a,b,c` or a range `start:stop:step`.
    #[arg(long, value_name = "VALUES")]
    pub stations: Option<String>,
    /// Frame arrival rate per station in 1/s (single, list or range).
    #[arg(long, value_name = "VALUES")]
    pub lambda: Option<String>,
    /// RA RUs per slot (single, list or range).
    #[arg(long = "f-ra", value_name = "VALUES")]
    pub f_ra: Option<String>,
    /// Total RUs per slot.
    #[arg(long = "f-max")]
    pub f_max: Option<String>,
    /// Slot duration in microseconds.
    #[arg(long = "slot-us")]
    pub slot_us: Option<String>,
    /// Delay deadline in microseconds.
    #[arg(long = "deadline-us")]
    pub deadline_us: Option<String>,
    #[arg(long = "ocw-min")]
    pub ocw_min: Option<String>,
    #[arg(long = "ocw-max")]
    pub ocw_max: Option<String>,
    /// packet-count or slot-count.
    #[arg(long)]
    pub stop: Option<String>,
    /// Packets (or slots) per replication.
    #[arg(long = "stop-value")]
    pub stop_value: Option<String>,
    #[arg(long = "warmup-slots")]
    pub warmup_slots: Option<String>,
    /// Hard cap on simulated slots per replication.
    #[arg(long = "max-slots")]
    pub max_slots: Option<String>,
    /// Base seed; replication r uses seed + r.
    #[arg(long)]
    pub seed: Option<String>,
    /// Keep station ids in ascending order instead of shuffling.
    #[arg(long = "identity-shuffle")]
    pub identity_shuffle: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Replications per sweep point.
    #[arg(long)]
    pub reps: Option<String>,
    /// CSV destination (default: stdout, or sweep.csv under --out-dir).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// JSON summary destination (default: sweep.json under --out-dir).
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Output directory.
    #[arg(long = "out-dir", env = crate::OUT_DIR_ENV, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Scripted arrivals: `station_id,time_us` per line.
    #[arg(long, value_name = "PATH")]
    pub arrivals: PathBuf,
    /// Number of slots to trace.
    #[arg(long, default_value_t = 5)]
    pub horizon: u64,
    /// Output path (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Stations,
    ArrivalRate,
    FRa,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Stations => "stations",
            Axis::ArrivalRate => "arrival-rate",
            Axis::FRa => "f-ra",
        }
    }

    pub fn apply(self, base: &SimConfig, value: f64) -> SimConfig {
        let mut c = base.clone();
        match self {
            Axis::Stations => c.n_stations = value as usize,
            Axis::ArrivalRate => c.arrival_rate = value,
            Axis::FRa => c.f_ra = value as usize,
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub replications: usize,
    pub base: SimConfig,
}

impl SweepSpec {
    pub fn point(&self, value: f64) -> SimConfig {
        self.axis.apply(&self.base, value)
    }
}

/// Every setting either source may provide.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub stations: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub f_ra: Option<Vec<f64>>,
    pub f_max: Option<usize>,
    pub slot_duration: Option<Nanos>,
    pub deadline: Option<Nanos>,
    pub ocw_min: Option<u32>,
    pub ocw_max: Option<u32>,
    pub scheduler: Option<SchedulerKind>,
    pub rules: Option<ChannelRules>,
    pub stop_rule: Option<StopRule>,
    pub stop_value: Option<u64>,
    pub seed: Option<u64>,
    pub warmup_slots: Option<u64>,
    pub max_slots: Option<u64>,
    pub replications: Option<usize>,
    pub shuffle: Option<ShuffleMode>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("--{key}: cannot parse {value:?}")))
}

fn parse_float(key: &str, value: &str) -> Result<f64, CliError> {
    let v: f64 = parse_num(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!("--{key}: {value:?} is not finite")))
    }
}

/// Parses `a`, `a,b,c` or the inclusive range `start:stop:step`.
pub fn parse_values(key: &str, value: &str, integer: bool) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(CliError::usage(format!(
                "--{key}: range must be start:stop:step, got {value:?}"
            )));
        };
        let (start, stop, step) = (
            parse_float(key, start)?,
            parse_float(key, stop)?,
            parse_float(key, step)?,
        );
        if step <= 0.0 || stop < start {
            return Err(CliError::usage(format!("--{key}: empty range {value:?}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        value
            .split(',')
            .map(|v| parse_float(key, v))
            .collect::<Result<_, _>>()?
    };
    if integer {
        if let Some(bad) = values.iter().find(|v| v.fract() != 0.0 || **v < 0.0) {
            return Err(CliError::usage(format!("--{key}: {bad} is not a non-negative integer")));
        }
    }
    Ok(values)
}

fn micros_to_nanos(key: &str, value: &str) -> Result<Nanos, CliError> {
    Ok((parse_float(key, value)? * 1e3).round() as Nanos)
}

fn secs_value(key: &str, value: &str) -> Result<Nanos, CliError> {
    Ok(secs_to_nanos(parse_float(key, value)?))
}

impl Settings {
    /// Sets one key given either its config-file or its flag spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "n-stations" | "stations" => self.stations = Some(parse_values(key, value, true)?),
            "arrival-rate" | "lambda" => self.lambda = Some(parse_values(key, value, false)?),
            "f-ra" => self.f_ra = Some(parse_values(key, value, true)?),
            "f-max" => self.f_max = Some(parse_num(key, value)?),
            "slot-duration" => self.slot_duration = Some(secs_value(key, value)?),
            "slot-us" => self.slot_duration = Some(micros_to_nanos(key, value)?),
            "deadline" => self.deadline = Some(secs_value(key, value)?),
            "deadline-us" => self.deadline = Some(micros_to_nanos(key, value)?),
            "ocw-min" => self.ocw_min = Some(parse_num(key, value)?),
            "ocw-max" => self.ocw_max = Some(parse_num(key, value)?),
            "scheduler-kind" | "scheduler" => {
                self.scheduler = Some(
                    SchedulerKind::from_name(value)
                        .ok_or_else(|| CliError::usage(format!("--{key}: unknown scheduler {value:?}")))?,
                )
            }
            "channel-rules" | "rules" => {
                self.rules = Some(
                    ChannelRules::from_name(value)
                        .ok_or_else(|| CliError::usage(format!("--{key}: unknown rules {value:?}")))?,
                )
            }
            "stop-rule" | "stop" => {
                self.stop_rule = Some(
                    StopRule::from_name(value)
                        .ok_or_else(|| CliError::usage(format!("--{key}: unknown stop rule {value:?}")))?,
                )
            }
            "stop-value" => self.stop_value = Some(parse_num(key, value)?),
            "seed" => self.seed = Some(parse_num(key, value)?),
            "warmup-slots" => self.warmup_slots = Some(parse_num(key, value)?),
            "max-slots" => self.max_slots = Some(parse_num(key, value)?),
            "replications" | "reps" => self.replications = Some(parse_num(key, value)?),
            "shuffle" => {
                self.shuffle = Some(match value {
                    "random" => ShuffleMode::Random,
                    "identity" => ShuffleMode::Identity,
                    _ => {
                        return Err(CliError::usage(format!(
                            "--{key}: expected random or identity, got {value:?}"
                        )))
                    }
                })
            }
            _ => return Err(CliError::usage(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn from_file_contents(text: &str) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", lineno + 1)))?;
            s.set(key.trim(), value).map_err(|e| {
                CliError::usage(format!(
                    "config line {}: {}",
                    lineno + 1,
                    e.to_string().trim_start_matches("usage error: ")
                ))
            })?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Settings, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Settings::from_file_contents(&text)
    }

    /// File values (if `--config` was given) overridden by flags.
    pub fn from_scenario(args: &ScenarioArgs) -> Result<Settings, CliError> {
        let mut s = match &args.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("scheduler", &args.scheduler),
            ("rules", &args.rules),
            ("stations", &args.stations),
            ("lambda", &args.lambda),
            ("f-ra", &args.f_ra),
            ("f-max", &args.f_max),
            ("slot-us", &args.slot_us),
            ("deadline-us", &args.deadline_us),
            ("ocw-min", &args.ocw_min),
            ("ocw-max", &args.ocw_max),
            ("stop", &args.stop),
            ("stop-value", &args.stop_value),
            ("warmup-slots", &args.warmup_slots),
            ("max-slots", &args.max_slots),
            ("seed", &args.seed),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v)?;
            }
        }
        if args.identity_shuffle {
            s.shuffle = Some(ShuffleMode::Identity);
        }
        Ok(s)
    }

    fn single(values: &Option<Vec<f64>>) -> Option<f64> {
        values.as_ref().and_then(|v| (v.len() == 1).then(|| v[0]))
    }

    /// The configuration with every single-valued setting applied over the
    /// defaults. Multi-valued settings are left at their defaults.
    pub fn base_config(&self) -> SimConfig {
        let d = SimConfig::default();
        let reps = self.replications.unwrap_or(DEFAULT_REPLICATIONS).max(1) as u64;
        SimConfig {
            n_stations: Self::single(&self.stations).map_or(d.n_stations, |v| v as usize),
            arrival_rate: Self::single(&self.lambda).unwrap_or(d.arrival_rate),
            f_ra: Self::single(&self.f_ra).map_or(d.f_ra, |v| v as usize),
            f_max: self.f_max.unwrap_or(d.f_max),
            slot_duration: self.slot_duration.unwrap_or(d.slot_duration),
            deadline: self.deadline.unwrap_or(d.deadline),
            ocw_min: self.ocw_min.unwrap_or(d.ocw_min),
            ocw_max: self.ocw_max.unwrap_or(d.ocw_max),
            scheduler: self.scheduler.unwrap_or(d.scheduler),
            rules: self.rules.unwrap_or(d.rules),
            stop_rule: self.stop_rule.unwrap_or(d.stop_rule),
            stop_value: self.stop_value.unwrap_or(DEFAULT_PACKETS_PER_POINT.div_ceil(reps)),
            seed: self.seed.unwrap_or(d.seed),
            warmup_slots: self.warmup_slots.unwrap_or(d.warmup_slots),
            max_slots: self.max_slots.or(d.max_slots),
            shuffle: self.shuffle.unwrap_or(d.shuffle),
        }
    }

    pub fn into_sweep_spec(self) -> Result<SweepSpec, CliError> {
        let replications = self.replications.unwrap_or(DEFAULT_REPLICATIONS);
        if replications == 0 {
            return Err(CliError::usage("--reps must be >= 1"));
        }
        let multi: Vec<(Axis, &Vec<f64>)> = [
            (Axis::Stations, &self.stations),
            (Axis::ArrivalRate, &self.lambda),
            (Axis::FRa, &self.f_ra),
        ]
        .into_iter()
        .filter_map(|(axis, v)| v.as_ref().filter(|v| v.len() > 1).map(|v| (axis, v)))
        .collect();
        let base = self.base_config();
        let (axis, values) = match multi.as_slice() {
            [] => (Axis::Stations, vec![base.n_stations as f64]),
            [(axis, values)] => (*axis, (*values).clone()),
            _ => {
                return Err(CliError::usage(
                    "only one of --stations, --lambda, --f-ra may list several values",
                ))
            }
        };
        let spec = SweepSpec {
            axis,
            values,
            replications,
            base,
        };
        for &v in &spec.values {
            spec.point(v).validate().map_err(|e| CliError::usage(e.to_string()))?;
        }
        Ok(spec)
    }
}

impl SweepArgs {
    pub fn to_spec(&self) -> Result<SweepSpec, CliError> {
        let mut settings = Settings::from_scenario(&self.scenario)?;
        if let Some(reps) = &self.reps {
            settings.set("reps", reps)?;
        }
        settings.into_sweep_spec()
    }
}

#[derive(Debug, Parser)]
#[command(name = "rta-ofdma sweep")]
struct SweepInvocation {
    #[command(flatten)]
    args: SweepArgs,
}

/// Parses sweep flags (first item is the program name), reading the
/// `--config` file when given.
pub fn parse_invocation<I, T>(args: I) -> Result<SweepSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = SweepInvocation::try_parse_from(args).map_err(|e| CliError::usage(e.to_string()))?;
    inv.args.to_spec()
}
