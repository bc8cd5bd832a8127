//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored; every key may appear at most
//! once and unknown keys are rejected. Values are checked for type on parse
//! and against the chosen experiment on [`SimConfig::resolve`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nbmimo::analysis::{ChannelModel, NoiseConvention};
use nbmimo::detect::{DetectorKind, VarianceMode};
use nbmimo::mimo::Constellation;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    UncodedBer,
    CodedBer,
    Capacity,
    Complexity,
    DeltaPdf,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Self::UncodedBer,
        Self::CodedBer,
        Self::Capacity,
        Self::Complexity,
        Self::DeltaPdf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::UncodedBer => "uncoded-ber",
            Self::CodedBer => "coded-ber",
            Self::Capacity => "capacity",
            Self::Complexity => "complexity",
            Self::DeltaPdf => "delta-pdf",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| "expected one of uncoded-ber, coded-ber, capacity, complexity, delta-pdf".to_string())
    }
}

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "experiment",
    "nt",
    "nr",
    "modulation",
    "es",
    "n_symbols",
    "k_symbols",
    "repetition",
    "code_seed",
    "code_file",
    "save_code",
    "snr_db",
    "detector",
    "variance_mode",
    "channel",
    "noiseless",
    "seed",
    "workers",
    "max_trials",
    "target_errors",
    "batch_size",
    "max_iterations",
    "trials",
    "realizations",
    "noise_convention",
    "output",
];

/// Values as written, keyed by name, with their line numbers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// Sets or replaces a key, as a command-line override does.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(_, l)| *l).filter(|l| *l > 0)
    }

    fn parse<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, _)) => v.parse().map(Some).map_err(|_| self.err(key, format!("expected {what}, got `{v}`"))),
        }
    }

    fn err(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            line: self.line(key),
            key: key.to_string(),
            message: message.into(),
        }
    }
}

/// Splits config text into key/value pairs, rejecting syntax errors,
/// unknown keys and repeats.
pub fn parse_raw(text: &str) -> Result<RawConfig, CliError> {
    let mut raw = RawConfig::default();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| CliError::Config {
            line: Some(n),
            key: String::new(),
            message: format!("expected `key = value`, got `{body}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Config {
                line: Some(n),
                key: key.to_string(),
                message: "unknown key".into(),
            });
        }
        if value.is_empty() {
            return Err(CliError::Config {
                line: Some(n),
                key: key.to_string(),
                message: "missing value".into(),
            });
        }
        if let Some((_, first)) = raw.entries.get(key) {
            return Err(CliError::Config {
                line: Some(n),
                key: key.to_string(),
                message: format!("repeated key (first set on line {first})"),
            });
        }
        raw.entries.insert(key.to_string(), (value.to_string(), n));
    }
    Ok(raw)
}

/// Parses `a, b, c` or the range `start:step:stop` (inclusive).
pub fn parse_snr_list(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
            .collect::<Result<_, _>>()?;
        let (start, step, stop) = (v[0], v[1], v[2]);
        if !(step > 0.0) || stop < start {
            return Err("range needs step > 0 and stop >= start".into());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + step * i as f64).collect());
    }
    if parts.len() != 1 {
        return Err("expected a comma-separated list or start:step:stop".into());
    }
    text.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{p}` is not a number"))
        })
        .collect()
}

/// Fully resolved configuration for one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub experiment: Experiment,
    pub nt: usize,
    pub nr: usize,
    pub modulation: Constellation,
    pub es: f64,
    pub n_symbols: usize,
    pub k_symbols: usize,
    pub repetition: usize,
    pub code_seed: u64,
    pub code_file: Option<PathBuf>,
    pub save_code: Option<PathBuf>,
    pub snr_db: Vec<f64>,
    pub detector: DetectorKind,
    pub variance_mode: VarianceMode,
    pub channel: ChannelModel,
    pub noiseless: bool,
    pub seed: u64,
    pub workers: usize,
    pub max_trials: u64,
    pub target_errors: u64,
    pub batch_size: u64,
    pub max_iterations: usize,
    pub trials: u64,
    pub realizations: usize,
    pub noise_convention: NoiseConvention,
    pub output: Option<PathBuf>,
}

impl SimConfig {
    /// Applies defaults and checks everything `experiment` will use.
    pub fn resolve(raw: &RawConfig, experiment: Experiment) -> Result<Self, CliError> {
        if let Some(e) = raw.get("experiment") {
            let named: Experiment = e.parse().map_err(|m: String| raw.err("experiment", m))?;
            if named != experiment {
                return Err(raw.err(
                    "experiment",
                    format!("config is for `{named}` but `{experiment}` was requested"),
                ));
            }
        }
        let required = |key: &str| -> Result<(), CliError> {
            if raw.get(key).is_none() {
                Err(CliError::Config {
                    line: None,
                    key: key.to_string(),
                    message: format!("missing required key for {experiment}"),
                })
            } else {
                Ok(())
            }
        };
        let coded = experiment == Experiment::CodedBer;
        let ber = matches!(experiment, Experiment::UncodedBer | Experiment::CodedBer);
        match experiment {
            Experiment::Complexity => required("nr")?,
            Experiment::CodedBer => {
                for k in ["nt", "nr", "snr_db", "detector"] {
                    required(k)?;
                }
                if raw.get("code_file").is_none() {
                    required("n_symbols")?;
                    required("k_symbols")?;
                }
            }
            Experiment::UncodedBer => {
                for k in ["nt", "nr", "snr_db", "detector"] {
                    required(k)?;
                }
            }
            Experiment::Capacity | Experiment::DeltaPdf => {
                for k in ["nt", "nr", "snr_db"] {
                    required(k)?;
                }
            }
        }

        let nr: usize = raw.parse("nr", "a positive integer")?.unwrap_or(0);
        let nt: usize = raw.parse("nt", "a positive integer")?.unwrap_or(nr);
        let modulation: Constellation = match raw.get("modulation") {
            None => Constellation::bpsk(),
            Some(m) => m.parse().map_err(|e: nbmimo::Error| raw.err("modulation", e.to_string()))?,
        };
        let es: f64 = raw.parse("es", "a number")?.unwrap_or(1.0);
        let detector: DetectorKind = match raw.get("detector") {
            None => DetectorKind::MfSimplified,
            Some(d) => d.parse().map_err(|e: nbmimo::Error| raw.err("detector", e.to_string()))?,
        };
        let variance_mode = match raw.get("variance_mode") {
            Some(v) => v.parse().map_err(|e: nbmimo::Error| raw.err("variance_mode", e.to_string()))?,
            None if detector == DetectorKind::MfSimplified => VarianceMode::Constant,
            None => VarianceMode::Exact,
        };
        let channel = match raw.get("channel") {
            Some(c) => c.parse().map_err(|e: nbmimo::Error| raw.err("channel", e.to_string()))?,
            None => ChannelModel::Rayleigh,
        };
        let noise_convention = match raw.get("noise_convention") {
            Some(c) => c.parse().map_err(|e: nbmimo::Error| raw.err("noise_convention", e.to_string()))?,
            None => NoiseConvention::PerRealComponent,
        };
        let snr_db = match raw.get("snr_db") {
            Some(s) => parse_snr_list(s).map_err(|m| raw.err("snr_db", m))?,
            None => Vec::new(),
        };

        let cfg = SimConfig {
            experiment,
            nt,
            nr,
            modulation,
            es,
            n_symbols: raw.parse("n_symbols", "a positive integer")?.unwrap_or(0),
            k_symbols: raw.parse("k_symbols", "a positive integer")?.unwrap_or(0),
            repetition: raw.parse("repetition", "a positive integer")?.unwrap_or(1),
            code_seed: raw.parse("code_seed", "an unsigned integer")?.unwrap_or(1),
            code_file: raw.get("code_file").map(PathBuf::from),
            save_code: raw.get("save_code").map(PathBuf::from),
            snr_db,
            detector,
            variance_mode,
            channel,
            noiseless: raw.parse("noiseless", "true or false")?.unwrap_or(false),
            seed: raw.parse("seed", "an unsigned integer")?.unwrap_or(1),
            workers: raw.parse("workers", "a positive integer")?.unwrap_or(1),
            max_trials: raw
                .parse("max_trials", "a positive integer")?
                .unwrap_or(if coded { 10_000 } else { 100_000 }),
            target_errors: raw
                .parse("target_errors", "an unsigned integer")?
                .unwrap_or(if coded { 50 } else { 100 }),
            batch_size: raw
                .parse("batch_size", "a positive integer")?
                .unwrap_or(if coded { 8 } else { 32 }),
            max_iterations: raw.parse("max_iterations", "a positive integer")?.unwrap_or(200),
            trials: raw.parse("trials", "a positive integer")?.unwrap_or(10_000),
            realizations: raw.parse("realizations", "an integer >= 2")?.unwrap_or(10_000),
            noise_convention,
            output: raw.get("output").map(PathBuf::from),
        };

        let check = |ok: bool, key: &str, msg: &str| if ok { Ok(()) } else { Err(raw.err(key, msg)) };
        check(cfg.nr >= 1, "nr", "must be at least 1")?;
        check(cfg.nt >= 1, "nt", "must be at least 1")?;
        check(cfg.es > 0.0 && cfg.es.is_finite(), "es", "must be positive")?;
        check(cfg.workers >= 1, "workers", "must be at least 1")?;
        if ber {
            check(cfg.max_trials >= 1, "max_trials", "must be at least 1")?;
            check(cfg.batch_size >= 1, "batch_size", "must be at least 1")?;
        }
        if experiment != Experiment::Complexity {
            check(!cfg.snr_db.is_empty(), "snr_db", "needs at least one value")?;
        }
        if experiment == Experiment::DeltaPdf {
            check(cfg.snr_db.len() == 1, "snr_db", "delta-pdf takes a single SNR")?;
            check(cfg.realizations >= 2, "realizations", "must be at least 2")?;
        }
        if experiment == Experiment::Capacity {
            check(cfg.trials >= 1, "trials", "must be at least 1")?;
        }
        if coded {
            check(cfg.repetition >= 1, "repetition", "must be at least 1")?;
            check(cfg.max_iterations >= 1, "max_iterations", "must be at least 1")?;
            if cfg.code_file.is_none() {
                check(cfg.k_symbols >= 1, "k_symbols", "must be at least 1")?;
                check(cfg.n_symbols > cfg.k_symbols, "n_symbols", "must exceed k_symbols")?;
            }
            let q = 8 / cfg.modulation.bits_per_symbol() as usize;
            check(
                cfg.nt % q == 0,
                "nt",
                &format!("must be a multiple of q = {q} constellation points per field symbol"),
            )?;
        }
        if experiment == Experiment::UncodedBer && cfg.detector == DetectorKind::Zf {
            check(cfg.nt <= cfg.nr, "detector", "zf needs nt <= nr")?;
        }
        Ok(cfg)
    }

    /// Resolved settings as `key = value` lines in a fixed order. The worker
    /// count is left out because it does not affect results.
    pub fn echo(&self) -> Vec<String> {
        let mut v = vec![
            format!("experiment = {}", self.experiment),
            format!("nt = {}", self.nt),
            format!("nr = {}", self.nr),
            format!("modulation = {}", self.modulation),
            format!("es = {}", self.es),
        ];
        let snrs: Vec<String> = self.snr_db.iter().map(|s| format!("{s}")).collect();
        match self.experiment {
            Experiment::Complexity => {}
            Experiment::Capacity => {
                v.push(format!("snr_db = {}", snrs.join(", ")));
                v.push(format!("channel = {}", self.channel));
                v.push(format!("trials = {}", self.trials));
                v.push(format!("seed = {}", self.seed));
            }
            Experiment::DeltaPdf => {
                v.push(format!("snr_db = {}", snrs.join(", ")));
                v.push(format!("realizations = {}", self.realizations));
                v.push(format!("noise_convention = {}", self.noise_convention));
                v.push(format!("seed = {}", self.seed));
            }
            Experiment::UncodedBer | Experiment::CodedBer => {
                if self.experiment == Experiment::CodedBer {
                    match &self.code_file {
                        Some(p) => v.push(format!("code_file = {}", p.display())),
                        None => {
                            v.push(format!("n_symbols = {}", self.n_symbols));
                            v.push(format!("k_symbols = {}", self.k_symbols));
                            v.push(format!("code_seed = {}", self.code_seed));
                        }
                    }
                    v.push(format!("repetition = {}", self.repetition));
                    v.push(format!("max_iterations = {}", self.max_iterations));
                }
                v.push(format!("snr_db = {}", snrs.join(", ")));
                v.push(format!("detector = {}", self.detector));
                v.push(format!("variance_mode = {}", self.variance_mode));
                v.push(format!("channel = {}", self.channel));
                v.push(format!("noiseless = {}", self.noiseless));
                v.push(format!("seed = {}", self.seed));
                v.push(format!("max_trials = {}", self.max_trials));
                v.push(format!("target_errors = {}", self.target_errors));
                v.push(format!("batch_size = {}", self.batch_size));
            }
        }
        v
    }
}

/// Parses and resolves config text in one step.
pub fn parse_config(text: &str, experiment: Experiment) -> Result<SimConfig, CliError> {
    SimConfig::resolve(&parse_raw(text)?, experiment)
}
