//! Monte Carlo BER/FER runners for uncoded and coded links.
//!
//! Trial `t` at every SNR draws from `trial_rng(master_seed, t)` in the same
//! order (payload, then channel, then noise), so SNR points and detectors see
//! common random numbers. Trials run in fixed-size batches; the stopping rule
//! is checked between batches on counts summed in trial order, so the result
//! does not depend on the worker count.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::detect::{self, slice_estimate, soft_output, DetectorKind, VarianceMode};
use crate::error::{Error, Result};
use crate::gf256::FieldElement;
use crate::mimo::{
    complex_gaussian, map_codeword_to_signals, rayleigh_matrix, snr_to_noise_variance, CMatrix, CVector,
    LinkConfig,
};
use crate::nbldpc::Codec;

use super::{build_pool, trial_rng};

/// Floor applied to post-detection variances before soft output, reached
/// only when the noise is switched off.
pub const VARIANCE_FLOOR: f64 = 1e-12;

pub const CSV_HEADER: &str = "snr_db,trials,bit_errors,frame_errors,ber,fer,avg_iterations,stderr_ber";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelModel {
    /// Fresh i.i.d. CN(0, 1) matrix per channel use.
    Rayleigh,
    /// Fixed identity matrix.
    Identity,
}

impl std::str::FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rayleigh" => Ok(Self::Rayleigh),
            "identity" => Ok(Self::Identity),
            other => Err(Error::Config(format!("unknown channel `{other}` (expected rayleigh or identity)"))),
        }
    }
}

impl std::fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rayleigh => "rayleigh",
            Self::Identity => "identity",
        })
    }
}

impl ChannelModel {
    pub fn realize<R: Rng + ?Sized>(self, n_rx: usize, n_tx: usize, rng: &mut R) -> CMatrix {
        match self {
            Self::Rayleigh => rayleigh_matrix(n_rx, n_tx, rng),
            Self::Identity => CMatrix::identity(n_rx, n_tx),
        }
    }
}

/// Link, detector and channel choices shared by the runners.
#[derive(Clone, Debug)]
pub struct LinkSetup {
    pub link: LinkConfig,
    pub detector: DetectorKind,
    pub variance_mode: VarianceMode,
    pub channel: ChannelModel,
    /// Forces zero noise at every SNR.
    pub noiseless: bool,
}

impl LinkSetup {
    pub fn new(link: LinkConfig, detector: DetectorKind) -> Self {
        LinkSetup {
            link,
            detector,
            variance_mode: VarianceMode::Exact,
            channel: ChannelModel::Rayleigh,
            noiseless: false,
        }
    }

    fn noise_variance(&self, snr_db: f64) -> f64 {
        if self.noiseless {
            0.0
        } else {
            snr_to_noise_variance(snr_db, self.link.total_power())
        }
    }
}

/// Stop at `max_trials` or once `target_errors` is reached (bit errors for
/// uncoded runs, frame errors for coded runs), checked every `batch_size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopRule {
    pub max_trials: u64,
    pub target_errors: u64,
    pub batch_size: u64,
}

impl StopRule {
    pub fn uncoded() -> Self {
        StopRule { max_trials: 100_000, target_errors: 100, batch_size: 32 }
    }

    pub fn coded() -> Self {
        StopRule { max_trials: 10_000, target_errors: 50, batch_size: 8 }
    }

    fn validate(&self) -> Result<()> {
        if self.max_trials == 0 || self.batch_size == 0 {
            return Err(Error::Config("max_trials and batch_size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { master_seed: 1, workers: 1 }
    }
}

/// Counts for one SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub trials: u64,
    pub bits_per_trial: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub iterations: u64,
    pub wall_time: Duration,
}

impl BerRecord {
    pub fn total_bits(&self) -> u64 {
        self.trials * self.bits_per_trial
    }

    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.total_bits() as f64
    }

    pub fn fer(&self) -> f64 {
        self.frame_errors as f64 / self.trials as f64
    }

    /// Mean decoder iterations per frame, 0 for uncoded runs.
    pub fn avg_iterations(&self) -> f64 {
        self.iterations as f64 / self.trials as f64
    }

    /// Binomial standard error of the BER.
    pub fn stderr_ber(&self) -> f64 {
        let p = self.ber();
        (p * (1.0 - p) / self.total_bits() as f64).sqrt()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.5e},{},{},{},{:.5e},{:.5e},{:.5e},{:.5e}",
            self.snr_db,
            self.trials,
            self.bit_errors,
            self.frame_errors,
            self.ber(),
            self.fer(),
            self.avg_iterations(),
            self.stderr_ber()
        )
    }
}

/// CSV text: `# `-prefixed comment lines, the header, one row per record.
/// Wall time is left out so reruns are byte-identical.
pub fn ber_csv(records: &[BerRecord], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// SNR where the BER curve crosses `target`, interpolating log10(BER)
/// linearly in dB between the bracketing points. Points with no errors use
/// half an error as their BER.
pub fn snr_at_ber(records: &[BerRecord], target: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.snr_db, r.ber().max(0.5 / r.total_bits() as f64)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    interpolate_crossing(&pts, target)
}

/// First crossing of `target` by a curve of (dB, value) pairs, log-linear.
pub fn interpolate_crossing(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let lt = target.log10();
    for w in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 >= target && y1 <= target {
            let (l0, l1) = (y0.log10(), y1.log10());
            if l0 == l1 {
                return Some(x0);
            }
            return Some(x0 + (lt - l0) / (l1 - l0) * (x1 - x0));
        }
    }
    None
}

#[derive(Clone, Copy, Debug, Default)]
struct TrialOutcome {
    bit_errors: u64,
    frame_error: bool,
    iterations: u64,
}

fn received<R: Rng + ?Sized>(h: &CMatrix, s: &CVector, sigma_sq: f64, rng: &mut R) -> CVector {
    let mut y = h * s;
    for v in y.iter_mut() {
        *v += complex_gaussian(rng, sigma_sq);
    }
    y
}

fn run_points<F>(snrs: &[f64], stop: &StopRule, opts: &RunOptions, bits_per_trial: u64, coded: bool, trial: F) -> Result<Vec<BerRecord>>
where
    F: Fn(f64, u64) -> Result<TrialOutcome> + Sync,
{
    stop.validate()?;
    let pool = build_pool(opts.workers)?;
    let mut records = Vec::with_capacity(snrs.len());
    for &snr in snrs {
        let started = Instant::now();
        let mut rec = BerRecord {
            snr_db: snr,
            trials: 0,
            bits_per_trial,
            bit_errors: 0,
            frame_errors: 0,
            iterations: 0,
            wall_time: Duration::ZERO,
        };
        while rec.trials < stop.max_trials {
            let end = (rec.trials + stop.batch_size).min(stop.max_trials);
            let outcomes: Vec<TrialOutcome> =
                pool.install(|| (rec.trials..end).into_par_iter().map(|t| trial(snr, t)).collect::<Result<_>>())?;
            for o in outcomes {
                rec.bit_errors += o.bit_errors;
                rec.frame_errors += o.frame_error as u64;
                rec.iterations += o.iterations;
            }
            rec.trials = end;
            let errors = if coded { rec.frame_errors } else { rec.bit_errors };
            if errors >= stop.target_errors {
                break;
            }
        }
        rec.wall_time = started.elapsed();
        records.push(rec);
    }
    Ok(records)
}

/// Uncoded BER: one channel use per trial, hard decisions per antenna.
///
/// Hard decisions only need the estimates, so the MF and ZF paths skip
/// their post-detection variances.
pub fn run_uncoded_ber(setup: &LinkSetup, snrs: &[f64], stop: &StopRule, opts: &RunOptions) -> Result<Vec<BerRecord>> {
    let link = &setup.link;
    let cons = link.constellation();
    let (nt, nr) = (link.n_tx(), link.n_rx());
    let m = cons.size();
    let amp = link.amplitude();
    let bits = (nt as u64) * cons.bits_per_symbol() as u64;
    run_points(snrs, stop, opts, bits, false, |snr, t| {
        let mut rng = trial_rng(opts.master_seed, t);
        let sent: Vec<usize> = (0..nt).map(|_| rng.random_range(0..m)).collect();
        let s = CVector::from_iterator(nt, sent.iter().map(|&i| cons.points()[i] * amp));
        let h = setup.channel.realize(nr, nt, &mut rng);
        let nv = setup.noise_variance(snr);
        let y = received(&h, &s, nv, &mut rng);
        let est = match setup.detector {
            DetectorKind::Zf => detect::detect_zf(&h, &y)?
                .into_iter()
                .enumerate()
                .map(|(k, s_hat)| detect::SoftEstimate { stream: k, s_hat, sigma_sq: 0.0, scale: 1.0 })
                .collect(),
            kind => detect::detect(kind, VarianceMode::Constant, &h, &y, link.total_power(), nv)?,
        };
        let bit_errors: u64 = est
            .iter()
            .zip(&sent)
            .map(|(e, &i)| (slice_estimate(e, cons, amp) ^ i).count_ones() as u64)
            .sum();
        Ok(TrialOutcome { bit_errors, frame_error: bit_errors > 0, iterations: 0 })
    })
}

/// Coded BER over information bits: encode, map, detect per channel use,
/// build symbol priors and decode, one frame per trial.
pub fn run_coded_ber(
    setup: &LinkSetup,
    codec: &Codec,
    snrs: &[f64],
    stop: &StopRule,
    opts: &RunOptions,
) -> Result<Vec<BerRecord>> {
    let link = &setup.link;
    let cons = link.constellation();
    let (nt, nr) = (link.n_tx(), link.n_rx());
    let amp = link.amplitude();
    let q = link.points_per_symbol();
    link.symbols_per_use()?;
    let n_points = codec.transmitted_len() * q;
    let k = codec.k();
    run_points(snrs, stop, opts, 8 * k as u64, true, |snr, t| {
        let mut rng = trial_rng(opts.master_seed, t);
        let info: Vec<FieldElement> = (0..k).map(|_| FieldElement(rng.random())).collect();
        let word = codec.encode(&info)?;
        let signals = map_codeword_to_signals(&word, link)?;
        let nv = setup.noise_variance(snr);
        let mut likelihoods = Vec::with_capacity(n_points);
        for s in &signals {
            let h = setup.channel.realize(nr, nt, &mut rng);
            let y = received(&h, s, nv, &mut rng);
            let est = detect::detect(setup.detector, setup.variance_mode, &h, &y, link.total_power(), nv)?;
            for mut e in est.into_iter().take(n_points - likelihoods.len()) {
                e.sigma_sq = e.sigma_sq.max(VARIANCE_FLOOR);
                likelihoods.push(soft_output(&e, cons, amp)?);
            }
        }
        let priors = detect::likelihoods_to_symbol_priors(&likelihoods, cons.bits_per_symbol())?;
        let result = codec.decode(&priors)?;
        let decoded = codec.extract_info(&result.decided);
        let bit_errors: u64 = decoded.iter().zip(&info).map(|(a, b)| (a.0 ^ b.0).count_ones() as u64).sum();
        Ok(TrialOutcome {
            bit_errors,
            frame_error: bit_errors > 0,
            iterations: result.iterations_used as u64,
        })
    })
}
