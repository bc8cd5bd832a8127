//! Subcommand execution.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nbmimo::analysis::{
    analytic_delta_mean, ber_csv, counted_detect, flops_mf, flops_mmse, kde, run_coded_ber, run_ergodic_capacity,
    run_uncoded_ber, sample_delta_components, sample_mean, sample_skewness, LinkSetup, RunOptions, StopRule,
};
use nbmimo::detect::DetectorKind;
use nbmimo::mimo::{CMatrix, CVector, LinkConfig};
use nbmimo::nbldpc::{build_regular_code, Codec, SparseParityCheck};
use nbmimo::Field;

use crate::config::{Experiment, SimConfig};
use crate::error::CliError;

/// Text for stdout and the file written, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub written: Option<PathBuf>,
}

pub fn execute(cfg: &SimConfig, dry_run: bool) -> Result<Outcome, CliError> {
    if dry_run {
        return dry_run_report(cfg);
    }
    match cfg.experiment {
        Experiment::UncodedBer => uncoded(cfg),
        Experiment::CodedBer => coded(cfg),
        Experiment::Capacity => capacity(cfg),
        Experiment::Complexity => complexity(cfg),
        Experiment::DeltaPdf => delta_pdf(cfg),
    }
}

fn options(cfg: &SimConfig) -> RunOptions {
    RunOptions {
        master_seed: cfg.seed,
        workers: cfg.workers,
    }
}

fn stop_rule(cfg: &SimConfig) -> StopRule {
    StopRule {
        max_trials: cfg.max_trials,
        target_errors: cfg.target_errors,
        batch_size: cfg.batch_size,
    }
}

fn setup(cfg: &SimConfig, rate: f64) -> Result<LinkSetup, CliError> {
    let link = LinkConfig::new(cfg.nt, cfg.nr, cfg.es, cfg.modulation.clone(), rate)?;
    let mut s = LinkSetup::new(link, cfg.detector);
    s.variance_mode = cfg.variance_mode;
    s.channel = cfg.channel;
    s.noiseless = cfg.noiseless;
    Ok(s)
}

fn load_code(cfg: &SimConfig) -> Result<SparseParityCheck, CliError> {
    let code = match &cfg.code_file {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            SparseParityCheck::from_text(&text, Field::shared_default())?
        }
        None => build_regular_code(cfg.n_symbols, cfg.k_symbols, 2, cfg.code_seed)?,
    };
    if let Some(p) = &cfg.save_code {
        write_file(p, &code.to_text())?;
    }
    Ok(code)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes `text` to the configured output, or returns it for stdout.
fn emit(cfg: &SimConfig, text: String, summary: &str) -> Result<Outcome, CliError> {
    match &cfg.output {
        Some(p) => {
            write_file(p, &text)?;
            Ok(Outcome {
                stdout: format!("{summary}\nwrote {}\n", p.display()),
                written: Some(p.clone()),
            })
        }
        None => Ok(Outcome { stdout: text, written: None }),
    }
}

fn uncoded(cfg: &SimConfig) -> Result<Outcome, CliError> {
    let s = setup(cfg, 1.0)?;
    let records = run_uncoded_ber(&s, &cfg.snr_db, &stop_rule(cfg), &options(cfg))?;
    let csv = ber_csv(&records, &cfg.echo());
    emit(cfg, csv, &format!("{} SNR points", records.len()))
}

fn coded(cfg: &SimConfig) -> Result<Outcome, CliError> {
    let code = load_code(cfg)?;
    let codec = Codec::new(code, cfg.repetition, cfg.code_seed)?.with_max_iterations(cfg.max_iterations);
    let s = setup(cfg, codec.rate())?;
    let records = run_coded_ber(&s, &codec, &cfg.snr_db, &stop_rule(cfg), &options(cfg))?;
    let mut comments = cfg.echo();
    comments.push(format!("code_rate = {:.6}", codec.rate()));
    let csv = ber_csv(&records, &comments);
    emit(cfg, csv, &format!("{} SNR points", records.len()))
}

fn capacity(cfg: &SimConfig) -> Result<Outcome, CliError> {
    let est = run_ergodic_capacity(cfg.nt, cfg.nr, cfg.channel, &cfg.snr_db, cfg.trials, &options(cfg))?;
    let mut out = String::new();
    for c in cfg.echo() {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("snr_db,capacity,stderr,trials\n");
    for (g, e) in cfg.snr_db.iter().zip(&est) {
        let _ = writeln!(out, "{:.5e},{:.5e},{:.5e},{}", g, e.mean, e.std_err, e.trials);
    }
    emit(cfg, out, &format!("{} SNR points", est.len()))
}

/// The flop table for `nr` receive antennas and `m` constellation points.
pub fn complexity_table(nr: u64, m: u64) -> Result<String, CliError> {
    let mf = flops_mf(nr, m)?;
    let mmse = flops_mmse(nr, m)?;
    // Counted MMSE soft output on a dummy instance of the right size.
    let n = nr as usize;
    let cons = match m {
        2 => nbmimo::mimo::Constellation::bpsk(),
        4 => nbmimo::mimo::Constellation::qpsk(),
        _ => nbmimo::mimo::Constellation::qam16(),
    };
    let counted_soft = if cons.size() as u64 == m {
        let h = CMatrix::identity(n, n);
        let y = CVector::zeros(n);
        Some(counted_detect(DetectorKind::Mmse, &h, &y, 1.0, 0.5, &cons)?.flops.soft_output)
    } else {
        None
    };
    let ratio = mf.total() as f64 / mmse.total() as f64 * 100.0;
    let mut t = String::new();
    let _ = writeln!(t, "Flops per channel use (Nr = Nt = {nr}, M = {m})");
    let _ = writeln!(t, "{:<10} {:>14} {:>14} {:>14}", "detector", "detection", "soft_output", "total");
    let _ = writeln!(t, "{:<10} {:>14} {:>14} {:>14}", "mf", mf.detection, mf.soft_output, mf.total());
    let _ = writeln!(t, "{:<10} {:>14} {:>14} {:>14}", "mmse", mmse.detection, mmse.soft_output, mmse.total());
    let _ = writeln!(t, "mf / mmse = {ratio:.4}% ({ratio:.2}%)");
    if let Some(c) = counted_soft {
        let _ = writeln!(t, "mmse soft output counted per operation: {c}");
    }
    Ok(t)
}

fn complexity(cfg: &SimConfig) -> Result<Outcome, CliError> {
    let table = complexity_table(cfg.nr as u64, cfg.modulation.size() as u64)?;
    if let Some(p) = &cfg.output {
        write_file(p, &table)?;
        return Ok(Outcome {
            stdout: table,
            written: Some(p.clone()),
        });
    }
    Ok(Outcome { stdout: table, written: None })
}

fn delta_pdf(cfg: &SimConfig) -> Result<Outcome, CliError> {
    let snr = cfg.snr_db[0];
    let nv = cfg.noise_convention.noise_variance(snr, cfg.es);
    let comps = sample_delta_components(cfg.nt, cfg.nr, cfg.realizations, cfg.seed, cfg.workers)?;
    let deltas: Vec<f64> = comps.iter().map(|c| c.delta(cfg.es, nv)).collect();
    let curve = kde(&deltas, None)?;
    let mut out = String::new();
    for c in cfg.echo() {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "# noise_variance = {nv:.6e}");
    let _ = writeln!(out, "# mean = {:.6e}", sample_mean(&deltas));
    let _ = writeln!(out, "# analytic_mean = {:.6e}", analytic_delta_mean(cfg.es, cfg.nt, cfg.nr, nv));
    let _ = writeln!(out, "# skewness = {:.6e}", sample_skewness(&deltas));
    let _ = writeln!(out, "# bandwidth = {:.6e}", curve.bandwidth);
    let _ = writeln!(out, "# local_maxima = {}", curve.local_maxima(1e-3));
    out.push_str("x,density\n");
    for (x, f) in curve.x.iter().zip(&curve.density) {
        let _ = writeln!(out, "{x:.5e},{f:.5e}");
    }
    emit(cfg, out, &format!("{} grid points", curve.x.len()))
}

fn dry_run_report(cfg: &SimConfig) -> Result<Outcome, CliError> {
    let mut out = String::from("# resolved configuration\n");
    for c in cfg.echo() {
        let _ = writeln!(out, "{c}");
    }
    let _ = writeln!(out, "workers = {}", cfg.workers);
    if let Some(p) = &cfg.output {
        let _ = writeln!(out, "output = {}", p.display());
    }
    out.push_str("# derived\n");
    let p = cfg.modulation.bits_per_symbol();
    match cfg.experiment {
        Experiment::CodedBer => {
            let (n, k) = match &cfg.code_file {
                Some(_) => {
                    let code = load_code(cfg)?;
                    (code.n(), code.k())
                }
                None => (cfg.n_symbols, cfg.k_symbols),
            };
            let transmitted = n * cfg.repetition;
            let rate = k as f64 / transmitted as f64;
            let link = LinkConfig::new(cfg.nt, cfg.nr, cfg.es, cfg.modulation.clone(), rate)?;
            let _ = writeln!(out, "code_rate = {rate:.6}");
            let _ = writeln!(out, "transmitted_symbols = {transmitted}");
            let _ = writeln!(out, "symbols_per_channel_use = {}", link.symbols_per_use()?);
            let _ = writeln!(out, "channel_uses = {}", link.channel_uses(transmitted)?);
            let _ = writeln!(out, "spectral_efficiency = {:.4} bps/Hz", link.spectral_efficiency());
        }
        Experiment::UncodedBer => {
            let _ = writeln!(out, "bits_per_channel_use = {}", p as usize * cfg.nt);
            let _ = writeln!(out, "spectral_efficiency = {:.4} bps/Hz", (p as usize * cfg.nt) as f64);
        }
        Experiment::DeltaPdf => {
            let nv = cfg.noise_convention.noise_variance(cfg.snr_db[0], cfg.es);
            let _ = writeln!(out, "noise_variance = {nv:.6e}");
            let _ = writeln!(out, "analytic_mean = {:.6e}", analytic_delta_mean(cfg.es, cfg.nt, cfg.nr, nv));
        }
        Experiment::Capacity | Experiment::Complexity => {
            let _ = writeln!(out, "constellation_size = {}", cfg.modulation.size());
        }
    }
    Ok(Outcome { stdout: out, written: None })
}
