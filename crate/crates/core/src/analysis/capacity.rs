//! Ergodic capacity over per-trial random streams.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mimo::{capacity_from_eigenvalues, db_to_linear, gram_eigenvalues, CapacityEstimate};

use super::ber::{ChannelModel, RunOptions};
use super::{build_pool, trial_rng};

/// Capacity at each SNR, trial `t` drawing its channel from
/// `trial_rng(master_seed, t)`. All SNRs share the same channel draws.
pub fn run_ergodic_capacity(
    n_tx: usize,
    n_rx: usize,
    channel: ChannelModel,
    snrs_db: &[f64],
    trials: u64,
    opts: &RunOptions,
) -> Result<Vec<CapacityEstimate>> {
    if trials == 0 {
        return Err(Error::Config("capacity needs at least one trial".into()));
    }
    if n_tx == 0 || n_rx == 0 {
        return Err(Error::Config("antenna counts must be positive".into()));
    }
    let pool = build_pool(opts.workers)?;
    let per_trial: Vec<Vec<f64>> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(opts.master_seed, t);
                let eig = gram_eigenvalues(&channel.realize(n_rx, n_tx, &mut rng));
                snrs_db
                    .iter()
                    .map(|g| capacity_from_eigenvalues(&eig, n_tx, db_to_linear(*g)))
                    .collect()
            })
            .collect()
    });
    Ok((0..snrs_db.len())
        .map(|i| {
            let col: Vec<f64> = per_trial.iter().map(|row| row[i]).collect();
            CapacityEstimate::from_samples(&col)
        })
        .collect())
}
