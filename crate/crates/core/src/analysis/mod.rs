//! Complexity models, density estimation, analytic references and
//! Monte Carlo runners.

pub mod ber;
pub mod capacity;
pub mod delta;
pub mod flops;
pub mod kde;
pub mod reference;

pub use ber::{
    ber_csv, interpolate_crossing, run_coded_ber, run_uncoded_ber, snr_at_ber, BerRecord, ChannelModel, LinkSetup,
    RunOptions, StopRule, CSV_HEADER,
};
pub use capacity::run_ergodic_capacity;
pub use delta::{analytic_delta_mean, exact_delta_mean, sample_delta_components, DeltaComponents, NoiseConvention};
pub use flops::{counted_detect, flops_mf, flops_mmse, CountedDetection, FlopCount, FlopCounter, FlopModel};
pub use kde::{kde, sample_mean, sample_skewness, silverman_bandwidth, DensityCurve};
pub use reference::{q_function, siso_awgn_bpsk_ber, siso_awgn_bpsk_snr_at};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Independent random stream for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

pub(crate) fn build_pool(workers: usize) -> Result<ThreadPool> {
    if workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}
