//! Distribution of the MF post-detection interference-plus-noise power Delta_k.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mimo::{db_to_linear, rayleigh_matrix, CMatrix};

use super::{build_pool, trial_rng};

/// How an SNR in dB maps to the noise variance per real component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseConvention {
    /// sigma_n^2 = E_s / (2 gamma), the convention used everywhere else.
    PerRealComponent,
    /// sigma_n^2 = E_s / gamma.
    PerComplexSymbol,
}

impl NoiseConvention {
    pub fn noise_variance(self, gamma_db: f64, total_power: f64) -> f64 {
        match self {
            Self::PerRealComponent => total_power / (2.0 * db_to_linear(gamma_db)),
            Self::PerComplexSymbol => total_power / db_to_linear(gamma_db),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::PerRealComponent => "per-real",
            Self::PerComplexSymbol => "per-complex",
        }
    }
}

impl fmt::Display for NoiseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-real" => Ok(Self::PerRealComponent),
            "per-complex" => Ok(Self::PerComplexSymbol),
            other => Err(Error::Config(format!(
                "unknown noise convention `{other}` (expected per-real or per-complex)"
            ))),
        }
    }
}

/// Channel-dependent pieces of Delta_k for one stream, so that any noise
/// level can be applied afterwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaComponents {
    /// sum_{i != k} |H_k^H H_i|^2
    pub cross: f64,
    /// ||H_k||^2
    pub norm_sq: f64,
    pub n_tx: usize,
    pub n_rx: usize,
}

impl DeltaComponents {
    pub fn from_channel(h: &CMatrix, k: usize) -> Result<Self> {
        if k >= h.ncols() {
            return Err(Error::Dimension(format!("stream {k} out of range for {} inputs", h.ncols())));
        }
        let hk = h.column(k);
        let norm_sq = hk.norm_squared();
        if norm_sq == 0.0 {
            return Err(Error::Singular(format!("channel column {k} is zero")));
        }
        let cross = (0..h.ncols())
            .filter(|&i| i != k)
            .map(|i| hk.dotc(&h.column(i)).norm_sqr())
            .sum();
        Ok(DeltaComponents {
            cross,
            norm_sq,
            n_tx: h.ncols(),
            n_rx: h.nrows(),
        })
    }

    /// Delta_k with W_k = H_k^H / ||H_k||^2.
    pub fn delta(&self, total_power: f64, noise_variance: f64) -> f64 {
        let ps = total_power / self.n_tx as f64;
        ps * self.cross / (self.norm_sq * self.norm_sq) + 2.0 * noise_variance / self.norm_sq
    }

    /// The same power with W_k = H_k^H / Nr.
    pub fn delta_simplified_weights(&self, total_power: f64, noise_variance: f64) -> f64 {
        let ps = total_power / self.n_tx as f64;
        let nr2 = (self.n_rx * self.n_rx) as f64;
        ps * self.cross / nr2 + 2.0 * noise_variance * self.norm_sq / nr2
    }
}

/// Delta_0 components over independent Rayleigh realizations, one per
/// trial index, with the per-trial random streams used by the BER runners.
pub fn sample_delta_components(
    n_tx: usize,
    n_rx: usize,
    realizations: usize,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<DeltaComponents>> {
    if n_tx == 0 || n_rx == 0 {
        return Err(Error::Config("antenna counts must be positive".into()));
    }
    let pool = build_pool(workers)?;
    pool.install(|| {
        (0..realizations as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(master_seed, t);
                DeltaComponents::from_channel(&rayleigh_matrix(n_rx, n_tx, &mut rng), 0)
            })
            .collect()
    })
}

/// Large-system mean (E_s/Nt)(Nt - 1)/Nr + 2 sigma_n^2 / Nr.
pub fn analytic_delta_mean(total_power: f64, n_tx: usize, n_rx: usize, noise_variance: f64) -> f64 {
    total_power / n_tx as f64 * (n_tx as f64 - 1.0) / n_rx as f64 + 2.0 * noise_variance / n_rx as f64
}

/// Exact mean over i.i.d. Rayleigh channels; E[1/||H_k||^2] = 1/(Nr - 1).
pub fn exact_delta_mean(total_power: f64, n_tx: usize, n_rx: usize, noise_variance: f64) -> Option<f64> {
    if n_rx < 2 {
        return None;
    }
    let d = n_rx as f64 - 1.0;
    Some(total_power / n_tx as f64 * (n_tx as f64 - 1.0) / d + 2.0 * noise_variance / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::kde::sample_mean;
    use num_complex::Complex64;

    #[test]
    fn components_on_known_channel() {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        );
        let c = DeltaComponents::from_channel(&h, 0).unwrap();
        assert_eq!((c.cross, c.norm_sq), (1.0, 1.0));
        assert!((c.delta(2.0, 0.25) - (1.0 + 0.5)).abs() < 1e-15);
        assert!(DeltaComponents::from_channel(&h, 2).is_err());
    }

    #[test]
    fn conventions() {
        assert!((NoiseConvention::PerRealComponent.noise_variance(0.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((NoiseConvention::PerComplexSymbol.noise_variance(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!("per-complex".parse::<NoiseConvention>().unwrap(), NoiseConvention::PerComplexSymbol);
    }

    #[test]
    fn sample_mean_matches_exact_mean() {
        let comps = sample_delta_components(16, 16, 4000, 3, 1).unwrap();
        let nv = 0.3;
        let deltas: Vec<f64> = comps.iter().map(|c| c.delta(1.0, nv)).collect();
        let expect = exact_delta_mean(1.0, 16, 16, nv).unwrap();
        assert!((sample_mean(&deltas) / expect - 1.0).abs() < 0.03);
    }

    #[test]
    fn worker_count_does_not_change_samples() {
        let a = sample_delta_components(8, 8, 50, 9, 1).unwrap();
        let b = sample_delta_components(8, 8, 50, 9, 3).unwrap();
        assert_eq!(a, b);
    }
}
