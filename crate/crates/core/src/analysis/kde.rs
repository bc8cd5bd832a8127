//! Gaussian kernel density estimation and sample moments.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const GRID_POINTS: usize = 512;

/// Density evaluated on an evenly spaced grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityCurve {
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityCurve {
    /// Trapezoid rule over the grid.
    pub fn integral(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
            .sum()
    }

    /// Grid point of the highest density.
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, f) in self.density.iter().enumerate() {
            if *f > self.density[best] {
                best = i;
            }
        }
        self.x[best]
    }

    /// Number of strict interior local maxima, ignoring ripples below
    /// `rel_tol` times the peak density.
    pub fn local_maxima(&self, rel_tol: f64) -> usize {
        let peak = self.density.iter().copied().fold(0.0, f64::max);
        let floor = rel_tol * peak;
        // Walk the curve and count rises followed by falls larger than the floor.
        let mut count = 0;
        let mut low = self.density[0];
        let mut high = self.density[0];
        let mut rising = true;
        for &f in &self.density[1..] {
            if rising {
                if f > high {
                    high = f;
                } else if high - f > floor && high - low > floor {
                    count += 1;
                    rising = false;
                    low = f;
                }
            } else if f < low {
                low = f;
            } else if f - low > floor {
                rising = true;
                high = f;
            }
        }
        if rising && high - low > floor {
            count += 1;
        }
        count
    }
}

pub fn sample_mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Unbiased sample standard deviation.
pub fn sample_std(samples: &[f64]) -> f64 {
    let m = sample_mean(samples);
    let n = samples.len() as f64;
    (samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Moment skewness m3 / m2^(3/2).
pub fn sample_skewness(samples: &[f64]) -> f64 {
    let m = sample_mean(samples);
    let n = samples.len() as f64;
    let m2 = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = samples.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// Silverman's rule 1.06 * sigma * n^(-1/5).
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    1.06 * sample_std(samples) * (samples.len() as f64).powf(-0.2)
}

/// Gaussian-kernel density on 512 points spanning the data +- 3 bandwidths.
pub fn kde(samples: &[f64], bandwidth: Option<f64>) -> Result<DensityCurve> {
    if samples.len() < 2 {
        return Err(Error::Input(format!("density estimation needs at least 2 samples, got {}", samples.len())));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(Error::Input(format!("bandwidth must be positive, got {h}"))),
        None => {
            let h = silverman_bandwidth(&sorted);
            if h > 0.0 {
                h
            } else {
                // Identical samples: fall back to a kernel narrow relative to their value.
                1e-6 * lo.abs().max(1.0)
            }
        }
    };
    let start = lo - 3.0 * h;
    let step = (hi - lo + 6.0 * h) / (GRID_POINTS - 1) as f64;
    let x: Vec<f64> = (0..GRID_POINTS).map(|i| start + step * i as f64).collect();
    let norm = 1.0 / (sorted.len() as f64 * h * (2.0 * PI).sqrt());
    // Kernels beyond 9 bandwidths contribute below exp(-40) and are skipped.
    let reach = 9.0 * h;
    let density = x
        .iter()
        .map(|&xi| {
            let a = sorted.partition_point(|s| *s < xi - reach);
            let b = sorted.partition_point(|s| *s <= xi + reach);
            sorted[a..b]
                .iter()
                .map(|s| {
                    let u = (xi - s) / h;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    Ok(DensityCurve { x, density, bandwidth: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    #[test]
    fn too_few_samples() {
        assert!(kde(&[1.0], None).is_err());
        assert!(kde(&[], None).is_err());
        assert!(kde(&[1.0, 2.0], Some(0.0)).is_err());
    }

    #[test]
    fn standard_normal_oracle() {
        let s = normals(100_000, 1);
        let d = kde(&s, None).unwrap();
        assert_eq!(d.x.len(), GRID_POINTS);
        let max_err = d
            .x
            .iter()
            .zip(&d.density)
            .map(|(x, f)| (f - (-0.5 * x * x).exp() / (2.0 * PI).sqrt()).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 0.01, "{max_err}");
        assert!((d.integral() - 1.0).abs() < 1e-3);
        assert_eq!(d.local_maxima(1e-3), 1);
    }

    #[test]
    fn single_cluster_peak() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s: Vec<f64> = (0..500).map(|_| 4.2 + 1e-3 * rng.random::<f64>()).collect();
        let d = kde(&s, None).unwrap();
        assert!((d.mode() - 4.2).abs() < 2e-3);
        // Identical samples: the grid covers only +-3 bandwidths of a single kernel.
        let same = kde(&[7.0; 10], None).unwrap();
        assert!((same.mode() - 7.0).abs() < 1e-4);
        assert!((same.integral() - 0.9973).abs() < 1e-4);
    }

    #[test]
    fn bimodal_detected() {
        let mut s = normals(5000, 4);
        s.extend(normals(5000, 5).iter().map(|x| x + 8.0));
        assert_eq!(kde(&s, None).unwrap().local_maxima(1e-3), 2);
    }

    #[test]
    fn moments() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert!((sample_mean(&s) - 2.5).abs() < 1e-15);
        assert!(sample_skewness(&s).abs() < 1e-15);
        assert!(sample_skewness(&[0.0, 0.0, 0.0, 10.0]) > 1.0);
        let s = normals(200_000, 6);
        assert!(sample_skewness(&s).abs() < 0.02);
        let h = silverman_bandwidth(&s);
        assert!((h - 1.06 * 200_000f64.powf(-0.2)).abs() < 0.01);
    }
}
