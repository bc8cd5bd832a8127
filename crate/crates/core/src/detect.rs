//! Linear detectors with per-stream soft outputs.
//!
//! Every detector returns one [`SoftEstimate`] per transmit stream. The
//! estimate is modelled as `s_hat = scale * s + noise` with Gaussian noise of
//! variance `sigma_sq` per real component, which is what [`soft_output`]
//! turns into constellation likelihoods.

use std::fmt;
use std::str::FromStr;

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mimo::{symbol_point_indices, CMatrix, CVector, Constellation};
use crate::nbldpc::SymbolPrior;
use crate::gf256::{FieldElement, ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    Mf,
    MfSimplified,
    Mmse,
    Zf,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 4] = [Self::Mf, Self::MfSimplified, Self::Mmse, Self::Zf];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mf => "mf",
            Self::MfSimplified => "mf-simplified",
            Self::Mmse => "mmse",
            Self::Zf => "zf",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown detector `{s}` (expected mf, mf-simplified, mmse or zf)")))
    }
}

/// How the MF path obtains its post-detection variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarianceMode {
    /// Interference plus noise power of the realization at hand.
    Exact,
    /// The channel-independent constant 2 sigma_n^2 / Nr.
    Constant,
}

impl VarianceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Constant => "constant",
        }
    }
}

impl fmt::Display for VarianceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VarianceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "constant" => Ok(Self::Constant),
            other => Err(Error::Config(format!("unknown variance mode `{other}` (expected exact or constant)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SoftEstimate {
    pub stream: usize,
    pub s_hat: Complex64,
    /// Effective noise variance around `scale * s` (Delta_k for MF, epsilon_k^2 for MMSE).
    pub sigma_sq: f64,
    /// Gain on the transmitted point: 1 for MF and ZF, mu_k for MMSE.
    pub scale: f64,
}

impl SoftEstimate {
    /// Post-detection SINR (E_s / Nt) * scale^2 / sigma_sq.
    pub fn sinr(&self, total_power: f64, n_tx: usize) -> f64 {
        total_power / n_tx as f64 * self.scale * self.scale / self.sigma_sq
    }
}

fn check_dims(h: &CMatrix, y: &CVector) -> Result<()> {
    if h.nrows() != y.len() {
        return Err(Error::Dimension(format!(
            "received vector has {} entries, channel has {} outputs",
            y.len(),
            h.nrows()
        )));
    }
    if h.ncols() == 0 {
        return Err(Error::Dimension("channel has no inputs".into()));
    }
    Ok(())
}

fn column_norms_sq(h: &CMatrix) -> Result<Vec<f64>> {
    h.column_iter()
        .enumerate()
        .map(|(k, c)| {
            let n = c.norm_squared();
            if n > 0.0 {
                Ok(n)
            } else {
                Err(Error::Singular(format!("channel column {k} is zero")))
            }
        })
        .collect()
}

/// H_k^H y for every column.
fn matched_outputs(h: &CMatrix, y: &CVector) -> CVector {
    h.ad_mul(y)
}

/// Matched filter with W_k = H_k^H / ||H_k||^2 and the exact per-realization
/// variance
/// `(E_s/Nt) * sum_{i != k} |W_k H_i|^2 + 2 sigma_n^2 ||W_k||^2`.
pub fn detect_mf(h: &CMatrix, y: &CVector, total_power: f64, noise_variance: f64) -> Result<Vec<SoftEstimate>> {
    detect_mf_with(h, y, total_power, noise_variance, VarianceMode::Exact)
}

/// Matched filter with a selectable variance model.
pub fn detect_mf_with(
    h: &CMatrix,
    y: &CVector,
    total_power: f64,
    noise_variance: f64,
    mode: VarianceMode,
) -> Result<Vec<SoftEstimate>> {
    check_dims(h, y)?;
    let norms = column_norms_sq(h)?;
    let z = matched_outputs(h, y);
    let nt = h.ncols();
    let nr = h.nrows();
    let variances: Vec<f64> = match mode {
        VarianceMode::Exact => {
            let gram = h.ad_mul(h);
            let ps = total_power / nt as f64;
            (0..nt)
                .map(|k| {
                    let cross: f64 = gram.row(k).iter().map(|g| g.norm_sqr()).sum::<f64>() - norms[k] * norms[k];
                    let w2 = 1.0 / (norms[k] * norms[k]);
                    ps * w2 * cross.max(0.0) + 2.0 * noise_variance / norms[k]
                })
                .collect()
        }
        VarianceMode::Constant => vec![2.0 * noise_variance / nr as f64; nt],
    };
    Ok((0..nt)
        .map(|k| SoftEstimate {
            stream: k,
            s_hat: z[k] / norms[k],
            sigma_sq: variances[k],
            scale: 1.0,
        })
        .collect())
}

/// Matched filter with W_k = H_k^H / Nr and the constant variance 2 sigma_n^2 / Nr.
pub fn detect_mf_simplified(h: &CMatrix, y: &CVector, noise_variance: f64) -> Result<Vec<SoftEstimate>> {
    check_dims(h, y)?;
    let nr = h.nrows() as f64;
    let sigma_sq = 2.0 * noise_variance / nr;
    Ok(matched_outputs(h, y)
        .iter()
        .enumerate()
        .map(|(k, z)| SoftEstimate {
            stream: k,
            s_hat: z / nr,
            sigma_sq,
            scale: 1.0,
        })
        .collect())
}

/// MMSE weights W = (H^H H + alpha I)^{-1} H^H with alpha = N0 Nt / E_s.
pub fn mmse_weights(h: &CMatrix, total_power: f64, noise_variance: f64) -> Result<CMatrix> {
    let nt = h.ncols();
    let alpha = 2.0 * noise_variance * nt as f64 / total_power;
    let mut a = h.ad_mul(h);
    for i in 0..nt {
        a[(i, i)] += alpha;
    }
    let chol = Cholesky::new(a).ok_or_else(|| Error::Singular("regularized Gram matrix is not positive definite".into()))?;
    Ok(chol.solve(&h.adjoint()))
}

/// MMSE detection with per-stream gain mu_k = W_k H_k and variance
/// (E_s/Nt)(mu_k - mu_k^2).
pub fn detect_mmse(h: &CMatrix, y: &CVector, total_power: f64, noise_variance: f64) -> Result<Vec<SoftEstimate>> {
    check_dims(h, y)?;
    let w = mmse_weights(h, total_power, noise_variance)?;
    let s_hat = &w * y;
    let ps = total_power / h.ncols() as f64;
    Ok((0..h.ncols())
        .map(|k| {
            let mu = w.row(k).transpose().dot(&h.column(k));
            debug_assert!(
                mu.im.abs() <= 1e-9 * mu.norm().max(f64::MIN_POSITIVE),
                "mu_{k} has imaginary part {}",
                mu.im
            );
            let m = mu.re;
            SoftEstimate {
                stream: k,
                s_hat: s_hat[k],
                sigma_sq: (ps * (m - m * m)).max(0.0),
                scale: m,
            }
        })
        .collect())
}

/// Zero forcing, (H^H H)^{-1} H^H y.
pub fn detect_zf(h: &CMatrix, y: &CVector) -> Result<Vec<Complex64>> {
    check_dims(h, y)?;
    let chol = zf_factor(h)?;
    Ok(chol.solve(&h.ad_mul(y)).iter().copied().collect())
}

fn zf_factor(h: &CMatrix) -> Result<Cholesky<Complex64, nalgebra::Dyn>> {
    if h.ncols() > h.nrows() {
        return Err(Error::Singular("zero forcing needs Nt <= Nr".into()));
    }
    Cholesky::new(h.ad_mul(h)).ok_or_else(|| Error::Singular("channel does not have full column rank".into()))
}

/// Zero forcing with noise enhancement 2 sigma_n^2 [(H^H H)^{-1}]_kk as variance.
pub fn detect_zf_soft(h: &CMatrix, y: &CVector, noise_variance: f64) -> Result<Vec<SoftEstimate>> {
    check_dims(h, y)?;
    let chol = zf_factor(h)?;
    let s_hat = chol.solve(&h.ad_mul(y));
    let inv = chol.inverse();
    Ok((0..h.ncols())
        .map(|k| SoftEstimate {
            stream: k,
            s_hat: s_hat[k],
            sigma_sq: 2.0 * noise_variance * inv[(k, k)].re,
            scale: 1.0,
        })
        .collect())
}

/// Runs any detector. `mode` only affects [`DetectorKind::Mf`].
pub fn detect(
    kind: DetectorKind,
    mode: VarianceMode,
    h: &CMatrix,
    y: &CVector,
    total_power: f64,
    noise_variance: f64,
) -> Result<Vec<SoftEstimate>> {
    match kind {
        DetectorKind::Mf => detect_mf_with(h, y, total_power, noise_variance, mode),
        DetectorKind::MfSimplified => detect_mf_simplified(h, y, noise_variance),
        DetectorKind::Mmse => detect_mmse(h, y, total_power, noise_variance),
        DetectorKind::Zf => detect_zf_soft(h, y, noise_variance),
    }
}

/// Normalized likelihoods over constellation points.
#[derive(Clone, Debug, PartialEq)]
pub struct LikelihoodVector {
    values: Vec<f64>,
}

impl LikelihoodVector {
    /// Normalizes nonnegative weights to sum 1.
    pub fn from_weights(mut values: Vec<f64>) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        if values.iter().any(|v| !(*v >= 0.0)) || !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::Input("likelihoods must be nonnegative with a positive finite sum".into()));
        }
        values.iter_mut().for_each(|v| *v /= sum);
        Ok(LikelihoodVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the largest value, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }
}

/// Likelihoods exp(-|s_hat - scale * a * s|^2 / (2 sigma^2)) over the
/// constellation, computed relative to the nearest point and normalized.
pub fn soft_output(est: &SoftEstimate, constellation: &Constellation, amplitude: f64) -> Result<LikelihoodVector> {
    if !(est.sigma_sq > 0.0) || !est.sigma_sq.is_finite() {
        return Err(Error::Input(format!("soft output needs a positive variance, got {}", est.sigma_sq)));
    }
    let c = est.scale * amplitude;
    let d: Vec<f64> = constellation.points().iter().map(|p| (est.s_hat - p * c).norm_sqr()).collect();
    let d_min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let inv = 1.0 / (2.0 * est.sigma_sq);
    LikelihoodVector::from_weights(d.iter().map(|x| (-(x - d_min) * inv).exp()).collect())
}

/// Combines q per-point likelihood vectors into one prior per field symbol.
///
/// `likelihoods[j * q + t]` belongs to the t-th point of symbol j, the same
/// order the mapper uses.
pub fn likelihoods_to_symbol_priors(likelihoods: &[LikelihoodVector], bits_per_point: u32) -> Result<Vec<SymbolPrior>> {
    if bits_per_point == 0 || 8 % bits_per_point != 0 {
        return Err(Error::Config(format!("{bits_per_point} bits per point does not divide 8")));
    }
    let q = (8 / bits_per_point) as usize;
    let m = 1usize << bits_per_point;
    if likelihoods.len() % q != 0 {
        return Err(Error::Dimension(format!(
            "{} likelihood vectors is not a multiple of q = {q}",
            likelihoods.len()
        )));
    }
    if let Some(bad) = likelihoods.iter().find(|l| l.len() != m) {
        return Err(Error::Dimension(format!(
            "likelihood vector has {} entries, constellation has {m}",
            bad.len()
        )));
    }
    likelihoods
        .chunks(q)
        .map(|group| {
            let mut w = [0.0f64; ORDER];
            for (v, slot) in w.iter_mut().enumerate() {
                *slot = symbol_point_indices(FieldElement(v as u8), bits_per_point)
                    .zip(group)
                    .map(|(idx, l)| l.values()[idx])
                    .product();
            }
            SymbolPrior::from_weights(w)
        })
        .collect()
}

/// Nearest point of the scaled constellation, lowest index on ties.
pub fn hard_slice(estimate: Complex64, constellation: &Constellation, amplitude: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in constellation.points().iter().enumerate() {
        let d = (estimate - p * amplitude).norm_sqr();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Slices a soft estimate after removing its gain.
pub fn slice_estimate(est: &SoftEstimate, constellation: &Constellation, amplitude: f64) -> usize {
    hard_slice(est.s_hat, constellation, amplitude * est.scale)
}
