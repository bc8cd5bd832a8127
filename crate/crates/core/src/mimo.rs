//! System model: constellations, antenna mapping of GF(256) symbols,
//! i.i.d. Rayleigh channels with AWGN, SNR convention and ergodic capacity.
//!
//! SNR is per receive antenna with `N0 / 2 = sigma_n^2` (noise variance per
//! real component), so `gamma = E_s / (2 sigma_n^2)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gf256::FieldElement;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// A unit-average-energy constellation of M = 2^p points. Point `i` carries
/// the p-bit pattern `i`, most significant bit first.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    bits_per_symbol: u32,
}

impl Constellation {
    pub fn new(name: impl Into<String>, points: Vec<Complex64>) -> Result<Self> {
        let m = points.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::Config(format!("constellation size {m} is not a power of two >= 2")));
        }
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
        if (energy - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("constellation mean energy is {energy}, expected 1")));
        }
        Ok(Constellation {
            name: name.into(),
            bits_per_symbol: m.trailing_zeros(),
            points,
        })
    }

    /// Bit 0 -> +1, bit 1 -> -1.
    pub fn bpsk() -> Self {
        Self::new("bpsk", vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]).expect("valid")
    }

    /// Gray QPSK: first bit picks the in-phase sign, second the quadrature sign.
    pub fn qpsk() -> Self {
        let pts = (0..4)
            .map(|i| {
                let re = if i & 2 == 0 { 1.0 } else { -1.0 };
                let im = if i & 1 == 0 { 1.0 } else { -1.0 };
                Complex64::new(re, im) * FRAC_1_SQRT_2
            })
            .collect();
        Self::new("qpsk", pts).expect("valid")
    }

    /// Gray 16-QAM: two bits per rail, levels -3,-1,+1,+3 for 00,01,11,10.
    pub fn qam16() -> Self {
        let level = |b: usize| match b {
            0b00 => -3.0,
            0b01 => -1.0,
            0b11 => 1.0,
            _ => 3.0,
        };
        let scale = 1.0 / 10f64.sqrt();
        let pts = (0..16)
            .map(|i| Complex64::new(level(i >> 2), level(i & 3)) * scale)
            .collect();
        Self::new("16qam", pts).expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }
}

impl FromStr for Constellation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Self::bpsk()),
            "qpsk" => Ok(Self::qpsk()),
            "16qam" | "qam16" => Ok(Self::qam16()),
            other => Err(Error::Config(format!(
                "unknown modulation `{other}` (expected bpsk, qpsk or 16qam)"
            ))),
        }
    }
}

impl fmt::Display for Constellation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Antenna counts, power, modulation and code rate of one link.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkConfig {
    n_tx: usize,
    n_rx: usize,
    total_power: f64,
    constellation: Constellation,
    code_rate: f64,
}

impl LinkConfig {
    pub fn new(n_tx: usize, n_rx: usize, total_power: f64, constellation: Constellation, code_rate: f64) -> Result<Self> {
        if n_tx == 0 || n_rx == 0 {
            return Err(Error::Config("antenna counts must be positive".into()));
        }
        if !(total_power > 0.0) || !total_power.is_finite() {
            return Err(Error::Config(format!("total power must be positive, got {total_power}")));
        }
        if !(code_rate > 0.0 && code_rate <= 1.0) {
            return Err(Error::Config(format!("code rate must lie in (0, 1], got {code_rate}")));
        }
        let p = constellation.bits_per_symbol() as usize;
        if 8 % p != 0 {
            return Err(Error::Config(format!(
                "{p} bits per point does not divide the 8 bits of a field symbol"
            )));
        }
        Ok(LinkConfig {
            n_tx,
            n_rx,
            total_power,
            constellation,
            code_rate,
        })
    }

    /// Uncoded BPSK link with unit total power.
    pub fn bpsk(n_tx: usize, n_rx: usize) -> Result<Self> {
        Self::new(n_tx, n_rx, 1.0, Constellation::bpsk(), 1.0)
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn code_rate(&self) -> f64 {
        self.code_rate
    }

    pub fn with_code_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Config(format!("code rate must lie in (0, 1], got {rate}")));
        }
        self.code_rate = rate;
        Ok(self)
    }

    /// Constellation points per field symbol, q = 8 / p.
    pub fn points_per_symbol(&self) -> usize {
        8 / self.constellation.bits_per_symbol() as usize
    }

    /// Field symbols per channel use, K_t = Nt / q. Carrying field symbols
    /// needs Nt to be a multiple of q; uncoded links do not.
    pub fn symbols_per_use(&self) -> Result<usize> {
        let q = self.points_per_symbol();
        if self.n_tx % q != 0 {
            return Err(Error::Config(format!(
                "Nt = {} is not a multiple of q = {q} points per field symbol",
                self.n_tx
            )));
        }
        Ok(self.n_tx / q)
    }

    /// Per-antenna amplitude sqrt(E_s / Nt).
    pub fn amplitude(&self) -> f64 {
        (self.total_power / self.n_tx as f64).sqrt()
    }

    /// Channel uses needed for `n_symbols` field symbols, ceil(N / K_t).
    pub fn channel_uses(&self, n_symbols: usize) -> Result<usize> {
        Ok(n_symbols.div_ceil(self.symbols_per_use()?))
    }

    pub fn spectral_efficiency(&self) -> f64 {
        spectral_efficiency(self.constellation.bits_per_symbol(), self.code_rate, self.n_tx)
    }
}

/// Noise variance per real component for SNR `gamma_db` per receive antenna.
pub fn snr_to_noise_variance(gamma_db: f64, total_power: f64) -> f64 {
    total_power / (2.0 * db_to_linear(gamma_db))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Net rate p * R * Nt in bps/Hz.
pub fn spectral_efficiency(bits_per_symbol: u32, code_rate: f64, n_tx: usize) -> f64 {
    bits_per_symbol as f64 * code_rate * n_tx as f64
}

/// Constellation indices for the q points that carry field symbol `v`,
/// most significant bits first.
pub fn symbol_point_indices(v: FieldElement, bits_per_symbol: u32) -> impl Iterator<Item = usize> {
    let p = bits_per_symbol;
    let q = 8 / p;
    let mask = (1u32 << p) - 1;
    (0..q).map(move |j| ((v.0 as u32 >> (8 - p * (j + 1))) & mask) as usize)
}

/// Maps a coded word onto transmit vectors.
///
/// Symbol j occupies antennas `(j mod K_t) * q ..` of channel use
/// `j / K_t`. Unused antennas of the final vector send bit-0 padding points.
pub fn map_codeword_to_signals(symbols: &[FieldElement], config: &LinkConfig) -> Result<Vec<CVector>> {
    let c = config.constellation();
    let a = config.amplitude();
    let q = config.points_per_symbol();
    let kt = config.symbols_per_use()?;
    let uses = config.channel_uses(symbols.len())?;
    let pad = c.points()[0] * a;
    let mut out = vec![CVector::from_element(config.n_tx(), pad); uses];
    for (j, &v) in symbols.iter().enumerate() {
        let (u, slot) = (j / kt, j % kt);
        for (t, idx) in symbol_point_indices(v, c.bits_per_symbol()).enumerate() {
            out[u][slot * q + t] = c.points()[idx] * a;
        }
    }
    Ok(out)
}

/// Nearest-point demapping of noiseless (or equalized) transmit vectors back
/// to `n_symbols` field symbols; padding is skipped.
pub fn demap_signals(signals: &[CVector], n_symbols: usize, config: &LinkConfig) -> Result<Vec<FieldElement>> {
    let c = config.constellation();
    let a = config.amplitude();
    let q = config.points_per_symbol();
    let kt = config.symbols_per_use()?;
    if signals.len() < config.channel_uses(n_symbols)? {
        return Err(Error::Dimension(format!(
            "{} channel uses cannot hold {n_symbols} symbols",
            signals.len()
        )));
    }
    let p = c.bits_per_symbol();
    (0..n_symbols)
        .map(|j| {
            let (u, slot) = (j / kt, j % kt);
            let s = &signals[u];
            if s.len() != config.n_tx() {
                return Err(Error::Dimension("transmit vector length differs from Nt".into()));
            }
            let mut v: u32 = 0;
            for t in 0..q {
                let idx = crate::detect::hard_slice(s[slot * q + t], c, a);
                v = (v << p) | idx as u32;
            }
            Ok(FieldElement(v as u8))
        })
        .collect()
}

/// One circularly-symmetric complex Gaussian sample with the given variance
/// per real component.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var_per_real: f64) -> Complex64 {
    let sd = var_per_real.sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sd, im * sd)
}

/// A channel matrix together with the noise variance in effect.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub h: CMatrix,
    /// Noise variance per real component, sigma_n^2.
    pub noise_variance: f64,
}

impl ChannelRealization {
    pub fn new(h: CMatrix, noise_variance: f64) -> Result<Self> {
        if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
            return Err(Error::Config(format!("noise variance must be >= 0, got {noise_variance}")));
        }
        Ok(ChannelRealization { h, noise_variance })
    }

    pub fn n_rx(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.h.ncols()
    }

    /// y = H s + n.
    pub fn apply<R: Rng + ?Sized>(&self, s: &CVector, rng: &mut R) -> Result<CVector> {
        if s.len() != self.n_tx() {
            return Err(Error::Dimension(format!(
                "transmit vector has {} entries, channel has {} inputs",
                s.len(),
                self.n_tx()
            )));
        }
        let mut y = &self.h * s;
        // Noise is always drawn so that random streams stay aligned across SNRs.
        for v in y.iter_mut() {
            *v += complex_gaussian(rng, self.noise_variance);
        }
        Ok(y)
    }
}

/// Fresh i.i.d. CN(0, 1) channel (variance 1/2 per real component).
pub fn generate_channel<R: Rng + ?Sized>(config: &LinkConfig, noise_variance: f64, rng: &mut R) -> ChannelRealization {
    ChannelRealization {
        h: rayleigh_matrix(config.n_rx(), config.n_tx(), rng),
        noise_variance,
    }
}

pub fn rayleigh_matrix<R: Rng + ?Sized>(n_rx: usize, n_tx: usize, rng: &mut R) -> CMatrix {
    // Column-major fill, so column k is drawn contiguously.
    CMatrix::from_fn(n_rx, n_tx, |_, _| complex_gaussian(rng, 0.5))
}

/// Unfaded channel: ones on the main diagonal.
pub fn identity_channel(config: &LinkConfig, noise_variance: f64) -> ChannelRealization {
    ChannelRealization {
        h: CMatrix::identity(config.n_rx(), config.n_tx()),
        noise_variance,
    }
}

pub fn apply_channel<R: Rng + ?Sized>(ch: &ChannelRealization, s: &CVector, rng: &mut R) -> Result<CVector> {
    ch.apply(s, rng)
}

/// Eigenvalues of the smaller Gram matrix (H^H H or H H^H), all >= 0.
pub fn gram_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let gram = if h.ncols() <= h.nrows() { h.ad_mul(h) } else { h * h.adjoint() };
    SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0))
        .collect()
}

/// log2 det(I + (gamma / Nt) H H^H) from Gram eigenvalues.
pub fn capacity_from_eigenvalues(eigenvalues: &[f64], n_tx: usize, gamma_linear: f64) -> f64 {
    let c = gamma_linear / n_tx as f64;
    eigenvalues.iter().map(|l| (1.0 + c * l).log2()).sum()
}

/// Mutual information of one fixed channel matrix at SNR `gamma_db`.
pub fn capacity_of(h: &CMatrix, gamma_db: f64) -> f64 {
    capacity_from_eigenvalues(&gram_eigenvalues(h), h.ncols(), db_to_linear(gamma_db))
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

impl CapacityEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        CapacityEstimate { mean, std_err, trials: n }
    }
}

/// Ergodic capacity E[log2 det(I + (gamma/Nt) H H^H)] over i.i.d. Rayleigh H.
pub fn ergodic_capacity<R: Rng + ?Sized>(
    n_tx: usize,
    n_rx: usize,
    gamma_db: f64,
    n_trials: usize,
    rng: &mut R,
) -> Result<CapacityEstimate> {
    Ok(ergodic_capacity_curve(n_tx, n_rx, &[gamma_db], n_trials, rng)?[0])
}

/// Capacity at several SNRs from one shared set of channel draws.
pub fn ergodic_capacity_curve<R: Rng + ?Sized>(
    n_tx: usize,
    n_rx: usize,
    gammas_db: &[f64],
    n_trials: usize,
    rng: &mut R,
) -> Result<Vec<CapacityEstimate>> {
    if n_trials == 0 {
        return Err(Error::Config("capacity needs at least one trial".into()));
    }
    let mut samples = vec![Vec::with_capacity(n_trials); gammas_db.len()];
    for _ in 0..n_trials {
        let eig = gram_eigenvalues(&rayleigh_matrix(n_rx, n_tx, rng));
        for (g, s) in gammas_db.iter().zip(samples.iter_mut()) {
            s.push(capacity_from_eigenvalues(&eig, n_tx, db_to_linear(*g)));
        }
    }
    Ok(samples.iter().map(|s| CapacityEstimate::from_samples(s)).collect())
}
