//! Flop accounting for the MF and MMSE soft-output detectors.
//!
//! One flop is one complex floating-point operation with the costs in
//! [`FlopModel`]. The closed forms below are evaluated in integer arithmetic
//! (the 5.5 and 1.5 coefficients are carried as halves).

use num_complex::Complex64;

use crate::detect::{self, DetectorKind, LikelihoodVector, SoftEstimate};
use crate::error::{Error, Result};
use crate::mimo::{CMatrix, CVector, Constellation};

/// Per-operation costs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlopModel {
    pub real_mul: u64,
    pub complex_mul: u64,
    pub real_add: u64,
    pub complex_add: u64,
    pub exponential: u64,
}

impl FlopModel {
    pub const STANDARD: FlopModel = FlopModel {
        real_mul: 1,
        complex_mul: 3,
        real_add: 1,
        complex_add: 1,
        exponential: 50,
    };

    /// c^H d for vectors of length n.
    pub fn inner_product(&self, n: u64) -> u64 {
        4 * n - 1
    }

    /// Scalar times a vector of length n.
    pub fn scalar_vector(&self, n: u64) -> u64 {
        n
    }
}

impl Default for FlopModel {
    fn default() -> Self {
        Self::STANDARD
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlopCount {
    pub detection: u64,
    pub soft_output: u64,
}

impl FlopCount {
    pub fn total(&self) -> u64 {
        self.detection + self.soft_output
    }
}

fn check_args(nr: u64, m: u64) -> Result<()> {
    if nr == 0 || m < 2 {
        return Err(Error::Config(format!("flop model needs Nr >= 1 and M >= 2, got Nr = {nr}, M = {m}")));
    }
    Ok(())
}

/// Proposed MF detector: 5 Nr^2 - Nr for detection, 55 M Nr for soft output.
pub fn flops_mf(nr: u64, m: u64) -> Result<FlopCount> {
    check_args(nr, m)?;
    Ok(FlopCount {
        detection: 5 * nr * nr - nr,
        soft_output: 55 * m * nr,
    })
}

/// MMSE detector: 10 Nr^3 + 5.5 Nr^2 + 1.5 Nr for detection,
/// 4 M Nr^2 + 58 M for soft output.
pub fn flops_mmse(nr: u64, m: u64) -> Result<FlopCount> {
    check_args(nr, m)?;
    Ok(FlopCount {
        detection: (20 * nr * nr * nr + 11 * nr * nr + 3 * nr) / 2,
        soft_output: 4 * m * nr * nr + 58 * m,
    })
}

/// Arithmetic wrappers that perform an operation and charge its cost.
#[derive(Clone, Debug, Default)]
pub struct FlopCounter {
    model: FlopModel,
    flops: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn flops(&self) -> u64 {
        self.flops
    }

    pub fn reset(&mut self) {
        self.flops = 0;
    }

    /// Charges a cost directly, for steps scored as a whole.
    pub fn charge(&mut self, flops: u64) {
        self.flops += flops;
    }

    pub fn real_mul(&mut self, a: f64, b: f64) -> f64 {
        self.flops += self.model.real_mul;
        a * b
    }

    pub fn real_add(&mut self, a: f64, b: f64) -> f64 {
        self.flops += self.model.real_add;
        a + b
    }

    pub fn complex_mul(&mut self, a: Complex64, b: Complex64) -> Complex64 {
        self.flops += self.model.complex_mul;
        a * b
    }

    pub fn complex_sub(&mut self, a: Complex64, b: Complex64) -> Complex64 {
        self.flops += self.model.complex_add;
        a - b
    }

    /// Real constant times a real value, charged like a complex product.
    pub fn mul_constant(&mut self, c: f64, x: f64) -> f64 {
        self.flops += self.model.complex_mul;
        c * x
    }

    /// |z|^2, one flop.
    pub fn sq_norm(&mut self, z: Complex64) -> f64 {
        self.flops += 1;
        z.norm_sqr()
    }

    pub fn exp(&mut self, x: f64) -> f64 {
        self.flops += self.model.exponential;
        x.exp()
    }

    /// c^H d.
    pub fn inner_product<'a>(
        &mut self,
        c: impl ExactSizeIterator<Item = &'a Complex64>,
        d: impl Iterator<Item = &'a Complex64>,
    ) -> Complex64 {
        self.flops += self.model.inner_product(c.len() as u64);
        c.zip(d).map(|(a, b)| a.conj() * b).sum()
    }

    /// Plain row-times-column product, same cost as an inner product.
    pub fn dot<'a>(
        &mut self,
        c: impl ExactSizeIterator<Item = &'a Complex64>,
        d: impl Iterator<Item = &'a Complex64>,
    ) -> Complex64 {
        self.flops += self.model.inner_product(c.len() as u64);
        c.zip(d).map(|(a, b)| a * b).sum()
    }

    pub fn scalar_vector<'a>(&mut self, a: f64, v: impl ExactSizeIterator<Item = &'a Complex64>) -> Vec<Complex64> {
        self.flops += self.model.scalar_vector(v.len() as u64);
        v.map(|z| z * a).collect()
    }
}

/// Detector output with the flops charged for it.
#[derive(Clone, Debug)]
pub struct CountedDetection {
    pub estimates: Vec<SoftEstimate>,
    pub likelihoods: Vec<LikelihoodVector>,
    pub flops: FlopCount,
}

/// Runs a detector and soft-output stage on instrumented arithmetic.
///
/// MF and simplified MF follow the two-step sequence (weight vector, then
/// inner product with y) and the four-step soft output per level. The MF
/// column norm is channel state precomputed once per realization and the
/// constant variance 2 sigma_n^2 / Nr is precomputed per SNR; neither is
/// charged. For MMSE the weight computation is charged as the
/// inversion-based procedure of [`flops_mmse`] while the numerics use a
/// Cholesky solve. The MMSE soft output (mu_k, epsilon_k^2, then the
/// centred likelihoods) is counted operation by operation.
pub fn counted_detect(
    kind: DetectorKind,
    h: &CMatrix,
    y: &CVector,
    total_power: f64,
    noise_variance: f64,
    constellation: &Constellation,
) -> Result<CountedDetection> {
    if h.nrows() != y.len() {
        return Err(Error::Dimension("received vector length differs from Nr".into()));
    }
    let nr = h.nrows();
    let nt = h.ncols();
    let amplitude = (total_power / nt as f64).sqrt();
    let points: Vec<Complex64> = constellation.points().iter().map(|p| p * amplitude).collect();
    let mut ctr = FlopCounter::new();
    let mut estimates = Vec::with_capacity(nt);
    let detection;

    match kind {
        DetectorKind::Mf | DetectorKind::MfSimplified => {
            let sigma_sq = 2.0 * noise_variance / nr as f64;
            for k in 0..nt {
                let col = h.column(k);
                let c = match kind {
                    DetectorKind::Mf => {
                        let n = col.norm_squared();
                        if n == 0.0 {
                            return Err(Error::Singular(format!("channel column {k} is zero")));
                        }
                        1.0 / n
                    }
                    _ => 1.0 / nr as f64,
                };
                let w = ctr.scalar_vector(c, col.iter());
                let s_hat = ctr.inner_product(w.iter(), y.iter());
                estimates.push(SoftEstimate { stream: k, s_hat, sigma_sq, scale: 1.0 });
            }
            detection = ctr.flops();
        }
        DetectorKind::Mmse => {
            ctr.charge(flops_mmse(nr as u64, constellation.size() as u64)?.detection);
            detection = ctr.flops();
            let w = detect::mmse_weights(h, total_power, noise_variance)?;
            let s_hat = &w * y;
            let ps = total_power / nt as f64;
            for k in 0..nt {
                let row: Vec<Complex64> = w.row(k).iter().copied().collect();
                let mu = ctr.dot(row.iter(), h.column(k).iter()).re;
                // (E_s/Nt) * (mu - mu^2): one product, one subtraction, one scaling.
                let mu2 = ctr.real_mul(mu, mu);
                let diff = ctr.real_add(mu, -mu2);
                let eps = ctr.real_mul(ps, diff);
                estimates.push(SoftEstimate { stream: k, s_hat: s_hat[k], sigma_sq: eps.max(0.0), scale: mu });
            }
        }
        DetectorKind::Zf => {
            return Err(Error::Config("no flop accounting is defined for zero forcing".into()));
        }
    }

    let mut likelihoods = Vec::with_capacity(nt);
    for est in &estimates {
        if !(est.sigma_sq > 0.0) {
            return Err(Error::Input(format!("soft output needs a positive variance, got {}", est.sigma_sq)));
        }
        let neg_inv = -1.0 / (2.0 * est.sigma_sq);
        let mut exponents = Vec::with_capacity(points.len());
        for p in &points {
            let centre = if kind == DetectorKind::Mmse {
                ctr.complex_mul(Complex64::new(est.scale, 0.0), *p)
            } else {
                *p
            };
            let diff = ctr.complex_sub(est.s_hat, centre);
            let d = ctr.sq_norm(diff);
            exponents.push(ctr.mul_constant(neg_inv, d));
        }
        // Shifting by the largest exponent is part of normalization, which is not scored.
        let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let values = exponents.iter().map(|e| ctr.exp(e - top)).collect();
        likelihoods.push(LikelihoodVector::from_weights(values)?);
    }
    let soft_output = ctr.flops() - detection;
    Ok(CountedDetection {
        estimates,
        likelihoods,
        flops: FlopCount { detection, soft_output },
    })
}
