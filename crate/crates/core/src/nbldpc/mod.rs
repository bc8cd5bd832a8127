//! Non-binary LDPC codes over GF(256): construction, systematic encoding,
//! multiplicative repetition and FFT-based belief-propagation decoding.

pub mod code;
pub mod decoder;
pub mod encoder;
pub mod repetition;
pub mod wht;

use std::sync::Arc;

pub use code::{build_regular_code, build_regular_code_with_field, CheckEntry, SparseParityCheck};
pub use decoder::{
    check_node_update, decode_fft_bp, DecodeResult, FftBpDecoder, DEFAULT_MAX_ITERATIONS, MESSAGE_FLOOR,
};
pub use encoder::{encode, Codeword, Encoder};
pub use repetition::MultiplicativeRepetition;
pub use wht::{fwht_in_place, wht256};

use crate::error::{Error, Result};
use crate::gf256::{FieldElement, ORDER};

/// Probability distribution over the 256 values of one coded symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPrior {
    probs: [f64; ORDER],
}

impl SymbolPrior {
    /// Normalizes nonnegative weights. All-zero, negative or non-finite
    /// weights cannot be normalized and are rejected.
    pub fn from_weights(weights: [f64; ORDER]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Input("prior weights must be finite and nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Err(Error::Input("prior weights sum to zero".into()));
        }
        let mut probs = weights;
        probs.iter_mut().for_each(|p| *p /= sum);
        Ok(SymbolPrior { probs })
    }

    pub fn uniform() -> Self {
        SymbolPrior {
            probs: [1.0 / ORDER as f64; ORDER],
        }
    }

    pub fn delta(value: FieldElement) -> Self {
        let mut probs = [0.0; ORDER];
        probs[value.0 as usize] = 1.0;
        SymbolPrior { probs }
    }

    /// Probability `p` on `value`, the rest spread evenly.
    pub fn confident(value: FieldElement, p: f64) -> Self {
        let mut probs = [(1.0 - p) / (ORDER - 1) as f64; ORDER];
        probs[value.0 as usize] = p;
        SymbolPrior { probs }
    }

    pub fn probs(&self) -> &[f64; ORDER] {
        &self.probs
    }

    /// Most likely value; ties go to the lowest value.
    pub fn argmax(&self) -> FieldElement {
        FieldElement(argmax(&self.probs).0 as u8)
    }
}

/// Index of the largest entry (lowest index on ties) and whether it is unique.
pub(crate) fn argmax(v: &[f64; ORDER]) -> (usize, bool) {
    let mut best = 0;
    let mut unique = true;
    for i in 1..ORDER {
        if v[i] > v[best] {
            best = i;
            unique = true;
        } else if v[i] == v[best] {
            unique = false;
        }
    }
    (best, unique)
}

/// A mother code with its encoder and an optional repetition extension: the
/// complete channel codec used by the coded link.
#[derive(Clone, Debug)]
pub struct Codec {
    code: Arc<SparseParityCheck>,
    encoder: Encoder,
    repetition: MultiplicativeRepetition,
    max_iterations: usize,
}

impl Codec {
    pub fn new(code: SparseParityCheck, repetition_factor: usize, repetition_seed: u64) -> Result<Self> {
        let encoder = Encoder::new(&code)?;
        let repetition =
            MultiplicativeRepetition::new(code.n(), repetition_factor, repetition_seed, code.field().clone())?;
        Ok(Codec {
            code: Arc::new(code),
            encoder,
            repetition,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        })
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn code(&self) -> &SparseParityCheck {
        &self.code
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn repetition(&self) -> &MultiplicativeRepetition {
        &self.repetition
    }

    /// Information symbols per frame.
    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    /// Transmitted symbols per frame (after repetition).
    pub fn transmitted_len(&self) -> usize {
        self.repetition.extended_len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.transmitted_len() as f64
    }

    /// Encodes and extends one frame of information symbols.
    pub fn encode(&self, info: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let cw = self.encoder.encode(info)?;
        self.repetition.extend(cw.symbols())
    }

    /// Folds the repeated observations and runs FFT-BP on the mother code.
    pub fn decode(&self, priors: &[SymbolPrior]) -> Result<DecodeResult> {
        let folded = self.repetition.fold_priors(priors)?;
        decode_fft_bp(&self.code, &folded, self.max_iterations)
    }

    pub fn extract_info(&self, decided: &[FieldElement]) -> Vec<FieldElement> {
        self.encoder.extract_info(decided)
    }
}
