//! Multiplicative repetition: lowers the rate of a mother code by appending
//! T-1 copies of the codeword, each symbol scaled by its own random nonzero
//! coefficient.
//!
//! The decoder side folds every copy back onto the mother symbol's prior
//! (a degree-1 observation through the inverse coefficient permutation), so
//! belief propagation only runs on the mother graph.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf256::{Field, FieldElement};

use super::SymbolPrior;

#[derive(Clone, Debug)]
pub struct MultiplicativeRepetition {
    factor: usize,
    n: usize,
    // Block t (1-based among the copies) lives at coeffs[(t-1)*n..t*n].
    coeffs: Vec<FieldElement>,
    field: Arc<Field>,
}

impl MultiplicativeRepetition {
    /// Coefficient schedule for a mother code of length `mother_n`, drawn from
    /// `seed`. `factor` = 1 is the identity.
    pub fn new(mother_n: usize, factor: usize, seed: u64, field: Arc<Field>) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Config("repetition factor must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..(factor - 1) * mother_n)
            .map(|_| FieldElement(rng.random_range(1..=255u8)))
            .collect();
        Ok(MultiplicativeRepetition {
            factor,
            n: mother_n,
            coeffs,
            field,
        })
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn mother_len(&self) -> usize {
        self.n
    }

    pub fn extended_len(&self) -> usize {
        self.factor * self.n
    }

    /// r_{t,i}; block 0 is the mother codeword itself (coefficient 1).
    pub fn coefficient(&self, block: usize, i: usize) -> FieldElement {
        if block == 0 {
            FieldElement::ONE
        } else {
            self.coeffs[(block - 1) * self.n + i]
        }
    }

    pub fn extend(&self, mother: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if mother.len() != self.n {
            return Err(Error::Dimension(format!(
                "mother codeword has {} symbols, expected {}",
                mother.len(),
                self.n
            )));
        }
        let mut out = Vec::with_capacity(self.extended_len());
        out.extend_from_slice(mother);
        for block in 1..self.factor {
            out.extend(
                mother
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| self.field.mul(self.coefficient(block, i), c)),
            );
        }
        Ok(out)
    }

    /// Combines priors over the extended word into priors over the mother word:
    /// `p_i(x) ∝ prod_t P_{t,i}(r_{t,i} x)`.
    pub fn fold_priors(&self, priors: &[SymbolPrior]) -> Result<Vec<SymbolPrior>> {
        if priors.len() != self.extended_len() {
            return Err(Error::Dimension(format!(
                "expected {} priors, got {}",
                self.extended_len(),
                priors.len()
            )));
        }
        (0..self.n)
            .map(|i| {
                let mut acc = *priors[i].probs();
                for block in 1..self.factor {
                    let row = self.field.mul_row(self.coefficient(block, i));
                    let copy = priors[block * self.n + i].probs();
                    for (x, a) in acc.iter_mut().enumerate() {
                        *a *= copy[row[x] as usize];
                    }
                    // Keep the running product away from underflow.
                    let s: f64 = acc.iter().sum();
                    if s > 0.0 {
                        acc.iter_mut().for_each(|a| *a /= s);
                    }
                }
                SymbolPrior::from_weights(acc)
            })
            .collect()
    }
}
